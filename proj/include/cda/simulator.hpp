#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "cda/equilibrium.hpp"
#include "cda/market.hpp"
#include "cda/strategy.hpp"

namespace cda {

/// splitmix64 finaliser; derives the stream of run `index` from a master seed.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index);

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct AuctionState {
  std::uint64_t tau = 0;
  double max_bid = 0.0;  // X
  double min_ask = 1.0;  // Y
  std::optional<double> bid_holder;  // type of the trader holding X
  std::optional<double> ask_holder;  // type of the trader holding Y
};

struct Outcome {
  double M = 0.0;  // buyer type
  double m = 0.0;  // seller type
  double t = 0.0;  // transaction price
  Side price_maker = Side::Buyer;
  std::uint64_t tau = 0;
};

struct AuctionOptions {
  std::uint64_t step_cap = 1'000'000;
  // When nonzero, N sellers and N buyers are drawn up front and each shouts
  // at most once (sampling without replacement).
  int finite_traders = 0;
};

Outcome run_auction(const Market& mkt, const StrategyProfile& sellers,
                    const StrategyProfile& buyers, std::mt19937_64& rng,
                    const AuctionOptions& opts = {});

/// Same protocol with the side of each step taken from `sides` (types and
/// ZIC shouts still come from rng). Throws NonTermination when the script
/// runs out before a trade.
Outcome run_auction_scripted(const Market& mkt, const StrategyProfile& sellers,
                             const StrategyProfile& buyers, const std::vector<Side>& sides,
                             std::mt19937_64& rng);

struct MonteCarloOptions {
  std::uint64_t runs = 10000;
  std::uint64_t seed = 1;
  int workers = 1;
  int bins = 20;
  AuctionOptions auction;
  // Analytic shout distributions for the KS distance of the price sample.
  std::optional<ShoutDistributions> analytic;
};

struct BinStat {
  double lo = 0.0, hi = 0.0;
  double mean = 0.0;    // profit per auction attributed to types in the bin
  double std_error = 0.0;
};

struct SimSummary {
  std::uint64_t runs = 0;
  std::vector<double> prices;  // sorted
  double mean_price = 0.0;
  double price_stderr = 0.0;
  double mean_tau = 0.0;
  double buyer_maker_fraction = 0.0;
  double mean_seller_profit = 0.0;
  double seller_profit_stderr = 0.0;
  double mean_buyer_profit = 0.0;
  double buyer_profit_stderr = 0.0;
  std::vector<BinStat> seller_bins, buyer_bins;
  std::optional<double> ks;  // sup |F_n - T|
};

SimSummary monte_carlo(const Market& mkt, const StrategyProfile& sellers,
                       const StrategyProfile& buyers, const MonteCarloOptions& opts);

/// KS distance between a sample (sorted in place) and a continuous CDF.
double ks_distance(std::vector<double>& sample, const std::function<double(double)>& cdf);

enum class ProbeMethod {
  Bin,     // traders whose type falls in a bin around v shout x instead
  Branch,  // type-v probe inserted at every step of each run, continuation sampled
};

struct ProbeEstimate {
  double x = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t hits = 0;  // bin draws (Bin) or insertions (Branch)
};

struct ProbeOptions {
  std::uint64_t runs = 100000;
  std::uint64_t seed = 1;
  int workers = 1;
  ProbeMethod method = ProbeMethod::Branch;
  double bin_width = 0.005;
  std::uint64_t min_hits = 100;
};

/// Monte Carlo estimate of the payoff density of a type-v trader who shouts x
/// while everyone else follows the given profiles.
std::vector<ProbeEstimate> probe_deviation(const Market& mkt, const StrategyProfile& sellers,
                                           const StrategyProfile& buyers, Side side, double v,
                                           const std::vector<double>& x_grid,
                                           const ProbeOptions& opts);
std::vector<ProbeEstimate> probe_deviation(const Market& mkt, const EquilibriumSolution& sol,
                                           Side side, double v,
                                           const std::vector<double>& x_grid,
                                           const ProbeOptions& opts);

}  // namespace cda
