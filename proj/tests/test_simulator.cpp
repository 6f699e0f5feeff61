#include <cmath>

#include <gtest/gtest.h>

#include "cda/equilibrium.hpp"
#include "cda/error.hpp"
#include "cda/simulator.hpp"

using namespace cda;

namespace {
const Market kUniform = Market::linear(0, 1, 1, 1);
const Market kSteep = Market::linear(0.1, 0.7, 0.55, 0.05);
}  // namespace

TEST(Simulator, SplitSeedDiffersAcrossRuns) {
  EXPECT_NE(split_seed(1, 0), split_seed(1, 1));
  EXPECT_NE(split_seed(1, 0), split_seed(2, 0));
  EXPECT_EQ(split_seed(5, 9), split_seed(5, 9));
}

TEST(Simulator, ScriptedAuctionTradesAtStandingQuote) {
  // Constant profiles: every seller asks 0.4, every buyer bids 0.6.
  auto s = StrategyProfile::constant(Side::Seller, 0, 1, 0.4);
  auto b = StrategyProfile::constant(Side::Buyer, 0, 1, 0.6);
  std::mt19937_64 rng(3);
  Outcome o = run_auction_scripted(kUniform, s, b, {Side::Seller, Side::Seller, Side::Buyer}, rng);
  EXPECT_DOUBLE_EQ(o.t, 0.4);
  EXPECT_EQ(o.price_maker, Side::Seller);
  EXPECT_EQ(o.tau, 3u);
  o = run_auction_scripted(kUniform, s, b, {Side::Buyer, Side::Seller}, rng);
  EXPECT_DOUBLE_EQ(o.t, 0.6);
  EXPECT_EQ(o.price_maker, Side::Buyer);
  EXPECT_THROW(run_auction_scripted(kUniform, s, b, {Side::Buyer, Side::Buyer}, rng), NonTermination);
}

TEST(Simulator, StepCapRaisesNonTermination) {
  auto s = StrategyProfile::constant(Side::Seller, 0, 1, 0.9);
  auto b = StrategyProfile::constant(Side::Buyer, 0, 1, 0.1);
  std::mt19937_64 rng(1);
  AuctionOptions o;
  o.step_cap = 1000;
  EXPECT_THROW(run_auction(kUniform, s, b, rng, o), NonTermination);
}

TEST(Simulator, DeterministicAcrossWorkerCounts) {
  auto s = StrategyProfile::zic(Side::Seller), b = StrategyProfile::zic(Side::Buyer);
  MonteCarloOptions o;
  o.runs = 4000;
  o.seed = 11;
  o.workers = 1;
  auto one = monte_carlo(kSteep, s, b, o);
  o.workers = 3;
  auto three = monte_carlo(kSteep, s, b, o);
  EXPECT_EQ(one.prices, three.prices);
  EXPECT_EQ(one.mean_price, three.mean_price);
}

TEST(Simulator, ZicSteepSupplyMeanAndKs) {
  auto s = StrategyProfile::zic(Side::Seller), b = StrategyProfile::zic(Side::Buyer);
  MonteCarloOptions o;
  o.runs = 20000;
  o.seed = 7;
  o.workers = 2;
  o.analytic = induced_distributions(kSteep, s, b);
  auto r = monte_carlo(kSteep, s, b, o);
  EXPECT_NEAR(r.mean_price, 0.4385, 0.005);
  ASSERT_TRUE(r.ks.has_value());
  EXPECT_LT(*r.ks, 0.02);
  EXPECT_TRUE(std::is_sorted(r.prices.begin(), r.prices.end()));
}

TEST(Simulator, OnePriceProfitsSplitEvenly) {
  auto op = one_price_profile(kUniform, 0.5);
  MonteCarloOptions o;
  o.runs = 20000;
  auto r = monte_carlo(kUniform, op.sellers, op.buyers, o);
  EXPECT_NEAR(r.mean_price, 0.5, 1e-12);
  EXPECT_NEAR(r.mean_seller_profit, 0.25, 4 * r.seller_profit_stderr);
  EXPECT_NEAR(r.mean_buyer_profit, 0.25, 4 * r.buyer_profit_stderr);
}

TEST(Simulator, FiniteTradersStillTrade) {
  auto sol = solve_linear_bne(kUniform);
  MonteCarloOptions o;
  o.runs = 2000;
  o.auction.finite_traders = 50;
  auto r = monte_carlo(kUniform, *sol.sellers, *sol.buyers, o);
  EXPECT_NEAR(r.mean_price, 0.5, 0.02);
}

TEST(Simulator, BranchProbeMatchesPayoff) {
  auto sol = solve_linear_bne(kUniform);
  ProbeOptions o;
  o.runs = 20000;
  o.workers = 2;
  auto est = probe_deviation(kUniform, sol, Side::Buyer, 1.0, {0.65, 0.75}, o);
  EXPECT_NEAR(est[0].estimate, 0.96, 4 * est[0].std_error);
  EXPECT_NEAR(est[1].estimate, 1.0, 4 * est[1].std_error);
}

TEST(Simulator, BinProbeNeedsHits) {
  auto sol = solve_linear_bne(kUniform);
  ProbeOptions o;
  o.runs = 50;
  o.method = ProbeMethod::Bin;
  EXPECT_THROW(probe_deviation(kUniform, sol, Side::Buyer, 1.0, {0.7}, o), InsufficientSamples);
}

TEST(Simulator, KsDistance) {
  std::vector<double> x{0.1, 0.3, 0.5, 0.7, 0.9};
  EXPECT_NEAR(ks_distance(x, [](double t) { return t; }), 0.1, 1e-15);
}
