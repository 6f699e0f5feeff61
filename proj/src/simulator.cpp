#include "cda/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "cda/error.hpp"

namespace cda {

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

struct Arrival {
  Side side;
  double type;
  double shout;
};

struct Trader {
  const Market& mkt;
  const StrategyProfile& sellers;
  const StrategyProfile& buyers;

  Arrival draw(Side side, std::mt19937_64& rng) const {
    double type = mkt.sample_type(side, uniform01(rng));
    return {side, type, shout(side, type, rng)};
  }
  double shout(Side side, double type, std::mt19937_64& rng) const {
    double u = uniform01(rng);
    return (side == Side::Seller ? sellers : buyers).shout(type, u);
  }
};

Side coin(std::mt19937_64& rng) { return uniform01(rng) < 0.5 ? Side::Seller : Side::Buyer; }

// Applies one shout to the book; returns the trade if one happens.
std::optional<Outcome> apply(AuctionState& st, const Arrival& a) {
  ++st.tau;
  if (a.side == Side::Seller) {
    if (st.bid_holder && a.shout <= st.max_bid)
      return Outcome{*st.bid_holder, a.type, st.max_bid, Side::Buyer, st.tau};
    if (a.shout < st.min_ask) {
      st.min_ask = a.shout;
      st.ask_holder = a.type;
    }
  } else {
    if (st.ask_holder && a.shout >= st.min_ask)
      return Outcome{a.type, *st.ask_holder, st.min_ask, Side::Seller, st.tau};
    if (a.shout > st.max_bid) {
      st.max_bid = a.shout;
      st.bid_holder = a.type;
    }
  }
  return std::nullopt;
}

[[noreturn]] void no_trade(std::uint64_t steps) {
  throw NonTermination("no trade after " + std::to_string(steps) + " shouts");
}

// Runs body(r) for r in [0, n) on `workers` threads. Results must be written
// by index; the exception of the lowest failing index is rethrown.
template <class Body>
void parallel_runs(std::uint64_t n, int workers, Body body) {
  int w = std::max(1, workers);
  if (w == 1 || n < 2) {
    for (std::uint64_t r = 0; r < n; ++r) body(r);
    return;
  }
  std::vector<std::exception_ptr> errors(w);
  std::vector<std::uint64_t> error_at(w, n);
  std::vector<std::thread> pool;
  for (int k = 0; k < w; ++k) {
    pool.emplace_back([&, k] {
      std::uint64_t lo = n * k / w, hi = n * (k + 1) / w;
      for (std::uint64_t r = lo; r < hi; ++r) {
        try {
          body(r);
        } catch (...) {
          errors[k] = std::current_exception();
          error_at[k] = r;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  int first = -1;
  for (int k = 0; k < w; ++k)
    if (errors[k] && (first < 0 || error_at[k] < error_at[first])) first = k;
  if (first >= 0) std::rethrow_exception(errors[first]);
}

struct Moments {
  double sum = 0, sum_sq = 0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
  }
  double mean(double n) const { return sum / n; }
  double stderr_of_mean(double n) const {
    if (n < 2) return 0.0;
    double m = sum / n;
    double var = std::max(0.0, (sum_sq - n * m * m) / (n - 1));
    return std::sqrt(var / n);
  }
};

}  // namespace

Outcome run_auction(const Market& mkt, const StrategyProfile& sellers,
                    const StrategyProfile& buyers, std::mt19937_64& rng,
                    const AuctionOptions& opts) {
  Trader tr{mkt, sellers, buyers};
  AuctionState st;
  if (opts.finite_traders <= 0) {
    while (st.tau < opts.step_cap)
      if (auto o = apply(st, tr.draw(coin(rng), rng))) return *o;
    no_trade(st.tau);
  }

  std::vector<double> pool_s(opts.finite_traders), pool_b(opts.finite_traders);
  for (double& v : pool_s) v = mkt.sample_type(Side::Seller, uniform01(rng));
  for (double& v : pool_b) v = mkt.sample_type(Side::Buyer, uniform01(rng));
  while (st.tau < opts.step_cap && !(pool_s.empty() && pool_b.empty())) {
    Side side = pool_s.empty() ? Side::Buyer : pool_b.empty() ? Side::Seller : coin(rng);
    auto& pool = side == Side::Seller ? pool_s : pool_b;
    std::size_t i = std::min<std::size_t>(pool.size() - 1,
                                          static_cast<std::size_t>(uniform01(rng) * pool.size()));
    double type = pool[i];
    pool[i] = pool.back();
    pool.pop_back();
    if (auto o = apply(st, {side, type, tr.shout(side, type, rng)})) return *o;
  }
  no_trade(st.tau);
}

Outcome run_auction_scripted(const Market& mkt, const StrategyProfile& sellers,
                             const StrategyProfile& buyers, const std::vector<Side>& sides,
                             std::mt19937_64& rng) {
  Trader tr{mkt, sellers, buyers};
  AuctionState st;
  for (Side side : sides)
    if (auto o = apply(st, tr.draw(side, rng))) return *o;
  no_trade(st.tau);
}

double ks_distance(std::vector<double>& sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  double n = static_cast<double>(sample.size()), d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double f = cdf(sample[i]);
    d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
  }
  return d;
}

SimSummary monte_carlo(const Market& mkt, const StrategyProfile& sellers,
                       const StrategyProfile& buyers, const MonteCarloOptions& opts) {
  if (opts.runs == 0) throw OutOfDomain("runs must be positive");
  if (opts.bins < 1) throw OutOfDomain("bins must be positive");
  std::vector<Outcome> out(opts.runs);
  parallel_runs(opts.runs, opts.workers, [&](std::uint64_t r) {
    std::mt19937_64 rng(split_seed(opts.seed, r));
    out[r] = run_auction(mkt, sellers, buyers, rng, opts.auction);
  });

  double n = static_cast<double>(opts.runs);
  SimSummary s;
  s.runs = opts.runs;
  auto make_bins = [&](double lo, double hi) {
    std::vector<BinStat> bins(opts.bins);
    for (int k = 0; k < opts.bins; ++k) {
      bins[k].lo = lo + (hi - lo) * k / opts.bins;
      bins[k].hi = lo + (hi - lo) * (k + 1) / opts.bins;
    }
    return bins;
  };
  s.seller_bins = make_bins(mkt.s_minus(), mkt.s_plus());
  s.buyer_bins = make_bins(mkt.d_minus(), mkt.d_plus());
  auto bin_of = [&](double v, double lo, double hi) {
    if (!(hi > lo)) return 0;
    int k = static_cast<int>(std::floor((v - lo) / (hi - lo) * opts.bins));
    return std::clamp(k, 0, opts.bins - 1);
  };

  Moments price, seller, buyer;
  std::vector<Moments> sb(opts.bins), bb(opts.bins);
  double tau = 0, buyer_makers = 0;
  s.prices.reserve(out.size());
  for (const Outcome& o : out) {
    price.add(o.t);
    seller.add(o.t - o.m);
    buyer.add(o.M - o.t);
    tau += static_cast<double>(o.tau);
    if (o.price_maker == Side::Buyer) buyer_makers += 1;
    s.prices.push_back(o.t);
    int ks = bin_of(o.m, mkt.s_minus(), mkt.s_plus());
    int kb = bin_of(o.M, mkt.d_minus(), mkt.d_plus());
    sb[ks].add(o.t - o.m);
    bb[kb].add(o.M - o.t);
  }
  std::sort(s.prices.begin(), s.prices.end());
  s.mean_price = price.mean(n);
  s.price_stderr = price.stderr_of_mean(n);
  s.mean_tau = tau / n;
  s.buyer_maker_fraction = buyer_makers / n;
  s.mean_seller_profit = seller.mean(n);
  s.seller_profit_stderr = seller.stderr_of_mean(n);
  s.mean_buyer_profit = buyer.mean(n);
  s.buyer_profit_stderr = buyer.stderr_of_mean(n);
  for (int k = 0; k < opts.bins; ++k) {
    s.seller_bins[k].mean = sb[k].mean(n);
    s.seller_bins[k].std_error = sb[k].stderr_of_mean(n);
    s.buyer_bins[k].mean = bb[k].mean(n);
    s.buyer_bins[k].std_error = bb[k].stderr_of_mean(n);
  }
  if (opts.analytic) {
    const ShoutDistributions& d = *opts.analytic;
    auto T = [&](double t) {
      double a = d.A(t), bc = d.Bc(t);
      if (a + bc <= 0) return t < d.a_minus() ? 0.0 : 1.0;
      return a / (a + bc);
    };
    std::vector<double> sample = s.prices;
    s.ks = ks_distance(sample, T);
  }
  return s;
}

namespace {

// Profit of a type-v probe shouting x, inserted into the book `st`. The
// continuation uses its own stream so the unperturbed run is unaffected.
double branch_profit(const Trader& tr, AuctionState st, Side side, double v, double x,
                     std::mt19937_64& rng, std::uint64_t step_cap) {
  if (side == Side::Buyer) {
    if (st.ask_holder && x >= st.min_ask) return v - st.min_ask;
    if (!(x > st.max_bid)) return 0.0;
    for (std::uint64_t n = 0; n < step_cap; ++n) {
      Arrival a = tr.draw(coin(rng), rng);
      if (a.side == Side::Seller) {
        if (a.shout <= x) return v - x;
        if (a.shout < st.min_ask) {
          st.min_ask = a.shout;
          st.ask_holder = a.type;
        }
      } else {
        if (st.ask_holder && a.shout >= st.min_ask) return 0.0;
        if (a.shout > x) return 0.0;
      }
    }
  } else {
    if (st.bid_holder && x <= st.max_bid) return st.max_bid - v;
    if (!(x < st.min_ask)) return 0.0;
    for (std::uint64_t n = 0; n < step_cap; ++n) {
      Arrival a = tr.draw(coin(rng), rng);
      if (a.side == Side::Buyer) {
        if (a.shout >= x) return x - v;
        if (a.shout > st.max_bid) {
          st.max_bid = a.shout;
          st.bid_holder = a.type;
        }
      } else {
        if (st.bid_holder && a.shout <= st.max_bid) return 0.0;
        if (a.shout < x) return 0.0;
      }
    }
  }
  no_trade(step_cap);
}

double branch_run(const Trader& tr, Side side, double v, double x, std::uint64_t seed,
                  std::uint64_t& inserts) {
  constexpr std::uint64_t cap = 1'000'000;
  std::mt19937_64 rng(seed);
  AuctionState st;
  double total = 0.0;
  while (st.tau < cap) {
    std::mt19937_64 branch(split_seed(seed, st.tau + 1));
    total += branch_profit(tr, st, side, v, x, branch, cap);
    ++inserts;
    if (apply(st, tr.draw(coin(rng), rng))) return 0.5 * total;
  }
  no_trade(cap);
}

double bin_run(const Trader& tr, Side side, double v, double x, double half,
               std::uint64_t seed, std::uint64_t& hits) {
  constexpr std::uint64_t cap = 1'000'000;
  std::mt19937_64 rng(seed);
  AuctionState st;
  bool bid_probe = false, ask_probe = false;
  while (st.tau < cap) {
    Arrival a = tr.draw(coin(rng), rng);
    bool probe = a.side == side && std::abs(a.type - v) <= half;
    if (probe) {
      a.shout = x;
      ++hits;
    }
    if (auto o = apply(st, a)) {
      if (side == Side::Buyer) {
        bool probe_traded = a.side == Side::Buyer ? probe : bid_probe;
        return probe_traded ? v - o->t : 0.0;
      }
      bool probe_traded = a.side == Side::Seller ? probe : ask_probe;
      return probe_traded ? o->t - v : 0.0;
    }
    if (a.side == Side::Buyer && st.bid_holder && *st.bid_holder == a.type && st.max_bid == a.shout)
      bid_probe = probe;
    if (a.side == Side::Seller && st.ask_holder && *st.ask_holder == a.type &&
        st.min_ask == a.shout)
      ask_probe = probe;
  }
  no_trade(cap);
}

}  // namespace

std::vector<ProbeEstimate> probe_deviation(const Market& mkt, const StrategyProfile& sellers,
                                           const StrategyProfile& buyers, Side side, double v,
                                           const std::vector<double>& x_grid,
                                           const ProbeOptions& opts) {
  if (opts.runs < 2) throw OutOfDomain("probe needs at least two runs");
  double lo = side == Side::Seller ? mkt.s_minus() : mkt.d_minus();
  double hi = side == Side::Seller ? mkt.s_plus() : mkt.d_plus();
  if (v < lo || v > hi) throw OutOfDomain("probe type outside the type support");
  Trader tr{mkt, sellers, buyers};
  double half = 0.5 * opts.bin_width;
  double mass = 1.0;
  if (opts.method == ProbeMethod::Bin) {
    mass = mkt.type_cdf(side, std::min(hi, v + half)) - mkt.type_cdf(side, std::max(lo, v - half));
    if (!(mass > 0)) throw InsufficientSamples("probe bin has no type mass");
  }

  std::vector<ProbeEstimate> result;
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    double x = x_grid[i];
    std::uint64_t stream = split_seed(opts.seed, 0x5eedULL + i);
    std::vector<double> values(opts.runs);
    std::vector<std::uint64_t> counts(opts.runs);
    parallel_runs(opts.runs, opts.workers, [&](std::uint64_t r) {
      std::uint64_t seed = split_seed(stream, r);
      values[r] = opts.method == ProbeMethod::Branch
                      ? branch_run(tr, side, v, x, seed, counts[r])
                      : bin_run(tr, side, v, x, half, seed, counts[r]);
    });
    Moments m;
    std::uint64_t hits = 0;
    for (std::uint64_t r = 0; r < opts.runs; ++r) {
      m.add(values[r]);
      hits += counts[r];
    }
    if (hits < opts.min_hits)
      throw InsufficientSamples("probe at x=" + std::to_string(x) + " hit " +
                                std::to_string(hits) + " times, need " +
                                std::to_string(opts.min_hits));
    double n = static_cast<double>(opts.runs);
    result.push_back({x, m.mean(n) / mass, m.stderr_of_mean(n) / mass, hits});
  }
  return result;
}

std::vector<ProbeEstimate> probe_deviation(const Market& mkt, const EquilibriumSolution& sol,
                                           Side side, double v,
                                           const std::vector<double>& x_grid,
                                           const ProbeOptions& opts) {
  if (!sol.exists || !sol.sellers || !sol.buyers)
    throw AssumptionViolated("probe needs an existing equilibrium with profiles");
  return probe_deviation(mkt, *sol.sellers, *sol.buyers, side, v, x_grid, opts);
}

}  // namespace cda
