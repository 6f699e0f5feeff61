// Acceptance battery: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "cda/equilibrium.hpp"
#include "cda/error.hpp"
#include "cda/numeric.hpp"
#include "cda/payoff.hpp"
#include "cda/simulator.hpp"
#include "cda/welfare.hpp"

using namespace cda;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Verdict()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool in_time = limit_s <= 0 || secs < limit_s;
  bool ok = v.ok && in_time;
  if (!ok) ++failures;
  std::printf("%s %2d %s: %s (%.2f s%s)\n", ok ? "PASS" : "FAIL", id, title, v.detail.c_str(), secs,
              in_time ? "" : ", over time limit");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

int workers() { return std::max(1u, std::thread::hardware_concurrency()); }

const Market kUniform = Market::linear(0, 1, 1, 1);
const Market kSkewed = Market::linear(0.3, 0.6, 1, 1);
const Market kSteep = Market::linear(0.1, 0.7, 0.55, 0.05);

std::vector<Market> random_markets_with_bne(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> s0(0.0, 0.4), d1(0.6, 1.0), slope(0.2, 2.0);
  std::vector<Market> out;
  for (int tries = 0; tries < 100000 && static_cast<int>(out.size()) < count; ++tries) {
    double s = s0(rng), a = slope(rng), d = d1(rng), b = slope(rng);
    try {
      Market m = Market::linear(s, a, d, b);
      if (LinearBne(m).exists()) out.push_back(m);
    } catch (const InvalidMarket&) {
    }
  }
  return out;
}

std::vector<Market> solved_markets;  // every market with a BNE seen so far

}  // namespace

int main() {
  criterion(1, "closed-form BNE, uniform market", 1.0, [] {
    auto sol = solve_linear_bne(kUniform);
    double err = std::max(std::abs(sol.a_minus - 0.25), std::abs(sol.b_plus - 0.75));
    for (int i = 0; i <= 1000; ++i) {
      double m = 0.75 * i / 1000.0, M = 0.25 + 0.75 * i / 1000.0;
      err = std::max({err, std::abs(sol.ask(m) - (2 * m / 3 + 0.25)),
                      std::abs(sol.bid(M) - (2 * M / 3 + 1.0 / 12))});
    }
    solved_markets.push_back(kUniform);
    return Verdict{sol.exists && err < 1e-12, fmt("max error %.2e", err)};
  });

  criterion(2, "asymmetric market boundaries", 1.0, [] {
    auto sol = solve_linear_bne(kSkewed);
    solved_markets.push_back(kSkewed);
    bool ok = sol.exists && std::abs(sol.a_minus - 0.43) < 0.005 && std::abs(sol.b_plus - 0.78) < 0.005;
    return Verdict{ok, fmt("a_minus=%.6f b_plus=%.6f", sol.a_minus, sol.b_plus)};
  });

  criterion(3, "ZI-C first-transaction price", 30.0, [] {
    auto s = StrategyProfile::zic(Side::Seller), b = StrategyProfile::zic(Side::Buyer);
    MonteCarloOptions o;
    o.runs = 50000;
    o.seed = 7;
    o.workers = workers();
    o.analytic = induced_distributions(kSteep, s, b);
    auto r = monte_carlo(kSteep, s, b, o);
    double p_star = competitive_equilibrium(kSteep).price;
    bool ok = std::abs(r.mean_price - 0.438) < 0.01 && *r.ks < 0.012 && std::abs(p_star - 0.52) < 1e-12;
    return Verdict{ok, fmt("mean=%.5f ks=%.5f p*=%.4f", r.mean_price, *r.ks, p_star)};
  });

  criterion(4, "welfare equality", 60.0, [] {
    auto markets = random_markets_with_bne(20, 2024);
    double worst = 0;
    for (const Market& m : markets) {
      auto w = bne_profits(m, solve_linear_bne(m));
      worst = std::max(worst, std::abs(w.P_total - 0.5 * (m.d_plus() - m.s_minus())));
      solved_markets.push_back(m);
    }
    double pa = competitive_profits(kUniform).P_a;
    bool ok = markets.size() == 20 && worst < 1e-6 && std::abs(pa - 0.25) <= 1e-10;
    return Verdict{ok, fmt("%g markets, max gap %.2e, uniform competitive P_a=%.12f",
                           static_cast<double>(markets.size()), worst, pa)};
  });

  criterion(5, "shooting solver vs closed form", 120.0, [] {
    std::vector<Market> ms{kUniform, kSkewed, Market::linear(0.2, 0.8, 0.9, 0.6),
                           Market::linear(0.1, 0.7, 0.9, 0.5), Market::linear(0, 0.5, 1, 0.5)};
    double curve = 0, bound = 0;
    int agree = 0, nonexistent = 0;
    for (const Market& m : ms) {
      auto cf = solve_linear_bne(m);
      auto num = solve_bne_numeric(m);
      if (num.exists == LinearBne(m).exists()) ++agree;
      if (!cf.exists) ++nonexistent;
      if (!cf.exists || !num.exists) continue;
      bound = std::max({bound, std::abs(cf.a_minus - num.a_minus), std::abs(cf.b_plus - num.b_plus)});
      for (int i = 0; i <= 1000; ++i) {
        double x = cf.a_minus + (cf.b_plus - cf.a_minus) * i / 1000.0;
        curve = std::max({curve, std::abs(cf.A(x) - num.A(x)), std::abs(cf.Bc(x) - num.Bc(x))});
      }
    }
    bool ok = agree == 5 && curve < 1e-4 && bound < 1e-4;
    return Verdict{ok, fmt("existence agrees %g/5 (%g without BNE), curve err %.2e, boundary err %.2e",
                           agree, nonexistent, curve, bound)};
  });

  criterion(6, "FOC and consistency residuals", 0, [] {
    std::vector<std::pair<Market, EquilibriumSolution>> sols;
    for (const Market& m : solved_markets) {
      sols.emplace_back(m, solve_linear_bne(m));
      sols.emplace_back(m, solve_bne_numeric(m));
    }
    double foc = 0, cons = 0;
    int n = 0;
    for (const auto& [m, s] : sols) {
      if (!s.exists) continue;
      Residuals r = equation_residuals(m, s, 1000);
      foc = std::max(foc, r.foc);
      cons = std::max(cons, r.consistency);
      ++n;
    }
    return Verdict{n > 0 && foc < 1e-6 && cons < 1e-6,
                   fmt("%g solutions, max foc %.2e, max consistency %.2e", n, foc, cons)};
  });

  criterion(7, "series-summed gamma oracle", 0, [] {
    std::vector<std::tuple<const char*, PayoffContext, double, double>> ctxs;
    for (const Market& m : {kUniform, kSkewed}) {
      auto sol = solve_linear_bne(m);
      ctxs.emplace_back("bne", sol.context(m), sol.a_minus, sol.b_plus);
    }
    auto zs = StrategyProfile::zic(Side::Seller), zb = StrategyProfile::zic(Side::Buyer);
    ctxs.emplace_back("zic", PayoffContext::make(kUniform, zs, zb), 0.0, 1.0);
    ctxs.emplace_back("zic", PayoffContext::make(kSteep, zs, zb), 0.1, 0.55);
    auto op = one_price_profile(kUniform, 0.5);
    ctxs.emplace_back("one_price", PayoffContext::make(kUniform, op.sellers, op.buyers), 0.0, 1.0);
    double worst = 0;
    for (const auto& [name, ctx, lo, hi] : ctxs) {
      for (int i = 1; i <= 100; ++i) {
        double x = lo + (hi - lo) * i / 101.0;
        GammaPair g = gamma_series_oracle(ctx, x);
        worst = std::max({worst, std::abs(g.g1 - gamma1(ctx, x)), std::abs(g.g2 - gamma2(ctx, x))});
      }
    }
    return Verdict{worst < 1e-9, fmt("%g contexts x 100 points, max error %.2e",
                                     static_cast<double>(ctxs.size()), worst)};
  });

  criterion(8, "one-price discontinuity", 300.0, [] {
    double p = 0.5;
    auto op = one_price_profile(kUniform, p);
    auto ctx = PayoffContext::make(kUniform, op.sellers, op.buyers);
    double worst = 0;
    for (double M : {0.6, 0.8, 1.0}) {
      double jump = buyer_payoff_right_limit(ctx, p, M) - buyer_payoff(ctx, p, M);
      double expected = (M - p) * op.q_d / (op.q_s * (op.q_s + op.q_d));
      worst = std::max(worst, std::abs(jump - expected));
    }
    ProbeOptions o;
    o.runs = 1000000;
    o.seed = 8;
    o.workers = workers();
    auto est = probe_deviation(kUniform, op.sellers, op.buyers, Side::Buyer, 1.0, {p, p + 0.01}, o);
    double lo_up = est[1].estimate - 1.96 * est[1].std_error;
    double hi_at = est[0].estimate + 1.96 * est[0].std_error;
    bool ok = worst < 1e-10 && lo_up > hi_at;
    return Verdict{ok, fmt("jump error %.2e; probe x=p %.4f+-%.4f, x=p+0.01 %.4f",
                           worst, est[0].estimate, 1.96 * est[0].std_error, est[1].estimate) +
                           fmt("+-%.4f", 1.96 * est[1].std_error)};
  });

  criterion(9, "equilibrium structure on a parameter sweep", 0, [] {
    int solved = 0, failed = 0;
    std::string first_failure;
    for (double s : {0.0, 0.1, 0.2, 0.3})
      for (double a : {0.5, 0.6, 0.7, 0.8, 0.9, 1.0})
        for (double d : {0.7, 0.8, 0.9, 1.0})
          for (double b : {0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
            if (s + a > 1 || d - b < 0 || d - b > s + a) continue;  // not an admissible market
            Market m = Market::linear(s, a, d, b);
            for (auto sol : {solve_linear_bne(m), solve_bne_numeric(m)}) {
              if (!sol.exists) continue;
              ++solved;
              for (const auto& [name, ok] : verify_solution(m, sol).checks)
                if (!ok) {
                  ++failed;
                  if (first_failure.empty()) first_failure = name;
                }
            }
          }
    Market tab = Market::tabulated({{0, 0}, {0.25, 0.2}, {0.5, 0.45}, {0.75, 0.7}, {1, 1}},
                                   {{0, 1}, {0.25, 0.85}, {0.5, 0.6}, {0.75, 0.3}, {1, 0}});
    auto sol = solve_bne_numeric(tab);
    if (sol.exists) {
      ++solved;
      for (const auto& [name, ok] : verify_solution(tab, sol).checks)
        if (!ok) {
          ++failed;
          if (first_failure.empty()) first_failure = name;
        }
    }
    std::string detail = fmt("%g solutions checked, %g failed properties", solved, failed);
    if (!first_failure.empty()) detail += " (first: " + first_failure + ")";
    return Verdict{solved > 0 && failed == 0, detail};
  });

  criterion(10, "per-type-bin simulated profits under BNE", 0, [] {
    auto sol = solve_linear_bne(kUniform);
    PayoffContext ctx = sol.context(kUniform);
    MonteCarloOptions o;
    o.runs = 100000;
    o.seed = 10;
    o.workers = workers();
    o.bins = 20;
    auto r = monte_carlo(kUniform, *sol.sellers, *sol.buyers, o);
    int bad = 0;
    double worst_z = 0;
    auto check = [&](const std::vector<BinStat>& bins, Side side) {
      for (const BinStat& bin : bins) {
        double analytic = numeric::integrate(
            [&](double v) {
              return type_density(kUniform, side, v) * bne_profit_density(ctx, sol, side, v);
            },
            bin.lo, bin.hi, 1e-10, {sol.a_minus, sol.b_plus});
        double diff = std::abs(bin.mean - analytic);
        if (bin.std_error == 0) {
          if (diff > 1e-12) ++bad;
          continue;
        }
        double z = diff / bin.std_error;
        worst_z = std::max(worst_z, z);
        if (z > 3) ++bad;
      }
    };
    check(r.seller_bins, Side::Seller);
    check(r.buyer_bins, Side::Buyer);
    return Verdict{bad == 0, fmt("%g of 40 bins outside 3 SE, max |z|=%.2f", bad, worst_z)};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
