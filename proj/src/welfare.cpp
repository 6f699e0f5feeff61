#include "cda/welfare.hpp"

#include <cmath>

#include "cda/error.hpp"
#include "cda/numeric.hpp"
#include "cda/payoff.hpp"

namespace cda {

const char* to_string(Regime regime) {
  return regime == Regime::Competitive ? "competitive" : "bne";
}

WelfareReport competitive_profits(const Market& mkt) {
  auto [p, q] = competitive_equilibrium(mkt);
  WelfareReport r;
  r.regime = Regime::Competitive;
  if (mkt.is_linear()) {
    r.P_a = 0.5 * (p - mkt.s_minus());
    r.P_b = 0.5 * (mkt.d_plus() - p);
  } else {
    r.P_a = numeric::integrate([&](double x) { return p - mkt.supply(x); }, 0.0, q) / q;
    r.P_b = numeric::integrate([&](double x) { return mkt.demand(x) - p; }, 0.0, q) / q;
  }
  r.P_total = r.P_a + r.P_b;
  r.intramarginal_sellers = q;
  r.intramarginal_buyers = q;
  return r;
}

WelfareReport bne_profits(const Market& mkt, const EquilibriumSolution& sol, double tol) {
  if (!sol.exists) throw AssumptionViolated("no equilibrium: " + sol.failure);
  PayoffContext ctx = sol.context(mkt, tol);
  double lo = sol.a_minus, hi = sol.b_plus;
  auto S = [&](double a) { return mkt.supply(std::clamp(a, 0.0, 1.0)); };
  auto D = [&](double b) { return mkt.demand(std::clamp(b, 0.0, 1.0)); };

  WelfareReport r;
  r.regime = Regime::BNE;
  r.P_a = numeric::integrate(
      [&](double x) { return sol.dA(x) * seller_payoff(ctx, x, S(sol.A(x))); }, lo, hi, tol);
  r.P_b = numeric::integrate(
      [&](double x) { return -sol.dBc(x) * buyer_payoff(ctx, x, D(sol.Bc(x))); }, lo, hi, tol);
  r.P_total = r.P_a + r.P_b;
  r.intramarginal_sellers = mkt.supply_inverse(std::min(hi, mkt.s_plus()));
  r.intramarginal_buyers = mkt.demand_inverse(std::max(lo, mkt.d_minus()));

  // int_0^u v S'(v) dv and -int_0^w v D'(v) dv
  auto seller_inner = [&](double u) {
    if (mkt.is_linear()) return 0.5 * mkt.alpha() * u * u;
    return u * S(u) - numeric::integrate(S, 0.0, u, tol);
  };
  auto buyer_inner = [&](double w) {
    if (mkt.is_linear()) return 0.5 * mkt.beta() * w * w;
    return numeric::integrate(D, 0.0, w, tol) - w * D(w);
  };
  auto g = [&](double x) {
    double s = sol.A(x) + sol.Bc(x);
    return 1.0 / (s * s);
  };
  r.P_a_reduced =
      0.5 * numeric::integrate([&](double x) { return 1.0 - sol.T(x); }, lo, hi, tol) -
      numeric::integrate([&](double q) { return sol.dBc(q) * g(q) * seller_inner(sol.A(q)); },
                         lo, hi, tol);
  r.P_b_reduced =
      0.5 * numeric::integrate([&](double x) { return sol.T(x); }, lo, hi, tol) +
      numeric::integrate([&](double q) { return sol.dA(q) * g(q) * buyer_inner(sol.Bc(q)); },
                         lo, hi, tol);
  if (mkt.is_linear()) {
    double t = numeric::integrate(
        [&](double q) {
          double u = 1.0 - sol.T(q);
          return sol.dA(q) * u * u;
        },
        lo, hi, tol);
    r.P_total_linear = 0.5 * (hi - lo) + 0.5 * (mkt.alpha() + mkt.beta()) * t;
  }
  return r;
}

double competitive_profit_density(const Market& mkt, Side side, double v) {
  auto [p, q] = competitive_equilibrium(mkt);
  if (side == Side::Seller) {
    if (v < mkt.s_minus() || v > mkt.s_plus()) return 0.0;
    return v <= p ? (p - v) / q : 0.0;
  }
  if (v < mkt.d_minus() || v > mkt.d_plus()) return 0.0;
  return v >= p ? (v - p) / q : 0.0;
}

double bne_profit_density(const PayoffContext& ctx, const EquilibriumSolution& sol, Side side,
                          double v) {
  if (side == Side::Seller) return seller_payoff(ctx, sol.ask(v), v);
  return buyer_payoff(ctx, sol.bid(v), v);
}

double bne_profit_density(const Market& mkt, const EquilibriumSolution& sol, Side side,
                          double v) {
  return bne_profit_density(sol.context(mkt), sol, side, v);
}

double total_profit_factor(double lambda) {
  if (!(lambda > 0)) throw OutOfDomain("lambda must be positive");
  double l = lambda;
  double head = 2.0 * l / ((1.0 + l) * (1.0 + l));
  if (std::abs(l - 1.0) < 1e-12) {
    double tail = numeric::integrate(
        [](double x) { return 1.5 * (1.5 - 2.0 * x) * (1.5 - 2.0 * x); }, 0.25, 0.75);
    return head + 2.0 * tail;
  }
  double l2 = l * l;
  double lo = 2.0 * l / (1.0 + l), hi = 2.0 * l2 / (1.0 + l);
  auto f = [&](double y) {
    return (1.0 + l) * y - 3.0 * l2 + 4.0 * l2 * l2 * l2 / ((1.0 + l) * (1.0 + l)) / (y * y);
  };
  double integral = hi > lo ? numeric::integrate(f, lo, hi) : -numeric::integrate(f, hi, lo);
  return head + (1.0 + l2) / (2.0 * l2 * (1.0 - l) * (1.0 - l) * (l2 - 1.0)) * integral;
}

}  // namespace cda
