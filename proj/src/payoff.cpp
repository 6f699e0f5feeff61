#include "cda/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cda/error.hpp"
#include "cda/numeric.hpp"

namespace cda {

PayoffContext PayoffContext::make(const Market& mkt, const StrategyProfile& sellers,
                                  const StrategyProfile& buyers, double tol) {
  return PayoffContext{mkt, induced_distributions(mkt, sellers, buyers), tol};
}

namespace {

double checked_inverse(double f1, double f2, const char* which, double x) {
  if (!(f1 > 0) || !(f2 > 0))
    throw Degenerate(std::string(which) + " denominator vanishes at x=" + std::to_string(x));
  return 1.0 / (f1 * f2);
}

// Sum over j >= 1 of 2^-j sum_{k=1}^j C(j,k) p^(j-k) h_k, with
// h_k = r h_{k-1} + s^(k-1), h_1 = 1.
double series(double p, double r, double s, double tol) {
  constexpr int kMaxTerms = 4000;
  double ratio = 0.5 * (p + std::max(r, s));
  std::vector<double> h{0.0};
  std::vector<double> lgam{0.0};  // lgamma(i + 1)
  double s_pow = 1.0;
  double total = 0.0;
  for (int j = 1; j <= kMaxTerms; ++j) {
    h.push_back(r * h.back() + s_pow);
    s_pow *= s;
    lgam.push_back(lgam.back() + std::log(double(j)));
    double term = 0.0;
    for (int k = 1; k <= j; ++k) {
      double lw = lgam[j] - lgam[k] - lgam[j - k] - j * std::log(2.0);
      term += std::exp(lw) * std::pow(p, j - k) * h[k];
    }
    total += term;
    if (ratio < 1.0 && j > 2 && term < tol * (1.0 - ratio) * (1.0 - ratio)) break;
  }
  return total;
}

double lowest_relevant(const ShoutCdf& cdf) {
  double lo = cdf.lowest();
  for (const Atom& a : cdf.atoms()) lo = std::min(lo, a.location);
  return lo - 1.0;
}

double highest_relevant(const ShoutCdf& cdf) {
  double hi = cdf.highest();
  for (const Atom& a : cdf.atoms()) hi = std::max(hi, a.location);
  return hi + 1.0;
}

double asks_integral(const PayoffContext& ctx, double x, double M) {
  return ctx.dists.asks.integrate([&](double q) { return (M - q) * gamma2(ctx, q); },
                                  lowest_relevant(ctx.dists.asks), x, true, true, ctx.tol);
}

double bids_integral(const PayoffContext& ctx, double x, double m) {
  return ctx.dists.bids.integrate([&](double q) { return (q - m) * gamma1(ctx, q); }, x,
                                  highest_relevant(ctx.dists.bids), true, true, ctx.tol);
}

void require_continuous(const PayoffContext& ctx, const char* what) {
  if (!ctx.dists.continuous())
    throw AssumptionViolated(std::string(what) + " needs atom-free shout distributions");
}

void require_differentiable(const PayoffContext& ctx, double x) {
  require_continuous(ctx, "payoff_derivative");
  const auto& d = ctx.dists;
  bool analytic = d.asks.analytic_density() && d.bids.analytic_density();
  double guard = analytic ? 1e-12 : 3e-5;
  for (double k : {d.a_minus(), d.a_plus(), d.b_minus(), d.b_plus()})
    if (std::abs(x - k) < guard)
      throw NotDifferentiableHere("x=" + std::to_string(x) + " is a kink of the distributions");
}

double foc_bracket(Side side, double x, double type, double A, double Bc, double dA, double dBc) {
  double k = dA * Bc - A * dBc;
  double s = A + Bc;
  if (!(s > 0)) throw Degenerate("A + B_c vanishes at x=" + std::to_string(x));
  double bracket = side == Side::Seller ? 2.0 * (type - x) * k + Bc * s
                                        : 2.0 * (type - x) * k - A * s;
  return bracket / (s * s * s);
}

}  // namespace

double gamma1(const PayoffContext& ctx, double x) {
  const auto& d = ctx.dists;
  double A = d.A(x);
  return checked_inverse(1.0 - d.B(x) + A, 1.0 - d.calB(x) + A, "gamma1", x);
}

double gamma2(const PayoffContext& ctx, double x) {
  const auto& d = ctx.dists;
  double calB = d.calB(x);
  return checked_inverse(1.0 - calB + d.A(x), 1.0 - calB + d.calA(x), "gamma2", x);
}

GammaPair gamma_series_oracle(const PayoffContext& ctx, double x, double tol) {
  const auto& d = ctx.dists;
  double A = d.A(x), calA = d.calA(x), B = d.B(x), calB = d.calB(x);
  double g1 = 0.5 * series(1.0 - A, B, calB, tol);
  double g2 = 0.5 * series(calB, 1.0 - calA, 1.0 - A, tol);
  return {g1, g2};
}

std::pair<double, double> outcome_density_coefficients(const PayoffContext& ctx, Deviator who,
                                                       double x, double opponent_shout) {
  if (who == Deviator::Buyer) {
    if (x < opponent_shout) return {0.0, 0.0};
    return {gamma1(ctx, x), gamma2(ctx, opponent_shout)};
  }
  if (opponent_shout < x) return {0.0, 0.0};
  return {gamma2(ctx, x), gamma1(ctx, opponent_shout)};
}

double buyer_payoff(const PayoffContext& ctx, double x, double M) {
  double A = ctx.dists.A(x);
  if (A <= 0.0) return 0.0;
  return (M - x) * A * gamma1(ctx, x) + asks_integral(ctx, x, M);
}

double buyer_payoff_right_limit(const PayoffContext& ctx, double x, double M) {
  const auto& d = ctx.dists;
  double A = d.A(x);
  if (A <= 0.0) return 0.0;
  double f = 1.0 - d.B(x) + A;
  return (M - x) * A * checked_inverse(f, f, "gamma1", x) + asks_integral(ctx, x, M);
}

double seller_payoff(const PayoffContext& ctx, double x, double m) {
  double open = 1.0 - ctx.dists.calB(x);
  if (open <= 0.0) return 0.0;
  return (x - m) * open * gamma2(ctx, x) + bids_integral(ctx, x, m);
}

double seller_payoff_left_limit(const PayoffContext& ctx, double x, double m) {
  const auto& d = ctx.dists;
  double open = 1.0 - d.calB(x);
  if (open <= 0.0) return 0.0;
  double f = open + d.calA(x);
  return (x - m) * open * checked_inverse(f, f, "gamma2", x) + bids_integral(ctx, x, m);
}

double payoff_derivative(const PayoffContext& ctx, Side side, double x) {
  require_differentiable(ctx, x);
  const auto& d = ctx.dists;
  double A = d.A(x), Bc = d.Bc(x);
  double type = side == Side::Seller ? ctx.mkt.supply(std::clamp(A, 0.0, 1.0))
                                     : ctx.mkt.demand(std::clamp(Bc, 0.0, 1.0));
  return foc_bracket(side, x, type, A, Bc, d.dA(x), d.dBc(x));
}

double payoff_derivative(const PayoffContext& ctx, Side side, double x, double type) {
  require_differentiable(ctx, x);
  const auto& d = ctx.dists;
  return foc_bracket(side, x, type, d.A(x), d.Bc(x), d.dA(x), d.dBc(x));
}

double price_cdf(const PayoffContext& ctx, double t) {
  require_continuous(ctx, "price_cdf");
  double A = ctx.dists.A(t);
  if (A <= 0.0) return 0.0;
  return A / (ctx.dists.Bc(t) + A);
}

namespace {

std::vector<double> all_kinks(const ShoutDistributions& d) {
  std::vector<double> k{d.a_minus(), d.a_plus(), d.b_minus(), d.b_plus()};
  k.insert(k.end(), d.asks.breaks().begin(), d.asks.breaks().end());
  k.insert(k.end(), d.bids.breaks().begin(), d.bids.breaks().end());
  return k;
}

}  // namespace

double mean_price(const PayoffContext& ctx) {
  require_continuous(ctx, "mean_price");
  double lo = ctx.dists.a_minus(), hi = ctx.dists.b_plus();
  if (!(hi > lo)) throw NoIntramarginalMass("highest bid does not exceed lowest ask");
  auto kinks = all_kinks(ctx.dists);
  return lo + numeric::integrate([&](double t) { return 1.0 - price_cdf(ctx, t); }, lo, hi,
                                 ctx.tol, std::span<const double>(kinks));
}

std::pair<double, double> price_maker_split(const PayoffContext& ctx) {
  require_continuous(ctx, "price_maker_split");
  const auto& d = ctx.dists;
  double lo = d.a_minus(), hi = d.b_plus();
  if (!(hi > lo)) throw NoIntramarginalMass("highest bid does not exceed lowest ask");
  auto kinks = all_kinks(d);
  std::span<const double> br(kinks);
  double buyer = numeric::integrate(
      [&](double q) { return gamma1(ctx, q) * d.A(q) * d.bids.density(q); }, lo, hi, ctx.tol, br);
  double seller = numeric::integrate(
      [&](double q) { return gamma1(ctx, q) * d.Bc(q) * d.asks.density(q); }, lo, hi, ctx.tol,
      br);
  return {buyer, seller};
}

double one_price_jump(const PayoffContext& ctx, double p, Side side) {
  double qs = ctx.mkt.supply_inverse(p), qd = ctx.mkt.demand_inverse(p);
  if (!(qs > 0) || !(qd > 0)) throw NoIntramarginalMass("empty side at p=" + std::to_string(p));
  return side == Side::Buyer ? qd / (qs * (qs + qd)) : qs / (qd * (qs + qd));
}

double one_price_k(double q_s, double q_d) {
  return (q_s * q_s + q_d * q_d + q_s * q_d) / (q_s * q_d * (q_s + q_d));
}

}  // namespace cda
