#pragma once

#include <utility>

#include "cda/market.hpp"
#include "cda/strategy.hpp"

namespace cda {

struct PayoffContext {
  Market mkt;
  ShoutDistributions dists;
  double tol = 1e-10;  // quadrature tolerance

  static PayoffContext make(const Market& mkt, const StrategyProfile& sellers,
                            const StrategyProfile& buyers, double tol = 1e-10);
};

struct GammaPair {
  double g1;
  double g2;
};

double gamma1(const PayoffContext& ctx, double x);
double gamma2(const PayoffContext& ctx, double x);

/// gamma1 and gamma2 summed as the series over auction lengths, truncated
/// once the remaining tail is below tol. Used to cross-check the closed forms.
GammaPair gamma_series_oracle(const PayoffContext& ctx, double x, double tol = 1e-13);

enum class Deviator { Buyer, Seller };

/// Weights of the two price outcomes when a buyer shouting x meets an ask
/// (or a seller shouting x meets a bid): (weight at t = x, weight at t =
/// opponent shout). Zero when the shouts cannot cross.
std::pair<double, double> outcome_density_coefficients(const PayoffContext& ctx, Deviator who,
                                                       double x, double opponent_shout);

/// Expected payoff density of a buyer of type M who bids x.
double buyer_payoff(const PayoffContext& ctx, double x, double M);
/// lim_{y -> x+} buyer_payoff(y, M).
double buyer_payoff_right_limit(const PayoffContext& ctx, double x, double M);
/// Expected payoff density of a seller of type m who asks x.
double seller_payoff(const PayoffContext& ctx, double x, double m);
/// lim_{y -> x-} seller_payoff(y, m).
double seller_payoff_left_limit(const PayoffContext& ctx, double x, double m);

/// d/dx of the payoff with the type tied to the shout through the
/// distributions themselves: m = S(A(x)) for sellers, M = D(B_c(x)) for
/// buyers. Vanishes along an equilibrium.
double payoff_derivative(const PayoffContext& ctx, Side side, double x);
/// d/dx of the payoff of a fixed type.
double payoff_derivative(const PayoffContext& ctx, Side side, double x, double type);

/// CDF of the transaction price, T(t) = A / (1 - B + A). Requires
/// atom-free distributions.
double price_cdf(const PayoffContext& ctx, double t);
double mean_price(const PayoffContext& ctx);

/// Probability that the buyer (first) or seller (second) is the price maker.
std::pair<double, double> price_maker_split(const PayoffContext& ctx);

/// Relative payoff jump just above (buyers) or below (sellers) a one-price p.
double one_price_jump(const PayoffContext& ctx, double p, Side side);
/// k(q_s, q_d): right limit of the buyer payoff at p over (M - p).
double one_price_k(double q_s, double q_d);

}  // namespace cda
