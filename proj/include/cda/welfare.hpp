#pragma once

#include <limits>

#include "cda/equilibrium.hpp"
#include "cda/market.hpp"

namespace cda {

enum class Regime { Competitive, BNE };

const char* to_string(Regime regime);

struct WelfareReport {
  Regime regime = Regime::Competitive;
  double P_a = 0.0;
  double P_b = 0.0;
  double P_total = 0.0;
  double intramarginal_sellers = 0.0;  // fraction of sellers who can trade
  double intramarginal_buyers = 0.0;

  // BNE only: the same profits through the reduced single integrals, and the
  // total through the A'(1 - T)^2 form (linear markets).
  double P_a_reduced = std::numeric_limits<double>::quiet_NaN();
  double P_b_reduced = std::numeric_limits<double>::quiet_NaN();
  double P_total_linear = std::numeric_limits<double>::quiet_NaN();
};

WelfareReport competitive_profits(const Market& mkt);
WelfareReport bne_profits(const Market& mkt, const EquilibriumSolution& sol, double tol = 1e-10);

/// Expected profit of a trader of type v under competitive play at p*.
double competitive_profit_density(const Market& mkt, Side side, double v);
/// pi_a(a(v), v) or pi_b(b(v), v) under the equilibrium profiles.
double bne_profit_density(const Market& mkt, const EquilibriumSolution& sol, Side side, double v);
double bne_profit_density(const PayoffContext& ctx, const EquilibriumSolution& sol, Side side,
                          double v);

/// Left-hand side of the normalised total-profit identity for beta/alpha =
/// lambda^2; equals 1 for every lambda > 0.
double total_profit_factor(double lambda);

}  // namespace cda
