#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cda/market.hpp"
#include "cda/payoff.hpp"
#include "cda/strategy.hpp"

namespace cda {

/// Closed-form equilibrium of a linear market. Formulas are valid whether or
/// not the equilibrium exists; exists() checks the boundary inequalities.
class LinearBne {
 public:
  explicit LinearBne(const Market& mkt);  // throws NotLinear

  double gamma() const { return gamma_; }
  double lambda() const { return lambda_; }
  double x_bar() const { return x_bar_; }
  double a_minus() const { return a_minus_; }
  double b_plus() const { return b_plus_; }
  double saddle_level() const;  // c = V(x_bar, gamma)
  bool exists() const;
  std::string failure() const;  // empty when exists()

  double A(double x) const;
  double dA(double x) const;
  double Bc(double x) const;
  double dBc(double x) const;
  double T(double x) const;
  double V(double x, double T) const;

  /// Intramarginal ask map on [s-, b+] and bid map on [a-, d+].
  double ask(double m) const;
  double bid(double M) const;

 private:
  double L(double x) const;
  double s_minus_, alpha_, d_plus_, beta_, s_plus_, d_minus_;
  double w_, sa_, sb_, gamma_, lambda_, x_bar_, a_minus_, b_plus_;
};

struct Residuals {
  double foc = 0.0;          // max |first-order condition| over the grid
  double consistency = 0.0;  // max |B_c (D(B_c) - x) - A (x - S(A))|
};

struct BneOptions {
  int scan_points = 33;
  int max_bisections = 60;
  double tolerance = 1e-11;  // relative ODE tolerance
  double launch_eps = 1e-6;  // offset from the saddle along the separatrix
  double max_dx = 0.002;     // largest x-spacing of the tabulated nodes
};

struct EquilibriumSolution {
  bool exists = false;
  std::string method;   // "closed_form" or "shooting"
  bool experimental = false;
  std::string failure;  // violated boundary condition when !exists

  double a_minus = 0.0;
  double b_plus = 0.0;
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double x_bar = std::numeric_limits<double>::quiet_NaN();

  // A, B_c, their derivatives and T on [a_minus, b_plus].
  std::function<double(double)> A, Bc, dA, dBc, T;
  // Full shout maps (identity on the extramarginal types).
  std::function<double(double)> ask, bid;

  std::optional<StrategyProfile> sellers, buyers;
  CdfRepresentation representation = CdfRepresentation::ClosedForm;
  Residuals residuals;

  // Shooting diagnostics.
  int bisections = 0;
  double shoot_a_minus = std::numeric_limits<double>::quiet_NaN();
  double shoot_b_plus = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> saddle;  // (A, B_c, x)

  PayoffContext context(const Market& mkt, double tol = 1e-10) const;
};

EquilibriumSolution solve_linear_bne(const Market& mkt);
EquilibriumSolution solve_bne_numeric(const Market& mkt, const BneOptions& opts = {});

struct VerificationReport {
  Residuals residuals;
  std::vector<std::pair<std::string, bool>> checks;
  bool ok() const;
};

/// Residuals of the equilibrium equations on an interior grid plus the
/// structural properties every equilibrium must have.
VerificationReport verify_solution(const Market& mkt, const EquilibriumSolution& sol,
                                   int grid = 1000, double residual_tol = 1e-6);

/// Residuals only, using the solution's own A, B_c and derivatives.
Residuals equation_residuals(const Market& mkt, const EquilibriumSolution& sol, int grid = 1000);

}  // namespace cda
