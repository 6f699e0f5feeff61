#include <gtest/gtest.h>

#include "cda/error.hpp"
#include "cda/welfare.hpp"

using namespace cda;

TEST(Welfare, UniformCompetitive) {
  auto w = competitive_profits(Market::linear(0, 1, 1, 1));
  EXPECT_NEAR(w.P_a, 0.25, 1e-12);
  EXPECT_NEAR(w.P_b, 0.25, 1e-12);
}

TEST(Welfare, BneTotalEqualsCompetitiveTotal) {
  for (auto m : {Market::linear(0, 1, 1, 1), Market::linear(0.3, 0.6, 1, 1),
                 Market::linear(0.2, 0.8, 0.9, 0.6)}) {
    auto sol = solve_linear_bne(m);
    ASSERT_TRUE(sol.exists);
    auto w = bne_profits(m, sol);
    double target = 0.5 * (m.d_plus() - m.s_minus());
    EXPECT_NEAR(w.P_total, target, 1e-8);
    EXPECT_NEAR(w.P_a_reduced + w.P_b_reduced, target, 1e-8);
    EXPECT_NEAR(w.P_total_linear, target, 1e-8);
    EXPECT_NEAR(w.P_a, w.P_a_reduced, 1e-8);
  }
}

TEST(Welfare, NoEquilibriumIsAnError) {
  Market m = Market::linear(0, 0.5, 1, 0.5);
  EXPECT_THROW(bne_profits(m, solve_linear_bne(m)), AssumptionViolated);
}

TEST(Welfare, TotalProfitFactorIsOne) {
  for (double l : {0.25, 0.5, 1.0, 2.0, 4.0}) EXPECT_NEAR(total_profit_factor(l), 1.0, 1e-9) << l;
  EXPECT_THROW(total_profit_factor(0.0), OutOfDomain);
}

TEST(Welfare, ProfitDensities) {
  Market u = Market::linear(0, 1, 1, 1);
  EXPECT_NEAR(competitive_profit_density(u, Side::Buyer, 1.0), 1.0, 1e-12);
  EXPECT_NEAR(competitive_profit_density(u, Side::Buyer, 0.4), 0.0, 1e-12);
  auto sol = solve_linear_bne(u);
  EXPECT_NEAR(bne_profit_density(u, sol, Side::Buyer, 1.0), 1.0, 1e-9);
  EXPECT_NEAR(bne_profit_density(u, sol, Side::Seller, 0.0), 1.0, 1e-9);
}
