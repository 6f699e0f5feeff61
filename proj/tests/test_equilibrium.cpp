#include <cmath>

#include <gtest/gtest.h>

#include "cda/equilibrium.hpp"
#include "cda/error.hpp"

using namespace cda;

TEST(Equilibrium, UniformClosedForm) {
  Market u = Market::linear(0, 1, 1, 1);
  auto sol = solve_linear_bne(u);
  ASSERT_TRUE(sol.exists);
  EXPECT_NEAR(sol.a_minus, 0.25, 1e-12);
  EXPECT_NEAR(sol.b_plus, 0.75, 1e-12);
  for (double v : {0.0, 0.2, 0.5, 0.75}) EXPECT_NEAR(sol.ask(v), 2 * v / 3 + 0.25, 1e-12);
  for (double v : {0.25, 0.5, 0.8, 1.0}) EXPECT_NEAR(sol.bid(v), 2 * v / 3 + 1.0 / 12, 1e-12);
  EXPECT_NEAR(sol.ask(0.9), 0.9, 1e-15);
  EXPECT_NEAR(sol.bid(0.1), 0.1, 1e-15);
}

TEST(Equilibrium, AsymmetricMarketBoundaries) {
  auto sol = solve_linear_bne(Market::linear(0.3, 0.6, 1.0, 1.0));
  ASSERT_TRUE(sol.exists);
  EXPECT_NEAR(sol.a_minus, 0.43, 0.005);
  EXPECT_NEAR(sol.b_plus, 0.78, 0.005);
}

TEST(Equilibrium, NonExistence) {
  auto sol = solve_linear_bne(Market::linear(0, 0.5, 1, 0.5));
  EXPECT_FALSE(sol.exists);
  EXPECT_FALSE(sol.failure.empty());
  auto num = solve_bne_numeric(Market::linear(0, 0.5, 1, 0.5));
  EXPECT_FALSE(num.exists);
}

TEST(Equilibrium, LinearRequiresLinearMarket) {
  Market m = Market::tabulated({{0, 0.1}, {1, 0.8}}, {{0, 0.9}, {1, 0.2}});
  EXPECT_THROW(LinearBne{m}, NotLinear);
}

class NumericVsClosed : public ::testing::TestWithParam<std::array<double, 4>> {};

TEST_P(NumericVsClosed, Agree) {
  auto [s, a, d, b] = GetParam();
  Market m = Market::linear(s, a, d, b);
  auto cf = solve_linear_bne(m);
  auto num = solve_bne_numeric(m);
  ASSERT_EQ(cf.exists, num.exists) << num.failure;
  if (!cf.exists) return;
  EXPECT_NEAR(cf.a_minus, num.a_minus, 1e-6);
  EXPECT_NEAR(cf.b_plus, num.b_plus, 1e-6);
  for (int i = 0; i <= 100; ++i) {
    double x = cf.a_minus + (cf.b_plus - cf.a_minus) * i / 100.0;
    EXPECT_NEAR(cf.A(x), num.A(x), 1e-6);
    EXPECT_NEAR(cf.Bc(x), num.Bc(x), 1e-6);
  }
  EXPECT_LT(num.residuals.foc, 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Markets, NumericVsClosed,
                         ::testing::Values(std::array<double, 4>{0, 1, 1, 1},
                                           std::array<double, 4>{0.3, 0.6, 1, 1},
                                           std::array<double, 4>{0.2, 0.8, 0.9, 0.6},
                                           std::array<double, 4>{0.0, 0.9, 1.0, 0.4},
                                           std::array<double, 4>{0, 0.5, 1, 0.5}));

TEST(Equilibrium, VerificationPassesOnSolvedMarkets) {
  for (auto m : {Market::linear(0, 1, 1, 1), Market::linear(0.3, 0.6, 1, 1)}) {
    auto rep = verify_solution(m, solve_linear_bne(m));
    for (const auto& [name, ok] : rep.checks) EXPECT_TRUE(ok) << name;
    EXPECT_LT(rep.residuals.foc, 1e-10);
  }
}

TEST(Equilibrium, ShootingOnNonlinearMarket) {
  Market m = Market::tabulated({{0, 0}, {0.25, 0.2}, {0.5, 0.45}, {0.75, 0.7}, {1, 1}},
                               {{0, 1}, {0.25, 0.85}, {0.5, 0.6}, {0.75, 0.3}, {1, 0}});
  auto sol = solve_bne_numeric(m);
  ASSERT_TRUE(sol.exists) << sol.failure;
  EXPECT_TRUE(sol.experimental);
  auto rep = verify_solution(m, sol);
  for (const auto& [name, ok] : rep.checks) EXPECT_TRUE(ok) << name;
  double p = competitive_equilibrium(m).price;
  EXPECT_LT(sol.a_minus, p);
  EXPECT_GT(sol.b_plus, p);
}
