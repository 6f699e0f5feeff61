#include <cmath>

#include <gtest/gtest.h>

#include "cda/equilibrium.hpp"
#include "cda/error.hpp"
#include "cda/payoff.hpp"

using namespace cda;

namespace {

PayoffContext uniform_bne() {
  Market u = Market::linear(0, 1, 1, 1);
  return solve_linear_bne(u).context(u);
}

}  // namespace

TEST(Payoff, UniformBneBuyerPayoffs) {
  PayoffContext ctx = uniform_bne();
  EXPECT_NEAR(buyer_payoff(ctx, 0.65, 1.0), 0.96, 1e-9);
  EXPECT_NEAR(buyer_payoff(ctx, 0.75, 1.0), 1.0, 1e-9);
  EXPECT_NEAR(buyer_payoff(ctx, 0.85, 1.0), 0.874836857, 1e-8);
}

TEST(Payoff, UniformBneSellerAtLowestType) {
  PayoffContext ctx = uniform_bne();
  EXPECT_NEAR(seller_payoff(ctx, 0.25, 0.0), 1.0, 1e-9);
}

TEST(Payoff, UniformBneGammas) {
  PayoffContext ctx = uniform_bne();
  EXPECT_NEAR(gamma1(ctx, 0.5), 16.0 / 9.0, 1e-10);
  EXPECT_NEAR(gamma2(ctx, 0.5), 16.0 / 9.0, 1e-10);
  EXPECT_NEAR(ctx.dists.Bc(0.5), 3.0 / 8.0, 1e-12);
}

TEST(Payoff, SeriesOracleAgreesWithClosedForm) {
  PayoffContext ctx = uniform_bne();
  for (double x : {0.3, 0.45, 0.6, 0.7}) {
    GammaPair g = gamma_series_oracle(ctx, x);
    EXPECT_NEAR(g.g1, gamma1(ctx, x), 1e-10);
    EXPECT_NEAR(g.g2, gamma2(ctx, x), 1e-10);
  }
}

TEST(Payoff, FirstOrderConditionAtEquilibriumBid) {
  Market u = Market::linear(0, 1, 1, 1);
  auto sol = solve_linear_bne(u);
  PayoffContext ctx = sol.context(u);
  EXPECT_NEAR(payoff_derivative(ctx, Side::Buyer, 0.5), 0.0, 1e-8);
  EXPECT_NEAR(payoff_derivative(ctx, Side::Seller, 0.5), 0.0, 1e-8);
  EXPECT_THROW(payoff_derivative(ctx, Side::Buyer, 0.25), NotDifferentiableHere);
}

TEST(Payoff, PriceDistribution) {
  PayoffContext ctx = uniform_bne();
  EXPECT_NEAR(price_cdf(ctx, 0.5), 0.5, 1e-12);
  EXPECT_NEAR(price_cdf(ctx, 0.25), 0.0, 1e-12);
  EXPECT_NEAR(price_cdf(ctx, 0.75), 1.0, 1e-12);
  EXPECT_NEAR(mean_price(ctx), 0.5, 1e-9);
  auto [buyer, seller] = price_maker_split(ctx);
  EXPECT_NEAR(buyer, 0.5, 1e-9);
  EXPECT_NEAR(seller, 0.5, 1e-9);
}

TEST(Payoff, ZicSteepSupplyMeanPrice) {
  Market m = Market::linear(0.1, 0.7, 0.55, 0.05);
  auto ctx = PayoffContext::make(m, StrategyProfile::zic(Side::Seller), StrategyProfile::zic(Side::Buyer));
  EXPECT_NEAR(mean_price(ctx), 0.4384936777, 1e-8);
}

TEST(Payoff, OnePriceDiscontinuity) {
  Market u = Market::linear(0, 1, 1, 1);
  auto op = one_price_profile(u, 0.5);
  auto ctx = PayoffContext::make(u, op.sellers, op.buyers);
  EXPECT_NEAR(buyer_payoff(ctx, 0.5, 1.0), 1.0, 1e-10);
  EXPECT_NEAR(buyer_payoff_right_limit(ctx, 0.5, 1.0), 1.5, 1e-10);
  EXPECT_NEAR(buyer_payoff(ctx, 0.51, 1.0), 1.4801974, 1e-6);
  EXPECT_NEAR(seller_payoff(ctx, 0.5, 0.0), 1.0, 1e-10);
  EXPECT_NEAR(gamma1(ctx, 0.5), 2.0, 1e-10);
  EXPECT_NEAR(gamma2(ctx, 0.5), 2.0, 1e-10);
  double jump = buyer_payoff_right_limit(ctx, 0.5, 1.0) - buyer_payoff(ctx, 0.5, 1.0);
  EXPECT_NEAR(jump, (1.0 - 0.5) * one_price_jump(ctx, 0.5, Side::Buyer), 1e-10);
  EXPECT_THROW(payoff_derivative(ctx, Side::Buyer, 0.5), AssumptionViolated);
}

TEST(Payoff, NoTradeRegionHasZeroPayoff) {
  PayoffContext ctx = uniform_bne();
  EXPECT_NEAR(buyer_payoff(ctx, 0.2, 1.0), 0.0, 1e-12);
  EXPECT_NEAR(seller_payoff(ctx, 0.8, 0.0), 0.0, 1e-12);
}
