#include <gtest/gtest.h>

#include "cda/error.hpp"
#include "cda/market.hpp"

using namespace cda;

TEST(Market, LinearEndpoints) {
  Market m = Market::linear(0.3, 0.6, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(m.s_minus(), 0.3);
  EXPECT_DOUBLE_EQ(m.s_plus(), 0.9);
  EXPECT_DOUBLE_EQ(m.d_minus(), 0.0);
  EXPECT_DOUBLE_EQ(m.d_plus(), 1.0);
  EXPECT_NEAR(m.supply_inverse(0.6), 0.5, 1e-15);
  EXPECT_NEAR(m.demand_inverse(0.25), 0.75, 1e-15);
}

TEST(Market, CompetitiveEquilibrium) {
  auto ce = competitive_equilibrium(Market::linear(0.1, 0.7, 0.55, 0.05));
  EXPECT_NEAR(ce.price, 0.52, 1e-14);
  EXPECT_NEAR(ce.quantity, 0.6, 1e-14);
  auto u = competitive_equilibrium(Market::linear(0, 1, 1, 1));
  EXPECT_NEAR(u.price, 0.5, 1e-15);
}

TEST(Market, RejectsNonIntersectingCurves) {
  EXPECT_THROW(Market::linear(0.6, 0.1, 0.5, 0.1), InvalidMarket);
  EXPECT_THROW(Market::linear(0.0, -1.0, 1.0, 1.0), InvalidMarket);
  EXPECT_THROW(Market::linear(0.0, 0.2, 1.0, 0.2), InvalidMarket);
}

TEST(Market, TouchingSupportsAreAllowed) {
  Market m = Market::linear(0.0, 0.5, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(m.s_plus(), m.d_minus());
}

TEST(Market, TypeDistributions) {
  Market m = Market::linear(0.3, 0.6, 1.0, 1.0);
  EXPECT_NEAR(m.type_cdf(Side::Seller, 0.6), 0.5, 1e-15);
  EXPECT_NEAR(m.type_cdf(Side::Buyer, 0.25), 0.25, 1e-15);
  EXPECT_NEAR(type_density(m, Side::Seller, 0.5), 1.0 / 0.6, 1e-12);
  EXPECT_DOUBLE_EQ(type_density(m, Side::Seller, 0.95), 0.0);
  for (double u : {0.1, 0.4, 0.9}) {
    EXPECT_NEAR(m.type_cdf(Side::Seller, m.sample_type(Side::Seller, u)), u, 1e-14);
    EXPECT_NEAR(m.type_cdf(Side::Buyer, m.sample_type(Side::Buyer, u)), u, 1e-14);
  }
}

TEST(Market, TabulatedIsMonotoneAndMatchesNodes) {
  Market m = Market::tabulated({{0, 0.1}, {0.5, 0.35}, {1, 0.8}}, {{0, 0.95}, {0.5, 0.6}, {1, 0.35}});
  EXPECT_FALSE(m.is_linear());
  EXPECT_NEAR(m.supply(0.5), 0.35, 1e-14);
  EXPECT_NEAR(m.demand(0.5), 0.6, 1e-14);
  double prev = m.supply(0);
  for (int i = 1; i <= 100; ++i) {
    double s = m.supply(i / 100.0);
    EXPECT_GT(s, prev);
    prev = s;
  }
  EXPECT_NEAR(m.supply_inverse(m.supply(0.3)), 0.3, 1e-10);
  EXPECT_THROW(m.alpha(), NotLinear);
  auto ce = competitive_equilibrium(m);
  EXPECT_NEAR(m.supply(ce.quantity), m.demand(ce.quantity), 1e-10);
}

TEST(Market, OutOfDomainInverse) {
  Market m = Market::linear(0, 1, 1, 1);
  EXPECT_THROW(invert_curve(m, Side::Seller, 1.5), OutOfDomain);
}
