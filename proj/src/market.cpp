#include "cda/market.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cda/error.hpp"
#include "cda/numeric.hpp"

namespace cda {
namespace {

constexpr double kPriceEps = 1e-12;

bool in_unit(double p) { return p >= -kPriceEps && p <= 1.0 + kPriceEps; }

std::string fmt(double v) { return std::to_string(v); }

}  // namespace

const char* to_string(Side side) { return side == Side::Seller ? "seller" : "buyer"; }

Market Market::linear(double s_minus, double alpha, double d_plus, double beta) {
  if (!(alpha > 0) || !(beta > 0))
    throw InvalidMarket("slopes must be positive (alpha=" + fmt(alpha) + ", beta=" + fmt(beta) + ")");
  Market m;
  m.kind_ = MarketKind::Linear;
  m.s_minus_ = s_minus;
  m.alpha_ = alpha;
  m.d_plus_ = d_plus;
  m.beta_ = beta;
  m.s_plus_ = s_minus + alpha;
  m.d_minus_ = d_plus - beta;
  m.validate();
  if (alpha + beta < d_plus - s_minus)
    throw InvalidMarket("alpha + beta must be at least d_plus - s_minus");
  return m;
}

Market Market::general(Curve supply, Curve demand) {
  if (!supply.value || !supply.slope || !demand.value || !demand.slope)
    throw InvalidMarket("general curves need a value and a slope function");
  Market m;
  m.kind_ = MarketKind::General;
  m.s_minus_ = supply.value(0.0);
  m.s_plus_ = supply.value(1.0);
  m.d_plus_ = demand.value(0.0);
  m.d_minus_ = demand.value(1.0);
  m.supply_ = std::make_shared<const Curve>(std::move(supply));
  m.demand_ = std::make_shared<const Curve>(std::move(demand));
  m.validate();
  constexpr int kSamples = 1000;
  for (int i = 0; i < kSamples; ++i) {
    double q0 = double(i) / kSamples, q1 = double(i + 1) / kSamples;
    if (!(m.supply(q1) > m.supply(q0)))
      throw InvalidMarket("supply is not strictly increasing near q=" + fmt(q0));
    if (!(m.demand(q1) < m.demand(q0)))
      throw InvalidMarket("demand is not strictly decreasing near q=" + fmt(q0));
  }
  return m;
}

namespace {

Curve curve_from_points(std::vector<std::pair<double, double>> pts, const char* name) {
  if (pts.size() < 2) throw InvalidMarket(std::string(name) + ": need at least two points");
  std::sort(pts.begin(), pts.end());
  if (std::abs(pts.front().first) > kPriceEps || std::abs(pts.back().first - 1.0) > kPriceEps)
    throw InvalidMarket(std::string(name) + ": points must span q in [0, 1]");
  std::vector<double> q, p;
  for (auto [qi, pi] : pts) {
    if (!q.empty() && !(qi > q.back()))
      throw InvalidMarket(std::string(name) + ": duplicate quantity " + fmt(qi));
    q.push_back(qi);
    p.push_back(pi);
  }
  if (q.size() == 2) {
    double a = p[0], s = p[1] - p[0];
    return Curve{[a, s](double x) { return a + s * x; }, [s](double) { return s; }};
  }
  if (q.size() == 3) {
    // the monotone cubic needs four nodes; add the chord midpoints
    std::vector<double> q2, p2;
    for (std::size_t i = 0; i < 3; ++i) {
      q2.push_back(q[i]);
      p2.push_back(p[i]);
      if (i < 2) {
        q2.push_back(0.5 * (q[i] + q[i + 1]));
        p2.push_back(0.5 * (p[i] + p[i + 1]));
      }
    }
    q.swap(q2);
    p.swap(p2);
  }
  std::size_t n = q.size();
  double left = (p[1] - p[0]) / (q[1] - q[0]);
  double right = (p[n - 1] - p[n - 2]) / (q[n - 1] - q[n - 2]);
  auto fn = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
      std::move(q), std::move(p), left, right);
  return Curve{[fn](double x) { return (*fn)(std::clamp(x, 0.0, 1.0)); },
               [fn](double x) { return fn->prime(std::clamp(x, 0.0, 1.0)); }};
}

}  // namespace

Market Market::tabulated(std::vector<std::pair<double, double>> supply_points,
                         std::vector<std::pair<double, double>> demand_points) {
  return general(curve_from_points(std::move(supply_points), "supply"),
                 curve_from_points(std::move(demand_points), "demand"));
}

void Market::validate() const {
  for (double v : {s_minus_, s_plus_, d_minus_, d_plus_})
    if (!in_unit(v)) throw InvalidMarket("curve endpoint " + fmt(v) + " outside [0, 1]");
  if (!(s_plus_ > s_minus_)) throw InvalidMarket("supply must be increasing");
  if (!(d_plus_ > d_minus_)) throw InvalidMarket("demand must be decreasing");
  if (!(d_plus_ > s_minus_))
    throw InvalidMarket("d_plus=" + fmt(d_plus_) + " must exceed s_minus=" + fmt(s_minus_) +
                        " (curves do not intersect)");
  if (s_plus_ < d_minus_)
    throw InvalidMarket("s_plus=" + fmt(s_plus_) + " is below d_minus=" + fmt(d_minus_) +
                        " (curves do not intersect)");
}

double Market::alpha() const {
  if (!is_linear()) throw NotLinear("alpha is defined for linear markets only");
  return alpha_;
}

double Market::beta() const {
  if (!is_linear()) throw NotLinear("beta is defined for linear markets only");
  return beta_;
}

double Market::supply(double q) const {
  return is_linear() ? s_minus_ + alpha_ * q : supply_->value(q);
}
double Market::demand(double q) const {
  return is_linear() ? d_plus_ - beta_ * q : demand_->value(q);
}
double Market::supply_slope(double q) const {
  return is_linear() ? alpha_ : supply_->slope(q);
}
double Market::demand_slope(double q) const {
  return is_linear() ? -beta_ : demand_->slope(q);
}

double Market::supply_inverse(double p) const {
  if (p < s_minus_ - kPriceEps || p > s_plus_ + kPriceEps)
    throw OutOfDomain("price " + fmt(p) + " outside the supply range");
  p = std::clamp(p, s_minus_, s_plus_);
  if (is_linear()) return (p - s_minus_) / alpha_;
  double q = numeric::find_root([&](double x) { return supply(x) - p; }, 0.0, 1.0);
  // Newton polish
  double s = supply_slope(q);
  if (s > 0) q = std::clamp(q - (supply(q) - p) / s, 0.0, 1.0);
  return q;
}

double Market::demand_inverse(double p) const {
  if (p < d_minus_ - kPriceEps || p > d_plus_ + kPriceEps)
    throw OutOfDomain("price " + fmt(p) + " outside the demand range");
  p = std::clamp(p, d_minus_, d_plus_);
  if (is_linear()) return (d_plus_ - p) / beta_;
  double q = numeric::find_root([&](double x) { return demand(x) - p; }, 0.0, 1.0);
  double s = demand_slope(q);
  if (s < 0) q = std::clamp(q - (demand(q) - p) / s, 0.0, 1.0);
  return q;
}

double Market::supply_ext(double q) const {
  if (q < 0) return supply(0.0) + supply_slope(0.0) * q;
  if (q > 1) return supply(1.0) + supply_slope(1.0) * (q - 1.0);
  return supply(q);
}
double Market::demand_ext(double q) const {
  if (q < 0) return demand(0.0) + demand_slope(0.0) * q;
  if (q > 1) return demand(1.0) + demand_slope(1.0) * (q - 1.0);
  return demand(q);
}
double Market::supply_slope_ext(double q) const { return supply_slope(std::clamp(q, 0.0, 1.0)); }
double Market::demand_slope_ext(double q) const { return demand_slope(std::clamp(q, 0.0, 1.0)); }

double Market::supply_inverse_ext(double p) const {
  if (p < s_minus_) return (p - s_minus_) / supply_slope(0.0);
  if (p > s_plus_) return 1.0 + (p - s_plus_) / supply_slope(1.0);
  return supply_inverse(p);
}
double Market::demand_inverse_ext(double p) const {
  if (p > d_plus_) return (p - d_plus_) / demand_slope(0.0);
  if (p < d_minus_) return 1.0 + (p - d_minus_) / demand_slope(1.0);
  return demand_inverse(p);
}

double Market::type_cdf(Side side, double v) const {
  if (side == Side::Seller) {
    if (v <= s_minus_) return 0.0;
    if (v >= s_plus_) return 1.0;
    return supply_inverse(v);
  }
  if (v <= d_minus_) return 0.0;
  if (v >= d_plus_) return 1.0;
  return 1.0 - demand_inverse(v);
}

double Market::sample_type(Side side, double u) const {
  u = std::clamp(u, 0.0, 1.0);
  return side == Side::Seller ? supply(u) : demand(1.0 - u);
}

CompetitiveEquilibrium competitive_equilibrium(const Market& mkt) {
  if (mkt.is_linear()) {
    double a = mkt.alpha(), b = mkt.beta();
    return {(a * mkt.d_plus() + b * mkt.s_minus()) / (a + b),
            (mkt.d_plus() - mkt.s_minus()) / (a + b)};
  }
  double q = numeric::find_root([&](double x) { return mkt.supply(x) - mkt.demand(x); }, 0.0, 1.0);
  return {0.5 * (mkt.supply(q) + mkt.demand(q)), q};
}

double type_density(const Market& mkt, Side side, double v) {
  if (side == Side::Seller) {
    if (v < mkt.s_minus() || v > mkt.s_plus()) return 0.0;
    if (mkt.is_linear()) return 1.0 / mkt.alpha();
    return 1.0 / mkt.supply_slope(mkt.supply_inverse(v));
  }
  if (v < mkt.d_minus() || v > mkt.d_plus()) return 0.0;
  if (mkt.is_linear()) return 1.0 / mkt.beta();
  return -1.0 / mkt.demand_slope(mkt.demand_inverse(v));
}

double eval_curve(const Market& mkt, Side side, double q) {
  if (q < -kPriceEps || q > 1.0 + kPriceEps)
    throw OutOfDomain("quantity " + fmt(q) + " outside [0, 1]");
  q = std::clamp(q, 0.0, 1.0);
  return side == Side::Seller ? mkt.supply(q) : mkt.demand(q);
}

double invert_curve(const Market& mkt, Side side, double p) {
  return side == Side::Seller ? mkt.supply_inverse(p) : mkt.demand_inverse(p);
}

}  // namespace cda
