#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

namespace cda {

enum class Side { Seller, Buyer };
enum class MarketKind { Linear, General };

const char* to_string(Side side);

/// A strictly monotone C1 price map on [0, 1] together with its derivative.
struct Curve {
  std::function<double(double)> value;
  std::function<double(double)> slope;
};

struct CompetitiveEquilibrium {
  double price;     // p*
  double quantity;  // q*
};

/// Supply function S (increasing) and demand function D (decreasing) on the
/// unit interval. The seller types are distributed with CDF S^{-1}(m) on
/// [s-, s+], the buyer types with CDF 1 - D^{-1}(M) on [d-, d+].
///
/// A Market is immutable; copies share the underlying curves.
class Market {
 public:
  /// S(x) = s_minus + alpha x, D(x) = d_plus - beta x.
  static Market linear(double s_minus, double alpha, double d_plus, double beta);
  static Market general(Curve supply, Curve demand);
  /// General market from monotone (quantity, price) samples, interpolated by
  /// a shape-preserving cubic. Samples must span q in [0, 1].
  static Market tabulated(std::vector<std::pair<double, double>> supply_points,
                          std::vector<std::pair<double, double>> demand_points);

  MarketKind kind() const { return kind_; }
  bool is_linear() const { return kind_ == MarketKind::Linear; }

  double s_minus() const { return s_minus_; }
  double s_plus() const { return s_plus_; }
  double d_minus() const { return d_minus_; }
  double d_plus() const { return d_plus_; }
  // Throw NotLinear for general markets.
  double alpha() const;
  double beta() const;

  double supply(double q) const;        // S(q), q in [0, 1]
  double demand(double q) const;        // D(q), q in [0, 1]
  double supply_slope(double q) const;  // S'(q)
  double demand_slope(double q) const;  // D'(q)
  double supply_inverse(double p) const;  // S^{-1}(p), p in [s-, s+]
  double demand_inverse(double p) const;  // D^{-1}(p), p in [d-, d+]

  // Curves continued linearly outside [0, 1]. The equilibrium solver shoots
  // through this continuation when a candidate boundary lies outside the
  // type supports; for linear markets it is exact.
  double supply_ext(double q) const;
  double demand_ext(double q) const;
  double supply_slope_ext(double q) const;
  double demand_slope_ext(double q) const;
  double supply_inverse_ext(double p) const;
  double demand_inverse_ext(double p) const;

  /// Pr(type <= v) for a randomly chosen trader of the given side.
  double type_cdf(Side side, double v) const;
  /// Maps a uniform draw u in [0, 1] to a type with the side's distribution.
  double sample_type(Side side, double u) const;

 private:
  Market() = default;
  void validate() const;

  MarketKind kind_ = MarketKind::Linear;
  double s_minus_ = 0, s_plus_ = 0, d_minus_ = 0, d_plus_ = 0;
  double alpha_ = 0, beta_ = 0;
  std::shared_ptr<const Curve> supply_, demand_;
};

CompetitiveEquilibrium competitive_equilibrium(const Market& mkt);

/// sigma(v) for sellers, mu(v) for buyers. Zero outside the type support;
/// one-sided limits at the support endpoints.
double type_density(const Market& mkt, Side side, double v);

/// Seller: S(q); Buyer: D(q).
double eval_curve(const Market& mkt, Side side, double q);
/// Seller: S^{-1}(p); Buyer: D^{-1}(p). Throws OutOfDomain outside the range.
double invert_curve(const Market& mkt, Side side, double p);

}  // namespace cda
