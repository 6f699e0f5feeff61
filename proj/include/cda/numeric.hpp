#pragma once

// Small numerical toolbox shared by the analytic modules: adaptive quadrature
// with explicit breakpoints, bracketed root finding, finite differences and
// monotone interpolants.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

// pchip in this boost release calls isnan unqualified.
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/cubic_hermite.hpp>
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "cda/error.hpp"

namespace cda::numeric {

inline constexpr double kDefaultQuadTol = 1e-10;

/// Integrates f over [a, b], splitting at every breakpoint strictly inside
/// the interval. Each piece is handled by adaptive Gauss-Kronrod (21 points).
template <class F>
double integrate(F&& f, double a, double b, double tol = kDefaultQuadTol,
                 std::span<const double> breaks = {}) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  for (double c : breaks)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double err = 0.0;
    double piece = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
        f, cuts[i], cuts[i + 1], 18, tol, &err);
    if (!std::isfinite(piece) || !std::isfinite(err))
      throw QuadratureFailure("non-finite integrand on [" + std::to_string(cuts[i]) + ", " +
                              std::to_string(cuts[i + 1]) + "]");
    total += piece;
  }
  return total;
}

template <class F>
double integrate(F&& f, double a, double b, double tol, std::initializer_list<double> breaks) {
  return integrate(std::forward<F>(f), a, b, tol,
                   std::span<const double>(breaks.begin(), breaks.size()));
}

/// Five-point central difference.
template <class F>
double derivative(F&& f, double x, double h = 1e-5) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

/// Root of a continuous f with a sign change on [lo, hi] (TOMS 748).
template <class F>
double find_root(F&& f, double lo, double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw NoConvergence("root not bracketed on [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
  std::uintmax_t iters = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(52);
  auto [l, r] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (l + r);
}

/// sup{ t in [lo, hi] : pred(t) } for a predicate that is true on an initial
/// segment of [lo, hi]. Returns lo - 1 if pred(lo) is false.
template <class Pred>
double last_true(Pred&& pred, double lo, double hi) {
  if (!pred(lo)) return lo - 1.0;
  if (pred(hi)) return hi;
  for (int i = 0; i < 100 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
    double mid = 0.5 * (lo + hi);
    if (pred(mid))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Shape-preserving (Fritsch-Carlson) cubic through monotone samples.
class MonotoneInterpolant {
 public:
  MonotoneInterpolant() = default;
  MonotoneInterpolant(std::vector<double> x, std::vector<double> y)
      : lo_(x.front()), hi_(x.back()), ylo_(y.front()), yhi_(y.back()),
        impl_(std::make_shared<Impl>(std::move(x), std::move(y))) {}

  double operator()(double x) const {
    if (x <= lo_) return ylo_;
    if (x >= hi_) return yhi_;
    return impl_->fn(x);
  }
  double prime(double x) const {
    if (x < lo_ || x > hi_) return 0.0;
    return impl_->fn.prime(std::clamp(x, lo_, hi_));
  }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool empty() const { return !impl_; }

 private:
  struct Impl {
    Impl(std::vector<double> x, std::vector<double> y) : fn(std::move(x), std::move(y)) {}
    boost::math::interpolators::pchip<std::vector<double>> fn;
  };
  double lo_ = 0, hi_ = 0, ylo_ = 0, yhi_ = 0;
  std::shared_ptr<const Impl> impl_;
};

/// Cubic Hermite interpolant through samples with known slopes.
class HermiteTable {
 public:
  HermiteTable() = default;
  HermiteTable(std::vector<double> x, std::vector<double> y, std::vector<double> dydx)
      : lo_(x.front()), hi_(x.back()), ylo_(y.front()), yhi_(y.back()),
        impl_(std::make_shared<Impl>(std::move(x), std::move(y), std::move(dydx))) {}

  double operator()(double x) const {
    if (x <= lo_) return ylo_;
    if (x >= hi_) return yhi_;
    return impl_->fn(x);
  }
  double prime(double x) const { return impl_->fn.prime(std::clamp(x, lo_, hi_)); }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  struct Impl {
    Impl(std::vector<double> x, std::vector<double> y, std::vector<double> d)
        : fn(std::move(x), std::move(y), std::move(d)) {}
    boost::math::interpolators::cubic_hermite<std::vector<double>> fn;
  };
  double lo_ = 0, hi_ = 0, ylo_ = 0, yhi_ = 0;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace cda::numeric
