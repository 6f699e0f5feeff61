#include "cda/equilibrium.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "cda/error.hpp"
#include "cda/numeric.hpp"

namespace cda {
namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

constexpr double kBoundaryTol = 1e-9;

template <class F>
double solve_increasing(F&& f, double lo, double hi) {
  if (f(lo) >= 0.0) return lo;
  if (f(hi) <= 0.0) return hi;
  return numeric::find_root(f, lo, hi);
}

}  // namespace

// ------------------------------------------------------------- closed form

LinearBne::LinearBne(const Market& mkt)
    : s_minus_(mkt.s_minus()),
      alpha_(mkt.alpha()),
      d_plus_(mkt.d_plus()),
      beta_(mkt.beta()),
      s_plus_(mkt.s_plus()),
      d_minus_(mkt.d_minus()) {
  w_ = d_plus_ - s_minus_;
  sa_ = std::sqrt(alpha_);
  sb_ = std::sqrt(beta_);
  gamma_ = sb_ / (sa_ + sb_);
  lambda_ = sb_ / sa_;
  x_bar_ = gamma_ * s_minus_ + (1.0 - gamma_) * d_plus_;
  a_minus_ = s_minus_ + (1.0 - gamma_) * (1.0 - gamma_) * w_;
  b_plus_ = d_plus_ - gamma_ * gamma_ * w_;
}

double LinearBne::saddle_level() const {
  return alpha_ * beta_ * w_ / ((sa_ + sb_) * (sa_ + sb_));
}

bool LinearBne::exists() const {
  return b_plus_ <= s_plus_ + kBoundaryTol && a_minus_ >= d_minus_ - kBoundaryTol;
}

std::string LinearBne::failure() const {
  std::string out;
  if (b_plus_ > s_plus_ + kBoundaryTol)
    out = "b_plus=" + fmt(b_plus_) + " exceeds s_plus=" + fmt(s_plus_);
  if (a_minus_ < d_minus_ - kBoundaryTol) {
    if (!out.empty()) out += "; ";
    out += "a_minus=" + fmt(a_minus_) + " is below d_minus=" + fmt(d_minus_);
  }
  return out;
}

double LinearBne::L(double x) const {
  return w_ + (alpha_ * (d_plus_ - x) + beta_ * (x - s_minus_)) / (2.0 * sa_ * sb_);
}

double LinearBne::A(double x) const {
  double p = -gamma_ * alpha_ * (d_plus_ - x) + (2.0 - gamma_) * beta_ * (x - s_minus_);
  return p * L(x) / (2.0 * alpha_ * beta_ * w_);
}

double LinearBne::dA(double x) const {
  double p = -gamma_ * alpha_ * (d_plus_ - x) + (2.0 - gamma_) * beta_ * (x - s_minus_);
  double dp = gamma_ * alpha_ + (2.0 - gamma_) * beta_;
  double dl = (beta_ - alpha_) / (2.0 * sa_ * sb_);
  return (dp * L(x) + p * dl) / (2.0 * alpha_ * beta_ * w_);
}

double LinearBne::Bc(double x) const {
  double q = (1.0 + gamma_) * alpha_ * (d_plus_ - x) - (1.0 - gamma_) * beta_ * (x - s_minus_);
  return q * L(x) / (2.0 * alpha_ * beta_ * w_);
}

double LinearBne::dBc(double x) const {
  double q = (1.0 + gamma_) * alpha_ * (d_plus_ - x) - (1.0 - gamma_) * beta_ * (x - s_minus_);
  double dq = -(1.0 + gamma_) * alpha_ - (1.0 - gamma_) * beta_;
  double dl = (beta_ - alpha_) / (2.0 * sa_ * sb_);
  return (dq * L(x) + q * dl) / (2.0 * alpha_ * beta_ * w_);
}

double LinearBne::T(double x) const {
  double p = -gamma_ * alpha_ * (d_plus_ - x) + (2.0 - gamma_) * beta_ * (x - s_minus_);
  return p / (alpha_ * (d_plus_ - x) + beta_ * (x - s_minus_));
}

double LinearBne::V(double x, double t) const {
  return alpha_ * (d_plus_ - x) * t * t - beta_ * (s_minus_ - x) * (1.0 - t) * (1.0 - t);
}

double LinearBne::ask(double m) const {
  if (std::abs(alpha_ - beta_) <= 1e-12 * (alpha_ + beta_))
    return 2.0 / 3.0 * m + d_plus_ / 4.0 + s_minus_ / 12.0;
  double k = (alpha_ - beta_) / (1.0 - gamma_) / w_;
  double c = 4.0 / ((2.0 * sa_ + sb_) * (2.0 * sa_ + sb_));
  double root = std::sqrt(std::max(0.0, 1.0 - c * k * (m - s_minus_)));
  return s_minus_ + (alpha_ + beta_ + sa_ * sb_ - (beta_ + 2.0 * sa_ * sb_) * root) / k;
}

double LinearBne::bid(double M) const {
  if (std::abs(alpha_ - beta_) <= 1e-12 * (alpha_ + beta_))
    return 2.0 / 3.0 * M + s_minus_ / 4.0 + d_plus_ / 12.0;
  double k = (alpha_ - beta_) / gamma_ / w_;
  double c = 4.0 / ((sa_ + 2.0 * sb_) * (sa_ + 2.0 * sb_));
  double root = std::sqrt(std::max(0.0, 1.0 + c * k * (d_plus_ - M)));
  return d_plus_ - (-(alpha_ + beta_ + sa_ * sb_) + (alpha_ + 2.0 * sa_ * sb_) * root) / k;
}

// ------------------------------------------------------ shared assembly

namespace {

using Fn = std::function<double(double)>;

ShoutDistributions bne_distributions(const Market& mkt, double a_minus, double b_plus,
                                     Fn A, Fn dA, Fn Bc, Fn dBc, CdfRepresentation rep) {
  double s_plus = mkt.s_plus(), d_minus = mkt.d_minus();
  auto ask_cont = [=](double x) {
    if (x < a_minus) return 0.0;
    if (x <= b_plus) return std::clamp(A(x), 0.0, 1.0);
    return mkt.type_cdf(Side::Seller, x);
  };
  auto ask_dens = [=](double x) {
    if (x < a_minus) return 0.0;
    if (x <= b_plus) return dA(x);
    return type_density(mkt, Side::Seller, x);
  };
  auto bid_cont = [=](double x) {
    if (x < a_minus) return mkt.type_cdf(Side::Buyer, x);
    if (x <= b_plus) return 1.0 - std::clamp(Bc(x), 0.0, 1.0);
    return 1.0;
  };
  auto bid_dens = [=](double x) {
    if (x < a_minus) return type_density(mkt, Side::Buyer, x);
    if (x <= b_plus) return -dBc(x);
    return 0.0;
  };
  ShoutCdf asks(ask_cont, ask_dens, {}, a_minus, std::max(b_plus, s_plus), rep);
  asks.with_breaks({b_plus});
  ShoutCdf bids(bid_cont, bid_dens, {}, std::min(a_minus, d_minus), b_plus, rep);
  bids.with_breaks({a_minus});
  return {asks, bids};
}

void attach_profiles(const Market& mkt, EquilibriumSolution& sol, StrategyKind kind) {
  auto dists = bne_distributions(mkt, sol.a_minus, sol.b_plus, sol.A, sol.dA, sol.Bc, sol.dBc,
                                 sol.representation);
  auto identity = [](double v) { return v; };
  std::vector<ShoutPiece> sp{{mkt.s_minus(), sol.b_plus, sol.ask, false}};
  if (sol.b_plus < mkt.s_plus()) sp.push_back({sol.b_plus, mkt.s_plus(), identity, false});
  std::vector<ShoutPiece> bp;
  if (mkt.d_minus() < sol.a_minus) bp.push_back({mkt.d_minus(), sol.a_minus, identity, false});
  bp.push_back({sol.a_minus, mkt.d_plus(), sol.bid, false});
  sol.sellers = StrategyProfile::piecewise(Side::Seller, std::move(sp))
                    .with_kind(kind)
                    .with_known_distribution(dists.asks);
  sol.buyers = StrategyProfile::piecewise(Side::Buyer, std::move(bp))
                   .with_kind(kind)
                   .with_known_distribution(dists.bids);
}

}  // namespace

PayoffContext EquilibriumSolution::context(const Market& mkt, double tol) const {
  if (!sellers || !buyers) throw AssumptionViolated("no equilibrium profiles: " + failure);
  return PayoffContext::make(mkt, *sellers, *buyers, tol);
}

EquilibriumSolution solve_linear_bne(const Market& mkt) {
  auto bne = std::make_shared<const LinearBne>(mkt);
  EquilibriumSolution sol;
  sol.method = "closed_form";
  sol.exists = bne->exists();
  sol.failure = bne->failure();
  sol.a_minus = bne->a_minus();
  sol.b_plus = bne->b_plus();
  sol.gamma = bne->gamma();
  sol.lambda = bne->lambda();
  sol.x_bar = bne->x_bar();
  sol.A = [bne](double x) { return bne->A(x); };
  sol.dA = [bne](double x) { return bne->dA(x); };
  sol.Bc = [bne](double x) { return bne->Bc(x); };
  sol.dBc = [bne](double x) { return bne->dBc(x); };
  sol.T = [bne](double x) { return bne->T(x); };
  double a_minus = sol.a_minus, b_plus = sol.b_plus;
  sol.ask = [bne, b_plus](double m) { return m > b_plus ? m : bne->ask(m); };
  sol.bid = [bne, a_minus](double M) { return M < a_minus ? M : bne->bid(M); };
  sol.representation = CdfRepresentation::ClosedForm;
  if (sol.exists) {
    attach_profiles(mkt, sol, StrategyKind::LinearBNE);
    sol.residuals = equation_residuals(mkt, sol);
  }
  return sol;
}

// ------------------------------------------------------- numeric solver

namespace {

using State = std::array<double, 3>;  // (A, B_c, x)

State cross(const State& u, const State& v) {
  return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

double norm(const State& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

// Flow on the consistency surface f = 0: the field is tangent to the surface
// and annihilated by the combined first-order condition.
struct Flow {
  const Market& mkt;

  double f(const State& p) const {
    double A = p[0], B = p[1], x = p[2];
    return B * (mkt.demand_ext(B) - x) - A * (x - mkt.supply_ext(A));
  }
  State grad(const State& p) const {
    double A = p[0], B = p[1], x = p[2];
    return {mkt.supply_ext(A) - x + A * mkt.supply_slope_ext(A),
            mkt.demand_ext(B) - x + B * mkt.demand_slope_ext(B), -(A + B)};
  }
  State field(const State& p) const {
    double A = p[0], B = p[1];
    double gap = mkt.supply_ext(A) - mkt.demand_ext(B);
    State v1{2.0 * gap * B, -2.0 * gap * A, (A + B) * (A + B)};
    return cross(v1, grad(p));
  }

  void project(State& p) const {
    for (int i = 0; i < 4; ++i) {
      double r = f(p);
      if (std::abs(r) < 1e-15) return;
      State g = grad(p);
      double n2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
      if (!(n2 > 0)) break;
      for (int k = 0; k < 3; ++k) p[k] -= r * g[k] / n2;
    }
    if (std::abs(f(p)) > 1e-10)
      throw SurfaceProjectionFailure("residual " + fmt(f(p)) + " at x=" + fmt(p[2]));
  }
};

namespace odeint = boost::numeric::odeint;
using Stepper = odeint::runge_kutta_cash_karp54<State>;

enum class Plane { A, Bc };

struct ShotResult {
  int cls = 0;  // which side of the separatrix; 0 if the far plane was reached
  State closest{};
  double closest_speed = std::numeric_limits<double>::infinity();
};

// Integrates from a launch point on one boundary plane toward the saddle and
// reports the first monotonicity violation.
ShotResult shoot(const Flow& flow, State p, Plane from, const BneOptions& o) {
  State g0 = flow.field(p);
  double sigma = from == Plane::A ? (g0[2] >= 0 ? 1.0 : -1.0) : (g0[2] <= 0 ? 1.0 : -1.0);
  auto sys = [&](const State& s, State& ds, double) {
    State g = flow.field(s);
    for (int k = 0; k < 3; ++k) ds[k] = sigma * g[k];
  };
  auto stepper = odeint::make_controlled<Stepper>(1e-14, o.tolerance);
  double t = 0.0;
  double dt = 1e-3 / std::max(norm(g0), 1e-12);
  double maxA = p[0], minA = p[0], maxB = p[1], minB = p[1];
  constexpr double kThreshold = 1e-9;
  ShotResult res;
  for (int step = 0; step < 400000; ++step) {
    if (stepper.try_step(sys, p, t, dt) != odeint::success) continue;
    flow.project(p);
    State g = flow.field(p);
    double speed = norm(g);
    if (speed < res.closest_speed) {
      res.closest_speed = speed;
      res.closest = p;
    }
    maxA = std::max(maxA, p[0]);
    minA = std::min(minA, p[0]);
    maxB = std::max(maxB, p[1]);
    minB = std::min(minB, p[1]);
    if (from == Plane::A) {
      if (p[1] - minB > kThreshold) { res.cls = 1; return res; }
      if (maxA - p[0] > kThreshold) { res.cls = -1; return res; }
      if (p[1] <= 0.0) return res;
    } else {
      if (p[0] - minA > kThreshold) { res.cls = 1; return res; }
      if (maxB - p[1] > kThreshold) { res.cls = -1; return res; }
      if (p[0] <= 0.0) return res;
    }
    if (p[2] < -1.0 || p[2] > 2.0) throw NoConvergence("shot left the price range");
    if (std::abs(g[2]) > 0) dt = std::min(dt, o.max_dx / std::abs(g[2]));
  }
  throw NoConvergence("shot did not resolve within the step budget");
}

State launch(const Market& mkt, Plane plane, double x0) {
  if (plane == Plane::A) return {0.0, mkt.demand_inverse_ext(x0), x0};
  return {mkt.supply_inverse_ext(x0), 0.0, x0};
}

struct BisectResult {
  double x0;
  ShotResult shot;
  int iterations;
};

BisectResult bisect_boundary(const Flow& flow, Plane plane, double lo, double hi,
                             const BneOptions& o) {
  int n = std::max(o.scan_points, 3);
  std::vector<double> xs(n);
  std::vector<int> cls(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = lo + (hi - lo) * (i + 0.5) / n;
    ShotResult r = shoot(flow, launch(flow.mkt, plane, xs[i]), plane, o);
    cls[i] = r.cls;
    if (r.cls == 0) return {xs[i], r, 0};
  }
  int k = -1;
  for (int i = 0; i + 1 < n; ++i)
    if (cls[i] != cls[i + 1]) { k = i; break; }
  if (k < 0)
    throw NoConvergence(std::string("no separatrix bracket from the ") +
                        (plane == Plane::A ? "A = 0" : "B_c = 0") + " plane");
  double a = xs[k], b = xs[k + 1];
  int ca = cls[k];
  ShotResult last;
  int it = 0;
  for (; it < o.max_bisections && b - a > 1e-15; ++it) {
    double mid = 0.5 * (a + b);
    last = shoot(flow, launch(flow.mkt, plane, mid), plane, o);
    if (last.cls == 0) return {mid, last, it + 1};
    if (last.cls == ca)
      a = mid;
    else
      b = mid;
  }
  if (b - a > 1e-9)
    throw NoConvergence("bisection budget of " + std::to_string(o.max_bisections) +
                        " exhausted at width " + fmt(b - a));
  return {0.5 * (a + b), last, it};
}

State refine_saddle(const Flow& flow, State p) {
  for (int it = 0; it < 80; ++it) {
    auto resid = [&](const State& s) {
      State g = flow.field(s);
      return Eigen::Vector4d(g[0], g[1], g[2], flow.f(s));
    };
    Eigen::Vector4d r = resid(p);
    Eigen::Matrix<double, 4, 3> J;
    for (int k = 0; k < 3; ++k) {
      double h = 1e-7 * std::max(1.0, std::abs(p[k]));
      State a = p, b = p;
      a[k] += h;
      b[k] -= h;
      J.col(k) = (resid(a) - resid(b)) / (2.0 * h);
    }
    Eigen::Vector3d d = J.colPivHouseholderQr().solve(-r);
    for (int k = 0; k < 3; ++k) p[k] += d[k];
    if (d.norm() < 1e-15) break;
  }
  State g = flow.field(p);
  if (norm(g) > 1e-11 || std::abs(flow.f(p)) > 1e-11)
    throw NoConvergence("saddle refinement did not converge (|F|=" + fmt(norm(g)) + ")");
  return p;
}

struct Separatrix {
  State direction;
  double eigenvalue;
};

Separatrix separatrix_direction(const Flow& flow, const State& saddle) {
  Eigen::Matrix3d J;
  for (int k = 0; k < 3; ++k) {
    double h = 1e-6 * std::max(1.0, std::abs(saddle[k]));
    State a = saddle, b = saddle;
    a[k] += h;
    b[k] -= h;
    State ga = flow.field(a), gb = flow.field(b);
    for (int i = 0; i < 3; ++i) J(i, k) = (ga[i] - gb[i]) / (2.0 * h);
  }
  Eigen::EigenSolver<Eigen::Matrix3d> es(J);
  State n = flow.grad(saddle);
  double nn = norm(n);
  double scale = J.norm();
  int best = -1;
  double best_x = -1.0;
  for (int i = 0; i < 3; ++i) {
    auto lam = es.eigenvalues()[i];
    if (std::abs(lam.imag()) > 1e-8 * scale || std::abs(lam.real()) < 1e-8 * scale) continue;
    Eigen::Vector3d v = es.eigenvectors().col(i).real().normalized();
    double normal = std::abs(v[0] * n[0] + v[1] * n[1] + v[2] * n[2]) / nn;
    if (normal > 1e-3) continue;
    if (std::abs(v[2]) > best_x) {
      best_x = std::abs(v[2]);
      best = i;
    }
  }
  if (best < 0) throw NoConvergence("singular point of the flow is not a saddle");
  Eigen::Vector3d v = es.eigenvectors().col(best).real().normalized();
  return {{v[0], v[1], v[2]}, es.eigenvalues()[best].real()};
}

// Follows one branch of the separatrix away from the saddle until it meets a
// boundary plane. Returns the visited states, the last one on the plane.
std::vector<State> trace_branch(const Flow& flow, const State& saddle, const Separatrix& sep,
                                double dir, const BneOptions& o) {
  State p;
  for (int k = 0; k < 3; ++k) p[k] = saddle[k] + dir * o.launch_eps * sep.direction[k];
  flow.project(p);
  Plane target = dir * sep.direction[2] < 0 ? Plane::A : Plane::Bc;
  int idx = target == Plane::A ? 0 : 1;
  double sigma = sep.eigenvalue > 0 ? 1.0 : -1.0;
  auto sys = [&](const State& s, State& ds, double) {
    State g = flow.field(s);
    for (int k = 0; k < 3; ++k) ds[k] = sigma * g[k];
  };
  auto controlled = odeint::make_controlled<Stepper>(1e-14, o.tolerance);
  Stepper single;
  std::vector<State> path{p};
  double t = 0.0;
  double dt = 1e-3 / std::max(norm(flow.field(p)), 1e-12);
  for (int step = 0; step < 400000; ++step) {
    State prev = p;
    double t_prev = t;
    if (controlled.try_step(sys, p, t, dt) != odeint::success) continue;
    if (p[idx] <= 0.0) {
      // secant on the step length for the plane crossing
      double h_lo = 0.0, v_lo = prev[idx];
      double h_hi = t - t_prev, v_hi = p[idx];
      State q = p;
      for (int it = 0; it < 30 && std::abs(q[idx]) > 1e-15; ++it) {
        double h = h_lo + (h_hi - h_lo) * v_lo / (v_lo - v_hi);
        single.do_step(sys, prev, t_prev, q, h);
        if (q[idx] > 0) { h_lo = h; v_lo = q[idx]; } else { h_hi = h; v_hi = q[idx]; }
      }
      double x = q[2];
      if (target == Plane::A)
        q = {0.0, flow.mkt.demand_inverse_ext(x), x};
      else
        q = {flow.mkt.supply_inverse_ext(x), 0.0, x};
      path.push_back(q);
      return path;
    }
    flow.project(p);
    path.push_back(p);
    State g = flow.field(p);
    if (p[2] < -1.0 || p[2] > 2.0) throw NoConvergence("separatrix left the price range");
    if (std::abs(g[2]) > 0) dt = std::min(dt, o.max_dx / std::abs(g[2]));
  }
  throw NoConvergence("separatrix did not reach a boundary plane");
}

}  // namespace

EquilibriumSolution solve_bne_numeric(const Market& mkt, const BneOptions& opts) {
  Flow flow{mkt};
  double p_star = competitive_equilibrium(mkt).price;

  BisectResult from_a = bisect_boundary(flow, Plane::A, mkt.s_minus(), p_star, opts);
  BisectResult from_b = bisect_boundary(flow, Plane::Bc, p_star, mkt.d_plus(), opts);

  State guess = from_a.shot.closest_speed < from_b.shot.closest_speed ? from_a.shot.closest
                                                                      : from_b.shot.closest;
  State saddle = refine_saddle(flow, guess);
  Separatrix sep = separatrix_direction(flow, saddle);

  std::vector<State> down = trace_branch(flow, saddle, sep, sep.direction[2] < 0 ? 1.0 : -1.0,
                                         opts);
  std::vector<State> up = trace_branch(flow, saddle, sep, sep.direction[2] < 0 ? -1.0 : 1.0,
                                       opts);

  // Nodes ordered by increasing x: A-plane end, ..., saddle, ..., B_c-plane end.
  std::vector<State> nodes(down.rbegin(), down.rend());
  nodes.push_back(saddle);
  nodes.insert(nodes.end(), up.begin(), up.end());
  std::vector<double> xs, as, bs, das, dbs;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const State& s = nodes[i];
    if (!xs.empty() && !(s[2] > xs.back())) {
      if (s[2] > xs.back() - 1e-13) continue;
      throw NoConvergence("separatrix is not monotone in x near x=" + fmt(s[2]));
    }
    double da, db;
    State g = flow.field(s);
    if (&s == &nodes[down.size()] || std::abs(g[2]) < 1e-14) {
      da = sep.direction[0] / sep.direction[2];
      db = sep.direction[1] / sep.direction[2];
    } else {
      da = g[0] / g[2];
      db = g[1] / g[2];
    }
    xs.push_back(s[2]);
    as.push_back(s[0]);
    bs.push_back(s[1]);
    das.push_back(da);
    dbs.push_back(db);
  }
  if (xs.size() < 4) throw NoConvergence("separatrix produced too few nodes");

  numeric::HermiteTable a_tab(xs, as, das);
  numeric::HermiteTable b_tab(xs, bs, dbs);

  EquilibriumSolution sol;
  sol.method = "shooting";
  sol.experimental = !mkt.is_linear();
  sol.representation = CdfRepresentation::TabulatedMonotone;
  sol.a_minus = xs.front();
  sol.b_plus = xs.back();
  sol.bisections = from_a.iterations + from_b.iterations;
  sol.shoot_a_minus = from_a.x0;
  sol.shoot_b_plus = from_b.x0;
  sol.saddle = {saddle[0], saddle[1], saddle[2]};
  if (mkt.is_linear()) {
    LinearBne lin(mkt);
    sol.gamma = lin.gamma();
    sol.lambda = lin.lambda();
  }
  sol.x_bar = saddle[2];

  sol.A = [a_tab](double x) { return a_tab(x); };
  sol.dA = [a_tab](double x) { return a_tab.prime(x); };
  sol.Bc = [b_tab](double x) { return b_tab(x); };
  sol.dBc = [b_tab](double x) { return b_tab.prime(x); };
  sol.T = [a_tab, b_tab](double x) {
    double a = a_tab(x), b = b_tab(x);
    return a + b > 0 ? a / (a + b) : 0.0;
  };

  std::string failure;
  if (sol.b_plus > mkt.s_plus() + kBoundaryTol)
    failure = "b_plus=" + fmt(sol.b_plus) + " exceeds s_plus=" + fmt(mkt.s_plus());
  if (sol.a_minus < mkt.d_minus() - kBoundaryTol) {
    if (!failure.empty()) failure += "; ";
    failure += "a_minus=" + fmt(sol.a_minus) + " is below d_minus=" + fmt(mkt.d_minus());
  }
  sol.exists = failure.empty();
  sol.failure = failure;

  if (sol.exists) {
    double a_minus = sol.a_minus, b_plus = sol.b_plus;
    Market m = mkt;
    sol.ask = [m, a_tab, a_minus, b_plus](double v) {
      if (v > b_plus) return v;
      double q = m.supply_inverse(std::max(v, m.s_minus()));
      return solve_increasing([&](double x) { return a_tab(x) - q; }, a_minus, b_plus);
    };
    sol.bid = [m, b_tab, a_minus, b_plus](double v) {
      if (v < a_minus) return v;
      double q = m.demand_inverse(std::min(v, m.d_plus()));
      return solve_increasing([&](double x) { return q - b_tab(x); }, a_minus, b_plus);
    };
    attach_profiles(mkt, sol, StrategyKind::PiecewiseDeterministic);
    sol.residuals = equation_residuals(mkt, sol);
  }
  return sol;
}

// ------------------------------------------------------------ verification

Residuals equation_residuals(const Market& mkt, const EquilibriumSolution& sol, int grid) {
  Residuals r;
  for (int i = 0; i < grid; ++i) {
    double x = sol.a_minus + (sol.b_plus - sol.a_minus) * (i + 0.5) / grid;
    double A = sol.A(x), B = sol.Bc(x), dA = sol.dA(x), dB = sol.dBc(x);
    double m = mkt.supply_ext(A), M = mkt.demand_ext(B);
    double k = dA * B - A * dB;
    double seller = 2.0 * (m - x) * k + B * (A + B);
    double buyer = 2.0 * (M - x) * k - A * (A + B);
    r.foc = std::max({r.foc, std::abs(seller), std::abs(buyer)});
    r.consistency = std::max(r.consistency, std::abs(B * (M - x) - A * (x - m)));
  }
  return r;
}

bool VerificationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second; });
}

VerificationReport verify_solution(const Market& mkt, const EquilibriumSolution& sol, int grid,
                                   double residual_tol) {
  VerificationReport rep;
  if (!sol.exists) {
    rep.checks.push_back({"equilibrium exists", false});
    return rep;
  }
  rep.residuals = equation_residuals(mkt, sol, grid);
  auto& c = rep.checks;
  c.push_back({"first-order conditions", rep.residuals.foc < residual_tol});
  c.push_back({"consistency equation", rep.residuals.consistency < residual_tol});

  double am = sol.a_minus, bp = sol.b_plus;
  constexpr double kPointTol = 1e-8;
  bool a_inc = true, b_dec = true;
  double prev_a = sol.A(am), prev_b = sol.Bc(am);
  for (int i = 1; i <= grid; ++i) {
    double x = am + (bp - am) * i / grid;
    double a = sol.A(x), b = sol.Bc(x);
    a_inc = a_inc && a > prev_a;
    b_dec = b_dec && b < prev_b;
    prev_a = a;
    prev_b = b;
  }
  c.push_back({"A strictly increasing", a_inc});
  c.push_back({"B_c strictly decreasing", b_dec});
  c.push_back({"A(a_minus) = 0", std::abs(sol.A(am)) < kPointTol});
  c.push_back({"B_c(b_plus) = 0", std::abs(sol.Bc(bp)) < kPointTol});
  c.push_back({"A(b_plus) = S^-1(b_plus)",
               std::abs(sol.A(bp) - mkt.supply_inverse(std::min(bp, mkt.s_plus()))) < kPointTol});
  c.push_back({"B_c(a_minus) = D^-1(a_minus)",
               std::abs(sol.Bc(am) - mkt.demand_inverse(std::max(am, mkt.d_minus()))) <
                   kPointTol});
  c.push_back({"T(a_minus) = 0", std::abs(sol.T(am)) < kPointTol});
  c.push_back({"T(b_plus) = 1", std::abs(sol.T(bp) - 1.0) < kPointTol});

  bool ask_above = true, bid_below = true;
  for (int i = 0; i < grid; ++i) {
    double m = mkt.s_minus() + (bp - mkt.s_minus()) * i / grid;
    ask_above = ask_above && sol.ask(m) > m;
    double M = mkt.d_plus() - (mkt.d_plus() - am) * i / grid;
    bid_below = bid_below && sol.bid(M) < M;
  }
  c.push_back({"a(m) > m for intramarginal sellers", ask_above});
  c.push_back({"b(M) < M for intramarginal buyers", bid_below});
  c.push_back({"a_minus >= d_minus", am >= mkt.d_minus() - kBoundaryTol});
  c.push_back({"b_plus <= s_plus", bp <= mkt.s_plus() + kBoundaryTol});
  c.push_back({"a(b_plus) = b_plus", std::abs(sol.ask(bp) - bp) < kPointTol});
  c.push_back({"b(a_minus) = a_minus", std::abs(sol.bid(am) - am) < kPointTol});
  c.push_back({"a(s_minus) = a_minus", std::abs(sol.ask(mkt.s_minus()) - am) < 1e-6});
  c.push_back({"b(d_plus) = b_plus", std::abs(sol.bid(mkt.d_plus()) - bp) < 1e-6});
  double p_star = competitive_equilibrium(mkt).price;
  c.push_back({"a_minus < p* < b_plus", am < p_star && p_star < bp});
  return rep;
}

}  // namespace cda
