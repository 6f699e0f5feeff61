#include "cda/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cda/error.hpp"
#include "cda/numeric.hpp"

namespace cda {
namespace {

constexpr double kTypeEps = 1e-9;

std::string fmt(double v) { return std::to_string(v); }

std::vector<Atom> merge_atoms(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.location < b.location; });
  std::vector<Atom> out;
  for (const Atom& a : atoms) {
    if (a.mass <= 0) continue;
    if (!out.empty() && std::abs(out.back().location - a.location) < 1e-15)
      out.back().mass += a.mass;
    else
      out.push_back(a);
  }
  return out;
}

}  // namespace

const char* to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::PiecewiseDeterministic: return "piecewise";
    case StrategyKind::OnePrice: return "one_price";
    case StrategyKind::ZIC: return "zic";
    case StrategyKind::LinearBNE: return "linear_bne";
  }
  return "?";
}

const char* to_string(CdfRepresentation rep) {
  switch (rep) {
    case CdfRepresentation::ClosedForm: return "closed_form";
    case CdfRepresentation::Quadrature: return "quadrature";
    case CdfRepresentation::TabulatedMonotone: return "tabulated";
  }
  return "?";
}

// ---------------------------------------------------------------- ShoutCdf

ShoutCdf::ShoutCdf(Fn continuous, Fn density, std::vector<Atom> atoms, double lowest,
                   double highest, CdfRepresentation rep)
    : continuous_(std::move(continuous)),
      density_(std::move(density)),
      atoms_(merge_atoms(std::move(atoms))),
      lowest_(lowest),
      highest_(highest),
      rep_(rep) {}

double ShoutCdf::at_most(double x) const {
  double v = continuous_(x);
  for (const Atom& a : atoms_)
    if (a.location <= x) v += a.mass;
  return std::clamp(v, 0.0, 1.0);
}

double ShoutCdf::below(double x) const {
  double v = continuous_(x);
  for (const Atom& a : atoms_)
    if (a.location < x) v += a.mass;
  return std::clamp(v, 0.0, 1.0);
}

double ShoutCdf::density(double x) const {
  if (density_) return density_(x);
  return numeric::derivative(continuous_, x);
}

double ShoutCdf::integrate(const Fn& g, double lo, double hi, bool include_lo, bool include_hi,
                           double tol) const {
  double total = 0.0;
  std::vector<double> breaks = breaks_;
  breaks.push_back(lowest_);
  breaks.push_back(highest_);
  for (const Atom& a : atoms_) {
    breaks.push_back(a.location);
    bool inside = (a.location > lo || (include_lo && a.location == lo)) &&
                  (a.location < hi || (include_hi && a.location == hi));
    if (inside) total += g(a.location) * a.mass;
  }
  double l = std::max(lo, lowest_), h = std::min(hi, highest_);
  if (h > l) {
    total += numeric::integrate([&](double q) { return g(q) * density(q); }, l, h, tol,
                                std::span<const double>(breaks));
  }
  return total;
}

ShoutCdf& ShoutCdf::with_breaks(std::vector<double> breaks) {
  breaks_ = std::move(breaks);
  return *this;
}

CdfRepresentation ShoutDistributions::representation() const {
  auto rank = [](CdfRepresentation r) {
    return r == CdfRepresentation::ClosedForm ? 0 : r == CdfRepresentation::Quadrature ? 1 : 2;
  };
  return rank(asks.representation()) >= rank(bids.representation()) ? asks.representation()
                                                                     : bids.representation();
}

// --------------------------------------------------------- StrategyProfile

StrategyProfile StrategyProfile::piecewise(Side side, std::vector<ShoutPiece> pieces) {
  if (pieces.empty()) throw ProfileMismatch("a deterministic profile needs at least one piece");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const ShoutPiece& p = pieces[i];
    if (!p.map) throw ProfileMismatch("piece without a shout map");
    if (!(p.type_hi >= p.type_lo)) throw ProfileMismatch("piece with empty type interval");
    double lo = p.map(p.type_lo), hi = p.map(p.type_hi);
    if (lo < -kTypeEps || hi > 1.0 + kTypeEps)
      throw ProfileMismatch("shouts must lie in [0, 1]");
    if (hi < lo - kTypeEps) throw ProfileMismatch("shout map must be nondecreasing");
    if (i > 0) {
      const ShoutPiece& prev = pieces[i - 1];
      if (std::abs(prev.type_hi - p.type_lo) > kTypeEps)
        throw ProfileMismatch("pieces must be contiguous");
      if (prev.map(prev.type_hi) > lo + kTypeEps)
        throw ProfileMismatch("shout map must be nondecreasing across pieces");
    }
  }
  StrategyProfile s;
  s.side_ = side;
  s.kind_ = StrategyKind::PiecewiseDeterministic;
  s.pieces_ = std::move(pieces);
  return s;
}

StrategyProfile StrategyProfile::from_table(Side side,
                                            std::vector<std::pair<double, double>> nodes) {
  if (nodes.size() < 2) throw ProfileMismatch("a profile table needs at least two nodes");
  std::sort(nodes.begin(), nodes.end());
  std::vector<ShoutPiece> pieces;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    auto [t0, s0] = nodes[i];
    auto [t1, s1] = nodes[i + 1];
    if (!(t1 > t0)) throw ProfileMismatch("duplicate type " + fmt(t0) + " in profile table");
    if (s1 < s0) throw ProfileMismatch("profile table shouts must be nondecreasing");
    if (s1 == s0) {
      pieces.push_back({t0, t1, [s0](double) { return s0; }, true});
    } else {
      double slope = (s1 - s0) / (t1 - t0);
      pieces.push_back({t0, t1, [=](double t) { return s0 + slope * (t - t0); }, false});
    }
  }
  return piecewise(side, std::move(pieces));
}

StrategyProfile StrategyProfile::zic(Side side) {
  StrategyProfile s;
  s.side_ = side;
  s.kind_ = StrategyKind::ZIC;
  return s;
}

StrategyProfile StrategyProfile::constant(Side side, double type_lo, double type_hi,
                                          double shout) {
  return piecewise(side, {{type_lo, type_hi, [shout](double) { return shout; }, true}});
}

double StrategyProfile::shout(double type) const {
  if (kind_ == StrategyKind::ZIC) throw ProfileMismatch("ZIC shouts are random");
  for (const ShoutPiece& p : pieces_)
    if (type >= p.type_lo - kTypeEps && type <= p.type_hi + kTypeEps)
      return p.map(std::clamp(type, p.type_lo, p.type_hi));
  throw ProfileMismatch("type " + fmt(type) + " outside the profile's type range");
}

double StrategyProfile::shout(double type, double u) const {
  if (kind_ != StrategyKind::ZIC) return shout(type);
  return side_ == Side::Buyer ? u * type : type + u * (1.0 - type);
}

double StrategyProfile::shout_low() const {
  if (kind_ == StrategyKind::ZIC) throw ProfileMismatch("ZIC has no deterministic endpoints");
  return pieces_.front().map(pieces_.front().type_lo);
}

double StrategyProfile::shout_high() const {
  if (kind_ == StrategyKind::ZIC) throw ProfileMismatch("ZIC has no deterministic endpoints");
  return pieces_.back().map(pieces_.back().type_hi);
}

StrategyProfile StrategyProfile::with_kind(StrategyKind kind) const {
  StrategyProfile s = *this;
  s.kind_ = kind;
  return s;
}

StrategyProfile StrategyProfile::with_known_distribution(ShoutCdf cdf) const {
  StrategyProfile s = *this;
  s.known_ = std::make_shared<const ShoutCdf>(std::move(cdf));
  return s;
}

StrategyProfile StrategyProfile::with_one_price(double p, bool identity_extramarginal) const {
  StrategyProfile s = *this;
  s.kind_ = StrategyKind::OnePrice;
  s.one_price_ = p;
  s.identity_extramarginal_ = identity_extramarginal;
  return s;
}

OnePriceProfiles one_price_profile(const Market& mkt, double p,
                                   std::function<double(double)> seller_extramarginal,
                                   std::function<double(double)> buyer_extramarginal) {
  double lo = std::max(mkt.s_minus(), mkt.d_minus());
  double hi = std::min(mkt.s_plus(), mkt.d_plus());
  if (!(p > lo && p < hi))
    throw NoIntramarginalMass("p=" + fmt(p) + " must lie in (" + fmt(lo) + ", " + fmt(hi) + ")");

  bool seller_identity = !seller_extramarginal;
  bool buyer_identity = !buyer_extramarginal;
  if (seller_identity) seller_extramarginal = [](double m) { return m; };
  if (buyer_identity) buyer_extramarginal = [](double M) { return M; };

  constexpr int kChecks = 64;
  for (int i = 0; i <= kChecks; ++i) {
    double m = p + (mkt.s_plus() - p) * i / kChecks;
    if (seller_extramarginal(m) < m - kTypeEps)
      throw ProfileMismatch("extramarginal ask below type at m=" + fmt(m));
    double M = mkt.d_minus() + (p - mkt.d_minus()) * i / kChecks;
    if (buyer_extramarginal(M) > M + kTypeEps)
      throw ProfileMismatch("extramarginal bid above type at M=" + fmt(M));
  }

  auto sellers = StrategyProfile::piecewise(
      Side::Seller, {{mkt.s_minus(), p, [p](double) { return p; }, true},
                     {p, mkt.s_plus(), seller_extramarginal, false}});
  auto buyers = StrategyProfile::piecewise(
      Side::Buyer, {{mkt.d_minus(), p, buyer_extramarginal, false},
                    {p, mkt.d_plus(), [p](double) { return p; }, true}});
  return {sellers.with_one_price(p, seller_identity), buyers.with_one_price(p, buyer_identity),
          mkt.supply_inverse(p), mkt.demand_inverse(p)};
}

// ------------------------------------------------------ induced distributions

namespace {

void check_coverage(const Market& mkt, const StrategyProfile& prof) {
  if (!prof.deterministic()) return;
  double lo = prof.side() == Side::Seller ? mkt.s_minus() : mkt.d_minus();
  double hi = prof.side() == Side::Seller ? mkt.s_plus() : mkt.d_plus();
  const auto& pcs = prof.pieces();
  if (pcs.front().type_lo > lo + kTypeEps || pcs.back().type_hi < hi - kTypeEps)
    throw ProfileMismatch(std::string(to_string(prof.side())) +
                          " profile does not cover the type support [" + fmt(lo) + ", " +
                          fmt(hi) + "]");
}

ShoutCdf zic_linear_asks(const Market& mkt) {
  double sm = mkt.s_minus(), sp = mkt.s_plus(), a = mkt.alpha();
  auto cdf = [=](double x) {
    if (x <= sm) return 0.0;
    if (x >= 1.0) return 1.0;
    double u = std::min(x, sp);
    return ((u - sm) - (1.0 - x) * std::log((1.0 - sm) / (1.0 - u))) / a;
  };
  auto dens = [=](double x) {
    if (x <= sm || x >= 1.0) return 0.0;
    double u = std::min(x, sp);
    return std::log((1.0 - sm) / (1.0 - u)) / a;
  };
  ShoutCdf out(cdf, dens, {}, sm, 1.0, CdfRepresentation::ClosedForm);
  out.with_breaks({sp});
  return out;
}

ShoutCdf zic_linear_bids(const Market& mkt) {
  double dm = mkt.d_minus(), dp = mkt.d_plus(), b = mkt.beta();
  auto bc = [=](double x) {
    if (x <= 0.0) return 1.0;
    if (x >= dp) return 0.0;
    double l = std::max(x, dm);
    return ((dp - l) - x * std::log(dp / l)) / b;
  };
  auto dens = [=](double x) {
    if (x <= 0.0 || x >= dp) return 0.0;
    return std::log(dp / std::max(x, dm)) / b;
  };
  ShoutCdf out([bc](double x) { return 1.0 - bc(x); }, dens, {}, 0.0, dp,
               CdfRepresentation::ClosedForm);
  out.with_breaks({dm});
  return out;
}

// ZIC over a general market: tabulate the mixture CDF by quadrature over the
// quantity variable and interpolate monotonically.
ShoutCdf zic_tabulated(const Market& mkt, Side side) {
  constexpr int kGrid = 2001;
  std::vector<double> xs(kGrid), ys(kGrid);
  if (side == Side::Seller) {
    double sm = mkt.s_minus();
    for (int i = 0; i < kGrid; ++i) {
      double x = sm + (1.0 - sm) * i / (kGrid - 1);
      xs[i] = x;
      if (i == 0) { ys[i] = 0.0; continue; }
      if (i == kGrid - 1) { ys[i] = 1.0; continue; }
      double qmax = mkt.type_cdf(Side::Seller, x);
      ys[i] = numeric::integrate(
          [&](double q) { double s = mkt.supply(q); return (x - s) / (1.0 - s); }, 0.0, qmax,
          1e-12);
    }
    numeric::MonotoneInterpolant fn(xs, ys);
    return ShoutCdf([fn](double x) { return fn(x); }, [fn](double x) { return fn.prime(x); },
                    {}, sm, 1.0, CdfRepresentation::Quadrature);
  }
  double dp = mkt.d_plus(), dm = mkt.d_minus();
  for (int i = 0; i < kGrid; ++i) {
    double x = dp * i / (kGrid - 1);
    xs[i] = x;
    if (i == 0) { ys[i] = 0.0; continue; }
    if (i == kGrid - 1) { ys[i] = 1.0; continue; }
    double qmax = mkt.demand_inverse(std::max(x, dm));
    double bc = numeric::integrate([&](double q) { return 1.0 - x / mkt.demand(q); }, 0.0,
                                   qmax, 1e-12);
    ys[i] = 1.0 - bc;
  }
  numeric::MonotoneInterpolant fn(xs, ys);
  return ShoutCdf([fn](double x) { return fn(x); }, [fn](double x) { return fn.prime(x); }, {},
                  0.0, dp, CdfRepresentation::Quadrature);
}

ShoutCdf one_price_identity(const Market& mkt, const StrategyProfile& prof) {
  double p = *prof.one_price();
  if (prof.side() == Side::Seller) {
    double qs = mkt.supply_inverse(p);
    auto cont = [mkt, p, qs](double x) {
      return x > p ? mkt.type_cdf(Side::Seller, x) - qs : 0.0;
    };
    auto dens = [mkt, p](double x) { return x > p ? type_density(mkt, Side::Seller, x) : 0.0; };
    return ShoutCdf(cont, dens, {{p, qs}}, p, std::max(p, mkt.s_plus()),
                    CdfRepresentation::ClosedForm);
  }
  double qd = mkt.demand_inverse(p);
  auto cont = [mkt, p, qd](double x) {
    return x < p ? mkt.type_cdf(Side::Buyer, x) : 1.0 - qd;
  };
  auto dens = [mkt, p](double x) { return x < p ? type_density(mkt, Side::Buyer, x) : 0.0; };
  return ShoutCdf(cont, dens, {{p, qd}}, std::min(p, mkt.d_minus()), p,
                  CdfRepresentation::ClosedForm);
}

// Any nondecreasing deterministic profile: Pr(shout <= x) is the type CDF at
// the largest type whose shout does not exceed x.
ShoutCdf generic_deterministic(const Market& mkt, const StrategyProfile& prof) {
  Side side = prof.side();
  double tlo = side == Side::Seller ? mkt.s_minus() : mkt.d_minus();
  double thi = side == Side::Seller ? mkt.s_plus() : mkt.d_plus();

  std::vector<Atom> atoms;
  for (const ShoutPiece& p : prof.pieces()) {
    if (!p.constant) continue;
    double lo = std::max(p.type_lo, tlo), hi = std::min(p.type_hi, thi);
    if (hi > lo)
      atoms.push_back({p.map(lo), mkt.type_cdf(side, hi) - mkt.type_cdf(side, lo)});
  }
  atoms = merge_atoms(std::move(atoms));

  auto at_most = [mkt, prof, side, tlo, thi](double x) {
    double t = numeric::last_true([&](double v) { return prof.shout(v) <= x; }, tlo, thi);
    return t < tlo ? 0.0 : mkt.type_cdf(side, t);
  };
  auto cont = [at_most, atoms](double x) {
    double v = at_most(x);
    for (const Atom& a : atoms)
      if (a.location <= x) v -= a.mass;
    return std::max(v, 0.0);
  };
  std::vector<double> kinks;
  for (const ShoutPiece& p : prof.pieces()) kinks.push_back(p.map(p.type_lo));
  ShoutCdf out(cont, {}, atoms, prof.shout(tlo), prof.shout(thi), CdfRepresentation::ClosedForm);
  out.with_breaks(std::move(kinks));
  return out;
}

}  // namespace

ShoutCdf induced_shout_cdf(const Market& mkt, const StrategyProfile& profile) {
  if (profile.known_distribution()) return *profile.known_distribution();
  check_coverage(mkt, profile);
  switch (profile.kind()) {
    case StrategyKind::ZIC:
      if (mkt.is_linear())
        return profile.side() == Side::Seller ? zic_linear_asks(mkt) : zic_linear_bids(mkt);
      return zic_tabulated(mkt, profile.side());
    case StrategyKind::OnePrice:
      if (profile.identity_extramarginal()) return one_price_identity(mkt, profile);
      return generic_deterministic(mkt, profile);
    case StrategyKind::LinearBNE:
    case StrategyKind::PiecewiseDeterministic:
      return generic_deterministic(mkt, profile);
  }
  throw ProfileMismatch("unknown profile kind");
}

ShoutDistributions induced_distributions(const Market& mkt, const StrategyProfile& sellers,
                                         const StrategyProfile& buyers) {
  if (sellers.side() != Side::Seller) throw ProfileMismatch("first profile must be the sellers'");
  if (buyers.side() != Side::Buyer) throw ProfileMismatch("second profile must be the buyers'");
  return {induced_shout_cdf(mkt, sellers), induced_shout_cdf(mkt, buyers)};
}

}  // namespace cda
