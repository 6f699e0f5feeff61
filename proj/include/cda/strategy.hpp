#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "cda/market.hpp"

namespace cda {

enum class StrategyKind { PiecewiseDeterministic, OnePrice, ZIC, LinearBNE };
enum class CdfRepresentation { ClosedForm, Quadrature, TabulatedMonotone };

const char* to_string(StrategyKind kind);
const char* to_string(CdfRepresentation rep);

struct Atom {
  double location;
  double mass;
};

/// Distribution of the shouts of one side: a continuous nondecreasing part
/// plus finitely many atoms. at_most(x) = Pr(shout <= x), below(x) =
/// Pr(shout < x).
class ShoutCdf {
 public:
  using Fn = std::function<double(double)>;

  ShoutCdf() = default;
  /// `continuous` is the CDF of the non-atomic part (0 at -inf, total mass
  /// 1 - sum(atoms) at +inf). `density` is its derivative; when empty it is
  /// taken by finite differences.
  ShoutCdf(Fn continuous, Fn density, std::vector<Atom> atoms, double lowest, double highest,
           CdfRepresentation rep);

  double at_most(double x) const;
  double below(double x) const;
  double continuous_part(double x) const { return continuous_(x); }
  double density(double x) const;
  const std::vector<Atom>& atoms() const { return atoms_; }
  bool has_atoms() const { return !atoms_.empty(); }
  bool analytic_density() const { return static_cast<bool>(density_); }
  double lowest() const { return lowest_; }    // smallest shout in the support
  double highest() const { return highest_; }  // largest shout in the support
  CdfRepresentation representation() const { return rep_; }

  /// Lebesgue-Stieltjes integral of g over {lo <= q <= hi} (or with strict
  /// bounds), split into atoms and the continuous part.
  double integrate(const Fn& g, double lo, double hi, bool include_lo, bool include_hi,
                   double tol) const;

  /// Extra points where the continuous part has a derivative kink.
  ShoutCdf& with_breaks(std::vector<double> breaks);
  const std::vector<double>& breaks() const { return breaks_; }

 private:
  Fn continuous_;
  Fn density_;
  std::vector<Atom> atoms_;
  std::vector<double> breaks_;
  double lowest_ = 0, highest_ = 1;
  CdfRepresentation rep_ = CdfRepresentation::ClosedForm;
};

/// The four shout CDFs A, calA, B, calB induced by a market and a profile
/// pair, with B_c = 1 - B.
struct ShoutDistributions {
  ShoutCdf asks;
  ShoutCdf bids;

  double A(double x) const { return asks.at_most(x); }
  double calA(double x) const { return asks.below(x); }
  double B(double x) const { return bids.at_most(x); }
  double calB(double x) const { return bids.below(x); }
  double Bc(double x) const { return 1.0 - B(x); }
  double dA(double x) const { return asks.density(x); }
  double dBc(double x) const { return -bids.density(x); }

  double a_minus() const { return asks.lowest(); }
  double a_plus() const { return asks.highest(); }
  double b_minus() const { return bids.lowest(); }
  double b_plus() const { return bids.highest(); }

  bool continuous() const { return !asks.has_atoms() && !bids.has_atoms(); }
  CdfRepresentation representation() const;
};

/// A monotone shout map on a closed type interval.
struct ShoutPiece {
  double type_lo;
  double type_hi;
  std::function<double(double)> map;
  bool constant = false;  // map is constant on the piece (creates an atom)
};

/// Strategy profile of one side of the market.
class StrategyProfile {
 public:
  static StrategyProfile piecewise(Side side, std::vector<ShoutPiece> pieces);
  /// Piecewise-linear profile through monotone (type, shout) nodes. Flat
  /// segments become atoms.
  static StrategyProfile from_table(Side side, std::vector<std::pair<double, double>> nodes);
  /// Zero-intelligence constrained: buyers bid U[0, M], sellers ask U[m, 1].
  static StrategyProfile zic(Side side);
  /// Every type shouts the same price (no type restriction).
  static StrategyProfile constant(Side side, double type_lo, double type_hi, double shout);

  Side side() const { return side_; }
  StrategyKind kind() const { return kind_; }
  bool deterministic() const { return kind_ != StrategyKind::ZIC; }
  const std::vector<ShoutPiece>& pieces() const { return pieces_; }
  std::optional<double> one_price() const { return one_price_; }

  /// Shout of a deterministic profile. Throws ProfileMismatch for ZIC or a
  /// type outside the pieces.
  double shout(double type) const;
  /// Shout given a uniform draw u in [0, 1); only ZIC uses u.
  double shout(double type, double u) const;

  /// Shout images of the type-range endpoints (a_-/a_+ or b_-/b_+).
  double shout_low() const;
  double shout_high() const;

  /// Closed-form or tabulated shout distribution supplied by the module that
  /// built the profile (equilibrium solvers); used in preference to the
  /// generic construction.
  const std::shared_ptr<const ShoutCdf>& known_distribution() const { return known_; }

  // Builders used by other modules.
  StrategyProfile with_kind(StrategyKind kind) const;
  StrategyProfile with_known_distribution(ShoutCdf cdf) const;
  StrategyProfile with_one_price(double p, bool identity_extramarginal) const;
  bool identity_extramarginal() const { return identity_extramarginal_; }

 private:
  StrategyProfile() = default;

  Side side_ = Side::Seller;
  StrategyKind kind_ = StrategyKind::PiecewiseDeterministic;
  std::vector<ShoutPiece> pieces_;
  std::optional<double> one_price_;
  bool identity_extramarginal_ = false;
  std::shared_ptr<const ShoutCdf> known_;
};

struct OnePriceProfiles {
  StrategyProfile sellers;
  StrategyProfile buyers;
  double q_s;  // S^{-1}(p), mass of the ask atom
  double q_d;  // D^{-1}(p), mass of the bid atom
};

/// One-price profile pair at p. Extramarginal maps default to the identity
/// (a(m) = m, b(M) = M); overrides must satisfy a(m) >= m, b(M) <= M.
OnePriceProfiles one_price_profile(const Market& mkt, double p,
                                   std::function<double(double)> seller_extramarginal = {},
                                   std::function<double(double)> buyer_extramarginal = {});

ShoutDistributions induced_distributions(const Market& mkt, const StrategyProfile& sellers,
                                         const StrategyProfile& buyers);

/// Distribution of one side's shouts alone.
ShoutCdf induced_shout_cdf(const Market& mkt, const StrategyProfile& profile);

}  // namespace cda
