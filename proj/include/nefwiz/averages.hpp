#pragma once

// Boundary expansions of psi classes ("averages") and the c-average transform
// D = cK + sum_S coeff_S(c) delta_S.
//
// psi_p is the sum of delta_S over S containing p and avoiding a fixed pair
// {q, r}. Averaging over a pool of pairs gives delta_S the fraction of pool
// pairs lying entirely outside the side containing p. The pools are:
//   A1: both in A\{p}     A2: one in A\{p}, one in Z     A3: both in Z
//   Z1: both in Z\{p}     Z2: one in Z\{p}, one in A     Z3: both in A
//   BIG: any two of the other N-1 points

#include "nefwiz/divisor.hpp"
#include "nefwiz/pullback.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nefwiz {

enum class AverageKind { A1, A2, A3, Z1, Z2, Z3, Big };

inline std::string_view kind_name(AverageKind k) {
  switch (k) {
    case AverageKind::A1: return "A1";
    case AverageKind::A2: return "A2";
    case AverageKind::A3: return "A3";
    case AverageKind::Z1: return "Z1";
    case AverageKind::Z2: return "Z2";
    case AverageKind::Z3: return "Z3";
    case AverageKind::Big: return "BIG";
  }
  return "?";
}

inline bool is_a_kind(AverageKind k) {
  return k == AverageKind::A1 || k == AverageKind::A2 || k == AverageKind::A3 || k == AverageKind::Big;
}
inline bool is_z_kind(AverageKind k) {
  return k == AverageKind::Z1 || k == AverageKind::Z2 || k == AverageKind::Z3 || k == AverageKind::Big;
}

/// Expansion used for every A-point and for every Z-point respectively.
struct KindPair {
  AverageKind a_kind = AverageKind::Big;
  AverageKind z_kind = AverageKind::Big;

  std::string name() const { return std::string(kind_name(a_kind)) + "/" + std::string(kind_name(z_kind)); }
  friend bool operator==(const KindPair&, const KindPair&) = default;
};

inline AverageKind parse_kind(std::string_view s) {
  for (auto k : {AverageKind::A1, AverageKind::A2, AverageKind::A3, AverageKind::Z1, AverageKind::Z2,
                 AverageKind::Z3, AverageKind::Big})
    if (kind_name(k) == s) return k;
  throw std::invalid_argument("unknown average kind '" + std::string(s) + "'");
}

/// "A2/Z2", "BIG/BIG", "A1/BIG", ...
inline KindPair parse_kind_pair(std::string_view s) {
  auto slash = s.find('/');
  if (slash == std::string_view::npos) throw std::invalid_argument("kind pair must look like A2/Z2: '" + std::string(s) + "'");
  KindPair kp{parse_kind(s.substr(0, slash)), parse_kind(s.substr(slash + 1))};
  if (!is_a_kind(kp.a_kind) || !is_z_kind(kp.z_kind))
    throw std::invalid_argument("kind pair '" + std::string(s) + "' mixes A and Z kinds");
  return kp;
}

/// Whether `kind` gives a valid expansion for the points of its type on a
/// space with a A-points and z Z-points. A type with no points is vacuous.
inline bool kind_admissible(AverageKind kind, bool for_a_points, int a, int z) {
  const int n = a + z;
  if (n < 4) return false;
  if (for_a_points ? a == 0 : z == 0) return true;
  switch (kind) {
    case AverageKind::A1: return for_a_points && a >= 3;
    case AverageKind::A2: return for_a_points && a >= 2 && z >= 1;
    case AverageKind::A3: return for_a_points && z >= 2;
    case AverageKind::Z1: return !for_a_points && z >= 3;
    case AverageKind::Z2: return !for_a_points && z >= 2 && a >= 1;
    case AverageKind::Z3: return !for_a_points && a >= 2;
    case AverageKind::Big: return true;
  }
  return false;
}

inline bool admissible(const KindPair& kp, const Profile& profile) {
  return kind_admissible(kp.a_kind, true, profile.a(), profile.z()) &&
         kind_admissible(kp.z_kind, false, profile.a(), profile.z());
}

namespace detail {

// Coefficient of delta_S in the expansion of psi_p, where the side of S
// containing p has bp A-points and yp Z-points.
inline Rational phi(AverageKind kind, int a, int z, int bp, int yp) {
  const int n = a + z;
  const int ao = a - bp, zo = z - yp;  // outside the side containing p
  switch (kind) {
    case AverageKind::A1: return Rational(ao * (ao - 1), (a - 1) * (a - 2));
    case AverageKind::A2: return Rational(ao * zo, (a - 1) * z);
    case AverageKind::A3: return Rational(zo * (zo - 1), z * (z - 1));
    case AverageKind::Z1: return Rational(zo * (zo - 1), (z - 1) * (z - 2));
    case AverageKind::Z2: return Rational(zo * ao, (z - 1) * a);
    case AverageKind::Z3: return Rational(ao * (ao - 1), a * (a - 1));
    case AverageKind::Big: {
      const int out = n - bp - yp;
      return Rational(out * (out - 1), (n - 1) * (n - 2));
    }
  }
  throw std::logic_error("phi: unknown kind");
}

struct SideShape {
  int b = 0;  // A-points in the side
  int y = 0;  // Z-points in the side
};

inline SideShape shape_of(const BoundaryClass& cls) {
  SideShape s;
  for (int w : cls.side) (w == 1 ? s.y : s.b)++;
  return s;
}

}  // namespace detail

/// Coefficient of delta_S in the `kind` expansion of psi at one point of
/// weight `point_weight`, which lies in the canonical side of `cls` iff in_side.
inline Rational psi_coefficient(const Profile& profile, AverageKind kind, int point_weight, const BoundaryClass& cls,
                                bool in_side) {
  const bool a_point = point_weight >= 2;
  if (a_point ? !is_a_kind(kind) : !is_z_kind(kind))
    throw std::domain_error(std::string("psi_coefficient: kind ") + std::string(kind_name(kind)) +
                            " does not apply to a point of weight " + std::to_string(point_weight));
  const int a = profile.a(), z = profile.z();
  if (!kind_admissible(kind, a_point, a, z) || (a_point ? a == 0 : z == 0))
    throw std::domain_error(std::string("psi_coefficient: kind ") + std::string(kind_name(kind)) +
                            " is not admissible on profile " + profile.key());
  auto s = detail::shape_of(cls);
  if (in_side) return detail::phi(kind, a, z, s.b, s.y);
  return detail::phi(kind, a, z, a - s.b, z - s.y);
}

/// coeff_S(c) = constant + slope * c for one canonical class.
struct AffineEntry {
  BoundaryClass cls;
  Rational constant;
  Rational slope;

  Rational at(const Rational& c) const { return constant + slope * c; }
};

/// The c-average of a psi-form divisor as affine functions of c.
struct AffineTable {
  Profile profile;
  KindPair kinds;
  std::vector<AffineEntry> entries;  // BoundaryClass order
};

inline AffineTable affine_c_average(const WeightedDivisor& wd, const KindPair& kinds) {
  if (wd.k != 0) throw std::domain_error("c_average: input must be in psi form (K coefficient 0)");
  const Profile& p = wd.profile;
  if (!admissible(kinds, p))
    throw std::domain_error("c_average: kinds " + kinds.name() + " not admissible on profile " + p.key());
  const int a = p.a(), z = p.z();
  AffineTable table{p, kinds, {}};
  const auto& groups = p.groups();
  for (const auto& cls : boundary_classes(p)) {
    auto counts = detail::side_counts(p, cls.side);
    auto s = detail::shape_of(cls);
    AffineEntry e{cls, wd.boundary_coeff(cls), Rational(2)};
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      const auto [w, mult] = groups[gi];
      const bool a_point = w >= 2;
      const AverageKind kind = a_point ? kinds.a_kind : kinds.z_kind;
      const int in = counts[gi], out = mult - in;
      Rational weight;
      if (in) weight += in * detail::phi(kind, a, z, s.b, s.y);
      if (out) weight += out * detail::phi(kind, a, z, a - s.b, z - s.y);
      e.constant += wd.psi_coeff(w) * weight;
      e.slope -= weight;
    }
    table.entries.push_back(std::move(e));
  }
  return table;
}

/// cK + E, with E stored as the boundary table of a K-form WeightedDivisor.
struct CAveraged {
  WeightedDivisor divisor;
  KindPair kinds;
  Rational c;
};

inline CAveraged evaluate(const AffineTable& table, const Rational& c) {
  CAveraged out{WeightedDivisor{table.profile, {}, c, {}}, table.kinds, c};
  for (const auto& e : table.entries) out.divisor.boundary.emplace(e.cls, e.at(c));
  return out;
}

inline CAveraged c_average(const WeightedDivisor& wd, const Rational& c, const KindPair& kinds) {
  if (c < 0) throw std::domain_error("c_average: c must be nonnegative");
  if (wd.profile.size() == 3) return CAveraged{WeightedDivisor{wd.profile, {}, c, {}}, kinds, c};
  return evaluate(affine_c_average(wd, kinds), c);
}

// ---------------------------------------------------------------------------
// Printed closed forms, evaluated literally and compared with the generic
// expansion above.

/// A closed-form table and the classes where it disagrees with the generic one.
struct ClosedForm {
  CAveraged average;
  std::vector<BoundaryClass> discrepant;

  bool agrees() const { return discrepant.empty(); }
};

namespace detail {

struct ClassSums {
  int b = 0, y = 0;
  Rational in_a;   // sum over A-points in the side of (b(n_i) - c)
  Rational out_a;  // sum over A-points outside the side of (b(n_i) - c)
  Rational in_a_raw, out_a_raw;
};

inline ClassSums class_sums(const BVector& bv, const Profile& p, const BoundaryClass& cls, const Rational& c) {
  ClassSums s;
  auto counts = side_counts(p, cls.side);
  for (std::size_t gi = 0; gi < p.groups().size(); ++gi) {
    const auto [w, mult] = p.groups()[gi];
    const int in = counts[gi], out = mult - in;
    if (w == 1) {
      s.y = in;
      continue;
    }
    s.b += in;
    s.in_a += in * (bv(w) - c);
    s.out_a += out * (bv(w) - c);
    s.in_a_raw += in * bv(w);
    s.out_a_raw += out * bv(w);
  }
  return s;
}

inline ClosedForm compare_with(CAveraged closed, const CAveraged& generic) {
  ClosedForm out{std::move(closed), {}};
  for (const auto& [cls, v] : out.average.divisor.boundary)
    if (generic.divisor.boundary_coeff(cls) != v) out.discrepant.push_back(cls);
  return out;
}

}  // namespace detail

/// Weight g_{y,b} of an A-point inside a side with y Z-points and b A-points.
inline Rational big_g_weight(int n, int y, int b) {
  return Rational((n - y - b) * (n - y - b - 1), (n - 1) * (n - 2));
}
/// Weight h_{y,b} of an A-point outside that side.
inline Rational big_h_weight(int n, int y, int b) { return Rational((y + b) * (y + b - 1), (n - 1) * (n - 2)); }

/// Big c-average: f(b_1-c) + g*sum_B(b_n-c) + h*sum_{A\B}(b_n-c) + 2c - b(y+sum_B n).
inline ClosedForm big_c_average_closed(const BVector& bv, const Profile& p, const Rational& c) {
  const int a = p.a(), z = p.z(), n = a + z;
  if (n < 4) throw std::domain_error("big_c_average_closed: need at least 4 points");
  CAveraged out{WeightedDivisor{p, {}, c, {}}, {AverageKind::Big, AverageKind::Big}, c};
  for (const auto& cls : boundary_classes(p)) {
    auto s = detail::class_sums(bv, p, cls, c);
    const int y = s.y, b = s.b;
    Rational gyb = big_g_weight(n, y, b), hyb = big_h_weight(n, y, b);
    Rational fyb = y * gyb + (z - y) * hyb;
    out.divisor.boundary.emplace(cls, fyb * (bv(1) - c) + gyb * s.in_a + hyb * s.out_a + 2 * c - bv(cls.weight()));
  }
  auto generic = c_average(restrict(bv, p), c, {AverageKind::Big, AverageKind::Big});
  return detail::compare_with(std::move(out), generic);
}

/// Second c-average (A2 for A-points, Z2 for Z-points), printed form.
inline ClosedForm second_c_average_closed(const BVector& bv, const Profile& p, const Rational& c) {
  const int a = p.a(), z = p.z();
  if (a < 2 || z < 2) throw std::domain_error("second_c_average_closed: requires a >= 2 and z >= 2");
  CAveraged out{WeightedDivisor{p, {}, c, {}}, {AverageKind::A2, AverageKind::Z2}, c};
  for (const auto& cls : boundary_classes(p)) {
    auto s = detail::class_sums(bv, p, cls, c);
    const int y = s.y, b = s.b;
    Rational coeff = ((a - b) * (z - y) * s.in_a + b * y * s.out_a) / Rational((a - 1) * z);
    coeff += (bv(1) - c) * Rational((a - b) * (z - y) + b * y, a * (z - 1));
    coeff += 2 * c - bv(cls.weight());
    out.divisor.boundary.emplace(cls, std::move(coeff));
  }
  auto generic = c_average(restrict(bv, p), c, {AverageKind::A2, AverageKind::Z2});
  return detail::compare_with(std::move(out), generic);
}

/// Denominator d(alpha) of the mixed (A2 / big Z) closed form.
inline Integer mixed_d_alpha(int a, int z) { return Integer((a - 1) * (a + z - 1) * (a + z - 2)); }

/// Mixed c-average (A2 for A-points, BIG for Z-points):
/// c * (n(alpha)/d(alpha) + n(beta)/(d(beta) c)), printed form.
inline ClosedForm mixed_c_average_closed(const BVector& bv, const Profile& p, const Rational& c) {
  const int a = p.a(), z = p.z(), n = a + z;
  if (a < 2 || z < 1 || n < 4) throw std::domain_error("mixed_c_average_closed: requires a >= 2, z >= 1");
  if (c <= 0) throw std::domain_error("mixed_c_average_closed: the printed form divides by c; c must be positive");
  CAveraged out{WeightedDivisor{p, {}, c, {}}, {AverageKind::A2, AverageKind::Big}, c};
  for (const auto& cls : boundary_classes(p)) {
    auto s = detail::class_sums(bv, p, cls, c);
    const int y = s.y, b = s.b;
    const Integer q = Integer((n - y - b) * (n - y - b - 1) * y + (y + b) * (y + b - 1) * (z - y));
    const Integer n_alpha = Integer((n - 1) * (n - 2) * (2 * (a - 1) - b * (a - b))) - (a - 1) * q;
    const Integer d_alpha = mixed_d_alpha(a, z);
    Rational n_beta = Rational((n - 1) * (n - 2)) * ((z - y) * (a - b) * s.in_a_raw + y * b * s.out_a_raw) +
                      bv(1) * Rational((a - 1) * z) * Rational(q);
    const Integer d_beta = Integer((n - 1) * (n - 2) * (a - 1) * z);
    Rational coeff = c * (Rational(n_alpha, d_alpha) + n_beta / Rational(d_beta) / c);
    out.divisor.boundary.emplace(cls, std::move(coeff));
  }
  auto generic = c_average(restrict(bv, p), c, {AverageKind::A2, AverageKind::Big});
  return detail::compare_with(std::move(out), generic);
}

}  // namespace nefwiz
