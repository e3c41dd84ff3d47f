#pragma once

// Pullbacks along the flag map and along boundary restrictions, and the child
// profiles produced by restricting to a boundary class.

#include "nefwiz/divisor.hpp"
#include "nefwiz/intersection.hpp"

#include <stdexcept>
#include <utility>

namespace nefwiz {

/// v^* f^* D on `profile`, in psi form: psi coefficient b(w) for each weight w,
/// boundary coefficient -b(weight(S)) once per canonical class.
inline WeightedDivisor restrict(const BVector& b, const Profile& profile) {
  if (profile.genus() != b.genus())
    throw std::domain_error("restrict: profile genus " + std::to_string(profile.genus()) +
                            " does not match divisor genus " + std::to_string(b.genus()));
  if (profile.size() < 3) throw std::domain_error("restrict: profile has fewer than 3 points");
  WeightedDivisor wd{profile, {}, Rational(0), {}};
  if (profile.size() == 3) return wd;  // point space
  for (const auto& [w, mult] : profile.groups()) wd.psi[w] = b(w);
  for (auto& cls : boundary_classes(profile)) {
    Rational c = -b(cls.weight());
    wd.boundary.emplace(std::move(cls), std::move(c));
  }
  return wd;
}

/// f^* D = b_1 sum psi_i - sum_{i>=2} b_i B_i on the all-ones profile. The
/// lambda and delta_0 parts do not contribute.
inline WeightedDivisor flag_pullback(const SymDivisorMg& d) {
  if (d.genus() < 4) throw std::domain_error("flag_pullback: genus below 4 gives a trivial genus-0 space");
  return restrict(d.bvector(), Profile::ones(d.genus()));
}

/// Re-expresses a divisor on the all-ones profile in the B_2..B_{g/2} basis,
/// using sum psi_i = sum i(g-i)/(g-1) B_i and K = sum psi_i - 2 Delta.
inline EVector to_b_basis(const WeightedDivisor& wd) {
  const int g = wd.profile.size();
  if (wd.profile != Profile::ones(g)) throw std::domain_error("to_b_basis: profile must be all ones");
  std::vector<Rational> e;
  for (int i = 2; i <= g / 2; ++i) {
    Rational psi_weight(i * (g - i), g - 1);
    BoundaryClass cls{std::vector<int>(static_cast<std::size_t>(i), 1)};
    e.push_back(wd.psi_coeff(1) * psi_weight + wd.k * (psi_weight - 2) + wd.boundary_coeff(cls));
  }
  return EVector(g, std::move(e));
}

/// The two restriction targets of delta_S: {weight(S)} + S^c and {weight(S^c)} + S.
inline std::pair<Profile, Profile> child_profiles(const Profile& profile, const BoundaryClass& cls) {
  if (canonicalize(profile, cls.side) != cls)
    throw std::domain_error("child_profiles: class is not canonical on profile " + profile.key());
  auto counts = detail::side_counts(profile, cls.side);
  auto comp = detail::side_from_counts(profile, detail::complement_counts(profile, counts));
  int ws = cls.weight();
  int wc = profile.genus() - ws;
  std::vector<int> first = comp, second = cls.side;
  first.push_back(ws);
  second.push_back(wc);
  return {Profile(std::move(first)), Profile(std::move(second))};
}

}  // namespace nefwiz
