#pragma once

// Core value types: symmetric divisors on the genus-g moduli space, weighted
// profiles of genus-0 boundary restrictions, and boundary classes on them.

#include "nefwiz/rational.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nefwiz {

/// Symmetric index convention: coefficient m is the same as coefficient g - m.
inline int fold_index(int m, int g) {
  if (m < 1 || m > g - 1)
    throw std::domain_error("fold_index: index " + std::to_string(m) + " out of range for genus " +
                            std::to_string(g));
  return std::min(m, g - m);
}

/// The b_1 ... b_{g/2} data of a divisor; all that survives the flag pullback.
class BVector {
 public:
  BVector() = default;
  BVector(int genus, std::vector<Rational> entries) : genus_(genus), entries_(std::move(entries)) {
    if (genus_ < 2) throw std::domain_error("BVector: genus must be at least 2");
    if (static_cast<int>(entries_.size()) != genus_ / 2)
      throw std::domain_error("BVector: expected " + std::to_string(genus_ / 2) + " entries, got " +
                              std::to_string(entries_.size()));
  }

  int genus() const { return genus_; }
  int half() const { return genus_ / 2; }
  const std::vector<Rational>& entries() const { return entries_; }

  /// b(m) = b_{min(m, g-m)} for 1 <= m <= g-1.
  const Rational& operator()(int m) const { return entries_[fold_index(m, genus_) - 1]; }

  bool is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const Rational& r) { return r == 0; });
  }

  friend bool operator==(const BVector&, const BVector&) = default;

 private:
  int genus_ = 0;
  std::vector<Rational> entries_;
};

/// a*lambda - sum_{i=0}^{g/2} b_i delta_i.
class SymDivisorMg {
 public:
  SymDivisorMg() = default;
  SymDivisorMg(int genus, Rational lambda, std::vector<Rational> delta)
      : genus_(genus), lambda_(std::move(lambda)), delta_(std::move(delta)) {
    if (genus_ < 2) throw std::domain_error("SymDivisorMg: genus must be at least 2");
    if (static_cast<int>(delta_.size()) != genus_ / 2 + 1)
      throw std::domain_error("SymDivisorMg: expected " + std::to_string(genus_ / 2 + 1) +
                              " delta coefficients, got " + std::to_string(delta_.size()));
  }

  int genus() const { return genus_; }
  const Rational& lambda() const { return lambda_; }
  const std::vector<Rational>& delta() const { return delta_; }
  const Rational& b(int i) const { return delta_.at(static_cast<std::size_t>(i)); }

  BVector bvector() const {
    return BVector(genus_, std::vector<Rational>(delta_.begin() + 1, delta_.end()));
  }

  friend bool operator==(const SymDivisorMg&, const SymDivisorMg&) = default;

 private:
  int genus_ = 0;
  Rational lambda_;
  std::vector<Rational> delta_;
};

/// Multiset of point weights, sorted descending. Weight-1 points form Z, the
/// rest form A (the attaching points of a boundary restriction).
class Profile {
 public:
  Profile() = default;
  explicit Profile(std::vector<int> weights) : weights_(std::move(weights)) {
    for (int w : weights_)
      if (w < 1) throw std::domain_error("Profile: weights must be positive");
    std::sort(weights_.begin(), weights_.end(), std::greater<>());
    for (int w : weights_) {
      if (groups_.empty() || groups_.back().first != w) groups_.emplace_back(w, 0);
      ++groups_.back().second;
    }
  }

  static Profile ones(int genus) { return Profile(std::vector<int>(static_cast<std::size_t>(genus), 1)); }

  const std::vector<int>& weights() const { return weights_; }
  /// (weight, multiplicity), weights descending.
  const std::vector<std::pair<int, int>>& groups() const { return groups_; }

  int genus() const { return std::accumulate(weights_.begin(), weights_.end(), 0); }
  int size() const { return static_cast<int>(weights_.size()); }
  int z() const {
    return static_cast<int>(std::count(weights_.begin(), weights_.end(), 1));
  }
  int a() const { return size() - z(); }

  std::string key() const {
    std::string out;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(weights_[i]);
    }
    return out;
  }

  friend bool operator==(const Profile& l, const Profile& r) { return l.weights_ == r.weights_; }
  friend auto operator<=>(const Profile& l, const Profile& r) { return l.weights_ <=> r.weights_; }

 private:
  std::vector<int> weights_;
  std::vector<std::pair<int, int>> groups_;
};

/// A boundary class delta_S = delta_{S^c}, stored by its canonical side
/// (descending weights). Ordered by side cardinality, then lexicographically.
struct BoundaryClass {
  std::vector<int> side;

  int size() const { return static_cast<int>(side.size()); }
  int weight() const { return std::accumulate(side.begin(), side.end(), 0); }

  friend bool operator==(const BoundaryClass&, const BoundaryClass&) = default;
  friend bool operator<(const BoundaryClass& l, const BoundaryClass& r) {
    if (l.side.size() != r.side.size()) return l.side.size() < r.side.size();
    return l.side < r.side;
  }
};

namespace detail {

// Multiplicity of each profile group inside `side`; throws if side is not a
// sub-multiset of the profile.
inline std::vector<int> side_counts(const Profile& profile, std::vector<int> side) {
  std::vector<int> counts(profile.groups().size(), 0);
  for (int w : side) {
    auto it = std::find_if(profile.groups().begin(), profile.groups().end(),
                           [w](const auto& grp) { return grp.first == w; });
    if (it == profile.groups().end())
      throw std::domain_error("boundary side uses weight " + std::to_string(w) + " absent from profile " +
                              profile.key());
    auto idx = static_cast<std::size_t>(it - profile.groups().begin());
    if (++counts[idx] > it->second)
      throw std::domain_error("boundary side exceeds multiplicity of weight " + std::to_string(w));
  }
  return counts;
}

inline std::vector<int> side_from_counts(const Profile& profile, const std::vector<int>& counts) {
  std::vector<int> side;
  for (std::size_t i = 0; i < counts.size(); ++i)
    side.insert(side.end(), static_cast<std::size_t>(counts[i]), profile.groups()[i].first);
  return side;
}

inline std::vector<int> complement_counts(const Profile& profile, const std::vector<int>& counts) {
  std::vector<int> out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = profile.groups()[i].second - counts[i];
  return out;
}

inline std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

/// Picks the representative of {S, S^c}: smaller cardinality, then the
/// lexicographically smaller descending weight list.
inline BoundaryClass canonicalize(const Profile& profile, std::vector<int> side) {
  std::sort(side.begin(), side.end(), std::greater<>());
  const int n = profile.size();
  const int s = static_cast<int>(side.size());
  if (s < 2 || s > n - 2)
    throw std::domain_error("canonicalize: side of size " + std::to_string(s) + " is not a boundary class on " +
                            std::to_string(n) + " points");
  auto counts = detail::side_counts(profile, side);
  auto comp = detail::side_from_counts(profile, detail::complement_counts(profile, counts));
  const int c = n - s;
  if (c < s || (c == s && comp < side)) return BoundaryClass{std::move(comp)};
  return BoundaryClass{std::move(side)};
}

/// All canonical boundary classes of a profile, in BoundaryClass order.
inline std::vector<BoundaryClass> boundary_classes(const Profile& profile) {
  const auto& groups = profile.groups();
  const int n = profile.size();
  std::vector<BoundaryClass> out;
  std::vector<int> counts(groups.size(), 0);
  while (true) {
    int s = std::accumulate(counts.begin(), counts.end(), 0);
    if (s >= 2 && s <= n - 2) {
      auto side = detail::side_from_counts(profile, counts);
      auto cls = canonicalize(profile, side);
      if (cls.side == side) out.push_back(std::move(cls));
    }
    std::size_t i = 0;
    while (i < counts.size() && counts[i] == groups[i].second) counts[i++] = 0;
    if (i == counts.size()) break;
    ++counts[i];
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Number of labelled pairs {T, T^c} whose weight multisets realize `cls`.
inline std::int64_t orbit_multiplicity(const Profile& profile, const BoundaryClass& cls) {
  auto counts = detail::side_counts(profile, cls.side);
  if (canonicalize(profile, cls.side) != cls)
    throw std::domain_error("orbit_multiplicity: class is not canonical on profile " + profile.key());
  std::int64_t m = 1;
  for (std::size_t i = 0; i < counts.size(); ++i) m *= detail::binomial(profile.groups()[i].second, counts[i]);
  if (detail::complement_counts(profile, counts) == counts) m /= 2;
  return m;
}

/// A divisor on a profile's genus-0 space: sum_w psi[w] * (sum of psi over the
/// points of weight w) + k * K + sum_S boundary[S] * delta_S.
struct WeightedDivisor {
  Profile profile;
  std::map<int, Rational> psi;
  Rational k;
  std::map<BoundaryClass, Rational> boundary;

  const Rational& psi_coeff(int weight) const {
    static const Rational zero;
    auto it = psi.find(weight);
    return it == psi.end() ? zero : it->second;
  }
  const Rational& boundary_coeff(const BoundaryClass& cls) const {
    static const Rational zero;
    auto it = boundary.find(cls);
    return it == boundary.end() ? zero : it->second;
  }
  bool is_zero() const {
    auto nz = [](const auto& kv) { return kv.second != 0; };
    return k == 0 && std::none_of(psi.begin(), psi.end(), nz) &&
           std::none_of(boundary.begin(), boundary.end(), nz);
  }
};

}  // namespace nefwiz
