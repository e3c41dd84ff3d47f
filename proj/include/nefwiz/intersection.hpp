#pragma once

// F-curves and their intersection numbers: the F-inequalities on the genus-g
// space, the symmetric genus-0 test in the B_i basis, and a labelled
// intersection calculator used to check boundary expansions.

#include "nefwiz/divisor.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace nefwiz {

/// Four positive parts i <= j <= k <= l summing to g.
struct FPartition {
  std::array<int, 4> parts{};
  int sum() const { return parts[0] + parts[1] + parts[2] + parts[3]; }
  friend bool operator==(const FPartition&, const FPartition&) = default;
};

/// Partitions of g into exactly four positive parts, ascending lexicographic.
inline std::vector<FPartition> enumerate_f_partitions(int g) {
  std::vector<FPartition> out;
  for (int i = 1; 4 * i <= g; ++i)
    for (int j = i; i + 3 * j <= g; ++j)
      for (int k = j; i + j + 2 * k <= g; ++k) out.push_back({{i, j, k, g - i - j - k}});
  return out;
}

/// e_2 ... e_{g/2}: coefficients of B_2 ... B_{g/2} on the symmetric genus-0 space.
class EVector {
 public:
  EVector() = default;
  EVector(int genus, std::vector<Rational> entries) : genus_(genus), entries_(std::move(entries)) {
    if (genus_ < 4) throw std::domain_error("EVector: genus must be at least 4");
    if (static_cast<int>(entries_.size()) != genus_ / 2 - 1)
      throw std::domain_error("EVector: expected " + std::to_string(genus_ / 2 - 1) + " entries, got " +
                              std::to_string(entries_.size()));
  }

  int genus() const { return genus_; }
  const std::vector<Rational>& entries() const { return entries_; }

  /// Folded accessor with e(1) = e(g-1) = 0.
  Rational operator()(int m) const {
    int f = fold_index(m, genus_);
    return f == 1 ? Rational(0) : entries_[static_cast<std::size_t>(f - 2)];
  }

  friend bool operator==(const EVector&, const EVector&) = default;

 private:
  int genus_ = 0;
  std::vector<Rational> entries_;
};

/// E . F for the F-curve of partition p; E is F-nef iff this is >= 0 for all p.
inline Rational f_intersection_sym_e(const EVector& e, const FPartition& p) {
  if (p.sum() != e.genus())
    throw std::domain_error("f_intersection_sym_e: partition sums to " + std::to_string(p.sum()) +
                            ", expected " + std::to_string(e.genus()));
  const auto [i, j, k, l] = p.parts;
  return e(i + j) + e(i + k) + e(i + l) - e(i) - e(j) - e(k) - e(l);
}

/// One violated F-inequality: family number (1-5) and witness indices.
struct FViolation {
  int family = 0;
  std::vector<int> indices;
  Rational value;

  std::string describe() const {
    std::string s = "item (" + std::to_string(family) + ")";
    if (!indices.empty()) {
      s += " at [";
      for (std::size_t i = 0; i < indices.size(); ++i) s += (i ? "," : "") + std::to_string(indices[i]);
      s += "]";
    }
    return s + ": " + to_string(value) + " < 0";
  }
};

/// The five families of F-inequalities for a symmetric divisor on the genus-g
/// space. An empty result means D is an F-divisor.
inline std::vector<FViolation> check_f_divisor_mg(const SymDivisorMg& d) {
  std::vector<FViolation> out;
  const int g = d.genus();
  const int h = g / 2;
  const BVector b = d.bvector();
  auto record = [&](int family, std::vector<int> idx, Rational v) {
    if (v < 0) out.push_back({family, std::move(idx), std::move(v)});
  };

  record(1, {}, d.lambda() - 12 * d.b(0) + d.b(1));
  for (int i = 1; i <= h; ++i) record(2, {i}, d.b(i));
  for (int i = 1; i <= h; ++i) record(3, {i}, 2 * d.b(0) - d.b(i));
  for (int i = 1; i <= g - 1; ++i)
    for (int j = i; i + j <= g - 1; ++j) record(4, {i, j}, b(i) + b(j) - b(i + j));
  for (const auto& p : enumerate_f_partitions(g)) {
    const auto [i, j, k, l] = p.parts;
    record(5, {i, j, k, l}, b(i) + b(j) + b(k) + b(l) - b(i + j) - b(i + k) - b(i + l));
  }
  return out;
}

/// Intersection of a weighted divisor with the F-curve whose four blocks have
/// the given weight multisets (blocks jointly exhaust the profile).
inline Rational f_intersection_weighted(const WeightedDivisor& wd, const std::array<std::vector<int>, 4>& blocks) {
  Rational total;
  int singletons = 0;
  for (const auto& blk : blocks) {
    if (blk.empty()) throw std::domain_error("f_intersection_weighted: empty block");
    if (blk.size() == 1) {
      ++singletons;
      total += wd.psi_coeff(blk.front());
    } else {
      total -= wd.boundary_coeff(canonicalize(wd.profile, blk));
    }
  }
  for (int other = 1; other < 4; ++other) {
    auto side = blocks[0];
    side.insert(side.end(), blocks[static_cast<std::size_t>(other)].begin(),
                blocks[static_cast<std::size_t>(other)].end());
    total += wd.boundary_coeff(canonicalize(wd.profile, side));
  }
  total += wd.k * (2 - singletons);
  return total;
}

// ---------------------------------------------------------------------------
// Labelled genus-0 spaces (n <= 31 points, subsets as bitmasks).

/// Formal sum of labelled delta_T, psi_i and K with rational coefficients.
struct LabelledExpr {
  int n = 0;
  std::map<std::uint32_t, Rational> delta;  // key: canonical mask (never contains point n-1)
  std::vector<Rational> psi;                // one per point
  Rational k;

  explicit LabelledExpr(int points = 0) : n(points), psi(static_cast<std::size_t>(points)) {}

  std::uint32_t full() const { return n >= 32 ? ~0u : ((1u << n) - 1u); }

  void add_delta(std::uint32_t mask, const Rational& c) {
    int s = std::popcount(mask);
    if (s < 2 || s > n - 2 || (mask & ~full()))
      throw std::domain_error("LabelledExpr: mask is not a boundary divisor");
    if (mask & (1u << (n - 1))) mask = full() & ~mask;
    delta[mask] += c;
  }
};

/// Partition of the labelled points into four nonempty blocks.
struct LabelledFCurve {
  std::array<std::uint32_t, 4> blocks{};
};

inline void validate_curve(const LabelledFCurve& curve, int n) {
  std::uint32_t seen = 0;
  for (auto b : curve.blocks) {
    if (b == 0 || (b & seen)) throw std::domain_error("LabelledFCurve: blocks must be nonempty and disjoint");
    seen |= b;
  }
  if (seen != (n >= 32 ? ~0u : (1u << n) - 1u))
    throw std::domain_error("LabelledFCurve: blocks do not cover all points");
}

/// delta_T . F: +1 if T is a union of two blocks, -1 if T or T^c is a single
/// block of size >= 2, 0 otherwise.
inline int delta_dot_curve(std::uint32_t mask, const LabelledFCurve& curve) {
  int inside = 0;
  std::uint32_t lone = 0;
  for (auto b : curve.blocks) {
    if ((b & mask) == b) {
      ++inside;
      lone = lone ? lone : b;
    } else if (b & mask) {
      return 0;
    }
  }
  if (inside == 2) return 1;
  if (inside == 1) return std::popcount(lone) >= 2 ? -1 : 0;
  if (inside == 3) {
    for (auto b : curve.blocks)
      if ((b & mask) == 0) return std::popcount(b) >= 2 ? -1 : 0;
  }
  return 0;
}

inline Rational labelled_intersection(const LabelledExpr& expr, const LabelledFCurve& curve) {
  if (expr.n < 4) throw std::domain_error("labelled_intersection: need at least 4 points");
  validate_curve(curve, expr.n);
  Rational total;
  int singletons = 0;
  for (auto b : curve.blocks) {
    if (std::popcount(b) == 1) {
      ++singletons;
      total += expr.psi[static_cast<std::size_t>(std::countr_zero(b))];
    }
  }
  total += expr.k * (2 - singletons);
  for (const auto& [mask, c] : expr.delta) {
    int dot = delta_dot_curve(mask, curve);
    if (dot) total += c * dot;
  }
  return total;
}

/// All partitions of {0..n-1} into exactly four nonempty blocks.
inline std::vector<LabelledFCurve> enumerate_labelled_f_curves(int n) {
  std::vector<LabelledFCurve> out;
  std::vector<int> label(static_cast<std::size_t>(n), 0);
  // Restricted growth strings with maximum label exactly 3.
  auto rec = [&](auto&& self, int pos, int max_label) -> void {
    if (pos == n) {
      if (max_label == 3) {
        LabelledFCurve c;
        for (int i = 0; i < n; ++i) c.blocks[static_cast<std::size_t>(label[static_cast<std::size_t>(i)])] |= 1u << i;
        out.push_back(c);
      }
      return;
    }
    if (3 - max_label > n - pos) return;
    for (int l = 0; l <= std::min(max_label + 1, 3); ++l) {
      label[static_cast<std::size_t>(pos)] = l;
      self(self, pos + 1, std::max(max_label, l));
    }
  };
  if (n >= 4) {
    label[0] = 0;
    rec(rec, 1, 0);
  }
  return out;
}

}  // namespace nefwiz
