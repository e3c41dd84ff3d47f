#pragma once

// The symmetric F-cone in the B-basis: its facet rows, an exact double
// description enumeration of its extremal rays, and the lift of a ray to a
// divisor on the genus-g space with the same flag pullback.

#include "nefwiz/divisor.hpp"
#include "nefwiz/intersection.hpp"

#include <algorithm>
#include <bitset>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace nefwiz {

using IntRow = std::vector<std::int64_t>;

struct FacetMatrix {
  int genus = 0;
  std::vector<FPartition> partitions;
  std::vector<IntRow> rows;  // columns e_2 .. e_{g/2}

  int dim() const { return genus / 2 - 1; }
};

inline FacetMatrix facet_matrix(int g) {
  if (g < 4) throw std::domain_error("facet_matrix: genus must be at least 4");
  FacetMatrix m{g, enumerate_f_partitions(g), {}};
  const int d = m.dim();
  for (const auto& p : m.partitions) {
    IntRow row(static_cast<std::size_t>(d), 0);
    auto add = [&](int idx, int s) {
      int f = fold_index(idx, g);
      if (f >= 2) row[static_cast<std::size_t>(f - 2)] += s;
    };
    const auto [i, j, k, l] = p.parts;
    add(i + j, 1), add(i + k, 1), add(i + l, 1);
    add(i, -1), add(j, -1), add(k, -1), add(l, -1);
    m.rows.push_back(std::move(row));
  }
  return m;
}

struct RaySet {
  int genus = 0;
  std::vector<IntRow> rays;  // primitive, sorted lexicographically
};

/// The cone has a lineality space; `basis` spans it.
class ConeNotPointed : public std::domain_error {
 public:
  explicit ConeNotPointed(std::vector<std::vector<Rational>> basis)
      : std::domain_error("cone is not pointed: lineality space of dimension " + std::to_string(basis.size())),
        basis_(std::move(basis)) {}
  const std::vector<std::vector<Rational>>& basis() const { return basis_; }

 private:
  std::vector<std::vector<Rational>> basis_;
};

enum class Adjacency { Combinatorial, Algebraic };

namespace detail {

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> rref(std::vector<std::vector<Rational>>& a, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < a.size(); ++c) {
    std::size_t p = r;
    while (p < a.size() && a[p][c] == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[r]);
    Rational inv = 1 / a[r][c];
    for (auto& x : a[r]) x *= inv;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline std::vector<std::vector<Rational>> to_rational(const std::vector<IntRow>& rows) {
  std::vector<std::vector<Rational>> out;
  for (const auto& r : rows) out.emplace_back(r.begin(), r.end());
  return out;
}

inline std::size_t rank_of(const std::vector<IntRow>& rows, std::size_t cols) {
  auto a = to_rational(rows);
  return rref(a, cols).size();
}

/// Basis of {x : rows x = 0}.
inline std::vector<std::vector<Rational>> nullspace(const std::vector<IntRow>& rows, std::size_t cols) {
  auto a = to_rational(rows);
  auto piv = rref(a, cols);
  std::vector<std::vector<Rational>> out;
  std::vector<bool> is_pivot(cols, false);
  for (auto p : piv) is_pivot[p] = true;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(cols);
    v[f] = 1;
    for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -a[i][f];
    out.push_back(std::move(v));
  }
  return out;
}

inline std::int64_t checked(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("extremal_rays: ray entry exceeds 64 bits");
  return static_cast<std::int64_t>(v);
}

inline void make_primitive(IntRow& r) {
  std::int64_t g = 0;
  for (auto x : r) g = std::gcd(g, x);
  if (g > 1)
    for (auto& x : r) x /= g;
}

/// Scales a rational vector to the primitive integer vector on the same halfline.
inline IntRow primitive_from_rational(const std::vector<Rational>& v) {
  Integer l = 1;
  for (const auto& x : v) l = boost::multiprecision::lcm(l, denominator(x));
  IntRow out;
  for (const auto& x : v) {
    Integer n = numerator(x) * (l / denominator(x));
    if (n > std::numeric_limits<std::int64_t>::max() || n < std::numeric_limits<std::int64_t>::min())
      throw std::overflow_error("extremal_rays: ray entry exceeds 64 bits");
    out.push_back(n.convert_to<std::int64_t>());
  }
  make_primitive(out);
  return out;
}

inline __int128 dot(const IntRow& a, const IntRow& b) {
  __int128 s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<__int128>(a[i]) * b[i];
  return s;
}

constexpr std::size_t kMaxFacets = 512;
using ZeroSet = std::bitset<kMaxFacets>;

struct DDRay {
  IntRow v;
  ZeroSet zeros;  // processed rows (by position in insertion order) vanishing on v
};

}  // namespace detail

/// Rows sorted by (number of nonzero entries, lexicographic), duplicates kept.
inline std::vector<IntRow> insertion_order(const FacetMatrix& m) {
  std::vector<IntRow> rows = m.rows;
  std::stable_sort(rows.begin(), rows.end(), [](const IntRow& a, const IntRow& b) {
    auto nz = [](const IntRow& r) { return std::count_if(r.begin(), r.end(), [](auto x) { return x != 0; }); };
    auto na = nz(a), nb = nz(b);
    if (na != nb) return na < nb;
    return a < b;
  });
  return rows;
}

/// Extremal rays of {e : M e >= 0}, primitive and sorted lexicographically.
inline RaySet extremal_rays(const FacetMatrix& m, Adjacency mode = Adjacency::Combinatorial) {
  if (m.rows.empty()) throw std::domain_error("extremal_rays: facet matrix is empty");
  if (m.rows.size() > detail::kMaxFacets) throw std::domain_error("extremal_rays: too many facet rows");
  const std::size_t d = static_cast<std::size_t>(m.dim());
  const auto rows = insertion_order(m);

  if (detail::rank_of(rows, d) < d) throw ConeNotPointed(detail::nullspace(rows, d));

  // Initial simplicial cone from the first d independent rows.
  std::vector<std::size_t> basis;
  std::vector<IntRow> chosen;
  for (std::size_t i = 0; i < rows.size() && basis.size() < d; ++i) {
    chosen.push_back(rows[i]);
    if (detail::rank_of(chosen, d) == chosen.size()) basis.push_back(i);
    else chosen.pop_back();
  }
  std::vector<detail::DDRay> rays;
  for (std::size_t k = 0; k < d; ++k) {
    // Column k of the inverse: zero on every basis row but the k-th.
    std::vector<IntRow> others;
    for (std::size_t t = 0; t < d; ++t)
      if (t != k) others.push_back(chosen[t]);
    std::vector<Rational> v = d == 1 ? std::vector<Rational>{Rational(1)} : detail::nullspace(others, d).front();
    IntRow r = detail::primitive_from_rational(v);
    if (detail::dot(chosen[k], r) < 0)
      for (auto& x : r) x = -x;
    detail::DDRay ray{std::move(r), {}};
    for (std::size_t t = 0; t < d; ++t)
      if (t != k) ray.zeros.set(basis[t]);
    rays.push_back(std::move(ray));
  }

  std::vector<bool> in_basis(rows.size(), false);
  for (auto i : basis) in_basis[i] = true;
  std::vector<std::size_t> processed(basis.begin(), basis.end());

  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    if (in_basis[ri]) continue;
    const IntRow& a = rows[ri];
    std::vector<std::size_t> pos, neg;
    std::vector<__int128> val(rays.size());
    for (std::size_t k = 0; k < rays.size(); ++k) {
      val[k] = detail::dot(a, rays[k].v);
      if (val[k] > 0) pos.push_back(k);
      else if (val[k] < 0) neg.push_back(k);
      else rays[k].zeros.set(ri);
    }
    std::vector<detail::DDRay> next;
    for (auto p : pos) {
      for (auto n : neg) {
        const detail::ZeroSet common = rays[p].zeros & rays[n].zeros;
        if (d >= 2 && common.count() < d - 2) continue;
        bool adjacent = true;
        if (mode == Adjacency::Combinatorial) {
          for (std::size_t k = 0; k < rays.size() && adjacent; ++k)
            if (k != p && k != n && (rays[k].zeros & common) == common) adjacent = false;
        } else {
          std::vector<IntRow> active;
          for (auto q : processed)
            if (common.test(q)) active.push_back(rows[q]);
          adjacent = detail::rank_of(active, d) == d - 2;
        }
        if (!adjacent) continue;
        IntRow v(d);
        for (std::size_t t = 0; t < d; ++t)
          v[t] = detail::checked(val[p] * rays[n].v[t] - val[n] * rays[p].v[t]);
        detail::make_primitive(v);
        detail::DDRay nr{std::move(v), common};
        nr.zeros.set(ri);
        next.push_back(std::move(nr));
      }
    }
    for (std::size_t k = 0; k < rays.size(); ++k)
      if (val[k] >= 0) next.push_back(std::move(rays[k]));
    rays = std::move(next);
    processed.push_back(ri);
  }

  RaySet out{m.genus, {}};
  for (auto& r : rays) out.rays.push_back(std::move(r.v));
  std::sort(out.rays.begin(), out.rays.end());
  out.rays.erase(std::unique(out.rays.begin(), out.rays.end()), out.rays.end());
  return out;
}

inline EVector ray_to_evector(int g, const IntRow& ray) {
  std::vector<Rational> e;
  for (auto x : ray) e.emplace_back(x);
  return EVector(g, std::move(e));
}

/// A symmetric divisor D_E on the genus-g space whose flag pullback is E.
inline SymDivisorMg lift_to_mg(const EVector& e) {
  const int g = e.genus();
  Rational b1 = 0;
  for (int i = 2; i <= g - 2; ++i) {
    Rational v = Rational((g - 1) * e(i)) / (i * (g - i));
    if (v > b1) b1 = v;
  }
  for (int i = 1; i <= g - 2; ++i)
    for (int j = i; i + j <= g - 1; ++j) {
      Rational v = (g - 1) * (e(i) + e(j) - e(i + j)) / Rational(2 * i * j);
      if (v > b1) b1 = v;
    }
  std::vector<Rational> delta{Rational(0), b1};
  Rational mx = b1;
  for (int i = 2; i <= g / 2; ++i) {
    delta.push_back(Rational(i * (g - i)) * b1 / (g - 1) - e(i));
    if (delta.back() > mx) mx = delta.back();
  }
  delta[0] = mx / 2;
  Rational a = 12 * delta[0] - b1;
  return SymDivisorMg(g, std::move(a), std::move(delta));
}

}  // namespace nefwiz
