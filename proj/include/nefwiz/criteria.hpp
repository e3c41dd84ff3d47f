#pragma once

// Closed-form sufficient conditions for a symmetric F-divisor on the genus-g
// space to be nef. Each returns a verdict that can be rechecked exactly.

#include "nefwiz/divisor.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nefwiz {

enum class Criterion { B0, Level0, B1, Bm, Induct, Step0 };

inline std::string_view criterion_name(Criterion c) {
  switch (c) {
    case Criterion::B0: return "B0";
    case Criterion::Level0: return "LEVEL0";
    case Criterion::B1: return "B1";
    case Criterion::Bm: return "BM";
    case Criterion::Induct: return "INDUCT";
    case Criterion::Step0: return "STEP0";
  }
  return "?";
}

inline Criterion parse_criterion(std::string_view s) {
  for (auto c : {Criterion::B0, Criterion::Level0, Criterion::B1, Criterion::Bm, Criterion::Induct, Criterion::Step0})
    if (criterion_name(c) == s) return c;
  throw std::invalid_argument("unknown criterion '" + std::string(s) + "'");
}

struct CriterionVerdict {
  Criterion name = Criterion::B0;
  bool applies = false;
  std::optional<Rational> c;      // witness constant (lower end for intervals)
  std::optional<Rational> c_max;  // upper end of the witness interval, if bounded
  std::vector<std::string> trace;
};

/// Feasible set {c > 0 : constant_i + slope_i * c >= 0 for all i}, an interval.
class PositiveInterval {
 public:
  void require_nonnegative(const Rational& constant, const Rational& slope) {
    if (slope > 0) {
      Rational bound = -constant / slope;
      if (bound > lo_) lo_ = bound;
    } else if (slope < 0) {
      Rational bound = constant / -slope;
      if (!hi_ || bound < *hi_) hi_ = bound;
    } else if (constant < 0) {
      empty_ = true;
    }
  }

  bool empty() const {
    if (empty_) return true;
    if (!hi_) return false;
    return lo_ > 0 ? *hi_ < lo_ : *hi_ <= 0;
  }
  /// Smallest feasible c when it is attained (lo > 0); otherwise the upper end
  /// or 1 for an interval unbounded on both sides of (0, inf).
  Rational witness() const {
    if (lo_ > 0) return lo_;
    return hi_ ? *hi_ : Rational(1);
  }
  const Rational& lo() const { return lo_; }
  const std::optional<Rational>& hi() const { return hi_; }

 private:
  Rational lo_{0};
  std::optional<Rational> hi_;
  bool empty_ = false;
};

namespace detail {

inline Rational flag_alpha(int g, int i) { return Rational(2 * g - 2 - i * (g - i), g - 1); }
inline Rational flag_beta(const BVector& b, int i) {
  const int g = b.genus();
  return (i * (g - i) * b(1) - (g - 1) * b(i)) / Rational(g - 1);
}

}  // namespace detail

/// -b0(g-1) <= i(g-i)(b1-b0) + (g-1)(b0-bi) <= 0 for 2 <= i <= g/2.
inline CriterionVerdict criterion_b0(const SymDivisorMg& d) {
  const int g = d.genus();
  CriterionVerdict v{Criterion::B0, true, d.b(0), std::nullopt, {}};
  for (int i = 2; i <= g / 2; ++i) {
    Rational mid = i * (g - i) * (d.b(1) - d.b(0)) + (g - 1) * (d.b(0) - d.b(i));
    if (mid > 0 || mid < -d.b(0) * (g - 1)) {
      v.applies = false;
      v.trace.push_back("i=" + std::to_string(i) + ": middle term " + to_string(mid));
    }
  }
  if (!v.applies) v.c.reset();
  return v;
}

/// Exists c > 0 with 0 <= coeff_i(c) <= c, coeff_i the flag big c-average.
inline CriterionVerdict criterion_level0(const SymDivisorMg& d) {
  const int g = d.genus();
  const BVector b = d.bvector();
  PositiveInterval iv;
  for (int i = 2; i <= g / 2; ++i) {
    Rational alpha = detail::flag_alpha(g, i), beta = detail::flag_beta(b, i);
    iv.require_nonnegative(beta, alpha);          // coeff_i(c) >= 0
    iv.require_nonnegative(-beta, 1 - alpha);     // c - coeff_i(c) >= 0
  }
  CriterionVerdict v{Criterion::Level0, !iv.empty(), std::nullopt, std::nullopt, {}};
  if (v.applies) {
    v.c = iv.witness();
    v.c_max = iv.hi();
  }
  return v;
}

/// b_i <= b_1 for all i >= 2.
inline CriterionVerdict criterion_b1(const SymDivisorMg& d) {
  CriterionVerdict v{Criterion::B1, true, std::nullopt, std::nullopt, {}};
  for (int i = 2; i <= d.genus() / 2; ++i)
    if (d.b(i) > d.b(1)) {
      v.applies = false;
      v.trace.push_back("b_" + std::to_string(i) + " > b_1");
    }
  return v;
}

/// 2 min{b_i} >= max{b_i} over i >= 1; any c in [max/2, min] works.
inline CriterionVerdict criterion_bm(const SymDivisorMg& d) {
  const auto& delta = d.delta();
  auto [mn, mx] = std::minmax_element(delta.begin() + 1, delta.end());
  CriterionVerdict v{Criterion::Bm, 2 * *mn >= *mx, std::nullopt, std::nullopt, {}};
  if (v.applies) {
    v.c = *mx / 2;
    v.c_max = *mn;
  }
  return v;
}

/// Closure of b_i = 0 under: b_j = b_k when j + k = i, and b_j = b_{i+j}.
struct ZeroPropagation {
  std::vector<std::vector<int>> classes;  // equality classes of indices 1..g/2, sorted
  std::vector<int> zeros;                 // indices forced to zero
  std::vector<std::string> trace;         // derivation steps, in application order
  bool consistent = true;
  std::string inconsistency;
};

/// `shuffle_seed` != 0 randomizes the rule application order; the resulting
/// classes and zeros do not depend on it.
inline ZeroPropagation zero_propagation(const BVector& b, std::uint64_t shuffle_seed = 0) {
  const int g = b.genus(), h = b.half();
  // Node 0 stands for the value zero; node i for index i.
  std::vector<int> parent(static_cast<std::size_t>(h + 1));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  };
  ZeroPropagation out;
  auto unite = [&](int x, int y, const std::string& why) {
    int rx = find(x), ry = find(y);
    if (rx == ry) return false;
    if (rx < ry) std::swap(rx, ry);
    parent[static_cast<std::size_t>(rx)] = ry;  // smaller root wins, so zero stays the root of its class
    out.trace.push_back(why);
    return true;
  };
  for (int i = 1; i <= h; ++i)
    if (b(i) == 0) unite(i, 0, "b_" + std::to_string(i) + " = 0 (given)");

  std::mt19937_64 rng(shuffle_seed);
  std::vector<char> fired(static_cast<std::size_t>(h + 1), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> pending;
    for (int i = 1; i <= h; ++i)
      if (!fired[static_cast<std::size_t>(i)] && find(i) == 0) pending.push_back(i);
    if (shuffle_seed) std::shuffle(pending.begin(), pending.end(), rng);
    for (int i : pending) {
      fired[static_cast<std::size_t>(i)] = 1;
      changed = true;
      std::vector<std::pair<int, int>> eqs;
      for (int zero_at : {i, g - i}) {
        for (int j = 1; j < zero_at; ++j) eqs.emplace_back(fold_index(j, g), fold_index(zero_at - j, g));
        for (int j = 1; zero_at + j <= g - 1; ++j) eqs.emplace_back(fold_index(j, g), fold_index(zero_at + j, g));
      }
      if (shuffle_seed) std::shuffle(eqs.begin(), eqs.end(), rng);
      for (auto [x, y] : eqs)
        unite(x, y, "b_" + std::to_string(x) + " = b_" + std::to_string(y) + " (from b_" + std::to_string(i) + " = 0)");
    }
  }

  std::map<int, std::vector<int>> by_root;
  for (int i = 1; i <= h; ++i) by_root[find(i)].push_back(i);
  for (auto& [root, members] : by_root) {
    if (root == 0) out.zeros = members;
    if (members.size() >= 2 || root == 0) out.classes.push_back(members);
    for (int m : members) {
      const Rational& expect = root == 0 ? Rational(0) : b(members.front());
      if (b(m) != expect && out.consistent) {
        out.consistent = false;
        out.inconsistency = "derived b_" + std::to_string(m) + " = " + (root == 0 ? "0" : "b_" + std::to_string(members.front())) +
                            " but values differ";
      }
    }
  }
  std::sort(out.classes.begin(), out.classes.end());
  return out;
}

/// g odd with some b_j = 0, or g even with b_j = 0 for some j < g/2.
inline CriterionVerdict criterion_induct(const SymDivisorMg& d) {
  const int g = d.genus();
  CriterionVerdict v{Criterion::Induct, false, std::nullopt, std::nullopt, {}};
  for (int j = 1; j <= g / 2; ++j)
    if (d.b(j) == 0 && (g % 2 == 1 || 2 * j < g)) v.applies = true;
  if (v.applies) v.trace = zero_propagation(d.bvector()).trace;
  return v;
}

/// Largest c > 0 keeping every coefficient of the flag big c-average >= 0.
struct Step0Result {
  enum class Status { Value, Trivial, Unbounded, Infeasible };
  Status status = Status::Infeasible;
  Rational c;

  bool has_value() const { return status == Status::Value; }
};

inline Step0Result step0_constant(const BVector& b) {
  const int g = b.genus();
  if (g < 4) throw std::domain_error("step0_constant: genus must be at least 4");
  if (b.is_zero()) return {Step0Result::Status::Trivial, {}};
  PositiveInterval iv;
  for (int i = 2; i <= g / 2; ++i) iv.require_nonnegative(detail::flag_beta(b, i), detail::flag_alpha(g, i));
  if (iv.empty()) return {Step0Result::Status::Infeasible, {}};
  if (!iv.hi()) return {Step0Result::Status::Unbounded, {}};
  return {Step0Result::Status::Value, *iv.hi()};
}

inline CriterionVerdict evaluate_criterion(Criterion c, const SymDivisorMg& d) {
  switch (c) {
    case Criterion::B0: return criterion_b0(d);
    case Criterion::Level0: return criterion_level0(d);
    case Criterion::B1: return criterion_b1(d);
    case Criterion::Bm: return criterion_bm(d);
    case Criterion::Induct: return criterion_induct(d);
    case Criterion::Step0: {
      CriterionVerdict v{Criterion::Step0, false, std::nullopt, std::nullopt, {}};
      if (d.genus() >= 4) {
        auto r = step0_constant(d.bvector());
        if (r.has_value()) v.c = r.c;
      }
      return v;  // never closes a divisor on its own; only seeds the engine's c
    }
  }
  throw std::logic_error("evaluate_criterion: unknown criterion");
}

}  // namespace nefwiz
