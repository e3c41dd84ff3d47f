#pragma once

// Recursive nef certification. At each profile the engine looks for a kinds
// pair and a constant c > 0 with v^*f^*D = cK + E, E effective; every class of
// E with coefficient above c forces restriction to both sides of that class.
// Profiles with at most 7 points close by the known low-dimensional case.

#include "nefwiz/averages.hpp"
#include "nefwiz/criteria.hpp"
#include "nefwiz/intersection.hpp"
#include "nefwiz/pullback.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace nefwiz {

enum class CPolicy { MaxFeasible, MinNecessaryCount };

inline std::string_view policy_name(CPolicy p) {
  return p == CPolicy::MaxFeasible ? "MaxFeasible" : "MinNecessaryCount";
}

inline CPolicy parse_policy(std::string_view s) {
  if (s == "MaxFeasible") return CPolicy::MaxFeasible;
  if (s == "MinNecessaryCount") return CPolicy::MinNecessaryCount;
  throw std::invalid_argument("unknown c policy '" + std::string(s) + "'");
}

inline std::vector<KindPair> default_kind_order() {
  using K = AverageKind;
  return {{K::Big, K::Big}, {K::A2, K::Z2}, {K::A1, K::Z1}, {K::A3, K::Z3}, {K::A1, K::Big},
          {K::A2, K::Big},  {K::A3, K::Big}, {K::Big, K::Z1}, {K::Big, K::Z2}, {K::Big, K::Z3},
          {K::A1, K::Z2},   {K::A1, K::Z3},  {K::A2, K::Z1},  {K::A2, K::Z3},  {K::A3, K::Z1},
          {K::A3, K::Z2}};
}

/// Criteria in the order the engine tries them.
inline std::vector<Criterion> default_criteria() {
  return {Criterion::Bm, Criterion::B1, Criterion::Induct, Criterion::B0, Criterion::Level0};
}

struct EngineConfig {
  std::vector<KindPair> kind_search_order = default_kind_order();
  CPolicy c_policy = CPolicy::MaxFeasible;
  int max_depth = 64;
  std::vector<Criterion> criteria_enabled = default_criteria();
  int parallelism = 1;  // runtime hint only; never affects results
  // c = 0 makes E itself effective, so every class with positive coefficient is
  // necessary. Tried only after every positive candidate.
  bool admit_zero_c = true;

  void validate() const {
    if (kind_search_order.empty()) throw std::invalid_argument("EngineConfig: kind_search_order is empty");
    if (max_depth < 1) throw std::invalid_argument("EngineConfig: max_depth must be at least 1");
  }
};

/// Thrown by certify_nef when the input fails an F-inequality.
class NotAnFDivisor : public std::invalid_argument {
 public:
  explicit NotAnFDivisor(std::vector<FViolation> v)
      : std::invalid_argument("divisor is not an F-divisor: " + (v.empty() ? std::string() : v.front().describe())),
        violations_(std::move(v)) {}
  const std::vector<FViolation>& violations() const { return violations_; }

 private:
  std::vector<FViolation> violations_;
};

using CoefficientTable = std::vector<std::pair<BoundaryClass, Rational>>;

struct CriterionLeaf {
  CriterionVerdict verdict;
};
struct BaseLeaf {
  Profile profile;
};
struct TrivialLeaf {
  Profile profile;
  std::string reason;
};
struct NecessaryRestriction {
  BoundaryClass cls;
  Profile first, second;
};
struct InnerNode {
  Profile profile;
  KindPair kinds;
  Rational c;
  CoefficientTable coefficients;
  std::vector<NecessaryRestriction> restrictions;
};
struct InconclusiveNode {
  Profile profile;
  std::string reason;
  std::optional<KindPair> kinds;
  std::optional<Rational> c;
  CoefficientTable coefficients;
  std::optional<Profile> failing_child;
};

using CertNode = std::variant<CriterionLeaf, BaseLeaf, TrivialLeaf, InnerNode, InconclusiveNode>;

inline const char* criterion_node_key() { return "criterion"; }

struct Certificate {
  SymDivisorMg divisor;
  EngineConfig config;
  std::string root;
  std::map<std::string, CertNode> nodes;  // keyed by profile key (or "criterion")

  bool certified() const {
    return std::none_of(nodes.begin(), nodes.end(),
                        [](const auto& kv) { return std::holds_alternative<InconclusiveNode>(kv.second); });
  }
};

inline const std::vector<std::string>& certificate_axioms() {
  static const std::vector<std::string> axioms{"Bridge Theorem", "Ray Theorem", "F-conjecture N≤7"};
  return axioms;
}

/// Either the necessary classes of a c-average, or an effectivity failure.
struct NecessaryResult {
  bool effective = true;
  std::vector<BoundaryClass> classes;
};

/// Classes with coefficient > c; effectivity fails if any coefficient is < 0.
inline NecessaryResult necessary_classes(const CAveraged& avg, const Rational& c) {
  NecessaryResult r;
  for (const auto& [cls, v] : avg.divisor.boundary) {
    if (v < 0) return {false, {}};
    if (v > c) r.classes.push_back(cls);
  }
  return r;
}

/// Every 4-block partition of the profile, as weight multisets.
inline std::vector<std::array<std::vector<int>, 4>> weighted_f_curves(const Profile& p) {
  std::vector<std::array<std::vector<int>, 4>> out;
  std::set<std::array<std::vector<int>, 4>> seen;
  for (const auto& curve : enumerate_labelled_f_curves(p.size())) {
    std::array<std::vector<int>, 4> blocks;
    for (std::size_t bi = 0; bi < 4; ++bi)
      for (int i = 0; i < p.size(); ++i)
        if (curve.blocks[bi] & (1u << i)) blocks[bi].push_back(p.weights()[static_cast<std::size_t>(i)]);
    std::sort(blocks.begin(), blocks.end());
    if (seen.insert(blocks).second) out.push_back(blocks);
  }
  return out;
}

/// F-positivity of a weighted divisor on every F-curve of its profile.
inline bool f_positive(const WeightedDivisor& wd) {
  if (wd.profile.size() < 4) return true;
  for (const auto& blocks : weighted_f_curves(wd.profile))
    if (f_intersection_weighted(wd, blocks) < 0) return false;
  return true;
}

namespace detail {

inline KindPair effective_kinds(KindPair kp, const Profile& p) {
  if (p.a() == 0) kp.a_kind = AverageKind::Big;
  if (p.z() == 0) kp.z_kind = AverageKind::Big;
  return kp;
}

/// Positive c where some coefficient crosses 0 or crosses c.
inline std::vector<Rational> breakpoints(const AffineTable& t) {
  std::vector<Rational> out;
  for (const auto& e : t.entries) {
    if (e.slope != 0) {
      Rational r = -e.constant / e.slope;
      if (r > 0) out.push_back(r);
    }
    if (e.slope != 1) {
      Rational r = -e.constant / (e.slope - 1);
      if (r > 0) out.push_back(r);
    }
  }
  return out;
}

struct Attempt {
  std::size_t kind_index = 0;
  Rational c;
  std::vector<std::size_t> necessary;  // entry indices with coefficient > c
};

class Search {
 public:
  Search(const BVector& b, const EngineConfig& cfg, std::optional<Rational> root_hint)
      : b_(b), cfg_(cfg), root_hint_(std::move(root_hint)) {}

  bool certify(const Profile& p, int depth) {
    auto key = p.key();
    if (auto it = memo_.find(key); it != memo_.end()) return !std::holds_alternative<InconclusiveNode>(it->second);
    CertNode node = solve(p, depth);
    bool ok = !std::holds_alternative<InconclusiveNode>(node);
    memo_.emplace(std::move(key), std::move(node));
    return ok;
  }

  const std::map<std::string, CertNode>& memo() const { return memo_; }

 private:
  CertNode solve(const Profile& p, int depth) {
    if (p.size() <= 3) return TrivialLeaf{p, "point space"};
    if (p.size() <= 7) {
      if (!f_positive(restrict(b_, p)))
        return InconclusiveNode{p, "restriction is not F-positive", {}, {}, {}, {}};
      return BaseLeaf{p};
    }
    if (depth > cfg_.max_depth) return InconclusiveNode{p, "maximum depth exceeded", {}, {}, {}, {}};

    const WeightedDivisor wd = restrict(b_, p);
    std::vector<KindPair> kinds;
    std::vector<AffineTable> tables;
    for (const auto& kp : cfg_.kind_search_order) {
      if (!admissible(kp, p)) continue;
      KindPair eff = effective_kinds(kp, p);
      if (std::find(kinds.begin(), kinds.end(), eff) != kinds.end()) continue;
      kinds.push_back(eff);
      tables.push_back(affine_c_average(wd, eff));
    }
    if (kinds.empty()) return InconclusiveNode{p, "no admissible average kinds", {}, {}, {}, {}};

    std::vector<Attempt> attempts;
    for (std::size_t ki = 0; ki < tables.size(); ++ki) {
      auto cands = breakpoints(tables[ki]);
      if (root_hint_ && p == Profile::ones(b_.genus())) cands.push_back(*root_hint_);
      if (cands.empty()) cands.push_back(Rational(1));
      std::sort(cands.begin(), cands.end(), std::greater<>());
      cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
      if (cfg_.admit_zero_c) cands.push_back(Rational(0));
      for (auto& c : cands) {
        Attempt at{ki, c, {}};
        bool effective = true;
        const auto& entries = tables[ki].entries;
        for (std::size_t ei = 0; ei < entries.size() && effective; ++ei) {
          Rational v = entries[ei].at(c);
          if (v < 0) effective = false;
          else if (v > c) at.necessary.push_back(ei);
        }
        if (effective) attempts.push_back(std::move(at));
      }
    }
    if (cfg_.c_policy == CPolicy::MinNecessaryCount) {
      std::stable_sort(attempts.begin(), attempts.end(), [](const Attempt& l, const Attempt& r) {
        if (l.necessary.size() != r.necessary.size()) return l.necessary.size() < r.necessary.size();
        if (l.c != r.c) return l.c > r.c;
        return l.kind_index < r.kind_index;
      });
    }

    if (attempts.empty()) {
      const auto& t = tables.front();
      const auto bps = breakpoints(t);
      Rational c = bps.empty() ? Rational(1) : *std::max_element(bps.begin(), bps.end());
      return InconclusiveNode{p, "no effective c-average", kinds.front(), c, table_at(t, c), {}};
    }

    const Attempt* best = nullptr;
    std::optional<Profile> best_failure;
    for (const auto& at : attempts) {
      const auto& t = tables[at.kind_index];
      std::vector<NecessaryRestriction> restrictions;
      std::optional<Profile> failure;
      for (std::size_t ei : at.necessary) {
        const auto& cls = t.entries[ei].cls;
        auto [first, second] = child_profiles(p, cls);
        if (!certify(first, depth + 1)) failure = first;
        else if (!certify(second, depth + 1)) failure = second;
        if (failure) break;
        restrictions.push_back({cls, std::move(first), std::move(second)});
      }
      if (!failure) return InnerNode{p, kinds[at.kind_index], at.c, table_at(t, at.c), std::move(restrictions)};
      if (!best || at.necessary.size() < best->necessary.size()) {
        best = &at;
        best_failure = failure;
      }
    }
    const auto& t = tables[best->kind_index];
    return InconclusiveNode{p, "a necessary restriction is inconclusive", kinds[best->kind_index], best->c,
                            table_at(t, best->c), best_failure};
  }

  static CoefficientTable table_at(const AffineTable& t, const Rational& c) {
    CoefficientTable out;
    out.reserve(t.entries.size());
    for (const auto& e : t.entries) out.emplace_back(e.cls, e.at(c));
    return out;
  }

  const BVector& b_;
  const EngineConfig& cfg_;
  std::optional<Rational> root_hint_;
  std::map<std::string, CertNode> memo_;
};

// Copies the nodes reachable from `root` out of the search memo.
inline void collect(const std::map<std::string, CertNode>& memo, const std::string& key,
                    std::map<std::string, CertNode>& out) {
  if (out.count(key)) return;
  const CertNode& node = memo.at(key);
  out.emplace(key, node);
  if (const auto* inner = std::get_if<InnerNode>(&node)) {
    for (const auto& r : inner->restrictions) {
      collect(memo, r.first.key(), out);
      collect(memo, r.second.key(), out);
    }
  } else if (const auto* bad = std::get_if<InconclusiveNode>(&node)) {
    if (bad->failing_child) collect(memo, bad->failing_child->key(), out);
  }
}

}  // namespace detail

/// Certifies a single profile; the memo store is shared across calls with the
/// same divisor and config.
class NodeCertifier {
 public:
  NodeCertifier(const BVector& b, const EngineConfig& cfg, std::optional<Rational> root_hint = std::nullopt)
      : b_(b), cfg_(cfg), search_(b_, cfg_, std::move(root_hint)) {}

  bool certify(const Profile& p) {
    if (p.genus() != b_.genus())
      throw std::domain_error("certify_node: profile genus " + std::to_string(p.genus()) + " does not match " +
                              std::to_string(b_.genus()));
    return search_.certify(p, 0);
  }
  const CertNode& node(const Profile& p) const { return search_.memo().at(p.key()); }
  const std::map<std::string, CertNode>& memo() const { return search_.memo(); }

 private:
  BVector b_;
  EngineConfig cfg_;
  detail::Search search_;
};

inline Certificate certify_nef(const SymDivisorMg& d, const EngineConfig& config = {}) {
  config.validate();
  if (auto v = check_f_divisor_mg(d); !v.empty()) throw NotAnFDivisor(std::move(v));
  const int g = d.genus();
  const BVector b = d.bvector();
  Certificate cert{d, config, {}, {}};
  const Profile flag = Profile::ones(g);

  if (b.is_zero()) {
    cert.root = flag.key();
    cert.nodes.emplace(cert.root, TrivialLeaf{flag, "zero flag pullback"});
    return cert;
  }
  for (Criterion c : config.criteria_enabled) {
    if (c == Criterion::Step0) continue;
    auto verdict = evaluate_criterion(c, d);
    if (verdict.applies) {
      cert.root = criterion_node_key();
      cert.nodes.emplace(cert.root, CriterionLeaf{std::move(verdict)});
      return cert;
    }
  }
  cert.root = flag.key();
  if (g <= 7) {
    cert.nodes.emplace(cert.root, BaseLeaf{flag});
    return cert;
  }
  std::optional<Rational> hint;
  if (auto s = step0_constant(b); s.has_value()) hint = s.c;
  NodeCertifier certifier(b, config, hint);
  certifier.certify(flag);
  detail::collect(certifier.memo(), cert.root, cert.nodes);
  return cert;
}

/// Length of the longest chain of inner nodes below the root.
inline int certificate_depth(const Certificate& cert) {
  std::map<std::string, int> depth;
  auto rec = [&](auto&& self, const std::string& key) -> int {
    if (auto it = depth.find(key); it != depth.end()) return it->second;
    int d = 0;
    if (const auto* inner = std::get_if<InnerNode>(&cert.nodes.at(key))) {
      for (const auto& r : inner->restrictions)
        d = std::max({d, 1 + self(self, r.first.key()), 1 + self(self, r.second.key())});
    }
    return depth[key] = d;
  };
  return rec(rec, cert.root);
}

/// Follows failing children from the root to the deepest inconclusive node.
inline std::optional<InconclusiveNode> deepest_failure(const Certificate& cert) {
  std::optional<InconclusiveNode> out;
  std::string key = cert.root;
  while (true) {
    auto it = cert.nodes.find(key);
    if (it == cert.nodes.end()) break;
    const auto* bad = std::get_if<InconclusiveNode>(&it->second);
    if (!bad) break;
    out = *bad;
    if (!bad->failing_child) break;
    key = bad->failing_child->key();
  }
  return out;
}

/// Independent re-check of a certificate: returns the first defect, or nullopt.
inline std::optional<std::string> validate_certificate(const SymDivisorMg& d, const Certificate& cert) {
  if (!(cert.divisor == d)) return "certificate is for a different divisor";
  if (!check_f_divisor_mg(d).empty()) return "divisor is not an F-divisor";
  const BVector b = d.bvector();
  const int g = d.genus();
  std::set<std::string> done;

  auto check = [&](auto&& self, const std::string& key) -> std::optional<std::string> {
    if (done.count(key)) return std::nullopt;
    auto it = cert.nodes.find(key);
    if (it == cert.nodes.end()) return "missing node " + key;
    const CertNode& node = it->second;

    if (const auto* leaf = std::get_if<CriterionLeaf>(&node)) {
      if (key != cert.root) return "criterion leaf below the root";
      auto fresh = evaluate_criterion(leaf->verdict.name, d);
      if (!fresh.applies) return "criterion " + std::string(criterion_name(leaf->verdict.name)) + " does not apply";
      if (fresh.c != leaf->verdict.c || fresh.c_max != leaf->verdict.c_max)
        return "criterion " + std::string(criterion_name(leaf->verdict.name)) + " witness mismatch";
    } else if (const auto* base = std::get_if<BaseLeaf>(&node)) {
      if (base->profile.key() != key) return "node key does not match profile " + base->profile.key();
      if (base->profile.genus() != g) return "base leaf genus mismatch at " + key;
      if (base->profile.size() > 7) return "base leaf with more than 7 points at " + key;
      if (base->profile.size() >= 4 && !f_positive(restrict(b, base->profile)))
        return "base leaf is not F-positive at " + key;
    } else if (const auto* triv = std::get_if<TrivialLeaf>(&node)) {
      if (triv->profile.key() != key) return "node key does not match profile " + triv->profile.key();
      if (triv->profile.size() > 3 && !b.is_zero()) return "trivial leaf on a nondegenerate space at " + key;
    } else if (const auto* inner = std::get_if<InnerNode>(&node)) {
      const Profile& p = inner->profile;
      if (p.key() != key) return "node key does not match profile " + p.key();
      if (p.genus() != g) return "inner node genus mismatch at " + key;
      if (p.size() < 4) return "inner node on a point space at " + key;
      if (!admissible(inner->kinds, p)) return "inadmissible kinds " + inner->kinds.name() + " at " + key;
      if (inner->c < 0) return "negative c at " + key;
      if (inner->c == 0 && !cert.config.admit_zero_c) return "c = 0 not admitted by the config at " + key;
      auto fresh = c_average(restrict(b, p), inner->c, inner->kinds);
      if (fresh.divisor.boundary.size() != inner->coefficients.size()) return "coefficient table size mismatch at " + key;
      for (const auto& [cls, v] : inner->coefficients) {
        auto f = fresh.divisor.boundary.find(cls);
        if (f == fresh.divisor.boundary.end()) return "unknown class in table at " + key;
        if (f->second != v) return "coefficient mismatch at " + key;
      }
      auto nec = necessary_classes(fresh, inner->c);
      if (!nec.effective) return "negative coefficient at " + key;
      std::set<BoundaryClass> listed;
      for (const auto& r : inner->restrictions) {
        if (!listed.insert(r.cls).second) return "duplicate restriction at " + key;
        auto [first, second] = child_profiles(p, r.cls);
        if (first != r.first || second != r.second) return "child profiles mismatch at " + key;
      }
      for (const auto& cls : nec.classes)
        if (!listed.count(cls)) return "missing necessary class at " + key;
      if (listed.size() != nec.classes.size()) return "unnecessary restriction at " + key;
      done.insert(key);
      for (const auto& r : inner->restrictions) {
        if (auto e = self(self, r.first.key())) return e;
        if (auto e = self(self, r.second.key())) return e;
      }
    } else {
      return "inconclusive node at " + key;
    }
    done.insert(key);
    return std::nullopt;
  };
  if (cert.root.empty()) return "certificate has no root";
  if (cert.root != criterion_node_key()) {
    auto it = cert.nodes.find(cert.root);
    if (it == cert.nodes.end()) return "missing root node";
    const Profile* rp = nullptr;
    if (auto* x = std::get_if<InnerNode>(&it->second)) rp = &x->profile;
    if (auto* x = std::get_if<BaseLeaf>(&it->second)) rp = &x->profile;
    if (auto* x = std::get_if<TrivialLeaf>(&it->second)) rp = &x->profile;
    if (rp && *rp != Profile::ones(g)) return "root profile is not the flag profile";
  }
  return check(check, cert.root);
}

}  // namespace nefwiz
