#pragma once

// Text formats: divisor spec strings, certificate / ray / config / report JSON
// and the CSV mirrors. Output is byte-deterministic: object keys sorted,
// rationals as reduced "p/q" strings, no timestamps.

#include "nefwiz/cone.hpp"
#include "nefwiz/engine.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nefwiz {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kToolVersion = "nefwiz 0.1.0";

/// Malformed input text or file.
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline Rational token_rational(std::string_view tok, const std::string& what) {
  try {
    return parse_rational(tok);
  } catch (const std::invalid_argument&) {
    throw ParseError(what + ": malformed rational '" + std::string(tok) + "'");
  }
}

inline int token_int(std::string_view tok, const std::string& what) {
  std::string s(tok);
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !(std::isdigit(static_cast<unsigned char>(s.front())) || s.front() == '-'))
    throw ParseError(what + ": malformed integer '" + s + "'");
  return v;
}

}  // namespace detail

/// "g;a;b_0,b_1,...,b_{g/2}".
inline SymDivisorMg parse_divisor(std::string_view text) {
  auto parts = detail::split(text, ';');
  if (parts.size() != 3)
    throw ParseError("divisor spec must look like g;a;b_0,...,b_{g/2}, got '" + std::string(text) + "'");
  int g = detail::token_int(parts[0], "genus");
  if (g < 2) throw ParseError("genus: '" + std::string(parts[0]) + "' is below 2");
  Rational a = detail::token_rational(parts[1], "lambda coefficient");
  auto toks = detail::split(parts[2], ',');
  const std::size_t want = static_cast<std::size_t>(g / 2 + 1);
  if (toks.size() != want)
    throw ParseError("expected " + std::to_string(want) + " coefficients, got " + std::to_string(toks.size()));
  std::vector<Rational> delta;
  for (std::size_t i = 0; i < toks.size(); ++i) delta.push_back(detail::token_rational(toks[i], "b_" + std::to_string(i)));
  return SymDivisorMg(g, std::move(a), std::move(delta));
}

inline std::string serialize_divisor(const SymDivisorMg& d) {
  std::string out = std::to_string(d.genus()) + ";" + to_string(d.lambda()) + ";";
  for (std::size_t i = 0; i < d.delta().size(); ++i) out += (i ? "," : "") + to_string(d.delta()[i]);
  return out;
}

inline std::vector<int> parse_profile(std::string_view text) {
  std::vector<int> out;
  for (auto tok : detail::split(text, ',')) {
    int w = detail::token_int(tok, "profile weight");
    if (w < 1) throw ParseError("profile weight: '" + std::string(tok) + "' is not positive");
    out.push_back(w);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON building blocks.

inline Json rational_json(const Rational& r) { return to_string(r); }

inline Rational rational_from_json(const Json& j, const std::string& what) {
  if (!j.is_string()) throw ParseError(what + ": expected a rational string");
  return detail::token_rational(j.get<std::string>(), what);
}

inline Json optional_rational_json(const std::optional<Rational>& r) { return r ? rational_json(*r) : Json(nullptr); }

inline std::optional<Rational> optional_rational_from_json(const Json& j, const std::string& what) {
  if (j.is_null()) return std::nullopt;
  return rational_from_json(j, what);
}

inline Json profile_json(const Profile& p) { return p.weights(); }
inline Json class_json(const BoundaryClass& c) { return c.side; }

inline Json divisor_json(const SymDivisorMg& d) {
  Json b = Json::array();
  for (const auto& x : d.delta()) b.push_back(rational_json(x));
  return {{"genus", d.genus()}, {"lambda", rational_json(d.lambda())}, {"delta", b}, {"spec", serialize_divisor(d)}};
}

inline SymDivisorMg divisor_from_json(const Json& j) {
  std::vector<Rational> delta;
  for (const auto& x : j.at("delta")) delta.push_back(rational_from_json(x, "delta"));
  return SymDivisorMg(j.at("genus").get<int>(), rational_from_json(j.at("lambda"), "lambda"), std::move(delta));
}

inline Json config_json(const EngineConfig& c) {
  Json kinds = Json::array(), crit = Json::array();
  for (const auto& k : c.kind_search_order) kinds.push_back(k.name());
  for (auto x : c.criteria_enabled) crit.push_back(std::string(criterion_name(x)));
  // parallelism is a runtime hint and stays out of content that must be byte-stable
  return {{"kind_search_order", kinds},
          {"c_policy", std::string(policy_name(c.c_policy))},
          {"max_depth", c.max_depth},
          {"criteria_enabled", crit},
          {"admit_zero_c", c.admit_zero_c}};
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline EngineConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("config: expected a JSON object");
  EngineConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "kind_search_order") {
      c.kind_search_order.clear();
      for (const auto& k : v) c.kind_search_order.push_back(parse_kind_pair(k.get<std::string>()));
    } else if (key == "c_policy") {
      c.c_policy = parse_policy(v.get<std::string>());
    } else if (key == "max_depth") {
      c.max_depth = v.get<int>();
    } else if (key == "criteria_enabled") {
      c.criteria_enabled.clear();
      for (const auto& k : v) c.criteria_enabled.push_back(parse_criterion(k.get<std::string>()));
    } else if (key == "parallelism") {
      c.parallelism = v.get<int>();
    } else if (key == "admit_zero_c") {
      c.admit_zero_c = v.get<bool>();
    } else {
      throw ParseError("config: unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

inline Json table_json(const CoefficientTable& t) {
  Json out = Json::array();
  for (const auto& [cls, v] : t) out.push_back({{"class", class_json(cls)}, {"value", rational_json(v)}});
  return out;
}

inline CoefficientTable table_from_json(const Json& j) {
  CoefficientTable t;
  for (const auto& e : j) t.emplace_back(BoundaryClass{e.at("class").get<std::vector<int>>()}, rational_from_json(e.at("value"), "coefficient"));
  return t;
}

inline Json verdict_json(const CriterionVerdict& v) {
  return {{"criterion", std::string(criterion_name(v.name))},
          {"applies", v.applies},
          {"c", optional_rational_json(v.c)},
          {"c_max", optional_rational_json(v.c_max)},
          {"trace", v.trace}};
}

inline Json node_json(const CertNode& node) {
  return std::visit(
      [](const auto& n) -> Json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CriterionLeaf>) {
          Json j = verdict_json(n.verdict);
          j["type"] = "criterion";
          return j;
        } else if constexpr (std::is_same_v<T, BaseLeaf>) {
          return {{"type", "base"}, {"profile", profile_json(n.profile)}};
        } else if constexpr (std::is_same_v<T, TrivialLeaf>) {
          return {{"type", "trivial"}, {"profile", profile_json(n.profile)}, {"reason", n.reason}};
        } else if constexpr (std::is_same_v<T, InnerNode>) {
          Json rs = Json::array();
          for (const auto& r : n.restrictions)
            rs.push_back({{"class", class_json(r.cls)}, {"children", {profile_json(r.first), profile_json(r.second)}}});
          return {{"type", "inner"},
                  {"profile", profile_json(n.profile)},
                  {"kinds", n.kinds.name()},
                  {"c", rational_json(n.c)},
                  {"coefficients", table_json(n.coefficients)},
                  {"restrictions", rs}};
        } else {
          return {{"type", "inconclusive"},
                  {"profile", profile_json(n.profile)},
                  {"reason", n.reason},
                  {"kinds", n.kinds ? Json(n.kinds->name()) : Json(nullptr)},
                  {"c", optional_rational_json(n.c)},
                  {"coefficients", table_json(n.coefficients)},
                  {"failing_child", n.failing_child ? profile_json(*n.failing_child) : Json(nullptr)}};
        }
      },
      node);
}

inline CertNode node_from_json(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  auto profile = [&] { return Profile(j.at("profile").get<std::vector<int>>()); };
  if (type == "criterion") {
    CriterionVerdict v{parse_criterion(j.at("criterion").get<std::string>()), j.at("applies").get<bool>(),
                       optional_rational_from_json(j.at("c"), "c"), optional_rational_from_json(j.at("c_max"), "c_max"),
                       j.at("trace").get<std::vector<std::string>>()};
    return CriterionLeaf{std::move(v)};
  }
  if (type == "base") return BaseLeaf{profile()};
  if (type == "trivial") return TrivialLeaf{profile(), j.at("reason").get<std::string>()};
  if (type == "inner") {
    InnerNode n{profile(), parse_kind_pair(j.at("kinds").get<std::string>()), rational_from_json(j.at("c"), "c"),
                table_from_json(j.at("coefficients")), {}};
    for (const auto& r : j.at("restrictions")) {
      const auto& ch = r.at("children");
      if (!ch.is_array() || ch.size() != 2) throw ParseError("restriction must have exactly two children");
      n.restrictions.push_back({BoundaryClass{r.at("class").get<std::vector<int>>()},
                                Profile(ch[0].get<std::vector<int>>()), Profile(ch[1].get<std::vector<int>>())});
    }
    return n;
  }
  if (type == "inconclusive") {
    InconclusiveNode n{profile(), j.at("reason").get<std::string>(), std::nullopt, std::nullopt, {}, std::nullopt};
    if (!j.at("kinds").is_null()) n.kinds = parse_kind_pair(j.at("kinds").get<std::string>());
    n.c = optional_rational_from_json(j.at("c"), "c");
    n.coefficients = table_from_json(j.at("coefficients"));
    if (!j.at("failing_child").is_null()) n.failing_child = Profile(j.at("failing_child").get<std::vector<int>>());
    return n;
  }
  throw ParseError("unknown node type '" + type + "'");
}

inline Json certificate_json(const Certificate& c) {
  Json nodes = Json::object();
  for (const auto& [key, node] : c.nodes) nodes[key] = node_json(node);
  return {{"version", kFormatVersion},
          {"genus", c.divisor.genus()},
          {"divisor", divisor_json(c.divisor)},
          {"config", config_json(c.config)},
          {"axioms", certificate_axioms()},
          {"certified", c.certified()},
          {"root", c.root},
          {"nodes", nodes}};
}

inline Certificate certificate_from_json(const Json& j) {
  try {
    if (j.at("version").get<int>() != kFormatVersion) throw ParseError("unsupported certificate version");
    Certificate c{divisor_from_json(j.at("divisor")), config_from_json(j.at("config")), j.at("root").get<std::string>(), {}};
    if (c.divisor.genus() != j.at("genus").get<int>()) throw ParseError("certificate genus does not match its divisor");
    for (const auto& [key, node] : j.at("nodes").items()) c.nodes.emplace(key, node_from_json(node));
    return c;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed certificate: ") + e.what());
  } catch (const std::domain_error& e) {
    throw ParseError(std::string("malformed certificate: ") + e.what());
  }
}

/// Canonical text for any document: two-space indent, sorted keys, trailing newline.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Ray files.

inline Json rays_json(const RaySet& r) { return {{"genus", r.genus}, {"basis", "B"}, {"rays", r.rays}}; }

inline RaySet rays_from_json(const Json& j) {
  try {
    if (j.at("basis").get<std::string>() != "B") throw ParseError("ray file: basis must be \"B\"");
    return RaySet{j.at("genus").get<int>(), j.at("rays").get<std::vector<IntRow>>()};
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed ray file: ") + e.what());
  }
}

inline std::string rays_csv(const RaySet& r) {
  std::ostringstream out;
  for (int i = 2; i <= r.genus / 2; ++i) out << (i > 2 ? "," : "") << "e_" << i;
  out << "\n";
  for (const auto& ray : r.rays) {
    for (std::size_t i = 0; i < ray.size(); ++i) out << (i ? "," : "") << ray[i];
    out << "\n";
  }
  return out.str();
}

inline Json facets_json(const FacetMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows.size(); ++i)
    rows.push_back({{"partition", m.partitions[i].parts}, {"row", m.rows[i]}});
  return {{"genus", m.genus}, {"basis", "B"}, {"facets", rows}};
}

// ---------------------------------------------------------------------------
// Files.

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json read_json_file(const std::filesystem::path& p) {
  try {
    return Json::parse(read_file(p));
  } catch (const Json::parse_error& e) {
    throw ParseError(p.string() + ": " + e.what());
  }
}

/// Whole-file replace via a temporary sibling and rename.
inline void write_file_atomic(const std::filesystem::path& p, const std::string& content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  auto tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace nefwiz
