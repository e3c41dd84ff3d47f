#pragma once

// Whole-genus verification: enumerate (or load) the F-cone rays, lift each to
// the genus-g space, certify and re-validate it. Rays run in parallel; the
// report is assembled in ray order so it does not depend on the job count.

#include "nefwiz/cone.hpp"
#include "nefwiz/engine.hpp"
#include "nefwiz/io.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace nefwiz {

inline constexpr const char* kCacheEnv = "NEFWIZ_CACHE_DIR";

/// $NEFWIZ_CACHE_DIR if set, else ".nefwiz-cache" in the working directory.
inline std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv(kCacheEnv); env && *env) return env;
  return ".nefwiz-cache";
}

inline std::filesystem::path ray_cache_path(const std::filesystem::path& dir, int g) {
  return dir / ("rays_g" + std::to_string(g) + ".json");
}

/// Rays for genus g; with a cache dir, reads rays_g{g}.json when present and
/// writes it (plus the CSV mirror) otherwise.
inline RaySet load_or_enumerate_rays(int g, const std::optional<std::filesystem::path>& cache_dir) {
  if (cache_dir) {
    auto path = ray_cache_path(*cache_dir, g);
    if (std::filesystem::exists(path)) {
      RaySet cached = rays_from_json(read_json_file(path));
      if (cached.genus != g) throw ParseError(path.string() + ": cached genus does not match");
      return cached;
    }
  }
  RaySet rays = extremal_rays(facet_matrix(g));
  if (cache_dir) {
    write_file_atomic(ray_cache_path(*cache_dir, g), dump(rays_json(rays)));
    write_file_atomic(*cache_dir / ("rays_g" + std::to_string(g) + ".csv"), rays_csv(rays));
  }
  return rays;
}

struct RayOutcome {
  enum class Status { Certified, Inconclusive, Error };

  IntRow ray;
  Status status = Status::Error;
  std::optional<SymDivisorMg> divisor;
  std::optional<Certificate> certificate;
  std::optional<std::string> closer_criterion;
  int depth = 0;
  std::size_t node_count = 0;
  std::string message;  // validation defect, failure reason or error text
};

inline std::string_view status_name(RayOutcome::Status s) {
  switch (s) {
    case RayOutcome::Status::Certified: return "certified";
    case RayOutcome::Status::Inconclusive: return "inconclusive";
    case RayOutcome::Status::Error: return "error";
  }
  return "?";
}

struct GenusReport {
  int genus = 0;
  EngineConfig config;
  std::string input_digest;
  std::vector<RayOutcome> outcomes;

  std::size_t count(RayOutcome::Status s) const {
    return static_cast<std::size_t>(
        std::count_if(outcomes.begin(), outcomes.end(), [s](const RayOutcome& o) { return o.status == s; }));
  }
  bool all_certified() const { return count(RayOutcome::Status::Certified) == outcomes.size(); }

  std::string summary() const {
    auto n = outcomes.size();
    std::string s = std::to_string(n) + (n == 1 ? " ray, " : " rays, ") +
                    std::to_string(count(RayOutcome::Status::Certified)) + " certified, " +
                    std::to_string(count(RayOutcome::Status::Inconclusive)) + " inconclusive";
    if (auto e = count(RayOutcome::Status::Error)) s += ", " + std::to_string(e) + " errors";
    return s;
  }
};

inline RayOutcome certify_ray(int g, const IntRow& ray, const EngineConfig& config) {
  RayOutcome out;
  out.ray = ray;
  try {
    SymDivisorMg d = lift_to_mg(ray_to_evector(g, ray));
    out.divisor = d;
    Certificate cert = certify_nef(d, config);
    out.node_count = cert.nodes.size();
    if (cert.root == criterion_node_key())
      out.closer_criterion = std::string(criterion_name(std::get<CriterionLeaf>(cert.nodes.at(cert.root)).verdict.name));
    else
      out.depth = certificate_depth(cert);
    if (cert.certified()) {
      if (auto defect = validate_certificate(d, cert)) {
        out.status = RayOutcome::Status::Error;
        out.message = "certificate failed validation: " + *defect;
      } else {
        out.status = RayOutcome::Status::Certified;
      }
    } else {
      out.status = RayOutcome::Status::Inconclusive;
      if (auto f = deepest_failure(cert)) out.message = f->profile.key() + ": " + f->reason;
    }
    out.certificate = std::move(cert);
  } catch (const std::exception& e) {
    out.status = RayOutcome::Status::Error;
    out.message = e.what();
  }
  return out;
}

/// Certifies every ray with up to `jobs` worker threads.
inline GenusReport verify_genus(const RaySet& rays, const EngineConfig& config, int jobs = 1) {
  if (rays.genus < 4) throw std::domain_error("verify_genus: genus must be at least 4");
  config.validate();
  GenusReport report{rays.genus, config, sha256_hex(dump(rays_json(rays)) + dump(config_json(config))), {}};
  report.outcomes.resize(rays.rays.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rays.rays.size(); i = next++)
      report.outcomes[i] = certify_ray(rays.genus, rays.rays[i], config);
  };
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), rays.rays.size());
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return report;
}

inline std::string ray_certificate_name(std::size_t index) {
  std::string s = std::to_string(index);
  return "ray_" + std::string(s.size() < 5 ? 5 - s.size() : 0, '0') + s + ".json";
}

inline Json report_json(const GenusReport& r) {
  Json rays = Json::array();
  Json inconclusive = Json::array();
  for (std::size_t i = 0; i < r.outcomes.size(); ++i) {
    const auto& o = r.outcomes[i];
    Json closer = o.closer_criterion ? Json{{"criterion", *o.closer_criterion}} : Json{{"depth", o.depth}};
    Json j = {{"index", i},
              {"ray", o.ray},
              {"outcome", std::string(status_name(o.status))},
              {"closer", closer},
              {"node_count", o.node_count},
              {"divisor", o.divisor ? Json(serialize_divisor(*o.divisor)) : Json(nullptr)},
              {"certificate", o.certificate ? Json(ray_certificate_name(i)) : Json(nullptr)}};
    if (!o.message.empty()) j["message"] = o.message;
    if (o.status != RayOutcome::Status::Certified) inconclusive.push_back(o.ray);
    rays.push_back(std::move(j));
  }
  return {{"version", kFormatVersion},
          {"tool", kToolVersion},
          {"genus", r.genus},
          {"config", config_json(r.config)},
          {"input_digest", r.input_digest},
          {"rays", rays},
          {"summary",
           {{"rays", r.outcomes.size()},
            {"certified", r.count(RayOutcome::Status::Certified)},
            {"inconclusive", r.count(RayOutcome::Status::Inconclusive)},
            {"errors", r.count(RayOutcome::Status::Error)}}},
          {"verdict", r.all_certified() ? Json("all rays certified") : Json{{"not_certified", inconclusive}}}};
}

inline std::string report_csv(const GenusReport& r) {
  std::string out = "index,ray,outcome,closer,node_count\n";
  for (std::size_t i = 0; i < r.outcomes.size(); ++i) {
    const auto& o = r.outcomes[i];
    std::string ray;
    for (std::size_t k = 0; k < o.ray.size(); ++k) ray += (k ? " " : "") + std::to_string(o.ray[k]);
    std::string closer = o.closer_criterion ? *o.closer_criterion : "depth " + std::to_string(o.depth);
    out += std::to_string(i) + "," + ray + "," + std::string(status_name(o.status)) + "," + closer + "," +
           std::to_string(o.node_count) + "\n";
  }
  return out;
}

}  // namespace nefwiz
