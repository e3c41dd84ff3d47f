// nefwiz: command-line front end.
//
// Exit status: 0 success / certified, 1 inconclusive or invalid certificate,
// 2 invalid input, 64 usage error.

#include "nefwiz/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

namespace fs = std::filesystem;
using namespace nefwiz;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInconclusive = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitUsage = 64;

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) std::cout << text;
  else write_file_atomic(out, text);
}

EngineConfig load_config(const std::string& path) {
  if (path.empty()) return EngineConfig{};
  return config_from_json(read_json_file(path));
}

void require_genus(int g) {
  if (g < 4) throw ParseError("genus must be at least 4, got " + std::to_string(g));
}

std::optional<fs::path> cache_choice(const std::string& dir, bool no_cache) {
  if (no_cache) return std::nullopt;
  if (!dir.empty()) return fs::path(dir);
  return default_cache_dir();
}

int run_check(const std::string& spec, const std::string& config_path, const std::string& out) {
  SymDivisorMg d = parse_divisor(spec);
  EngineConfig cfg = load_config(config_path);
  Certificate cert;
  try {
    cert = certify_nef(d, cfg);
  } catch (const NotAnFDivisor& e) {
    std::cerr << "not an F-divisor:\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v.describe() << "\n";
    return kExitInvalid;
  }
  emit(dump(certificate_json(cert)), out);
  if (cert.certified()) {
    std::cerr << "certified";
    if (cert.root == criterion_node_key())
      std::cerr << " by " << criterion_name(std::get<CriterionLeaf>(cert.nodes.at(cert.root)).verdict.name);
    std::cerr << " (" << cert.nodes.size() << " nodes)\n";
    return kExitOk;
  }
  auto f = deepest_failure(cert);
  std::cerr << "inconclusive" << (f ? " at " + f->profile.key() + ": " + f->reason : std::string()) << "\n";
  return kExitInconclusive;
}

int run_verify(int g, int jobs, const std::string& config_path, const std::string& out_dir,
               const std::optional<fs::path>& cache, const std::vector<std::string>& argv) {
  require_genus(g);
  EngineConfig cfg = load_config(config_path);
  const auto t0 = std::chrono::steady_clock::now();
  RaySet rays = load_or_enumerate_rays(g, cache);
  const auto t1 = std::chrono::steady_clock::now();
  GenusReport report = verify_genus(rays, cfg, jobs);
  const auto t2 = std::chrono::steady_clock::now();

  const fs::path dir = out_dir.empty() ? fs::path("nefwiz-g" + std::to_string(g)) : fs::path(out_dir);
  const std::string stem = "report_g" + std::to_string(g);
  for (std::size_t i = 0; i < report.outcomes.size(); ++i)
    if (const auto& c = report.outcomes[i].certificate)
      write_file_atomic(dir / "certificates" / ray_certificate_name(i), dump(certificate_json(*c)));
  write_file_atomic(dir / (stem + ".json"), dump(report_json(report)));
  write_file_atomic(dir / (stem + ".csv"), report_csv(report));

  auto secs = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };
  Json meta = {{"tool", kToolVersion},
               {"command", argv},
               {"jobs", jobs},
               {"input_digest", report.input_digest},
               {"report_digest", sha256_hex(dump(report_json(report)))},
               {"timing_seconds", {{"rays", secs(t0, t1)}, {"certify", secs(t1, t2)}}}};
  write_file_atomic(dir / (stem + ".meta.json"), dump(meta));

  std::cout << report.summary() << "\n";
  for (std::size_t i = 0; i < report.outcomes.size(); ++i) {
    const auto& o = report.outcomes[i];
    if (o.status != RayOutcome::Status::Certified)
      std::cout << "  ray " << i << " " << status_name(o.status) << ": " << o.message << "\n";
  }
  return report.all_certified() ? kExitOk : kExitInconclusive;
}

int run_expand(int g, const std::string& profile_text, const std::string& spec, const std::string& kinds_text,
               const std::string& c_text) {
  SymDivisorMg d = parse_divisor(spec);
  if (d.genus() != g)
    throw ParseError("divisor genus " + std::to_string(d.genus()) + " does not match --genus " + std::to_string(g));
  Profile p(parse_profile(profile_text));
  if (p.genus() != g) throw ParseError("profile weights sum to " + std::to_string(p.genus()) + ", not " + std::to_string(g));
  if (p.size() < 4) throw ParseError("profile needs at least 4 points");
  KindPair kinds = parse_kind_pair(kinds_text);
  Rational c = detail::token_rational(c_text, "c");
  if (!admissible(kinds, p)) throw ParseError("kinds " + kinds.name() + " not admissible on profile " + p.key());
  if (c < 0) throw ParseError("c must be nonnegative");

  CAveraged avg = c_average(restrict(d.bvector(), p), c, kinds);
  auto nec = necessary_classes(avg, c);
  Json table = Json::array(), necessary = Json::array();
  for (const auto& [cls, v] : avg.divisor.boundary) table.push_back({{"class", cls.side}, {"value", rational_json(v)}});
  for (const auto& cls : nec.classes) necessary.push_back(cls.side);
  Json out = {{"genus", g},
              {"profile", p.weights()},
              {"kinds", kinds.name()},
              {"c", rational_json(c)},
              {"coefficients", table},
              {"effective", nec.effective},
              {"necessary", nec.effective ? necessary : Json(nullptr)}};
  std::cout << dump(out);
  return kExitOk;
}

int run_validate(const std::string& spec, const std::string& cert_path) {
  SymDivisorMg d = parse_divisor(spec);
  Certificate cert = certificate_from_json(read_json_file(cert_path));
  if (auto defect = validate_certificate(d, cert)) {
    std::cout << "invalid: " << *defect << "\n";
    return kExitInconclusive;
  }
  std::cout << "valid\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certificate-producing nef verifier for symmetric divisors on the moduli space of curves"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string divisor, config_path, out, cache_dir, profile, kinds, c_text, cert_path;
  int genus = 0, jobs = 1;
  bool no_cache = false, csv = false;

  auto* check = app.add_subcommand("check", "Certify one divisor and write its certificate");
  check->add_option("--divisor", divisor, "Divisor spec g;a;b_0,...,b_{g/2}")->required();
  check->add_option("--config", config_path, "Engine config JSON");
  check->add_option("--out", out, "Certificate file (default: stdout)");

  auto* facets = app.add_subcommand("facets", "Print the F-cone facet rows in the B basis");
  facets->add_option("--genus", genus)->required();
  facets->add_option("--out", out, "Output file (default: stdout)");

  auto* rays = app.add_subcommand("rays", "Enumerate extremal rays of the F-cone");
  rays->add_option("--genus", genus)->required();
  rays->add_option("--cache", cache_dir, std::string("Cache directory (default: $") + kCacheEnv + " or .nefwiz-cache)");
  rays->add_flag("--no-cache", no_cache, "Recompute and do not touch the cache");
  rays->add_option("--out", out, "Ray file (default: stdout)");
  rays->add_flag("--csv", csv, "Emit the CSV mirror instead of JSON");

  auto* verify = app.add_subcommand("verify", "Certify every extremal ray of a genus");
  verify->add_option("--genus", genus)->required();
  verify->add_option("--jobs", jobs, "Parallel ray certifications")->check(CLI::Range(1, 1024));
  verify->add_option("--config", config_path, "Engine config JSON");
  verify->add_option("--out", out, "Output directory (default: nefwiz-g<genus>)");
  verify->add_option("--cache", cache_dir, "Ray cache directory");
  verify->add_flag("--no-cache", no_cache, "Recompute rays and do not touch the cache");

  auto* expand = app.add_subcommand("expand", "Dump a c-average coefficient table");
  expand->add_option("--genus", genus)->required();
  expand->add_option("--profile", profile, "Point weights w1,w2,...")->required();
  expand->add_option("--divisor", divisor)->required();
  expand->add_option("--kinds", kinds, "Average kinds, e.g. A2/Z2 or BIG/BIG")->required();
  expand->add_option("--c", c_text, "Constant c as p/q")->required();

  auto* validate = app.add_subcommand("validate", "Re-check a certificate against a divisor");
  validate->add_option("--divisor", divisor)->required();
  validate->add_option("--certificate", cert_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*check) return run_check(divisor, config_path, out);
    if (*facets) {
      require_genus(genus);
      emit(dump(facets_json(facet_matrix(genus))), out);
      return kExitOk;
    }
    if (*rays) {
      require_genus(genus);
      RaySet r = load_or_enumerate_rays(genus, cache_choice(cache_dir, no_cache));
      emit(csv ? rays_csv(r) : dump(rays_json(r)), out);
      return kExitOk;
    }
    if (*verify) {
      std::vector<std::string> args(argv, argv + argc);
      args.front() = "nefwiz";
      return run_verify(genus, jobs, config_path, out, cache_choice(cache_dir, no_cache), args);
    }
    if (*expand) return run_expand(genus, profile, divisor, kinds, c_text);
    if (*validate) return run_validate(divisor, cert_path);
  } catch (const std::invalid_argument& e) {  // ParseError, NotAnFDivisor, bad kinds
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitUsage;
}
