#include "nefwiz/io.hpp"

#include "support.hpp"

#include <filesystem>

using namespace nefwiz;
using nefwiz::test::Q;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("nefwiz_io_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(ParseDivisor, Examples) {
  auto d = parse_divisor("6;25/3;5/6,5/3,5/3,0");
  EXPECT_EQ(d.genus(), 6);
  EXPECT_EQ(d.lambda(), Q("25/3"));
  EXPECT_EQ(d.b(1), Q("5/3"));
  auto l = parse_divisor("6;1;0,0,0,0");
  EXPECT_EQ(l.lambda(), 1);
  EXPECT_TRUE(l.bvector().is_zero());
  try {
    parse_divisor("6;1;0,0,0");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_STREQ(e.what(), "expected 4 coefficients, got 3");
  }
}

TEST(ParseDivisor, Malformed) {
  EXPECT_THROW(parse_divisor("6;1"), ParseError);
  EXPECT_THROW(parse_divisor("x;1;0,0,0,0"), ParseError);
  EXPECT_THROW(parse_divisor("6;1/0;0,0,0,0"), ParseError);
  EXPECT_THROW(parse_divisor("6;1;0,a,0,0"), ParseError);
  EXPECT_THROW(parse_divisor("6;1;0,,0,0"), ParseError);
  EXPECT_THROW(parse_divisor("1;1;0"), ParseError);
}

TEST(ParseDivisor, RoundTrip) {
  for (const char* s : {"6;25/3;5/6,5/3,5/3,0", "9;-1/2;1,2,3,4,5", "24;1;0,0,0,0,0,0,0,0,0,0,0,0,7/11"})
    EXPECT_EQ(serialize_divisor(parse_divisor(s)), s);
  EXPECT_EQ(serialize_divisor(parse_divisor("6;50/6;10/12,5/3,5/3,0")), "6;25/3;5/6,5/3,5/3,0");
}

TEST(ParseProfile, Examples) {
  EXPECT_EQ(parse_profile("2,1,1,1"), (std::vector<int>{2, 1, 1, 1}));
  EXPECT_THROW(parse_profile("2,0,1"), ParseError);
  EXPECT_THROW(parse_profile("2,,1"), ParseError);
}

TEST(ConfigJson, RoundTripAndStrictness) {
  EngineConfig c;
  c.c_policy = CPolicy::MinNecessaryCount;
  c.max_depth = 9;
  c.criteria_enabled = {Criterion::Level0};
  c.kind_search_order = {{AverageKind::A2, AverageKind::Z2}};
  c.admit_zero_c = false;
  auto j = config_json(c);
  EXPECT_EQ(config_json(config_from_json(j)), j);
  EXPECT_FALSE(j.contains("parallelism"));
  EXPECT_THROW(config_from_json(Json{{"max_depht", 3}}), ParseError);
  EXPECT_THROW(config_from_json(Json{{"max_depth", 0}}), std::invalid_argument);
  EXPECT_THROW(config_from_json(Json::array()), ParseError);
  EXPECT_EQ(config_from_json(Json::object()).kind_search_order.size(), default_kind_order().size());
}

TEST(CertificateJson, RoundTrip) {
  EngineConfig cfg;
  cfg.criteria_enabled.clear();
  for (int g : {6, 10, 13}) {
    for (const auto& r : extremal_rays(facet_matrix(g)).rays) {
      auto d = lift_to_mg(ray_to_evector(g, r));
      auto cert = certify_nef(d, cfg);
      auto j = certificate_json(cert);
      EXPECT_EQ(j.at("version"), kFormatVersion);
      EXPECT_EQ(j.at("axioms").size(), 3u);
      auto back = certificate_from_json(Json::parse(dump(j)));
      EXPECT_EQ(dump(certificate_json(back)), dump(j));
      EXPECT_EQ(validate_certificate(d, back), std::nullopt);
    }
  }
  auto crit = certify_nef(parse_divisor("6;25/3;5/6,5/3,5/3,0"));
  auto back = certificate_from_json(certificate_json(crit));
  EXPECT_EQ(back.root, criterion_node_key());
  EXPECT_EQ(validate_certificate(crit.divisor, back), std::nullopt);
}

TEST(CertificateJson, RejectsMalformed) {
  auto j = certificate_json(certify_nef(parse_divisor("6;25/3;5/6,5/3,5/3,0")));
  auto bad_type = j;
  bad_type["nodes"]["criterion"]["type"] = "oracle";
  EXPECT_THROW(certificate_from_json(bad_type), ParseError);
  auto bad_version = j;
  bad_version["version"] = 99;
  EXPECT_THROW(certificate_from_json(bad_version), ParseError);
  EXPECT_THROW(certificate_from_json(Json{{"version", 1}}), ParseError);
}

TEST(RaysIo, JsonAndCsv) {
  RaySet r{6, {{1, 3}, {2, 1}}};
  EXPECT_EQ(rays_from_json(rays_json(r)).rays, r.rays);
  EXPECT_EQ(rays_csv(r), "e_2,e_3\n1,3\n2,1\n");
  EXPECT_THROW(rays_from_json(Json{{"genus", 6}}), ParseError);
  auto f = facets_json(facet_matrix(6));
  EXPECT_EQ(f.at("facets").size(), 2u);
  EXPECT_EQ(f.at("facets")[0].at("row"), (IntRow{3, -1}));
}

TEST(Files, AtomicWriteAndDigest) {
  auto dir = scratch("files");
  auto p = dir / "nested" / "x.json";
  write_file_atomic(p, "{\"a\": 1}\n");
  EXPECT_EQ(read_file(p), "{\"a\": 1}\n");
  EXPECT_EQ(read_json_file(p).at("a"), 1);
  EXPECT_FALSE(std::filesystem::exists(dir / "nested" / "x.json.tmp"));
  write_file_atomic(p, "not json");
  EXPECT_THROW(read_json_file(p), ParseError);
  EXPECT_THROW(read_file(dir / "missing"), ParseError);
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  std::filesystem::remove_all(dir);
}
