#include "nefwiz/engine.hpp"
#include "nefwiz/io.hpp"

#include "oracles.hpp"
#include "support.hpp"

using namespace nefwiz;
using nefwiz::test::Q;

namespace {

SymDivisorMg lift(int g, IntRow ray) { return lift_to_mg(ray_to_evector(g, ray)); }

EngineConfig no_criteria() {
  EngineConfig c;
  c.criteria_enabled.clear();
  return c;
}

EngineConfig only(Criterion c) {
  EngineConfig cfg;
  cfg.criteria_enabled = {c};
  return cfg;
}

Criterion root_criterion(const Certificate& cert) {
  return std::get<CriterionLeaf>(cert.nodes.at(cert.root)).verdict.name;
}

// A certificate with several inner nodes, built without criteria.
Certificate deep_certificate() {
  auto rays = extremal_rays(facet_matrix(12));
  Certificate best;
  std::size_t most = 0;
  for (const auto& r : rays.rays) {
    auto cert = certify_nef(lift(12, r), no_criteria());
    std::size_t inner = 0;
    for (const auto& [k, n] : cert.nodes) inner += std::holds_alternative<InnerNode>(n);
    if (cert.certified() && inner > most) {
      most = inner;
      best = cert;
    }
  }
  return best;
}

}  // namespace

TEST(NecessaryClasses, Examples) {
  auto closes = c_average(restrict(BVector(5, {1, 1}), Profile({2, 1, 1, 1})), 1,
                          {AverageKind::A3, AverageKind::Z2});
  auto r1 = necessary_classes(closes, 1);
  EXPECT_TRUE(r1.effective);
  EXPECT_TRUE(r1.classes.empty());

  auto flag7 = c_average(restrict(BVector(7, {3, 4, 6}), Profile::ones(7)), 1, {AverageKind::Big, AverageKind::Big});
  auto r2 = necessary_classes(flag7, 1);
  EXPECT_TRUE(r2.effective);
  EXPECT_EQ(r2.classes, (std::vector<BoundaryClass>{BoundaryClass{{1, 1}}}));

  auto neg = flag7;
  neg.divisor.boundary.begin()->second = Q("-1/5");
  EXPECT_FALSE(necessary_classes(neg, 1).effective);
}

TEST(CertifyNef, CriterionRoots) {
  auto b1 = certify_nef(SymDivisorMg(6, Q("25/3"), {Q("5/6"), Q("5/3"), Q("5/3"), 0}));
  EXPECT_EQ(b1.root, criterion_node_key());
  EXPECT_EQ(root_criterion(b1), Criterion::B1);

  // the (2,1) lift; B1 is tried before INDUCT in the default order
  auto d21 = lift(6, {2, 1});
  EXPECT_EQ(root_criterion(certify_nef(d21)), Criterion::B1);
  EXPECT_EQ(root_criterion(certify_nef(d21, only(Criterion::Induct))), Criterion::Induct);
  EXPECT_EQ(root_criterion(certify_nef(d21, only(Criterion::Level0))), Criterion::Level0);
}

TEST(CertifyNef, RejectsNonFDivisor) {
  try {
    certify_nef(SymDivisorMg(6, 11, {1, 0, 0, 0}));
    FAIL() << "expected NotAnFDivisor";
  } catch (const NotAnFDivisor& e) {
    ASSERT_FALSE(e.violations().empty());
    EXPECT_EQ(e.violations().front().family, 1);
    EXPECT_EQ(e.violations().front().value, -1);
  }
}

TEST(CertifyNef, SmallGenusWithoutCriteriaIsBaseLeaf) {
  auto cert = certify_nef(SymDivisorMg(6, Q("25/3"), {Q("5/6"), Q("5/3"), Q("5/3"), 0}), no_criteria());
  EXPECT_EQ(cert.root, Profile::ones(6).key());
  EXPECT_TRUE(std::holds_alternative<BaseLeaf>(cert.nodes.at(cert.root)));
  EXPECT_FALSE(validate_certificate(cert.divisor, cert));
}

TEST(CertifyNef, ZeroFlagPullbackIsTrivial) {
  auto cert = certify_nef(SymDivisorMg(9, 1, {0, 0, 0, 0, 0}));
  EXPECT_TRUE(std::holds_alternative<TrivialLeaf>(cert.nodes.at(cert.root)));
  EXPECT_FALSE(validate_certificate(cert.divisor, cert));
}

TEST(NodeCertifier, BaseAndTrivialProfiles) {
  std::mt19937_64 rng(43);
  auto rays7 = extremal_rays(facet_matrix(7));
  auto d7 = oracle::random_f_divisor(rng, 7, rays7);
  NodeCertifier c7(d7.bvector(), {});
  EXPECT_TRUE(c7.certify(Profile::ones(7)));
  EXPECT_TRUE(std::holds_alternative<BaseLeaf>(c7.node(Profile::ones(7))));

  auto d6 = lift(6, {1, 3});
  NodeCertifier c6(d6.bvector(), {});
  Profile p({2, 2, 1, 1});
  for (const auto& cls : boundary_classes(p)) {
    auto [x, y] = child_profiles(p, cls);
    for (const auto& child : {x, y}) {
      EXPECT_TRUE(c6.certify(child));
      EXPECT_TRUE(std::holds_alternative<TrivialLeaf>(c6.node(child)));
    }
  }
  EXPECT_THROW(c6.certify(Profile::ones(7)), std::domain_error);
}

TEST(CertifyNef, CertifiesAllRaysUpToTwelveWithoutCriteria) {
  for (int g = 4; g <= 12; ++g)
    for (const auto& r : extremal_rays(facet_matrix(g)).rays) {
      auto d = lift(g, r);
      auto cert = certify_nef(d, no_criteria());
      EXPECT_TRUE(cert.certified()) << g;
      EXPECT_EQ(validate_certificate(d, cert), std::nullopt) << g;
    }
}

TEST(CertifyNef, MinNecessaryCountPolicyAlsoCertifies) {
  EngineConfig cfg = no_criteria();
  cfg.c_policy = CPolicy::MinNecessaryCount;
  for (const auto& r : extremal_rays(facet_matrix(12)).rays) {
    auto d = lift(12, r);
    auto cert = certify_nef(d, cfg);
    EXPECT_TRUE(cert.certified());
    EXPECT_EQ(validate_certificate(d, cert), std::nullopt);
  }
}

TEST(CertifyNef, Deterministic) {
  for (const auto& r : extremal_rays(facet_matrix(13)).rays) {
    auto d = lift(13, r);
    EXPECT_EQ(dump(certificate_json(certify_nef(d, no_criteria()))),
              dump(certificate_json(certify_nef(d, no_criteria()))));
  }
}

TEST(CertifyNef, InnerNodesAreSound) {
  // every inner node's c-average agrees with the restriction on F-curves
  auto cert = deep_certificate();
  ASSERT_FALSE(cert.nodes.empty());
  const auto b = cert.divisor.bvector();
  for (const auto& [key, node] : cert.nodes) {
    const auto* inner = std::get_if<InnerNode>(&node);
    if (!inner || inner->profile.size() > 8) continue;
    auto ref = oracle::labelled_c_average(restrict(b, inner->profile), inner->c, inner->kinds);
    WeightedDivisor tab{inner->profile, {}, inner->c, {}};
    for (const auto& [cls, v] : inner->coefficients) tab.boundary.emplace(cls, v);
    EXPECT_TRUE(oracle::same_boundary(oracle::labelled(tab), ref)) << key;
  }
}

TEST(ValidateCertificate, RejectsTampering) {
  auto cert = deep_certificate();
  const auto& d = cert.divisor;
  ASSERT_EQ(validate_certificate(d, cert), std::nullopt);
  std::string key;
  for (const auto& [k, n] : cert.nodes)
    if (const auto* inner = std::get_if<InnerNode>(&n); inner && !inner->restrictions.empty()) {
      key = k;
      break;
    }
  ASSERT_FALSE(key.empty());

  auto perturbed = cert;
  std::get<InnerNode>(perturbed.nodes.at(key)).c += 1;
  auto e1 = validate_certificate(d, perturbed);
  ASSERT_TRUE(e1);
  EXPECT_NE(e1->find(key), std::string::npos) << *e1;

  auto dropped = cert;
  std::get<InnerNode>(dropped.nodes.at(key)).restrictions.pop_back();
  auto e2 = validate_certificate(d, dropped);
  ASSERT_TRUE(e2);
  EXPECT_NE(e2->find("missing necessary class"), std::string::npos) << *e2;

  auto altered = cert;
  std::get<InnerNode>(altered.nodes.at(key)).coefficients.front().second += Q("1/7");
  auto e3 = validate_certificate(d, altered);
  ASSERT_TRUE(e3);
  EXPECT_NE(e3->find("coefficient mismatch"), std::string::npos) << *e3;

  auto orphan = cert;
  const auto& r = std::get<InnerNode>(cert.nodes.at(key)).restrictions.front();
  orphan.nodes.erase(r.first.key());
  EXPECT_TRUE(validate_certificate(d, orphan));

  EXPECT_TRUE(validate_certificate(lift(12, extremal_rays(facet_matrix(12)).rays.front()), cert));
}

TEST(ValidateCertificate, RejectsForgedLeaves) {
  auto d = lift(9, extremal_rays(facet_matrix(9)).rays.front());
  Certificate forged{d, {}, Profile::ones(9).key(), {}};
  forged.nodes.emplace(forged.root, BaseLeaf{Profile::ones(9)});
  EXPECT_TRUE(validate_certificate(d, forged));

  Certificate trivial{d, {}, Profile::ones(9).key(), {}};
  trivial.nodes.emplace(trivial.root, TrivialLeaf{Profile::ones(9), "forged"});
  EXPECT_TRUE(validate_certificate(d, trivial));

  Certificate wrong_crit{d, {}, criterion_node_key(), {}};
  wrong_crit.nodes.emplace(wrong_crit.root, CriterionLeaf{CriterionVerdict{Criterion::B0, true, {}, {}, {}}});
  if (!criterion_b0(d).applies) EXPECT_TRUE(validate_certificate(d, wrong_crit));
}

TEST(ValidateCertificate, ZeroConstantNeedsConfig) {
  // look for an inner node at c = 0 among rays that need one
  for (int g = 12; g <= 16; ++g)
    for (const auto& r : extremal_rays(facet_matrix(g)).rays) {
      auto d = lift(g, r);
      auto cert = certify_nef(d, no_criteria());
      for (const auto& [k, n] : cert.nodes)
        if (const auto* inner = std::get_if<InnerNode>(&n); inner && inner->c == 0) {
          EXPECT_EQ(validate_certificate(d, cert), std::nullopt);
          cert.config.admit_zero_c = false;
          auto e = validate_certificate(d, cert);
          ASSERT_TRUE(e);
          EXPECT_NE(e->find("c = 0"), std::string::npos);
          return;
        }
    }
  FAIL() << "no certificate used c = 0";
}

TEST(CertifyNef, ReportsDeepestFailure) {
  // a genus-18 ray whose [3,3,2,2,2,2,2,2] restriction has no effective average
  auto d = lift(18, {32, 45, 56, 65, 72, 77, 80, 81});
  ASSERT_TRUE(check_f_divisor_mg(d).empty());
  auto cert = certify_nef(d);
  EXPECT_FALSE(cert.certified());
  auto f = deepest_failure(cert);
  ASSERT_TRUE(f);
  EXPECT_EQ(f->profile, Profile({3, 3, 2, 2, 2, 2, 2, 2}));
  EXPECT_EQ(f->reason, "no effective c-average");
  auto e = validate_certificate(d, cert);
  ASSERT_TRUE(e);
  EXPECT_NE(e->find("inconclusive"), std::string::npos);
}

TEST(CertifyNef, DepthLimit) {
  EngineConfig cfg = no_criteria();
  cfg.max_depth = 1;
  bool limited = false;
  for (const auto& r : extremal_rays(facet_matrix(16)).rays) {
    auto d = lift(16, r);
    auto full = certify_nef(d, no_criteria());
    if (!full.certified()) continue;
    auto cert = certify_nef(d, cfg);
    if (!cert.certified()) {
      limited = true;
      EXPECT_GT(certificate_depth(full), 1);
    } else {
      EXPECT_LE(certificate_depth(cert), 2);
    }
  }
  EXPECT_TRUE(limited);
}

TEST(EngineConfig, Validation) {
  EngineConfig c;
  c.kind_search_order.clear();
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EngineConfig d;
  d.max_depth = 0;
  EXPECT_THROW(d.validate(), std::invalid_argument);
  EXPECT_EQ(default_kind_order().size(), 16u);
  EXPECT_THROW(parse_policy("Greedy"), std::invalid_argument);
}
