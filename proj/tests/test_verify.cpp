#include <gtest/gtest.h>

#include <thread>

#include "affine/verify.hpp"

using namespace affine;
using namespace affine::verify;

namespace {

GenConfig small(Variety v, std::size_t n = 8) {
  GenConfig cfg;
  cfg.variety = v;
  cfg.instance_count = n;
  cfg.seed = 99;
  return cfg;
}

json without_timing(json j) {
  j.erase("wall_ms");
  return j;
}

}  // namespace

TEST(Generators, DeterministicPerSeed) {
  for (auto v : {Variety::set, Variety::supsl, Variety::frame, Variety::cbalg, Variety::uquant}) {
    GenConfig cfg;
    cfg.variety = v;
    Rng a(5), b(5);
    for (int i = 0; i < 10; ++i) {
      const auto s1 = gen_system(cfg, a), s2 = gen_system(cfg, b);
      EXPECT_EQ(s1.kappa, s2.kappa);
      EXPECT_EQ(s1.A->names(), s2.A->names());
    }
  }
  EXPECT_NE(instance_seed(1, 0), instance_seed(1, 1));
  EXPECT_NE(instance_seed(1, 0), instance_seed(2, 0));
}

TEST(Generators, RespectCapsAndStrata) {
  Rng rng(77);
  for (auto v : {Variety::set, Variety::supsl, Variety::frame, Variety::cbalg}) {
    GenConfig cfg;
    cfg.variety = v;
    for (int i = 0; i < 30; ++i) {
      const auto s = gen_system(cfg, rng);
      EXPECT_LE(s.size(), cfg.max_points);
      EXPECT_LE(s.A->size(), cfg.max_algebra);
      EXPECT_TRUE(is_t0(gen_system(cfg, rng, Stratum::t0)));
      EXPECT_TRUE(is_sober(gen_system(cfg, rng, Stratum::sober)).sober());
    }
  }
}

TEST(Generators, SupslFamiliesAreNotAllDistributive) {
  // Union-closed families reach non-distributive lattices, which a chain or
  // downset construction never would.
  GenConfig cfg;
  cfg.variety = Variety::supsl;
  Rng rng(3);
  bool non_distributive = false;
  for (int i = 0; i < 300 && !non_distributive; ++i) {
    const auto A = gen_algebra(cfg, rng);
    for (Elem a = 0; a < A->size() && !non_distributive; ++a)
      for (Elem b = 0; b < A->size() && !non_distributive; ++b)
        for (Elem c = 0; c < A->size() && !non_distributive; ++c)
          non_distributive = A->meet(a, A->join(b, c)) != A->join(A->meet(a, b), A->meet(a, c));
  }
  EXPECT_TRUE(non_distributive);
}

TEST(Suites, AllPassOnSmallPools) {
  for (const auto& id : suite_ids()) {
    std::vector<Variety> vs = {Variety::set, Variety::supsl, Variety::frame, Variety::cbalg};
    if (id == "example4") vs = {Variety::uquant};
    for (auto v : vs) {
      const auto rep = run_suite(id, small(v, 4));
      EXPECT_FALSE(rep.refuted()) << id << " " << to_string(v) << ": "
                                  << (rep.failures.empty() ? "" : rep.failures.front().detail);
      EXPECT_TRUE(rep.negative_control_flagged) << id;
    }
  }
}

TEST(Suites, ReportsAreReproducible) {
  const auto a = run_suite("thm2", small(Variety::frame));
  const auto b = run_suite("thm2", small(Variety::frame));
  EXPECT_EQ(without_timing(report_to_json(a)), without_timing(report_to_json(b)));
}

TEST(Suites, ReplayMatchesRun) {
  const GenConfig cfg = small(Variety::supsl, 3);
  for (std::size_t i = 0; i < cfg.instance_count; ++i)
    EXPECT_TRUE(replay("prop2", cfg, instance_seed(cfg.seed, i)).pass);
}

TEST(Suites, QuantaleSuitesNeedingFiniteSAreUnsupported) {
  try {
    run_suite("prop2", small(Variety::uquant, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unsupported_variety);
  }
}

TEST(Suites, Cor2RefutedForLukasiewicz) {
  const auto rep = run_suite("cor2", small(Variety::uquant, 1));
  ASSERT_TRUE(rep.refuted());
  EXPECT_EQ(rep.failures.front().witness, (json{{"A1", {0, 1}}, {"A2", {0}}}));
}

TEST(Suites, BudgetStopsAnInstance) {
  GenConfig cfg = small(Variety::frame, 2);
  cfg.instance_budget = std::chrono::milliseconds(0);
  std::this_thread::sleep_for(std::chrono::milliseconds(1));
  const auto rep = run_suite("thm5", cfg);
  EXPECT_FALSE(rep.refuted());
  EXPECT_TRUE(rep.budget_exceeded());
}

TEST(Shrink, DropsIrrelevantPoints) {
  // A check that fails whenever the system has two or more points.
  Suite s;
  s.check = [](const GenConfig&, const Instance& in, json&) {
    return in.system->size() >= 2 ? Outcome::fail("too many points") : Outcome::ok();
  };
  Instance in;
  in.system = sierpinski_system(chain(Variety::frame, {"0", "h", "1"}));
  ASSERT_EQ(in.system->size(), 3u);
  const auto out = verify::detail::shrink(s, GenConfig{}, in);
  EXPECT_EQ(out.system->size(), 2u);
}

TEST(Adjunction, SierpinskiPair) {
  const auto L = chain(Variety::frame, {"0", "h", "1"});
  const auto rep = adjunction_check(sierpinski_space(L), sierpinski_system(L));
  EXPECT_TRUE(rep.ok()) << rep.detail;
  EXPECT_EQ(rep.system_side, rep.space_side);
  EXPECT_GT(rep.naturality_checks, 0u);
}

TEST(Retracts, OfSierpinskiSquare) {
  const auto L = chain(Variety::frame, {"0", "1"});
  const auto P = power_of_S(L, free_on_one(Variety::frame), 2);
  const auto rs = retracts_of_power(*P, kDefaultCandidateCap);
  ASSERT_FALSE(rs.empty());
  for (const auto& r : rs) {
    EXPECT_TRUE(validate_morphism(P->system(), r.R, r.r));
    EXPECT_TRUE(validate_morphism(r.R, P->system(), r.s));
    EXPECT_EQ(compose(r.r, r.s), identity_morphism(r.R));
  }
}
