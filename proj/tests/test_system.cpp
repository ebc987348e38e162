#include <gtest/gtest.h>

#include <random>
#include <set>

#include "affine/system.hpp"
#include "affine/verify.hpp"

using namespace affine;

namespace {

// The morphism square checked directly: kappa1(phi(b))(x) == kappa2(b)(f(x)).
bool square_commutes(const AffineSystem& s1, const AffineSystem& s2, const std::vector<std::size_t>& f,
                     const Fn& phi) {
  for (Elem b = 0; b < s2.A->size(); ++b)
    for (std::size_t x = 0; x < s1.size(); ++x)
      if (s1.kappa[phi[b]][x] != s2.kappa[b][f[x]]) return false;
  return true;
}

// Every (f, phi) by brute force over all maps and all homomorphisms.
std::set<std::pair<std::vector<std::size_t>, Fn>> oracle_morphisms(const AffineSystem& s1,
                                                                   const AffineSystem& s2) {
  std::set<std::pair<std::vector<std::size_t>, Fn>> out;
  const auto homs = enumerate_homs_naive(s2.A, s1.A);
  if (s1.size() > 0 && s2.size() == 0) return out;
  std::vector<std::size_t> f(s1.size(), 0);
  while (true) {
    for (const auto& h : homs)
      if (square_commutes(s1, s2, f, h.map)) out.insert({f, h.map});
    std::size_t k = 0;
    while (k < f.size() && ++f[k] == s2.size()) f[k++] = 0;
    if (k == f.size()) break;
  }
  return out;
}

std::set<std::pair<std::vector<std::size_t>, Fn>> as_set(const std::vector<SystemMorphism>& ms) {
  std::set<std::pair<std::vector<std::size_t>, Fn>> out;
  for (const auto& m : ms) out.insert({m.f, m.phi.map});
  return out;
}

AlgebraPtr two() { return chain(Variety::frame, {"0", "1"}); }

}  // namespace

TEST(Sierpinski, FrameOverTwo) {
  const auto S = sierpinski_system(two());
  ASSERT_EQ(S.A->names(), (std::vector<std::string>{"bot", "c", "top"}));
  ASSERT_EQ(S.points, (std::vector<std::string>{"0", "1"}));
  EXPECT_EQ(S.kappa[0], (Fn{0, 0}));  // empty set
  EXPECT_EQ(S.kappa[1], (Fn{0, 1}));  // {1}
  EXPECT_EQ(S.kappa[2], (Fn{1, 1}));
  EXPECT_TRUE(is_t0(S));
  EXPECT_TRUE(is_sober(S).sober());
}

TEST(Sierpinski, EveryFiniteVarietyIsSober) {
  for (auto v : {Variety::set, Variety::supsl, Variety::frame, Variety::cbalg}) {
    const auto S = sierpinski_system(verify::default_L(v));
    EXPECT_TRUE(is_sober(S).sober()) << to_string(v);
  }
  const auto S3 = sierpinski_system(chain(Variety::frame, {"0", "h", "1"}));
  EXPECT_EQ(S3.size(), 3u);
  EXPECT_TRUE(is_sober(S3).sober());
}

TEST(Sierpinski, QuantaleEvaluator) {
  const QuantaleSierpinski qs{lukasiewicz_chain(3)};
  EXPECT_EQ(qs.kappa({1}), (Fn{0, 1, 2}));
  EXPECT_EQ(qs.kappa({0}), (Fn{2, 2, 2}));
  EXPECT_EQ(qs.kappa({2}), (Fn{0, 0, 2}));
  EXPECT_EQ(qs.kappa({}), (Fn{0, 0, 0}));
}

TEST(System, KappaMustBeAHomomorphism) {
  const auto A = chain(Variety::frame, {"bot", "c", "top"});
  try {
    validate_system(two(), {"x"}, A, {{1}, {1}, {1}});  // bottom sent to 1
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kappa_not_homomorphism);
  }
}

TEST(System, T0AndSoberVerdicts) {
  const auto L = two();
  const auto doubled = verify::doubled_sierpinski(L);
  EXPECT_FALSE(is_t0(doubled));
  EXPECT_EQ(is_sober(doubled).status, Sobriety::not_injective);
  const auto half = verify::restrict_system(sierpinski_system(L), {1});
  EXPECT_TRUE(is_t0(half));
  EXPECT_EQ(is_sober(half).status, Sobriety::not_surjective);
}

TEST(System, SoberMatchesPointCount) {
  std::mt19937_64 rng(31);
  for (auto v : {Variety::set, Variety::supsl, Variety::frame, Variety::cbalg}) {
    verify::GenConfig cfg;
    cfg.variety = v;
    for (int i = 0; i < 25; ++i) {
      const auto s = verify::gen_system(cfg, rng);
      std::set<Fn> distinct;
      for (std::size_t x = 0; x < s.size(); ++x) distinct.insert(s.point_at(x));
      const bool t0 = distinct.size() == s.size();
      const bool sober = t0 && distinct.size() == enumerate_homs_naive(s.A, s.L).size();
      EXPECT_EQ(is_t0(s).holds, t0);
      EXPECT_EQ(is_sober(s).sober(), sober);
    }
  }
}

TEST(Morphisms, ToSierpinskiMatchesBruteForce) {
  std::mt19937_64 rng(41);
  for (auto v : {Variety::set, Variety::supsl, Variety::frame, Variety::cbalg}) {
    verify::GenConfig cfg;
    cfg.variety = v;
    const FreeOnOne S = free_on_one(v);
    const auto sier = sierpinski_system(cfg.L ? cfg.L : verify::default_L(v), S);
    for (int i = 0; i < 15; ++i) {
      const auto s = verify::gen_system(cfg, rng);
      const auto oracle = oracle_morphisms(s, sier);
      EXPECT_EQ(oracle.size(), s.A->size());
      EXPECT_EQ(as_set(morphisms_to_S(s, S)), oracle);
    }
  }
}

TEST(Morphisms, EnumerationMatchesBruteForce) {
  std::mt19937_64 rng(43);
  for (auto v : {Variety::set, Variety::supsl, Variety::frame, Variety::cbalg}) {
    verify::GenConfig cfg;
    cfg.variety = v;
    cfg.max_points = 3;
    cfg.max_algebra = 4;
    for (int i = 0; i < 15; ++i) {
      const auto s1 = verify::gen_system(cfg, rng), s2 = verify::gen_system(cfg, rng);
      const auto ms = enumerate_morphisms(s1, s2);
      EXPECT_EQ(as_set(ms), oracle_morphisms(s1, s2));
      for (const auto& m : ms) EXPECT_TRUE(validate_morphism(s1, s2, m));
    }
  }
}

TEST(Morphisms, ValidateRejectsBrokenSquare) {
  const auto S = sierpinski_system(two());
  EXPECT_TRUE(validate_morphism(S, S, identity_morphism(S)));
  SystemMorphism swapped = identity_morphism(S);
  swapped.f = {1, 0};
  EXPECT_FALSE(validate_morphism(S, S, swapped));
}

TEST(Spaces, SpatOfEIsIdentity) {
  std::mt19937_64 rng(5);
  verify::GenConfig cfg;
  for (int i = 0; i < 30; ++i) {
    const auto s = verify::gen_space(cfg, rng);
    const auto back = spatialize(embed_E(s));
    EXPECT_EQ(back.points, s.points);
    EXPECT_EQ(back.opens, s.opens);
  }
}

TEST(Spaces, AdjunctionOnSierpinski) {
  const auto L = two();
  const auto report = verify::adjunction_check(sierpinski_space(L), sierpinski_system(L));
  EXPECT_TRUE(report.ok()) << report.detail;
  // Continuous self-maps of the two-point Sierpinski space: both constants
  // and the identity.
  EXPECT_EQ(report.space_side, 3u);
  EXPECT_EQ(report.system_side, 3u);
}

TEST(Product, SierpinskiSquared) {
  const auto L = two();
  const auto S = sierpinski_system(L);
  const auto P = product_systems({&S, &S}, L);
  EXPECT_EQ(P.system.size(), 4u);
  EXPECT_EQ(P.system.A->size(), 6u);
  EXPECT_TRUE(is_t0(P.system));
  for (const auto& pr : P.projections) EXPECT_TRUE(validate_morphism(P.system, S, pr));
  const auto paired = P.pair(P.system, P.projections);
  EXPECT_EQ(paired, identity_morphism(P.system));
}

TEST(Product, PairingIsUniqueOnRandomCones) {
  std::mt19937_64 rng(47);
  verify::GenConfig cfg;
  cfg.max_points = 2;
  cfg.max_algebra = 3;
  for (int i = 0; i < 10; ++i) {
    const auto a = verify::gen_system(cfg, rng), b = verify::gen_system(cfg, rng);
    const auto src = verify::gen_system(cfg, rng);
    const auto P = product_systems({&a, &b}, a.L);
    const auto to_a = enumerate_morphisms(src, a), to_b = enumerate_morphisms(src, b);
    const auto to_p = enumerate_morphisms(src, P.system);
    EXPECT_EQ(to_p.size(), to_a.size() * to_b.size());
    for (const auto& ma : to_a)
      for (const auto& mb : to_b) {
        const std::vector<SystemMorphism> legs{ma, mb};
        const auto m = P.pair(src, legs);
        EXPECT_TRUE(validate_morphism(src, P.system, m));
        EXPECT_EQ(compose(P.projections[0], m), ma);
        EXPECT_EQ(compose(P.projections[1], m), mb);
      }
  }
}

TEST(Mono, SoberMonoNegative) {
  const auto L = two();
  const auto S = sierpinski_system(L);
  const auto half = verify::restrict_system(S, {1});
  const auto inc = verify::inclusion(S, {1});
  ASSERT_TRUE(validate_morphism(half, S, inc));
  EXPECT_TRUE(is_mono(half, S, inc).in_M());
  EXPECT_FALSE(is_sober_mono(half, S, inc));
  EXPECT_TRUE(is_sober_mono(S, S, identity_morphism(S)));
}

TEST(Canonical, LazyAgreesWithMaterialized) {
  std::mt19937_64 rng(53);
  for (auto v : {Variety::supsl, Variety::frame}) {
    verify::GenConfig cfg;
    cfg.variety = v;
    cfg.max_algebra = 4;
    const FreeOnOne S = free_on_one(v);
    for (int i = 0; i < 12; ++i) {
      const auto s = verify::gen_system(cfg, rng);
      const auto lazy = canonical_to_power(s, S, false);
      const auto full = canonical_to_power(s, S, true);
      ASSERT_TRUE(full.phi_surjective_scan.has_value());
      EXPECT_EQ(lazy.phi_surjective, *full.phi_surjective_scan);
      EXPECT_EQ(lazy.f_injective, is_t0(s).holds);
      const auto& P = full.materialized->power->system();
      EXPECT_TRUE(validate_morphism(s, P, full.materialized->morphism));
      EXPECT_EQ(is_sober_mono_lazy(s, S, lazy).holds,
                is_sober_mono(s, P, full.materialized->morphism).holds);
    }
  }
}

TEST(Theta, VarietyTable) {
  for (auto v : {Variety::set, Variety::supsl, Variety::frame, Variety::cbalg}) {
    const auto t = theta_comparison(verify::default_L(v));
    EXPECT_TRUE(t.is_iso) << to_string(v);
    EXPECT_TRUE(t.theta_morphism) << to_string(v);
  }
  const auto q = theta_comparison(lukasiewicz_chain(3));
  EXPECT_FALSE(q.is_iso);
  EXPECT_TRUE(q.theta_morphism);
  ASSERT_TRUE(q.non_injective_witness.has_value());
  EXPECT_EQ(q.non_injective_witness->first, (FinNatSet{0, 1}));
  EXPECT_EQ(q.non_injective_witness->second, (FinNatSet{0}));
}
