#include <gtest/gtest.h>

#include <random>

#include "affine/coproduct.hpp"
#include "affine/free.hpp"
#include "affine/verify.hpp"

using namespace affine;

namespace {

// Monotone maps {0,1}^n -> {0,1}, counted by brute force over truth tables.
std::size_t monotone_boolean_functions(unsigned n) {
  const unsigned pts = 1u << n;
  std::size_t count = 0;
  for (std::uint64_t table = 0; table < (1ull << pts); ++table) {
    bool mono = true;
    for (unsigned x = 0; x < pts && mono; ++x)
      for (unsigned y = 0; y < pts && mono; ++y)
        if ((x & y) == x && ((table >> x) & 1) && !((table >> y) & 1)) mono = false;
    count += mono;
  }
  return count;
}

std::vector<AlgebraPtr> copies(const AlgebraPtr& A, std::size_t n) { return std::vector<AlgebraPtr>(n, A); }

}  // namespace

TEST(Coproduct, FreeFrameSizesMatchMonotoneCounts) {
  const auto S = free_on_one(Variety::frame).algebra;
  for (unsigned n = 1; n <= 4; ++n) {
    const auto C = coproduct(Variety::frame, copies(S, n));
    EXPECT_EQ(C.algebra->size(), monotone_boolean_functions(n)) << n;
  }
  EXPECT_EQ(monotone_boolean_functions(2), 6u);
  EXPECT_EQ(monotone_boolean_functions(3), 20u);
  EXPECT_EQ(monotone_boolean_functions(4), 168u);
}

TEST(Coproduct, OtherVarietySizes) {
  auto two = chain(Variety::supsl, {"0", "1"});
  auto three = chain(Variety::supsl, {"0", "h", "1"});
  EXPECT_EQ(coproduct(Variety::supsl, {two, three}).algebra->size(), 6u);
  EXPECT_EQ(coproduct(Variety::set, {discrete_set({"a", "b"}), discrete_set({"c"})}).algebra->size(), 3u);
  // 2^a + 2^b = 2^(ab)
  EXPECT_EQ(coproduct(Variety::cbalg, {boolean_algebra(2), boolean_algebra(3)}).algebra->size(), 64u);
  EXPECT_EQ(coproduct(Variety::cbalg, {boolean_algebra(2), boolean_algebra(0)}).algebra->size(), 1u);
}

TEST(Coproduct, HomCountsMultiply) {
  // |Hom(A1 + A2, B)| = |Hom(A1, B)| * |Hom(A2, B)|, counted by enumeration.
  std::mt19937_64 rng(13);
  for (auto v : {Variety::set, Variety::supsl, Variety::frame, Variety::cbalg}) {
    verify::GenConfig cfg;
    cfg.variety = v;
    cfg.max_algebra = 4;
    for (int i = 0; i < 12; ++i) {
      const auto A1 = verify::gen_algebra(cfg, rng), A2 = verify::gen_algebra(cfg, rng);
      const auto B = verify::gen_algebra(cfg, rng);
      const auto C = coproduct(v, {A1, A2});
      EXPECT_EQ(enumerate_homs(C.algebra, B).size(), enumerate_homs(A1, B).size() * enumerate_homs(A2, B).size());
    }
  }
}

TEST(Coproduct, UniversalAuditOnRandomFactors) {
  std::mt19937_64 rng(17);
  for (auto v : {Variety::set, Variety::supsl, Variety::frame, Variety::cbalg}) {
    verify::GenConfig cfg;
    cfg.variety = v;
    cfg.max_algebra = 4;
    std::size_t cocones = 0;
    for (int i = 0; i < 8; ++i) {
      const auto C = coproduct(v, {verify::gen_algebra(cfg, rng), verify::gen_algebra(cfg, rng)});
      const auto audit = verify_coproduct_universal(C, {verify::gen_algebra(cfg, rng), verify::gen_algebra(cfg, rng)});
      EXPECT_TRUE(audit.ok) << (audit.failures.empty() ? "" : audit.failures.front());
      cocones += audit.cocones_checked;
    }
    EXPECT_GT(cocones, 0u);
  }
}

TEST(Coproduct, MediatorOfInjectionsIsIdentity) {
  const auto S = free_on_one(Variety::frame).algebra;
  const auto C = coproduct(Variety::frame, copies(S, 2));
  const Hom h = mediate(C, C.injections, C.algebra);
  EXPECT_EQ(h.map, identity_hom(C.algebra).map);
}

TEST(Coproduct, SwappedInjectionsAreCaught) {
  const auto S = free_on_one(Variety::frame).algebra;
  auto C = coproduct(Variety::frame, copies(S, 2));
  std::swap(C.injections[0], C.injections[1]);
  // Still homomorphisms, but the constructed mediators no longer commute.
  const auto audit = verify_coproduct_universal(C, {chain(Variety::frame, {"0", "1"})});
  EXPECT_FALSE(audit.ok);
}

TEST(Coproduct, ShapeAndVarietyErrors) {
  const auto S = free_on_one(Variety::frame).algebra;
  const auto C = coproduct(Variety::frame, copies(S, 2));
  const std::vector<Hom> one_leg{identity_hom(S)};
  try {
    mediate(C, one_leg, S);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::cocone_shape_mismatch);
  }
  try {
    coproduct(Variety::uquant, {lukasiewicz_chain(3)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unsupported_variety);
  }
  try {
    coproduct(Variety::frame, {S, chain(Variety::supsl, {"0", "1"})});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::variety_mismatch);
  }
}
