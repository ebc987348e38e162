#include <gtest/gtest.h>

#include <random>
#include <set>

#include "affine/algebra.hpp"
#include "affine/verify.hpp"

using namespace affine;

namespace {

std::vector<std::uint8_t> order_from(std::size_t n, std::vector<std::pair<int, int>> pairs) {
  std::vector<std::uint8_t> le(n * n, 0);
  for (auto [a, b] : pairs) le[a * n + b] = 1;
  return reflexive_transitive_closure(le, n);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::malformed;
}

// Independent homomorphism test written against the raw operation tables.
bool oracle_is_hom(const FiniteAlgebra& A, const FiniteAlgebra& B, const Fn& h) {
  const Variety v = A.variety();
  if (v == Variety::set) return true;
  if (h[A.bottom()] != B.bottom()) return false;
  if ((v == Variety::frame || v == Variety::cbalg) && h[A.top()] != B.top()) return false;
  if (v == Variety::uquant && h[A.unit()] != B.unit()) return false;
  for (Elem a = 0; a < A.size(); ++a) {
    if (v == Variety::cbalg && h[A.complement(a)] != B.complement(h[a])) return false;
    for (Elem b = 0; b < A.size(); ++b) {
      if (h[A.join(a, b)] != B.join(h[a], h[b])) return false;
      if ((v == Variety::frame || v == Variety::cbalg) && h[A.meet(a, b)] != B.meet(h[a], h[b])) return false;
      if (v == Variety::uquant && h[A.tensor(a, b)] != B.tensor(h[a], h[b])) return false;
    }
  }
  return true;
}

std::vector<Fn> oracle_homs(const FiniteAlgebra& A, const FiniteAlgebra& B) {
  std::vector<Fn> out;
  Fn m(A.size(), 0);
  while (true) {
    if (oracle_is_hom(A, B, m)) out.push_back(m);
    std::size_t k = 0;
    while (k < m.size() && ++m[k] == B.size()) m[k++] = 0;
    if (k == m.size()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Fn> maps_of(const std::vector<Hom>& hs) {
  std::vector<Fn> out;
  for (const auto& h : hs) out.push_back(h.map);
  return out;
}

}  // namespace

TEST(Validate, ThreeChainFrame) {
  auto A = chain(Variety::frame, {"bot", "c", "top"});
  EXPECT_EQ(A->size(), 3u);
  EXPECT_EQ(A->bottom(), 0u);
  EXPECT_EQ(A->top(), 2u);
  EXPECT_EQ(A->join(0, 1), 1u);
  EXPECT_EQ(A->meet(1, 2), 1u);
  EXPECT_EQ(A->join_irreducible_elements(), (std::vector<Elem>{1, 2}));
}

TEST(Validate, CycleIsNotAPartialOrder) {
  EXPECT_EQ(kind_of([] {
              FiniteAlgebra::validate(Variety::frame, {"a", "b", "c"}, order_from(3, {{0, 1}, {1, 2}, {2, 0}}));
            }),
            ErrorKind::not_a_partial_order);
}

TEST(Validate, MissingJoinOfTwoMaximalElements) {
  // bot < a, bot < b, no top.
  EXPECT_EQ(kind_of([] {
              FiniteAlgebra::validate(Variety::supsl, {"bot", "a", "b"}, order_from(3, {{0, 1}, {0, 2}}));
            }),
            ErrorKind::missing_join);
}

TEST(Validate, PentagonIsNotAFrame) {
  // N5: 0 < a < b < 1, 0 < c < 1.
  const auto le = order_from(5, {{0, 1}, {1, 2}, {2, 4}, {0, 3}, {3, 4}});
  EXPECT_EQ(kind_of([&] { FiniteAlgebra::validate(Variety::frame, {"0", "a", "b", "c", "1"}, le); }),
            ErrorKind::distributivity_failure);
  EXPECT_NO_THROW(FiniteAlgebra::validate(Variety::supsl, {"0", "a", "b", "c", "1"}, le));
}

TEST(Validate, DiamondIsNotBoolean) {
  const auto le = order_from(5, {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {2, 4}, {3, 4}});
  EXPECT_EQ(kind_of([&] { FiniteAlgebra::validate(Variety::cbalg, {"0", "a", "b", "c", "1"}, le); }),
            ErrorKind::distributivity_failure);
}

TEST(Validate, ThreeChainHasNoComplements) {
  EXPECT_EQ(kind_of([] { FiniteAlgebra::validate(Variety::cbalg, {"0", "h", "1"}, chain_order(3)); }),
            ErrorKind::complement_failure);
}

TEST(Validate, NonAssociativeTensorRejected) {
  // On the 3-chain, a (x) b = join except 1 (x) 1 = 0 breaks monotonicity and
  // distributivity.
  std::vector<Elem> t = {0, 1, 2, 1, 1, 2, 2, 2, 0};
  EXPECT_EQ(kind_of([&] { FiniteAlgebra::validate(Variety::uquant, {"0", "h", "1"}, chain_order(3), t, 0); }),
            ErrorKind::tensor_axiom_failure);
}

TEST(Validate, LukasiewiczThree) {
  auto L = lukasiewicz_chain(3);
  EXPECT_TRUE(L->is_integral());
  EXPECT_EQ(L->tensor(1, 1), 0u);  // 1/2 (x) 1/2 = 0
  EXPECT_EQ(L->tensor(1, 2), 1u);
  EXPECT_EQ(L->unit(), 2u);
}

TEST(Validate, BooleanAlgebraComplements) {
  auto B = boolean_algebra(2);
  ASSERT_EQ(B->size(), 4u);
  for (Elem a = 0; a < 4; ++a) {
    EXPECT_EQ(B->join(a, B->complement(a)), B->top());
    EXPECT_EQ(B->meet(a, B->complement(a)), B->bottom());
  }
  EXPECT_EQ(B->join_irreducible_elements().size(), 2u);
}

TEST(Homs, ChainIntoTwoHasTwoPoints) {
  auto A = chain(Variety::frame, {"bot", "c", "top"});
  auto L = chain(Variety::frame, {"0", "1"});
  EXPECT_EQ(enumerate_homs(A, L).size(), 2u);
}

TEST(Homs, SetVarietyIsAllMaps) {
  auto A = discrete_set({"a", "b", "c"});
  auto B = discrete_set({"0", "1"});
  EXPECT_EQ(enumerate_homs(A, B).size(), 8u);
}

TEST(Homs, VarietyMismatchThrows) {
  EXPECT_EQ(kind_of([] { enumerate_homs(chain(Variety::frame, {"0", "1"}), chain(Variety::supsl, {"0", "1"})); }),
            ErrorKind::variety_mismatch);
}

TEST(Homs, PrunedEqualsOracleOnRandomPairs) {
  std::mt19937_64 rng(7);
  std::size_t pairs = 0;
  for (auto v : {Variety::set, Variety::supsl, Variety::frame, Variety::cbalg, Variety::uquant}) {
    verify::GenConfig cfg;
    cfg.variety = v;
    cfg.max_algebra = 5;
    for (int i = 0; i < 30; ++i) {
      auto A = verify::gen_algebra(cfg, rng);
      auto B = verify::gen_algebra(cfg, rng);
      EXPECT_EQ(maps_of(enumerate_homs(A, B)), oracle_homs(*A, *B));
      EXPECT_EQ(maps_of(enumerate_homs_naive(A, B)), oracle_homs(*A, *B));
      ++pairs;
    }
  }
  EXPECT_GE(pairs, 100u);
}

TEST(Homs, IsHomomorphismAgreesWithOracle) {
  auto A = boolean_algebra(2);
  Fn m(4, 0);
  std::size_t homs = 0;
  while (true) {
    EXPECT_EQ(is_homomorphism(*A, *A, m).ok, oracle_is_hom(*A, *A, m));
    homs += oracle_is_hom(*A, *A, m);
    std::size_t k = 0;
    while (k < 4 && ++m[k] == 4) m[k++] = 0;
    if (k == 4) break;
  }
  EXPECT_EQ(homs, 4u);  // dual to the self-maps of the two atoms
}

TEST(Subalgebra, GeneratedDependsOnVariety) {
  auto F = boolean_algebra(2, Variety::frame);
  auto B = boolean_algebra(2, Variety::cbalg);
  const Elem atom = F->join_irreducible_elements().front();
  EXPECT_EQ(generated_subalgebra(F, {atom}).members.size(), 3u);
  EXPECT_EQ(generated_subalgebra(B, {atom}).members.size(), 4u);
}

TEST(Subalgebra, ClosureIsClosed) {
  auto L = lukasiewicz_chain(5);
  auto s = generated_subalgebra(L, {3});  // 3/4 generates all quarters
  EXPECT_EQ(s.members.size(), 5u);
  auto t = generated_subalgebra(L, {});
  EXPECT_EQ(t.members, (std::vector<Elem>{0, 4}));
}

TEST(Product, ComponentwiseAndProjections) {
  auto two = chain(Variety::frame, {"0", "1"});
  auto P = product_algebras({two, two});
  EXPECT_EQ(P.algebra->size(), 4u);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_TRUE(is_homomorphism(P.projection(i)).ok);
  const Hom id = identity_hom(two);
  const std::vector<Hom> legs{id, id};
  const Hom diag = P.mediate(legs);
  EXPECT_TRUE(is_homomorphism(diag).ok);
  EXPECT_FALSE(check_axioms(*P.algebra).has_value());
}

TEST(Product, PowerSizeAndPrecomposition) {
  auto L = chain(Variety::frame, {"0", "h", "1"});
  auto P2 = power_algebra(L, 2);
  auto P3 = power_algebra(L, 3);
  EXPECT_EQ(P3.algebra->size(), 27u);
  const std::vector<std::size_t> f = {0, 1, 1};
  const Hom pre = precomposition(P2, P3, f);
  EXPECT_TRUE(is_homomorphism(pre).ok);
}

TEST(Birkhoff, DownsetCounts) {
  Poset anti{{"a", "b", "c"}, {1, 0, 0, 0, 1, 0, 0, 0, 1}};
  EXPECT_EQ(enumerate_downsets(anti).size(), 8u);
  Poset ch{{"a", "b", "c"}, chain_order(3)};
  EXPECT_EQ(enumerate_downsets(ch).size(), 4u);
}

TEST(Birkhoff, RoundTripOnRandomFrames) {
  std::mt19937_64 rng(11);
  verify::GenConfig cfg;
  cfg.variety = Variety::frame;
  cfg.max_algebra = 8;
  for (int i = 0; i < 40; ++i) {
    auto F = verify::gen_algebra(cfg, rng);
    auto J = join_irreducibles(*F);
    auto D = downset_frame(J.poset);
    ASSERT_EQ(D.algebra->size(), F->size());
    const Hom b = birkhoff_iso(F, D, J);
    EXPECT_TRUE(is_homomorphism(b).ok);
    EXPECT_TRUE(is_injective(b.map));
  }
}

TEST(Axioms, GeneratedAlgebrasPassAudit) {
  std::mt19937_64 rng(3);
  for (auto v : {Variety::supsl, Variety::frame, Variety::cbalg, Variety::uquant}) {
    verify::GenConfig cfg;
    cfg.variety = v;
    for (int i = 0; i < 20; ++i) EXPECT_FALSE(check_axioms(*verify::gen_algebra(cfg, rng)).has_value());
  }
}
