#include <gtest/gtest.h>

#include <random>

#include "affine/io.hpp"
#include "affine/verify.hpp"

using namespace affine;
using json = nlohmann::json;

namespace {

std::string data(const std::string& name) { return std::string(AFFINE_DATA_DIR) + "/" + name; }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::malformed;
}

}  // namespace

TEST(Io, FixturesLoad) {
  for (const char* f : {"two.json", "three-chain.json", "lukasiewicz3.json", "two-supsl.json", "bool4.json",
                        "two-set.json"}) {
    EXPECT_NO_THROW(io::algebra_from_json(io::open_envelope(io::read_document(data(f)), "algebra"))) << f;
  }
  const auto S = io::system_from_json(io::open_envelope(io::read_document(data("sierpinski-frame-2.json")), "system"));
  EXPECT_EQ(S.size(), 2u);
  EXPECT_EQ(S.A->size(), 3u);
}

TEST(Io, CycleIsRejected) {
  EXPECT_EQ(kind_of([] { io::algebra_from_json(io::open_envelope(io::read_document(data("cyclic-order.json")), "algebra")); }),
            ErrorKind::not_a_partial_order);
}

TEST(Io, AlgebraRoundTripIsByteStable) {
  std::mt19937_64 rng(19);
  for (auto v : {Variety::set, Variety::supsl, Variety::frame, Variety::cbalg, Variety::uquant}) {
    verify::GenConfig cfg;
    cfg.variety = v;
    for (int i = 0; i < 10; ++i) {
      const auto A = verify::gen_algebra(cfg, rng);
      const std::string once = io::dump(io::envelope("algebra", io::algebra_to_json(*A)));
      const auto B = io::algebra_from_json(io::open_envelope(io::parse(once), "algebra"));
      EXPECT_EQ(io::dump(io::envelope("algebra", io::algebra_to_json(*B))), once);
      EXPECT_EQ(B->names(), A->names());
      for (Elem a = 0; a < A->size(); ++a)
        for (Elem b = 0; b < A->size(); ++b) {
          EXPECT_EQ(B->le(a, b), A->le(a, b));
          if (v == Variety::uquant) EXPECT_EQ(B->tensor(a, b), A->tensor(a, b));
        }
    }
  }
}

TEST(Io, SystemSpaceMorphismRoundTrip) {
  std::mt19937_64 rng(23);
  verify::GenConfig cfg;
  for (int i = 0; i < 10; ++i) {
    const auto s = verify::gen_system(cfg, rng);
    const auto text = io::dump(io::system_to_json(s));
    const auto back = io::system_from_json(io::parse(text));
    EXPECT_EQ(back.kappa, s.kappa);
    EXPECT_EQ(io::dump(io::system_to_json(back)), text);

    const auto sp = verify::gen_space(cfg, rng);
    const auto sp2 = io::space_from_json(io::space_to_json(sp));
    EXPECT_EQ(sp2.opens, sp.opens);

    const auto m = identity_morphism(s);
    const auto lm = io::morphism_from_json(io::morphism_to_json(s, s, m));
    EXPECT_EQ(lm.morphism, m);
  }
}

TEST(Io, EnvelopeAndSchemaErrors) {
  EXPECT_EQ(kind_of([] { io::parse("{not json"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { io::read_document(data("no-such-file.json")); }), ErrorKind::parse);
  const json alg = io::read_document(data("two.json"));
  EXPECT_EQ(kind_of([&] { io::open_envelope(alg, "system"); }), ErrorKind::schema);
  json v2 = alg;
  v2["version"] = "2";
  EXPECT_EQ(kind_of([&] { io::open_envelope(v2, "algebra"); }), ErrorKind::schema);
  EXPECT_EQ(kind_of([] { io::algebra_from_json(json{{"variety", "frame"}}); }), ErrorKind::schema);
  EXPECT_EQ(kind_of([] { io::algebra_from_json(json{{"variety", "ring"}, {"elements", {"0"}}}); }), ErrorKind::schema);
  EXPECT_EQ(kind_of([] {
              io::algebra_from_json(json{{"variety", "frame"}, {"elements", {"0", "1"}}, {"le", json::array({json::array({"0", "2"})})}});
            }),
            ErrorKind::schema);
  EXPECT_EQ(kind_of([] { io::algebra_from_json(json{{"variety", "set"}, {"elements", {"a", "a"}}}); }),
            ErrorKind::schema);
}

TEST(Io, LeIsClosedOnLoad) {
  // Only covering pairs given; transitivity supplies 0 <= 1.
  const auto A = io::algebra_from_json(
      json{{"variety", "frame"},
           {"elements", {"0", "h", "1"}},
           {"le", json::array({json::array({"0", "h"}), json::array({"h", "1"})})}});
  EXPECT_TRUE(A->le(0, 2));
}

TEST(Io, KappaMustCoverEveryPoint) {
  json s = io::system_to_json(sierpinski_system(chain(Variety::frame, {"0", "1"})));
  s["kappa"]["c"].erase("1");
  EXPECT_EQ(kind_of([&] { io::system_from_json(s); }), ErrorKind::schema);
}
