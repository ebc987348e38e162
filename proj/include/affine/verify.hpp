#ifndef AFFINE_VERIFY_HPP
#define AFFINE_VERIFY_HPP

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "affine/algebra.hpp"
#include "affine/coproduct.hpp"
#include "affine/free.hpp"
#include "affine/io.hpp"
#include "affine/space.hpp"
#include "affine/system.hpp"

namespace affine::verify {

using json = nlohmann::json;
using Rng = std::mt19937_64;

struct GenConfig {
  std::uint64_t seed = 1;
  Variety variety = Variety::frame;
  AlgebraPtr L;  // null: default_L(variety)
  std::size_t max_points = 4;
  std::size_t max_algebra = 6;
  std::size_t instance_count = 50;
  // Probe pools for the bounded universals.
  std::size_t probe_points = 3;
  std::size_t probe_algebra = 4;
  std::size_t probe_count = 4;
  std::uint64_t candidate_cap = kDefaultCandidateCap;
  bool materialize_powers = false;
  std::size_t max_rejections = 5000;
  std::optional<std::chrono::milliseconds> instance_budget;
};

enum class Stratum { any, t0, sober };

inline AlgebraPtr default_L(Variety v) {
  switch (v) {
    case Variety::set: return discrete_set({"0", "1"});
    case Variety::supsl:
    case Variety::frame: return chain(v, {"0", "1"});
    case Variety::cbalg: return boolean_algebra(1);
    case Variety::uquant: return lukasiewicz_chain(3);
  }
  return nullptr;
}

inline AlgebraPtr config_L(const GenConfig& cfg) {
  AlgebraPtr L = cfg.L ? cfg.L : default_L(cfg.variety);
  if (L->variety() != cfg.variety) {
    throw Error(ErrorKind::variety_mismatch, "L is a " + std::string(to_string(L->variety())) +
                                                 ", the suite runs over " +
                                                 std::string(to_string(cfg.variety)));
  }
  return L;
}

/// splitmix64 of (seed, index): the replayable per-instance seed.
inline std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// ---------------------------------------------------------------------------
// Generators

/// The unital quantales the generators draw from.
inline std::vector<AlgebraPtr> quantale_catalog() {
  std::vector<AlgebraPtr> out;
  for (std::size_t n = 2; n <= 5; ++n) out.push_back(lukasiewicz_chain(n));
  for (std::size_t n = 2; n <= 5; ++n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("m" + std::to_string(i));
    out.push_back(chain(Variety::uquant, names));
  }
  return out;
}

namespace detail {

inline std::optional<AlgebraPtr> try_algebra(Variety v, std::size_t max, Rng& rng) {
  switch (v) {
    case Variety::set: {
      const std::size_t n = uniform(rng, 1, std::max<std::size_t>(1, max));
      std::vector<std::string> names;
      for (std::size_t i = 0; i < n; ++i) names.push_back("e" + std::to_string(i));
      return discrete_set(names);
    }
    case Variety::frame: {
      // Finite frames are the down-set lattices of finite posets.
      const std::size_t k = uniform(rng, 0, max > 1 ? max - 1 : 0);
      Poset P;
      for (std::size_t i = 0; i < k; ++i) P.names.push_back("j" + std::to_string(i));
      P.le.assign(k * k, 0);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) P.le[i * k + j] = uniform(rng, 0, 99) < 35;
      P.le = reflexive_transitive_closure(std::move(P.le), k);
      try {
        auto D = downset_frame(P, max);
        return D.algebra;
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::budget_exceeded) return std::nullopt;
        throw;
      }
    }
    case Variety::supsl: {
      // Union-closed families of subsets of a small universe.
      const std::size_t u = uniform(rng, 0, 3);
      const std::size_t r = uniform(rng, 0, 4);
      std::set<unsigned> fam{0};
      for (std::size_t i = 0; i < r; ++i) fam.insert(static_cast<unsigned>(uniform(rng, 0, (1u << u) - 1)));
      bool grew = true;
      while (grew) {
        grew = false;
        for (unsigned a : std::vector<unsigned>(fam.begin(), fam.end()))
          for (unsigned b : std::vector<unsigned>(fam.begin(), fam.end()))
            grew = fam.insert(a | b).second || grew;
      }
      if (fam.size() > max) return std::nullopt;
      std::vector<unsigned> elems(fam.begin(), fam.end());
      const std::size_t n = elems.size();
      std::vector<std::string> names;
      for (unsigned m : elems) {
        std::string s = "{";
        for (unsigned b = 0; b < u; ++b)
          if (m & (1u << b)) s += (s.size() > 1 ? "," : "") + std::to_string(b);
        names.push_back(s + "}");
      }
      std::vector<std::uint8_t> le(n * n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) le[i * n + j] = (elems[i] & ~elems[j]) == 0;
      return share(FiniteAlgebra::validate(Variety::supsl, std::move(names), std::move(le)));
    }
    case Variety::cbalg: {
      std::size_t kmax = 0;
      while ((std::size_t{2} << kmax) <= max) ++kmax;
      return boolean_algebra(uniform(rng, 0, kmax));
    }
    case Variety::uquant: {
      std::vector<AlgebraPtr> fit;
      for (auto& q : quantale_catalog())
        if (q->size() <= max) fit.push_back(q);
      if (fit.empty()) return std::nullopt;
      return fit[uniform(rng, 0, fit.size() - 1)];
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Random algebra of cfg.variety with at most cfg.max_algebra elements,
/// drawn from validated constructions with rejection on size.
inline AlgebraPtr gen_algebra(const GenConfig& cfg, Rng& rng) {
  for (std::size_t attempt = 0; attempt < cfg.max_rejections; ++attempt) {
    if (auto A = detail::try_algebra(cfg.variety, cfg.max_algebra, rng)) return *A;
  }
  throw Error(ErrorKind::generation_exhausted, "no algebra within the size cap");
}

/// A system is a choice of A and one point A -> L per element of X (kappa
/// into L^X is exactly such a tuple). The T0 stratum picks distinct points;
/// the sober stratum takes every point once.
inline AffineSystem gen_system(const GenConfig& cfg, Rng& rng, Stratum stratum = Stratum::any) {
  const AlgebraPtr L = config_L(cfg);
  for (std::size_t attempt = 0; attempt < cfg.max_rejections; ++attempt) {
    const AlgebraPtr A = gen_algebra(cfg, rng);
    const auto P = pts(A, L, cfg.candidate_cap);
    std::vector<std::size_t> choice;
    switch (stratum) {
      case Stratum::any: {
        const std::size_t n = P.empty() ? 0 : uniform(rng, 1, std::max<std::size_t>(1, cfg.max_points));
        for (std::size_t i = 0; i < n; ++i) choice.push_back(uniform(rng, 0, P.size() - 1));
        break;
      }
      case Stratum::t0: {
        const std::size_t hi = std::min(cfg.max_points, P.size());
        const std::size_t n = hi == 0 ? 0 : uniform(rng, 1, hi);
        std::vector<std::size_t> all(P.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        std::shuffle(all.begin(), all.end(), rng);
        choice.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));
        break;
      }
      case Stratum::sober:
        if (P.size() > cfg.max_points) continue;
        for (std::size_t i = 0; i < P.size(); ++i) choice.push_back(i);
        break;
    }
    std::vector<Fn> kappa(A->size(), Fn(choice.size()));
    for (std::size_t x = 0; x < choice.size(); ++x)
      for (Elem a = 0; a < A->size(); ++a) kappa[a][x] = P[choice[x]].map[a];
    return validate_system(L, default_point_names(choice.size()), A, std::move(kappa));
  }
  throw Error(ErrorKind::generation_exhausted, "no system in the requested stratum");
}

/// Random space: the subalgebra of L^X generated by a few random functions,
/// rejected when tau exceeds cfg.max_algebra.
inline AffineSpace gen_space(const GenConfig& cfg, Rng& rng) {
  const AlgebraPtr L = config_L(cfg);
  for (std::size_t attempt = 0; attempt < cfg.max_rejections; ++attempt) {
    const std::size_t n = uniform(rng, 1, std::max<std::size_t>(1, cfg.max_points));
    const std::size_t g = uniform(rng, 0, 2);
    std::vector<Fn> seed;
    for (std::size_t i = 0; i < g; ++i) {
      Fn f(n);
      for (auto& v : f) v = static_cast<Elem>(uniform(rng, 0, L->size() - 1));
      seed.push_back(std::move(f));
    }
    std::vector<Fn> opens;
    try {
      opens = generate_pointwise(*L, n, std::move(seed), cfg.max_algebra);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::budget_exceeded) continue;
      throw;
    }
    if (opens.empty()) continue;  // the set variety needs at least one open
    return validate_space(L, default_point_names(n, "x"), std::move(opens), false);
  }
  throw Error(ErrorKind::generation_exhausted, "no space within the size cap");
}

inline std::vector<AffineSystem> gen_probes(const GenConfig& cfg, Rng& rng) {
  GenConfig pc = cfg;
  pc.max_points = cfg.probe_points;
  pc.max_algebra = cfg.probe_algebra;
  std::vector<AffineSystem> out;
  for (std::size_t i = 0; i < cfg.probe_count; ++i) out.push_back(gen_system(pc, rng));
  return out;
}

// ---------------------------------------------------------------------------
// Constructions used by the suites

/// Subsystem on the listed points (repeats allowed; repeated points get
/// primed names), same algebra.
inline AffineSystem restrict_system(const AffineSystem& s, const std::vector<std::size_t>& keep) {
  std::vector<std::string> names;
  std::map<std::size_t, int> seen;
  for (auto x : keep) {
    const int k = seen[x]++;
    names.push_back(s.points[x] + std::string(static_cast<std::size_t>(k), '\''));
  }
  std::vector<Fn> kappa(s.A->size(), Fn(keep.size()));
  for (Elem a = 0; a < s.A->size(); ++a)
    for (std::size_t i = 0; i < keep.size(); ++i) kappa[a][i] = s.kappa[a][keep[i]];
  return validate_system(s.L, std::move(names), s.A, std::move(kappa));
}

inline SystemMorphism inclusion(const AffineSystem& s, const std::vector<std::size_t>& keep) {
  return {keep, identity_hom(s.A)};
}

/// E of the subspace on `keep`, with the morphism into s whose phi^- sends a
/// to the restriction of kappa(a). phi^- is onto by construction.
inline std::pair<AffineSystem, SystemMorphism> image_subsystem(const AffineSystem& s,
                                                               const std::vector<std::size_t>& keep) {
  const AffineSpace sub = spatialize(restrict_system(s, keep));
  AffineSystem e = embed_E(sub);
  Fn phi(s.A->size());
  for (Elem a = 0; a < phi.size(); ++a) phi[a] = static_cast<Elem>(sub.index_of_open(precompose(s.kappa[a], keep)));
  SystemMorphism m{keep, {s.A, e.A, std::move(phi)}};
  return {std::move(e), std::move(m)};
}

/// The Sierpinski system with its last point listed twice (not T0).
inline AffineSystem doubled_sierpinski(const AlgebraPtr& L) {
  const AffineSystem S = sierpinski_system(L);
  std::vector<std::size_t> keep;
  for (std::size_t x = 0; x < S.size(); ++x) keep.push_back(x);
  keep.push_back(S.size() - 1);
  return restrict_system(S, keep);
}

struct Retract {
  AffineSystem R;
  SystemMorphism r;  // P -> R
  SystemMorphism s;  // R -> P
};

/// Retracts of a power P of S from its idempotent endomorphisms e: the fixed
/// points of f_e with the image of phi_e^-. Endomorphisms are enumerated as
/// tuples of morphisms into S paired through the product.
inline std::vector<Retract> retracts_of_power(const PowerOfS& power, std::uint64_t cap) {
  const AffineSystem& P = power.system();
  const auto to_s = morphisms_to_S(P, power.S);
  const std::size_t k = power.copies.size();
  check_budget(sat_pow(to_s.size(), k), cap, "endomorphisms of the power");
  std::vector<Retract> out;
  std::set<std::pair<std::vector<std::size_t>, std::vector<Elem>>> seen;
  std::vector<std::size_t> idx(k, 0);
  while (true) {
    std::vector<SystemMorphism> legs;
    for (auto i : idx) legs.push_back(to_s[i]);
    const SystemMorphism e = power.product->pair(P, legs);
    if (compose(e, e) == e) {
      std::vector<std::size_t> fix;
      for (std::size_t x = 0; x < P.size(); ++x)
        if (e.f[x] == x) fix.push_back(x);
      std::vector<Elem> members(e.phi.map.begin(), e.phi.map.end());
      std::sort(members.begin(), members.end());
      members.erase(std::unique(members.begin(), members.end()), members.end());
      if (!fix.empty() && seen.insert({fix, members}).second) {
        AlgebraPtr AR = share(induced_algebra(*P.A, members));
        std::map<Elem, Elem> pos;
        for (Elem i = 0; i < members.size(); ++i) pos[members[i]] = i;
        std::map<std::size_t, std::size_t> fpos;
        for (std::size_t i = 0; i < fix.size(); ++i) fpos[fix[i]] = i;
        std::vector<Fn> kappa(members.size(), Fn(fix.size()));
        for (Elem b = 0; b < members.size(); ++b)
          for (std::size_t i = 0; i < fix.size(); ++i) kappa[b][i] = P.kappa[members[b]][fix[i]];
        std::vector<std::string> names;
        for (auto x : fix) names.push_back(P.points[x]);
        Retract rt{validate_system(P.L, std::move(names), AR, std::move(kappa)), {}, {}};
        for (std::size_t x = 0; x < P.size(); ++x) rt.r.f.push_back(fpos.at(e.f[x]));
        rt.r.phi = {AR, P.A, members};
        rt.s.f = fix;
        Fn sphi(P.A->size());
        for (Elem a = 0; a < sphi.size(); ++a) sphi[a] = pos.at(e.phi.map[a]);
        rt.s.phi = {P.A, AR, std::move(sphi)};
        out.push_back(std::move(rt));
      }
    }
    std::size_t j = 0;
    while (j < k && ++idx[j] == to_s.size()) idx[j++] = 0;
    if (j == k) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Adjunction audit

struct AdjunctionReport {
  std::size_t system_side = 0;  // |TopSyst(E s, Sigma)|
  std::size_t space_side = 0;   // |AffSpc(s, Spat Sigma)|
  bool bijective = false;
  bool natural = false;
  std::size_t naturality_checks = 0;
  std::string detail;
  bool ok() const { return bijective && natural; }
};

inline std::vector<std::vector<std::size_t>> continuous_maps(const AffineSpace& s1,
                                                             const AffineSpace& s2,
                                                             std::uint64_t cap) {
  check_budget(sat_pow(s2.size(), s1.size()), cap, "continuous map enumeration");
  std::vector<std::vector<std::size_t>> out;
  if (s1.size() > 0 && s2.size() == 0) return out;
  std::vector<std::size_t> f(s1.size(), 0);
  while (true) {
    if (is_continuous(s1, s2, f)) out.push_back(f);
    std::size_t k = 0;
    while (k < f.size() && ++f[k] == s2.size()) f[k++] = 0;
    if (k == f.size()) break;
  }
  return out;
}

/// Both hom-sets enumerated independently; (f, phi^-) |-> f must be a
/// bijection, natural in s for continuous endomaps g of s.
inline AdjunctionReport adjunction_check(const AffineSpace& s, const AffineSystem& sys,
                                         std::uint64_t cap = kDefaultCandidateCap,
                                         std::size_t max_endomaps = 16) {
  AdjunctionReport rep;
  const AffineSystem es = embed_E(s);
  const auto ms = enumerate_morphisms(es, sys, cap);
  const AffineSpace spat = spatialize(sys);
  const auto fs = continuous_maps(s, spat, cap);
  rep.system_side = ms.size();
  rep.space_side = fs.size();
  std::set<std::vector<std::size_t>> images;
  for (const auto& m : ms) images.insert(m.f);
  const std::set<std::vector<std::size_t>> conts(fs.begin(), fs.end());
  rep.bijective = images.size() == ms.size() && images == conts;
  if (!rep.bijective) {
    rep.detail = "hom-set sizes " + std::to_string(ms.size()) + " vs " + std::to_string(fs.size());
    return rep;
  }
  rep.natural = true;
  auto endos = continuous_maps(s, s, cap);
  if (endos.size() > max_endomaps) endos.resize(max_endomaps);
  for (const auto& g : endos) {
    const SystemMorphism eg = embed_E(s, s, es.A, es.A, g);
    for (const auto& m : ms) {
      ++rep.naturality_checks;
      const SystemMorphism c = compose(m, eg);
      std::vector<std::size_t> fg(g.size());
      for (std::size_t x = 0; x < g.size(); ++x) fg[x] = m.f[g[x]];
      if (c.f != fg || !validate_morphism(es, sys, c)) {
        rep.natural = false;
        rep.detail = "naturality square fails";
        return rep;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Suites

struct Failure {
  std::size_t instance = 0;
  std::uint64_t seed = 0;
  std::string detail;
  json witness;
  json counterexample;
};

struct SuiteReport {
  std::string id;
  Variety variety = Variety::frame;
  std::uint64_t seed = 0;
  std::size_t instances = 0;
  std::size_t passes = 0;
  std::vector<Failure> failures;
  std::vector<std::string> budget_notes;
  bool negative_control_flagged = false;
  std::string negative_control;
  double wall_ms = 0;
  json extra = json::object();

  bool refuted() const { return !failures.empty(); }
  bool budget_exceeded() const { return !budget_notes.empty() && passes + failures.size() < instances; }
};

/// Result of one instance check.
struct Outcome {
  bool pass = true;
  std::string detail;
  json witness;
  static Outcome ok() { return {}; }
  static Outcome fail(std::string d, json w = nullptr) { return {false, std::move(d), std::move(w)}; }
};

/// A generated instance. Suites fill what they need; `system` is the one the
/// shrinker drops points from.
struct Instance {
  std::optional<AffineSystem> system;
  std::vector<AffineSystem> systems;
  std::vector<AffineSystem> probes;
  std::optional<AffineSpace> space;
  std::vector<AffineSpace> spaces;
  std::vector<AlgebraPtr> algebras;
  std::vector<AlgebraPtr> targets;
  std::vector<std::size_t> keep;
  bool image_kind = false;
};

struct Suite {
  std::function<Instance(const GenConfig&, Rng&)> make;
  std::function<Outcome(const GenConfig&, const Instance&, json&)> check;
  /// Crafted instance the check must reject; returns (flagged, description).
  std::function<std::pair<bool, std::string>(const GenConfig&)> negative;
  /// Checks run once per suite, after the instances.
  std::function<std::vector<Outcome>(const GenConfig&, json&)> fixed;
  bool needs_finite_S = true;
};

inline const std::vector<std::string>& suite_ids() {
  static const std::vector<std::string> ids = {
      "thm1", "thm2", "thm3", "thm5", "prop2", "prop3", "prop5", "prop9", "prop10",
      "prop18", "prop20", "prop21", "prop22", "cor1", "cor2", "coprodUP", "example4"};
  return ids;
}

namespace detail {

inline Outcome verdict_outcome(const Verdict& v, const std::string& what) {
  if (v) return Outcome::ok();
  return Outcome::fail(what + ": " + v.detail, v.witness);
}

inline bool is_subset_of(const std::vector<SystemMorphism>& a, const std::vector<SystemMorphism>& b) {
  for (const auto& m : a)
    if (std::find(b.begin(), b.end(), m) == b.end()) return false;
  return true;
}

inline std::vector<std::size_t> random_subset(Rng& rng, std::size_t n, bool nonempty) {
  std::vector<std::size_t> keep;
  for (std::size_t x = 0; x < n; ++x)
    if (uniform(rng, 0, 1)) keep.push_back(x);
  if (nonempty && keep.empty() && n > 0) keep.push_back(uniform(rng, 0, n - 1));
  return keep;
}

inline FreeOnOne finite_S(const GenConfig& cfg) {
  FreeOnOne S = free_on_one(cfg.variety);
  if (S.symbolic()) {
    throw Error(ErrorKind::unsupported_variety,
                "this suite needs a finite free algebra; unital quantales are excluded");
  }
  return S;
}

// --- Morphisms into S correspond to elements of A --------------------------

inline Suite prop2_suite() {
  Suite s;
  s.make = [](const GenConfig& cfg, Rng& rng) {
    Instance in;
    in.system = gen_system(cfg, rng);
    return in;
  };
  s.check = [](const GenConfig& cfg, const Instance& in, json&) {
    const AffineSystem& sys = *in.system;
    const FreeOnOne S = finite_S(cfg);
    const AffineSystem sier = sierpinski_system(sys.L, S);
    const auto listed = morphisms_to_S(sys, S);
    if (listed.size() != sys.A->size()) return Outcome::fail("|Hom(Sigma, S)| != |A|");
    for (const auto& m : listed)
      if (auto v = validate_morphism(sys, sier, m); !v) return verdict_outcome(v, "(f_a, phi_a)");
    const auto all = enumerate_morphisms(sys, sier, cfg.candidate_cap);
    if (all.size() != listed.size() || !is_subset_of(all, listed))
      return Outcome::fail("exhaustive enumeration found " + std::to_string(all.size()) +
                           " morphisms, expected " + std::to_string(listed.size()));
    return Outcome::ok();
  };
  s.negative = [](const GenConfig& cfg) {
    // (constant, identity) on S is not a morphism.
    const AlgebraPtr L = config_L(cfg);
    const AffineSystem sier = sierpinski_system(L);
    SystemMorphism m{std::vector<std::size_t>(sier.size(), 0), identity_hom(sier.A)};
    return std::pair{!validate_morphism(sier, sier, m).holds, std::string("constant map with identity phi on S")};
  };
  return s;
}

// --- Morphisms into S form an initial source ------------------------------

inline std::vector<SourceLeg> legs_to_S(const AffineSystem& sys, const FreeOnOne& S,
                                        const AffineSystem& sier) {
  std::vector<SourceLeg> src;
  for (auto& m : morphisms_to_S(sys, S)) src.push_back({std::move(m), &sier});
  return src;
}

inline Suite prop3_suite() {
  Suite s;
  s.make = [](const GenConfig& cfg, Rng& rng) {
    Instance in;
    in.system = gen_system(cfg, rng);
    in.probes = gen_probes(cfg, rng);
    return in;
  };
  s.check = [](const GenConfig& cfg, const Instance& in, json&) {
    const FreeOnOne S = finite_S(cfg);
    const AffineSystem sier = sierpinski_system(in.system->L, S);
    return verdict_outcome(
        initiality_check(*in.system, legs_to_S(*in.system, S, sier), in.probes, cfg.candidate_cap),
        "initiality");
  };
  s.negative = [](const GenConfig& cfg) {
    // The empty source on a two-point subsystem of S, probed by S itself.
    const AlgebraPtr L = config_L(cfg);
    const AffineSystem sier = sierpinski_system(L);
    const AffineSystem two = restrict_system(sier, {0, sier.size() - 1});
    const bool flagged = !initiality_check(two, {}, {sier}, cfg.candidate_cap).holds;
    return std::pair{flagged, std::string("empty source on a two-point system")};
  };
  return s;
}

// --- For T0 systems the morphisms into S form a mono-source ---------------

inline Suite prop5_suite() {
  Suite s;
  s.make = [](const GenConfig& cfg, Rng& rng) {
    Instance in;
    in.system = gen_system(cfg, rng, Stratum::t0);
    in.probes = gen_probes(cfg, rng);
    return in;
  };
  s.check = [](const GenConfig& cfg, const Instance& in, json&) {
    const FreeOnOne S = finite_S(cfg);
    const AffineSystem sier = sierpinski_system(in.system->L, S);
    if (!is_t0(*in.system)) return Outcome::ok();  // only T0 systems are in scope
    return verdict_outcome(
        mono_source_check(*in.system, legs_to_S(*in.system, S, sier), in.probes, cfg.candidate_cap),
        "mono-source");
  };
  s.negative = [](const GenConfig& cfg) {
    const AlgebraPtr L = config_L(cfg);
    const FreeOnOne S = free_on_one(L->variety());
    const AffineSystem sier = sierpinski_system(L, S);
    const AffineSystem dbl = doubled_sierpinski(L);
    const AffineSystem one = restrict_system(sier, {sier.size() - 1});
    const bool flagged = !mono_source_check(dbl, legs_to_S(dbl, S, sier), {one}).holds;
    return std::pair{flagged, std::string("S with a doubled point")};
  };
  return s;
}

// --- T0 iff embeddable into a power of S ----------------------------------

inline Suite thm2_suite() {
  Suite s;
  s.make = [](const GenConfig& cfg, Rng& rng) {
    Instance in;
    in.system = gen_system(cfg, rng, uniform(rng, 0, 1) ? Stratum::t0 : Stratum::any);
    in.probes = gen_probes(cfg, rng);
    return in;
  };
  s.check = [](const GenConfig& cfg, const Instance& in, json& extra) {
    const AffineSystem& sys = *in.system;
    const FreeOnOne S = finite_S(cfg);
    const AffineSystem sier = sierpinski_system(sys.L, S);
    const bool t0 = is_t0(sys).holds;
    // The canonical morphism is initial iff its composites with the
    // projections, which are the morphisms into S, form an initial source.
    const auto legs = legs_to_S(sys, S, sier);
    const Verdict init = initiality_check(sys, legs, in.probes, cfg.candidate_cap);
    bool materialize = cfg.materialize_powers;
    if (materialize && cfg.variety == Variety::frame && sys.A->size() > 4) materialize = false;
    CanonicalToPower c;
    try {
      c = canonical_to_power(sys, S, materialize);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::budget_exceeded) throw;
      c = canonical_to_power(sys, S, false);
    }
    if (c.phi_surjective_scan && *c.phi_surjective_scan != c.phi_surjective)
      return Outcome::fail("lazy and scanned surjectivity disagree");
    if (c.materialized) {
      const auto& mp = *c.materialized;
      if (auto v = validate_morphism(sys, mp.power->system(), mp.morphism); !v)
        return verdict_outcome(v, "materialized canonical morphism");
      const SourceLeg single{mp.morphism, &mp.power->system()};
      const Verdict init2 = initiality_check(sys, {single}, in.probes, cfg.candidate_cap);
      if (init2.holds != init.holds) return Outcome::fail("initiality of the power and of its legs disagree");
      extra["materialized"] = extra.value("materialized", 0) + 1;
    }
    const bool embeds = c.f_injective && c.phi_surjective && init.holds;
    if (t0 != embeds) {
      return Outcome::fail(std::string("T0 is ") + (t0 ? "true" : "false") + " but embedding is " +
                           (embeds ? "true" : "false"));
    }
    extra[t0 ? "t0_instances" : "non_t0_instances"] = extra.value(t0 ? "t0_instances" : "non_t0_instances", 0) + 1;
    return Outcome::ok();
  };
  s.negative = [](const GenConfig& cfg) {
    const AlgebraPtr L = config_L(cfg);
    const FreeOnOne S = free_on_one(L->variety());
    const auto c = canonical_to_power(doubled_sierpinski(L), S, false);
    return std::pair{!c.f_injective, std::string("S with a doubled point is not embedded")};
  };
  return s;
}

// --- M-injective objects are the retracts of powers of S ------------------

/// Negative control: a non-T0 target C where an extension cannot exist.
inline bool non_t0_target_blocks_extension(const AlgebraPtr& L, std::uint64_t cap) {
  const FreeOnOne S = free_on_one(L->variety());
  const AffineSystem sier = sierpinski_system(L, S);
  const Hom top_point = extend(S, L, L->top());
  std::vector<Fn> kappa(S.algebra->size(), Fn(2));
  for (Elem a = 0; a < kappa.size(); ++a) kappa[a] = Fn(2, top_point.map[a]);
  const AffineSystem C = validate_system(L, {"u", "v"}, S.algebra, kappa);
  const std::size_t top = L->top();
  const AffineSystem s1 = restrict_system(sier, {top});
  const SystemMorphism m = inclusion(sier, {top});
  const SystemMorphism f{{0}, identity_hom(S.algebra)};
  if (!validate_morphism(s1, C, f) || !validate_morphism(s1, sier, m)) return false;
  return !minjective_search(sier, m, f, C, InjectiveTarget::general, S, nullptr, cap).found;
}

inline Suite thm3_suite() {
  Suite s;
  s.make = [](const GenConfig& cfg, Rng& rng) {
    GenConfig g = cfg;
    g.max_points = std::min<std::size_t>(cfg.max_points, 3);
    g.max_algebra = std::min<std::size_t>(cfg.max_algebra, 5);
    Instance in;
    // Empty systems contribute nothing to the M-pool; redraw them.
    for (std::size_t attempt = 0; attempt < cfg.max_rejections; ++attempt) {
      in.system = gen_system(g, rng, Stratum::t0);
      if (in.system->size() > 0) break;
    }
    in.keep = random_subset(rng, in.system->size(), true);
    in.image_kind = uniform(rng, 0, 1) == 1;
    return in;
  };
  s.check = [](const GenConfig& cfg, const Instance& in, json& extra) {
    const FreeOnOne S = finite_S(cfg);
    const AffineSystem& s2 = *in.system;
    if (s2.size() == 0) return Outcome::ok();
    AffineSystem s1;
    SystemMorphism m;
    if (in.image_kind) {
      std::tie(s1, m) = image_subsystem(s2, in.keep);
    } else {
      s1 = restrict_system(s2, in.keep);
      m = inclusion(s2, in.keep);
    }
    if (auto v = validate_morphism(s1, s2, m); !v) return verdict_outcome(v, "pool morphism");
    if (!is_mono(s1, s2, m).in_M()) return Outcome::fail("generated pool morphism is not in M");
    extra["m_pool"] = extra.value("m_pool", 0) + 1;
    // Target S: every morphism into S extends, following the recipe.
    const AffineSystem sier = sierpinski_system(s2.L, S);
    std::size_t searches = 0;
    for (const auto& f : morphisms_to_S(s1, S)) {
      const auto r = minjective_search(s2, m, f, sier, InjectiveTarget::sierpinski, S, nullptr, cfg.candidate_cap);
      ++searches;
      if (!r.found) return Outcome::fail("no extension into S");
      if (!r.recipe_element || !r.recipe_ok) return Outcome::fail("extension into S misses the recipe element");
      // The recipe element's own morphism is an extension.
      const SystemMorphism g{std::vector<std::size_t>(s2.kappa[*r.recipe_element].begin(), s2.kappa[*r.recipe_element].end()),
                             extend(S, s2.A, *r.recipe_element)};
      if (!(compose(g, m) == f)) return Outcome::fail("recipe morphism does not extend f");
    }
    // Targets S^I, I = 1, 2.
    for (std::size_t I = 1; I <= 2; ++I) {
      const auto power = power_of_S(s2.L, S, I);
      const auto to_s = morphisms_to_S(s1, S);
      std::vector<std::size_t> idx(I, 0);
      while (!to_s.empty()) {
        std::vector<SystemMorphism> legs;
        for (auto i : idx) legs.push_back(to_s[i]);
        const SystemMorphism f = power->product->pair(s1, legs);
        const auto r = minjective_search(s2, m, f, power->system(), InjectiveTarget::power_of_sierpinski, S,
                                         power->product.get(), cfg.candidate_cap);
        ++searches;
        if (!r.found) return Outcome::fail("no extension into S^" + std::to_string(I));
        std::size_t j = 0;
        while (j < I && ++idx[j] == to_s.size()) idx[j++] = 0;
        if (j == I) break;
      }
    }
    // Retracts of S and S^2.
    for (std::size_t I = 1; I <= 2; ++I) {
      const auto power = power_of_S(s2.L, S, I);
      for (const auto& rt : retracts_of_power(*power, cfg.candidate_cap)) {
        for (const auto& f : enumerate_morphisms(s1, rt.R, cfg.candidate_cap)) {
          const auto r = minjective_search(s2, m, f, rt.R, InjectiveTarget::general, S, nullptr, cfg.candidate_cap);
          ++searches;
          if (!r.found) return Outcome::fail("retract of S^" + std::to_string(I) + " lacks an extension");
        }
      }
    }
    extra["searches"] = extra.value("searches", 0) + searches;
    return Outcome::ok();
  };
  s.fixed = [](const GenConfig& cfg, json& extra) {
    // Retracts of S and S^2 are genuine retracts, and each T0 one is
    // recovered as a retract of its canonical power by extension search.
    std::vector<Outcome> out;
    const AlgebraPtr L = config_L(cfg);
    const FreeOnOne S = finite_S(cfg);
    std::size_t retracts = 0;
    std::size_t recovered = 0;
    for (std::size_t I = 1; I <= 2; ++I) {
      const auto power = power_of_S(L, S, I);
      for (const auto& rt : retracts_of_power(*power, cfg.candidate_cap)) {
        ++retracts;
        const AffineSystem& P = power->system();
        if (!validate_morphism(P, rt.R, rt.r) || !validate_morphism(rt.R, P, rt.s) ||
            !(compose(rt.r, rt.s) == identity_morphism(rt.R))) {
          out.push_back(Outcome::fail("constructed retract is not a retract"));
          continue;
        }
        if (!is_t0(rt.R)) continue;
        CanonicalToPower c;
        try {
          c = canonical_to_power(rt.R, S, true);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::budget_exceeded) throw;
          continue;  // the power's coproduct is too large to materialize
        }
        const auto& mp = *c.materialized;
        if (!is_mono(rt.R, mp.power->system(), mp.morphism).in_M()) {
          out.push_back(Outcome::fail("canonical morphism of a retract is not in M"));
          continue;
        }
        const auto r = minjective_search(mp.power->system(), mp.morphism, identity_morphism(rt.R), rt.R,
                                         InjectiveTarget::general, S, nullptr, cfg.candidate_cap);
        if (!r.found) {
          out.push_back(Outcome::fail("retraction onto an M-injective retract not found"));
          continue;
        }
        ++recovered;
        out.push_back(Outcome::ok());
      }
    }
    extra["retracts"] = retracts;
    extra["retractions_recovered"] = recovered;
    return out;
  };
  s.negative = [](const GenConfig& cfg) {
    return std::pair{non_t0_target_blocks_extension(config_L(cfg), cfg.candidate_cap),
                     std::string("non-T0 constant target blocks an extension")};
  };
  return s;
}

// --- Sober iff soberly embedded into a power of S -------------------------

/// Every subsystem of S^I on a subset of its points with a sober-mono
/// inclusion must be sober. Returns failures.
inline std::vector<Outcome> sober_mono_converse(const AlgebraPtr& L, const FreeOnOne& S, std::size_t max_I,
                                          std::uint64_t cap, json& extra) {
  std::vector<Outcome> out;
  std::size_t sober_monos = 0;
  for (std::size_t I = 1; I <= max_I; ++I) {
    const auto power = power_of_S(L, S, I);
    const AffineSystem& P = power->system();
    if (P.size() > 12) continue;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << P.size()); ++mask) {
      std::vector<std::size_t> keep;
      for (std::size_t x = 0; x < P.size(); ++x)
        if (mask & (std::uint64_t{1} << x)) keep.push_back(x);
      // The subsystem with the full algebra, and E of the subspace.
      std::vector<std::pair<AffineSystem, SystemMorphism>> subs;
      subs.emplace_back(restrict_system(P, keep), inclusion(P, keep));
      subs.push_back(image_subsystem(P, keep));
      for (const auto& [sub, m] : subs) {
        if (!is_mono(sub, P, m).mono() || !is_sober_mono(sub, P, m, cap)) continue;
        ++sober_monos;
        out.push_back(is_sober(sub, cap).sober() ? Outcome::ok()
                                                 : Outcome::fail("sober-mono into S^" + std::to_string(I) +
                                                                 " with a non-sober source"));
      }
    }
  }
  extra["sober_monos_into_powers"] = sober_monos;
  return out;
}

inline Suite thm5_suite() {
  Suite s;
  s.make = [](const GenConfig& cfg, Rng& rng) {
    Instance in;
    in.system = gen_system(cfg, rng, Stratum::sober);
    return in;
  };
  s.check = [](const GenConfig& cfg, const Instance& in, json& extra) {
    const FreeOnOne S = finite_S(cfg);
    const AffineSystem& sys = *in.system;
    const bool sober = is_sober(sys, cfg.candidate_cap).sober();
    const auto c = canonical_to_power(sys, S, false);
    const Verdict lazy = is_sober_mono_lazy(sys, S, c, cfg.candidate_cap);
    extra["max_algebra_seen"] = std::max<std::size_t>(extra.value("max_algebra_seen", 0), sys.A->size());
    if (cfg.materialize_powers && !(cfg.variety == Variety::frame && sys.A->size() > 4)) {
      std::optional<CanonicalToPower> cm;
      try {
        cm = canonical_to_power(sys, S, true);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::budget_exceeded) throw;
      }
      if (cm) {
        const auto& mp = *cm->materialized;
        if (is_sober_mono(sys, mp.power->system(), mp.morphism, cfg.candidate_cap).holds != lazy.holds)
          return Outcome::fail("lazy and materialized sober-mono verdicts disagree");
        extra["materialized"] = extra.value("materialized", 0) + 1;
      }
    }
    const bool embedded = c.f_injective && c.phi_surjective && lazy.holds;
    if (sober != embedded) return Outcome::fail(sober ? "sober system not soberly embedded" : "non-sober system soberly embedded", lazy.witness);
    return Outcome::ok();
  };
  s.fixed = [](const GenConfig& cfg, json& extra) {
    return sober_mono_converse(config_L(cfg), finite_S(cfg), 2, cfg.candidate_cap, extra);
  };
  s.negative = [](const GenConfig& cfg) {
    const AlgebraPtr L = config_L(cfg);
    const FreeOnOne S = free_on_one(L->variety());
    const AffineSystem missing = restrict_system(sierpinski_system(L, S), {0});
    const auto c = canonical_to_power(missing, S, false);
    return std::pair{!is_sober_mono_lazy(missing, S, c).holds, std::string("S with a point removed")};
  };
  return s;
}

// --- Products preserve T0 and sobriety ------------------------------------

inline Suite product_suite(bool sober) {
  Suite s;
  s.make = [sober](const GenConfig& cfg, Rng& rng) {
    GenConfig g = cfg;
    g.max_points = std::min<std::size_t>(cfg.max_points, 3);
    g.max_algebra = std::min<std::size_t>(cfg.max_algebra, 4);
    Instance in;
    const std::size_t k = uniform(rng, 1, 2);
    for (std::size_t i = 0; i < k; ++i) in.systems.push_back(gen_system(g, rng, sober ? Stratum::sober : Stratum::t0));
    return in;
  };
  s.check = [sober](const GenConfig& cfg, const Instance& in, json&) {
    std::vector<const AffineSystem*> fs;
    for (const auto& f : in.systems) fs.push_back(&f);
    const ProductSystem P = product_systems(fs, config_L(cfg));
    for (std::size_t i = 0; i < fs.size(); ++i)
      if (auto v = validate_morphism(P.system, *fs[i], P.projections[i]); !v) return verdict_outcome(v, "projection");
    if (sober) {
      const auto v = is_sober(P.system, cfg.candidate_cap);
      return v.sober() ? Outcome::ok() : Outcome::fail("product is not sober", v.witness);
    }
    return verdict_outcome(is_t0(P.system), "product T0");
  };
  s.negative = [sober](const GenConfig& cfg) {
    const AlgebraPtr L = config_L(cfg);
    const AffineSystem sier = sierpinski_system(L);
    const AffineSystem bad = sober ? restrict_system(sier, {0}) : doubled_sierpinski(L);
    const ProductSystem P = product_systems({&bad, &sier}, L);
    const bool flagged = sober ? !is_sober(P.system).sober() : !is_t0(P.system).holds;
    return std::pair{flagged, std::string(sober ? "product with a non-sober factor" : "product with a non-T0 factor")};
  };
  return s;
}

// --- M-subobjects of T0 systems are T0; sober-mono subobjects
// of sober systems are sober -----------------------------------------------

inline Suite subobject_suite(bool sober) {
  Suite s;
  s.make = [sober](const GenConfig& cfg, Rng& rng) {
    GenConfig g = cfg;
    g.max_points = std::min<std::size_t>(cfg.max_points, 3);
    g.max_algebra = std::min<std::size_t>(cfg.max_algebra, 4);
    Instance in;
    in.system = gen_system(g, rng, sober ? Stratum::sober : Stratum::t0);
    std::vector<std::size_t> keep = random_subset(rng, in.system->size(), false);
    if (!keep.empty() && uniform(rng, 0, 2) == 0) keep.push_back(keep.front());
    in.keep = keep;
    in.image_kind = uniform(rng, 0, 1) == 1;
    in.probes = gen_probes(g, rng);
    return in;
  };
  s.check = [sober](const GenConfig& cfg, const Instance& in, json& extra) {
    const AffineSystem& s2 = *in.system;
    std::vector<AffineSystem> sources = in.probes;
    sources.push_back(in.image_kind ? image_subsystem(s2, in.keep).first : restrict_system(s2, in.keep));
    for (const auto& s1 : sources) {
      for (const auto& m : enumerate_morphisms(s1, s2, cfg.candidate_cap)) {
        if (!is_mono(s1, s2, m).mono()) continue;
        if (!sober) {
          extra["monos"] = extra.value("monos", 0) + 1;
          if (!is_t0(s1)) return Outcome::fail("mono into a T0 system with non-T0 source");
          continue;
        }
        if (!is_sober_mono(s1, s2, m, cfg.candidate_cap)) continue;
        extra["sober_monos"] = extra.value("sober_monos", 0) + 1;
        if (!is_sober(s1, cfg.candidate_cap).sober()) return Outcome::fail("sober-mono into a sober system with non-sober source");
      }
    }
    return Outcome::ok();
  };
  s.negative = [sober](const GenConfig& cfg) {
    const AlgebraPtr L = config_L(cfg);
    if (sober) {
      const AffineSystem sier = sierpinski_system(L);
      const AffineSystem sub = restrict_system(sier, {0});
      return std::pair{!is_sober_mono(sub, sier, inclusion(sier, {0})).holds,
                       std::string("inclusion missing a point is not sober-mono")};
    }
    // Without a T0 target a mono subobject can fail T0.
    const AffineSystem dbl = doubled_sierpinski(L);
    return std::pair{is_mono(dbl, dbl, identity_morphism(dbl)).mono() && !is_t0(dbl).holds,
                     std::string("identity on a non-T0 system")};
  };
  return s;
}

// --- E and Spat ------------------------------------------------------------

inline Suite thm1_suite() {
  Suite s;
  s.needs_finite_S = false;
  s.make = [](const GenConfig& cfg, Rng& rng) {
    GenConfig g = cfg;
    g.max_points = std::min<std::size_t>(cfg.max_points, 3);
    Instance in;
    in.space = gen_space(g, rng);
    in.system = gen_system(g, rng);
    return in;
  };
  s.check = [](const GenConfig& cfg, const Instance& in, json& extra) {
    const AffineSpace& sp = *in.space;
    const AffineSystem es = embed_E(sp);
    const AffineSpace back = spatialize(es);
    if (back.points != sp.points || back.opens != sp.opens) return Outcome::fail("Spat(E(s)) != s");
    // Morphism part on continuous endomaps.
    for (const auto& g : continuous_maps(sp, sp, cfg.candidate_cap)) {
      const SystemMorphism eg = embed_E(sp, sp, es.A, es.A, g);
      if (!validate_morphism(es, es, eg)) return Outcome::fail("E(g) is not a morphism");
      if (eg.f != g) return Outcome::fail("Spat(E(g)) != g");
    }
    const auto rep = adjunction_check(sp, *in.system, cfg.candidate_cap);
    extra["pairs"] = extra.value("pairs", 0) + 1;
    extra["morphisms_matched"] = extra.value("morphisms_matched", 0) + rep.system_side;
    if (!rep.ok()) return Outcome::fail("adjunction: " + rep.detail);
    return Outcome::ok();
  };
  s.negative = [](const GenConfig& cfg) {
    // tau generated by [hi, hi, lo]; swapping the last two points pulls it
    // back to [hi, lo, hi], which is not open. The set variety has no top.
    const AlgebraPtr L = config_L(cfg);
    const Elem hi = L->variety() == Variety::set ? static_cast<Elem>(L->size() - 1) : L->top();
    const Elem lo = L->variety() == Variety::set ? 0 : L->bottom();
    const AffineSpace sp = validate_space(L, {"x0", "x1", "x2"}, {Fn{hi, hi, lo}}, true);
    const AlgebraPtr tau = opens_algebra(sp);
    bool flagged = false;
    try {
      embed_E(sp, sp, tau, tau, std::vector<std::size_t>{0, 2, 1});
    } catch (const Error& e) {
      flagged = e.kind() == ErrorKind::not_continuous;
    }
    return std::pair{flagged, std::string("non-continuous map rejected by E")};
  };
  return s;
}

// --- A space is T0 iff it embeds into a power of the Sierpinski
// space --------------------------------------------------------------------

inline Suite prop21_suite() {
  Suite s;
  s.needs_finite_S = false;
  s.make = [](const GenConfig& cfg, Rng& rng) {
    Instance in;
    in.space = gen_space(cfg, rng);
    return in;
  };
  s.check = [](const GenConfig&, const Instance& in, json& extra) {
    const bool t0 = is_t0_space(*in.space).holds;
    const auto e = canonical_space_embedding(*in.space);
    extra[t0 ? "t0_spaces" : "non_t0_spaces"] = extra.value(t0 ? "t0_spaces" : "non_t0_spaces", 0) + 1;
    if (t0 != e.embedding()) return Outcome::fail("T0 and embedding verdicts differ");
    return Outcome::ok();
  };
  s.negative = [](const GenConfig& cfg) {
    const AlgebraPtr L = config_L(cfg);
    const AffineSpace sp = validate_space(L, {"x0", "x1"}, {Fn(2, L->top())}, true);
    return std::pair{!canonical_space_embedding(sp).embedding(), std::string("indiscrete two-point space")};
  };
  return s;
}

// --- The Sierpinski space versus the Sierpinski system --------------------

inline Suite theta_suite(bool cor2) {
  Suite s;
  s.needs_finite_S = false;
  s.make = [](const GenConfig& cfg, Rng& rng) {
    Instance in;
    in.algebras.push_back(config_L(cfg));
    GenConfig g = cfg;
    for (std::size_t attempt = 0; attempt < cfg.max_rejections; ++attempt) {
      AlgebraPtr A = gen_algebra(g, rng);
      if (A->size() >= 2) {
        in.algebras.push_back(A);
        break;
      }
    }
    return in;
  };
  s.check = [cor2](const GenConfig&, const Instance& in, json& extra) {
    for (const auto& L : in.algebras) {
      const ThetaComparison t = theta_comparison(L);
      json row{{"L_size", L->size()}, {"iso", t.is_iso}, {"theta_morphism", t.theta_morphism}};
      if (t.non_injective_witness) {
        std::vector<std::uint32_t> a1 = t.non_injective_witness->first.values();
        std::vector<std::uint32_t> a2 = t.non_injective_witness->second.values();
        row["witness"] = json{{"A1", a1}, {"A2", a2}};
      }
      extra["table"].push_back(row);
      if (!t.theta_morphism) return Outcome::fail("(id, theta) is not a morphism");
      if (cor2 && !t.is_iso) {
        return Outcome::fail("theta is not an isomorphism", row.value("witness", json(nullptr)));
      }
    }
    return Outcome::ok();
  };
  s.negative = [](const GenConfig& cfg) {
    const AlgebraPtr L = config_L(cfg);
    const FreeOnOne S = free_on_one(L->variety());
    if (S.symbolic()) {
      const QuantaleSierpinski qs{L};
      return std::pair{qs.kappa(FinNatSet{1}) != qs.kappa(FinNatSet{}),
                       std::string("distinct free elements with distinct evaluations")};
    }
    const AffineSpace sp = sierpinski_space(L);
    const AffineSystem es = embed_E(sp);
    const AffineSystem sier = sierpinski_system(L, S);
    const Elem id_index = static_cast<Elem>(sp.index_of_open(identity_fn(L->size())));
    const SystemMorphism m{std::vector<std::size_t>(L->size(), 0), extend(S, es.A, id_index)};
    return std::pair{!validate_morphism(es, sier, m).holds, std::string("constant map paired with theta")};
  };
  return s;
}

// --- E takes embeddings to monomorphisms ---------------------------------

inline Suite cor1_suite() {
  Suite s;
  s.needs_finite_S = false;
  s.make = [](const GenConfig& cfg, Rng& rng) {
    Instance in;
    in.space = gen_space(cfg, rng);
    in.keep = random_subset(rng, in.space->size(), true);
    return in;
  };
  s.check = [](const GenConfig&, const Instance& in, json& extra) {
    const AffineSpace& s2 = *in.space;
    // Subspace on `keep` with the initial structure of the inclusion.
    std::vector<std::string> names;
    for (auto x : in.keep) names.push_back(s2.points[x]);
    const AffineSpace s1 = initial_structure(s2.L, names, {ConeLeg{in.keep, &s2}});
    const bool injective = std::set<std::size_t>(in.keep.begin(), in.keep.end()).size() == in.keep.size();
    const bool initial = initial_structure(s2.L, names, {ConeLeg{in.keep, &s2}}).opens == s1.opens;
    if (!injective || !initial) return Outcome::fail("generated subspace inclusion is not an embedding");
    const AffineSystem e1 = embed_E(s1);
    const AffineSystem e2 = embed_E(s2);
    const SystemMorphism ef = embed_E(s1, s2, e1.A, e2.A, in.keep);
    if (auto v = validate_morphism(e1, e2, ef); !v) return verdict_outcome(v, "E(f)");
    extra["embeddings"] = extra.value("embeddings", 0) + 1;
    if (!is_mono(e1, e2, ef).mono()) return Outcome::fail("E of an embedding is not mono");
    return Outcome::ok();
  };
  s.negative = [](const GenConfig& cfg) {
    const AlgebraPtr L = config_L(cfg);
    const AffineSpace sp = validate_space(L, {"x0", "x1"}, {Fn(2, L->top())}, true);
    const AffineSystem e = embed_E(sp);
    const std::vector<std::size_t> constant(sp.size(), 0);
    const SystemMorphism ef = embed_E(sp, sp, e.A, e.A, constant);
    return std::pair{!is_mono(e, e, ef).mono(), std::string("constant map is not mono")};
  };
  return s;
}

// --- Coproduct universal property -------------------------------------------

inline Suite coprod_suite() {
  Suite s;
  s.needs_finite_S = false;
  s.make = [](const GenConfig& cfg, Rng& rng) {
    GenConfig g = cfg;
    g.max_algebra = std::min<std::size_t>(cfg.max_algebra, 4);
    Instance in;
    const std::size_t k = uniform(rng, 1, 3);
    for (std::size_t i = 0; i < k; ++i) in.algebras.push_back(gen_algebra(g, rng));
    g.max_algebra = std::min<std::size_t>(cfg.max_algebra, 5);
    for (std::size_t i = 0; i < 2; ++i) in.targets.push_back(gen_algebra(g, rng));
    return in;
  };
  s.check = [](const GenConfig& cfg, const Instance& in, json& extra) {
    if (cfg.variety == Variety::uquant) throw Error(ErrorKind::unsupported_variety, "uquant coproducts");
    const CoproductResult C = coproduct(cfg.variety, in.algebras);
    const CoproductAudit a = verify_coproduct_universal(C, in.targets, cfg.candidate_cap);
    extra["cocones"] = extra.value("cocones", 0) + a.cocones_checked;
    if (!a.ok) return Outcome::fail(a.failures.front());
    return Outcome::ok();
  };
  s.negative = [](const GenConfig& cfg) {
    if (cfg.variety == Variety::uquant) return std::pair{false, std::string("unsupported")};
    // Two equal factors with enough homomorphisms into the target that some
    // cocone has distinct legs; swapping the injections must be caught.
    AlgebraPtr A;
    switch (cfg.variety) {
      case Variety::set: A = discrete_set({"0", "1"}); break;
      case Variety::cbalg: A = boolean_algebra(2); break;
      default: A = chain(cfg.variety, {"0", "1", "2"}); break;
    }
    CoproductResult C = coproduct(cfg.variety, {A, A});
    std::swap(C.injections[0].map, C.injections[1].map);
    return std::pair{!verify_coproduct_universal(C, {A}).ok, std::string("swapped injections")};
  };
  return s;
}

// --- The free unital quantale on one generator ---------------------------

inline FinNatSet random_finnat(Rng& rng, std::uint32_t max_value, std::size_t max_size) {
  std::vector<std::uint32_t> xs;
  const std::size_t n = uniform(rng, 0, max_size);
  for (std::size_t i = 0; i < n; ++i) xs.push_back(static_cast<std::uint32_t>(uniform(rng, 0, max_value)));
  return FinNatSet(std::move(xs));
}

inline constexpr std::size_t kFuzzPerInstance = 2500;

inline Suite example4_suite() {
  Suite s;
  s.needs_finite_S = false;
  s.make = [](const GenConfig& cfg, Rng& rng) {
    if (cfg.variety != Variety::uquant) throw Error(ErrorKind::variety_mismatch, "example4 runs over uquant");
    Instance in;
    std::vector<AlgebraPtr> integral;
    for (auto& q : quantale_catalog())
      if (q->is_integral()) integral.push_back(q);
    in.algebras.push_back(config_L(cfg));
    in.algebras.push_back(integral[uniform(rng, 0, integral.size() - 1)]);
    in.keep.push_back(static_cast<std::size_t>(rng()));  // fuzz seed
    return in;
  };
  s.check = [](const GenConfig&, const Instance& in, json& extra) {
    for (const auto& L : in.algebras) {
      if (!L->is_integral()) continue;
      // All subsets of {0..6}; evaluation throws on a shortcut mismatch.
      for (std::uint32_t mask = 0; mask < (1u << 7); ++mask) {
        std::vector<std::uint32_t> xs;
        for (std::uint32_t n = 0; n < 7; ++n)
          if (mask & (1u << n)) xs.push_back(n);
        for (Elem a = 0; a < L->size(); ++a) eval_free_quantale_extension(*L, a, FinNatSet(xs));
      }
      extra["formula_cases"] = extra.value("formula_cases", 0) + 128 * L->size();
    }
    Rng rng(in.keep.front());
    const FinNatSet unit{0};
    const FinNatSet empty;
    const AlgebraPtr& L = in.algebras.front();
    for (std::size_t i = 0; i < kFuzzPerInstance; ++i) {
      const FinNatSet a = random_finnat(rng, 6, 4);
      const FinNatSet b = random_finnat(rng, 6, 4);
      const FinNatSet c = random_finnat(rng, 6, 4);
      auto fail = [&](const std::string& law) {
        return Outcome::fail("Minkowski law fails: " + law, json{a.str(), b.str(), c.str()});
      };
      if (minkowski_mul(a, unit) != a || minkowski_mul(unit, a) != a) return fail("unit");
      if (minkowski_mul(a, empty) != empty || minkowski_mul(empty, a) != empty) return fail("absorption");
      if (minkowski_mul(a, b) != minkowski_mul(b, a)) return fail("commutativity");
      if (minkowski_mul(minkowski_mul(a, b), c) != minkowski_mul(a, minkowski_mul(b, c))) return fail("associativity");
      if (minkowski_mul(a, set_union(b, c)) != set_union(minkowski_mul(a, b), minkowski_mul(a, c)))
        return fail("distributivity");
      // Evaluation is a unital-quantale map.
      const Elem g = static_cast<Elem>(uniform(rng, 0, L->size() - 1));
      const QuantaleEvaluator ev{L, g};
      if (ev(set_union(a, b)) != L->join(ev(a), ev(b))) return fail("evaluation preserves joins");
      if (ev(minkowski_mul(a, b)) != L->tensor(ev(a), ev(b))) return fail("evaluation preserves tensor");
      if (ev(unit) != L->unit() || ev(FinNatSet{1}) != g) return fail("evaluation preserves unit and generator");
    }
    extra["fuzz_cases"] = extra.value("fuzz_cases", 0) + kFuzzPerInstance;
    return Outcome::ok();
  };
  s.negative = [](const GenConfig&) {
    // A wrong closed form (largest exponent instead of smallest) is caught.
    const AlgebraPtr L = lukasiewicz_chain(3);
    const Elem half = 1;
    const FinNatSet s{1, 2};
    const Elem wrong = tensor_power(*L, half, 2);
    return std::pair{wrong != eval_free_quantale_extension(*L, half, s), std::string("a^max shortcut")};
  };
  return s;
}

inline Suite suite_by_id(const std::string& id) {
  if (id == "prop2") return prop2_suite();
  if (id == "prop3") return prop3_suite();
  if (id == "prop5") return prop5_suite();
  if (id == "thm1") return thm1_suite();
  if (id == "thm2") return thm2_suite();
  if (id == "thm3") return thm3_suite();
  if (id == "thm5") return thm5_suite();
  if (id == "prop9") return product_suite(false);
  if (id == "prop18") return product_suite(true);
  if (id == "prop10") return subobject_suite(false);
  if (id == "prop20") return subobject_suite(true);
  if (id == "prop21") return prop21_suite();
  if (id == "prop22") return theta_suite(false);
  if (id == "cor1") return cor1_suite();
  if (id == "cor2") return theta_suite(true);
  if (id == "coprodUP") return coprod_suite();
  if (id == "example4") return example4_suite();
  throw Error(ErrorKind::schema, "unknown suite '" + id + "'");
}

/// Drops points from the instance's system while the check keeps failing.
inline Instance shrink(const Suite& suite, const GenConfig& cfg, Instance in) {
  if (!in.system) return in;
  bool progress = true;
  while (progress && in.system->size() > 0) {
    progress = false;
    for (std::size_t drop = 0; drop < in.system->size(); ++drop) {
      std::vector<std::size_t> keep;
      for (std::size_t x = 0; x < in.system->size(); ++x)
        if (x != drop) keep.push_back(x);
      Instance smaller = in;
      smaller.system = restrict_system(*in.system, keep);
      if (!smaller.keep.empty()) {
        std::vector<std::size_t> k2;
        for (auto x : in.keep)
          if (x != drop) k2.push_back(x > drop ? x - 1 : x);
        smaller.keep = k2;
      }
      json scratch = json::object();
      try {
        if (!suite.check(cfg, smaller, scratch).pass) {
          in = std::move(smaller);
          progress = true;
          break;
        }
      } catch (const Error&) {
        // A shrink step that errors out is not a failure of the same suite.
      }
    }
  }
  return in;
}

inline json counterexample_json(const Instance& in) {
  json j = json::object();
  if (in.system) j["system"] = io::envelope("system", io::system_to_json(*in.system));
  if (in.space) j["space"] = io::envelope("space", io::space_to_json(*in.space));
  for (const auto& s : in.systems) j["systems"].push_back(io::envelope("system", io::system_to_json(s)));
  for (const auto& a : in.algebras) j["algebras"].push_back(io::envelope("algebra", io::algebra_to_json(*a)));
  return j;
}

struct DeadlineGuard {
  explicit DeadlineGuard(const std::optional<std::chrono::milliseconds>& budget) {
    if (budget) budget_deadline = std::chrono::steady_clock::now() + *budget;
  }
  ~DeadlineGuard() { budget_deadline.reset(); }
  DeadlineGuard(const DeadlineGuard&) = delete;
  DeadlineGuard& operator=(const DeadlineGuard&) = delete;
};

}  // namespace detail

/// Runs one instance from its replay seed.
inline Outcome replay(const std::string& id, const GenConfig& cfg, std::uint64_t seed) {
  const Suite suite = detail::suite_by_id(id);
  Rng rng(seed);
  const Instance in = suite.make(cfg, rng);
  json scratch = json::object();
  return suite.check(cfg, in, scratch);
}

/// Instances run sequentially in index order; each has its own seed derived
/// from (cfg.seed, index), so a failure replays in isolation.
inline SuiteReport run_suite(const std::string& id, const GenConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const Suite suite = detail::suite_by_id(id);
  SuiteReport rep;
  rep.id = id;
  rep.variety = cfg.variety;
  rep.seed = cfg.seed;
  if (suite.needs_finite_S) detail::finite_S(cfg);
  config_L(cfg);
  for (std::size_t i = 0; i < cfg.instance_count; ++i) {
    const std::uint64_t seed = instance_seed(cfg.seed, i);
    ++rep.instances;
    try {
      detail::DeadlineGuard guard(cfg.instance_budget);
      Rng rng(seed);
      Instance in = suite.make(cfg, rng);
      const Outcome out = suite.check(cfg, in, rep.extra);
      if (out.pass) {
        ++rep.passes;
        continue;
      }
      in = detail::shrink(suite, cfg, std::move(in));
      rep.failures.push_back({i, seed, out.detail, out.witness, detail::counterexample_json(in)});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::budget_exceeded && e.kind() != ErrorKind::generation_exhausted) throw;
      rep.budget_notes.push_back("instance " + std::to_string(i) + " (seed " + std::to_string(seed) +
                                 "): " + e.what());
    }
  }
  if (suite.fixed) {
    for (const auto& out : suite.fixed(cfg, rep.extra)) {
      ++rep.instances;
      if (out.pass) ++rep.passes;
      else rep.failures.push_back({rep.instances - 1, cfg.seed, out.detail, out.witness, nullptr});
    }
  }
  const auto [flagged, what] = suite.negative(cfg);
  rep.negative_control_flagged = flagged;
  rep.negative_control = what;
  if (!flagged) {
    rep.failures.push_back({SIZE_MAX, cfg.seed, "negative control not flagged: " + what, nullptr, nullptr});
  }
  rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

inline json report_to_json(const SuiteReport& r) {
  json j;
  j["suite"] = r.id;
  j["variety"] = std::string(to_string(r.variety));
  j["seed"] = r.seed;
  j["instances"] = r.instances;
  j["passes"] = r.passes;
  j["failures"] = json::array();
  for (const auto& f : r.failures) {
    json fj{{"detail", f.detail}, {"seed", f.seed}, {"witness", f.witness}};
    if (f.instance != SIZE_MAX) fj["instance"] = f.instance;
    if (!f.counterexample.is_null()) fj["counterexample"] = f.counterexample;
    j["failures"].push_back(std::move(fj));
  }
  j["budget_notes"] = r.budget_notes;
  j["negative_control"] = {{"description", r.negative_control}, {"flagged", r.negative_control_flagged}};
  j["wall_ms"] = r.wall_ms;
  j["extra"] = r.extra;
  return j;
}

}  // namespace affine::verify

#endif
