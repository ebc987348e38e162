// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "affine/cli.hpp"
#include "affine/verify.hpp"

using namespace affine;
using namespace affine::verify;
using json = nlohmann::json;

namespace {

const std::vector<Variety> kFinite = {Variety::set, Variety::supsl, Variety::frame, Variety::cbalg};

struct Check {
  bool ok = true;
  std::ostringstream note;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      note << what;
    }
  }
};

std::string data(const std::string& name) { return std::string(AFFINE_DATA_DIR) + "/" + name; }

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string vname(Variety v) { return std::string(to_string(v)); }

SuiteReport run(const std::string& id, Variety v, std::size_t n, const std::function<void(GenConfig&)>& tweak = {}) {
  GenConfig cfg;
  cfg.variety = v;
  cfg.instance_count = n;
  cfg.seed = 2024;
  if (tweak) tweak(cfg);
  return run_suite(id, cfg);
}

// Suite passed every instance and flagged its negative control.
void require_clean(Check& c, const SuiteReport& r) {
  const std::string tag = r.id + "/" + vname(r.variety);
  c.require(r.failures.empty(), tag + ": " + (r.failures.empty() ? "" : r.failures.front().detail));
  c.require(r.budget_notes.empty(), tag + ": budget exceeded");
  c.require(r.passes == r.instances, tag + ": not every instance passed");
  c.require(r.negative_control_flagged, tag + ": negative control not flagged");
}

// ---------------------------------------------------------------------------

Check sierpinski_reconstruction() {
  Check c;
  const auto out = std::filesystem::temp_directory_path() / "acceptance-sierpinski.json";
  const std::string cli = AFFINE_CLI_PATH;
  c.require(shell(cli + " sierpinski --system --L " + data("two.json") + " > " + out.string()) == 0,
            "sierpinski --system failed");
  const json p = io::read_document(out.string()).at("payload");
  c.require(p.at("algebra").at("elements") == json({"bot", "c", "top"}), "S is not the 3-chain");
  c.require(p.at("algebra").at("le") == json::array({json::array({"bot", "c"}), json::array({"c", "top"})}),
            "S is not ordered bot < c < top");
  // kappa(a) as the set of points sent to 1.
  auto support = [&](const char* a) {
    std::set<std::string> s;
    for (const auto& [x, v] : p.at("kappa").at(a).items())
      if (v == "1") s.insert(x);
    return s;
  };
  c.require(support("bot").empty(), "kappa(bot) != {}");
  c.require(support("c") == std::set<std::string>{"1"}, "kappa(c) != {1}");
  c.require(support("top") == std::set<std::string>{"0", "1"}, "kappa(top) != {0,1}");
  c.require(shell(cli + " check t0 " + out.string() + " > /dev/null") == 0, "check t0 did not exit 0");
  c.require(shell(cli + " check sober " + out.string() + " > /dev/null") == 0, "check sober did not exit 0");
  std::filesystem::remove(out);
  return c;
}

Check prop2_count() {
  Check c;
  std::size_t total = 0;
  for (auto v : kFinite) {
    const auto r = run("prop2", v, 50);
    require_clean(c, r);
    total += r.passes;
  }
  // Independent restatement on a fresh pool: |Hom(sys, S)| from exhaustive
  // enumeration equals |A|, and each f is some kappa(a).
  Rng rng(7);
  for (auto v : kFinite) {
    GenConfig cfg;
    cfg.variety = v;
    const auto S = sierpinski_system(default_L(v));
    for (int i = 0; i < 50; ++i) {
      const auto sys = gen_system(cfg, rng);
      const auto ms = enumerate_morphisms(sys, S);
      c.require(ms.size() == sys.A->size(), vname(v) + ": hom count differs from |A|");
      for (const auto& m : ms) {
        bool found = false;
        for (Elem a = 0; a < sys.A->size() && !found; ++a)
          found = std::equal(m.f.begin(), m.f.end(), sys.kappa[a].begin()) &&
                  m.phi.map[free_on_one(v).generator] == a;
        c.require(found, vname(v) + ": morphism outside {(f_a, phi_a)}");
      }
    }
  }
  c.note << (c.ok ? std::to_string(total) + " suite instances, 200 direct" : "");
  return c;
}

Check thm2_both_directions() {
  Check c;
  for (auto v : kFinite) {
    const auto r = run("thm2", v, 50, [](GenConfig& g) {
      g.probe_points = 3;
      g.probe_algebra = 4;
    });
    require_clean(c, r);
    c.require(r.extra.value("t0_instances", 0) > 0 && r.extra.value("non_t0_instances", 0) > 0,
              vname(v) + ": pool lacks T0 or non-T0 instances");
    if (c.ok)
      c.note << vname(v) << " " << r.extra.value("t0_instances", 0) << "/" << r.extra.value("non_t0_instances", 0)
             << " ";
  }
  return c;
}

Check prop3_sierpinski_object() {
  Check c;
  for (auto v : kFinite) require_clean(c, run("prop3", v, 50));
  return c;
}

Check thm3_injectives() {
  Check c;
  for (auto v : kFinite) {
    const auto r = run("thm3", v, 40, [](GenConfig& g) {
      g.max_points = 3;
      g.max_algebra = 5;
    });
    require_clean(c, r);
    const int pool = r.extra.value("m_pool", 0);
    c.require(pool >= 30, vname(v) + ": M-pool has only " + std::to_string(pool) + " morphisms");
    c.require(r.extra.value("retracts", 0) > 0, vname(v) + ": no retracts constructed");
    if (c.ok) c.note << vname(v) << " pool " << pool << " retracts " << r.extra.value("retracts", 0) << " ";
  }
  return c;
}

Check thm5_sober_monos() {
  Check c;
  for (auto v : kFinite) {
    const auto r = run("thm5", v, 50, [v](GenConfig& g) {
      g.materialize_powers = false;
      if (v == Variety::frame) {
        g.max_algebra = 6;
        g.max_points = 6;
      }
    });
    require_clean(c, r);
    c.require(r.extra.value("materialized", 0) == 0, vname(v) + ": a power was materialized");
    c.require(r.extra.value("sober_monos_into_powers", 0) > 0, vname(v) + ": no sober monos into powers");
    if (v == Variety::frame)
      c.require(r.extra.value("max_algebra_seen", 0) == 6, "frame pool never reached |A| = 6");
  }
  return c;
}

Check cor2_table() {
  Check c;
  for (auto v : kFinite) {
    const auto t = theta_comparison(default_L(v));
    c.require(t.is_iso, vname(v) + ": theta not iso");
    c.require(t.theta_morphism, vname(v) + ": (id, theta) not a morphism");
  }
  std::size_t quantales = 0;
  for (const auto& L : quantale_catalog()) {
    bool idempotent = true;
    for (Elem a = 0; a < L->size(); ++a) idempotent = idempotent && L->tensor(a, a) == a;
    if (!L->is_integral() || idempotent) continue;
    ++quantales;
    const auto t = theta_comparison(L);
    c.require(!t.is_iso, "uquant: theta reported iso");
    c.require(t.non_injective_witness &&
                  t.non_injective_witness->first == FinNatSet{0, 1} && t.non_injective_witness->second == FinNatSet{0},
              "uquant: witness is not {0,1} vs {0}");
  }
  c.require(quantales >= 2, "too few non-idempotent integral quantales");
  // The suite itself refutes cor2 over Lukasiewicz-3 with the same witness.
  const auto r = run("cor2", Variety::uquant, 1, [](GenConfig& g) { g.L = lukasiewicz_chain(3); });
  c.require(r.refuted() && r.failures.front().witness == json({{"A1", {0, 1}}, {"A2", {0}}}),
            "cor2 suite over L3 not refuted with the expected witness");
  for (auto v : kFinite) require_clean(c, run("cor2", v, 5));
  return c;
}

Check thm1_adjunction() {
  Check c;
  for (auto v : {Variety::set, Variety::supsl, Variety::frame, Variety::cbalg, Variety::uquant}) {
    const auto r = run("thm1", v, 30);
    require_clean(c, r);
    c.require(r.extra.value("pairs", 0) >= 30, vname(v) + ": fewer than 30 pairs");
  }
  return c;
}

Check example4_formula() {
  Check c;
  std::size_t quantales = 0;
  bool has_l3 = false;
  for (const auto& L : quantale_catalog()) {
    if (!L->is_integral()) continue;
    ++quantales;
    has_l3 = has_l3 || (L->size() == 3 && L->tensor(1, 1) == 0);
    for (Elem a = 0; a < L->size(); ++a)
      for (std::uint32_t mask = 0; mask < (1u << 7); ++mask) {
        std::vector<std::uint32_t> xs;
        for (std::uint32_t n = 0; n < 7; ++n)
          if (mask & (1u << n)) xs.push_back(n);
        // Join of powers, and the three-case closed form, both written out here.
        Elem general = L->bottom();
        for (auto n : xs) {
          Elem p = L->unit();
          for (std::uint32_t i = 0; i < n; ++i) p = L->tensor(p, a);
          general = L->join(general, p);
        }
        Elem shortcut = L->bottom();
        if (!xs.empty()) {
          shortcut = L->unit();
          for (std::uint32_t i = 0; i < xs.front(); ++i) shortcut = L->tensor(shortcut, a);
        }
        c.require(general == shortcut, "closed form differs on " + FinNatSet(xs).str());
        c.require(eval_free_quantale_extension(*L, a, FinNatSet(xs)) == general, "library evaluation differs");
      }
  }
  c.require(quantales >= 3 && has_l3, "need three integral quantales including L3");
  const auto r = run("example4", Variety::uquant, 8);
  require_clean(c, r);
  c.require(r.extra.value("fuzz_cases", 0) >= 10000, "fewer than 10^4 fuzz cases");
  if (c.ok) c.note << quantales << " quantales, " << r.extra.value("fuzz_cases", 0) << " fuzz cases";
  return c;
}

Check coproduct_audits() {
  Check c;
  for (auto v : {Variety::supsl, Variety::frame, Variety::cbalg}) require_clean(c, run("coprodUP", v, 30));
  // Down-sets of the n-cube counted as monotone Boolean functions.
  auto monotone = [](unsigned n) {
    const unsigned pts = 1u << n;
    std::size_t count = 0;
    for (std::uint64_t t = 0; t < (1ull << pts); ++t) {
      bool ok = true;
      for (unsigned x = 0; x < pts && ok; ++x)
        for (unsigned y = 0; y < pts && ok; ++y)
          if ((x & y) == x && ((t >> x) & 1) && !((t >> y) & 1)) ok = false;
      count += ok;
    }
    return count;
  };
  const auto S = free_on_one(Variety::frame).algebra;
  const std::size_t expected[] = {6, 20, 168};
  for (unsigned n = 2; n <= 4; ++n) {
    const auto C = coproduct(Variety::frame, std::vector<AlgebraPtr>(n, S));
    c.require(C.algebra->size() == expected[n - 2], "coproduct of " + std::to_string(n) + " copies has " +
                                                        std::to_string(C.algebra->size()) + " elements");
    c.require(monotone(n) == expected[n - 2], "down-set oracle disagrees");
  }
  return c;
}

Check hom_oracle() {
  Check c;
  Rng rng(11);
  std::size_t pairs = 0;
  for (auto v : {Variety::set, Variety::supsl, Variety::frame, Variety::cbalg, Variety::uquant}) {
    GenConfig cfg;
    cfg.variety = v;
    cfg.max_algebra = 5;
    for (int i = 0; i < 40; ++i) {
      const auto A = gen_algebra(cfg, rng), B = gen_algebra(cfg, rng);
      c.require(enumerate_homs(A, B) == enumerate_homs_naive(A, B), vname(v) + ": pruned != naive");
      ++pairs;
    }
  }
  c.require(pairs >= 100, "fewer than 100 pairs");
  if (c.ok) c.note << pairs << " pairs";
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Check()> run;
  };
  // Limits are the per-criterion budgets, summed where a criterion runs
  // several varieties.
  const std::vector<Criterion> criteria = {
      {1, "Sierpinski reconstruction", 1, sierpinski_reconstruction},
      {2, "Hom into S has |A| elements", 240, prop2_count},
      {3, "T0 iff embedded in a power of S", 480, thm2_both_directions},
      {4, "S is a Sierpinski object", 60, prop3_sierpinski_object},
      {5, "M-injectives", 120, thm3_injectives},
      {6, "sober iff sober-mono into a power", 120, thm5_sober_monos},
      {7, "theta table", 10, cor2_table},
      {8, "E and Spat adjunction", 60, thm1_adjunction},
      {9, "free quantale formula", 10, example4_formula},
      {10, "coproduct audits and counts", 60, coproduct_audits},
      {11, "pruned hom enumeration", 60, hom_oracle},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Check c;
    try {
      c = cr.run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.note << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.ok && secs > cr.limit_s) {
      c.ok = false;
      c.note << " over the " << cr.limit_s << " s limit";
    }
    failed += !c.ok;
    std::printf("%s %2d %-36s %8.3f s  %s\n", c.ok ? "PASS" : "FAIL", cr.id, cr.name, secs, c.note.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
