#ifndef AFFINE_CLI_HPP
#define AFFINE_CLI_HPP

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "affine/io.hpp"
#include "affine/verify.hpp"

namespace affine::cli {

using json = nlohmann::json;

enum Exit : int { ok = 0, refuted = 1, input_error = 2, budget = 3 };

enum class Format { json, text };

namespace detail {

inline void print_text(std::ostream& out, const json& j, const std::string& prefix = "") {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (v.is_structured()) {
        out << prefix << k << ":\n";
        print_text(out, v, prefix + "  ");
      } else {
        out << prefix << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
      }
    }
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (v.is_structured()) {
        out << prefix << "-\n";
        print_text(out, v, prefix + "  ");
      } else {
        out << prefix << "- " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
      }
    }
  } else {
    out << prefix << j.dump() << "\n";
  }
}

inline void emit(std::ostream& out, Format fmt, const json& doc) {
  if (fmt == Format::json) {
    out << io::dump(doc);
  } else {
    print_text(out, doc.contains("payload") ? doc.at("payload") : doc);
  }
}

inline json report(const std::string& command, json body) {
  body["command"] = command;
  return io::envelope("report", std::move(body));
}

inline std::string doc_kind(const json& doc) {
  if (!doc.is_object() || !doc.contains("kind") || !doc.at("kind").is_string())
    throw Error(ErrorKind::schema, "missing field 'kind'");
  return doc.at("kind").get<std::string>();
}

inline AlgebraPtr load_algebra(const std::string& path) {
  return io::algebra_from_json(io::open_envelope(io::read_document(path), "algebra"));
}
inline AffineSystem load_system(const std::string& path) {
  return io::system_from_json(io::open_envelope(io::read_document(path), "system"));
}
inline AffineSpace load_space(const std::string& path) {
  return io::space_from_json(io::open_envelope(io::read_document(path), "space"));
}

/// A system, or E of a space.
inline AffineSystem load_system_or_space(const std::string& path) {
  const json doc = io::read_document(path);
  if (doc_kind(doc) == "space") return embed_E(io::space_from_json(io::open_envelope(doc, "space")));
  return io::system_from_json(io::open_envelope(doc, "system"));
}

inline json names_of(const std::vector<std::string>& w) { return json(w); }

}  // namespace detail

/// Runs one command; reports go to `out`, diagnostics to `err`.
inline int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite affine spaces and affine systems over a fixed algebra L"};
  app.require_subcommand(1);
  std::string format = "json";
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));

  int code = Exit::ok;
  auto fmt = [&] { return format == "text" ? Format::text : Format::json; };

  // validate FILE
  std::string validate_file;
  auto* validate = app.add_subcommand("validate", "Validate a document of any kind");
  validate->add_option("file", validate_file)->required();

  // points --algebra FILE --into FILE
  std::string points_algebra, points_into;
  auto* points = app.add_subcommand("points", "List the homomorphisms A -> L");
  points->add_option("--algebra", points_algebra)->required();
  points->add_option("--into", points_into)->required();

  // check {t0|sober} FILE
  std::string check_what, check_file;
  auto* check = app.add_subcommand("check", "Decide T0 or sobriety of a system (or of E of a space)");
  check->add_option("property", check_what)->required()->check(CLI::IsMember({"t0", "sober"}));
  check->add_option("file", check_file)->required();

  std::string spat_file;
  auto* spat = app.add_subcommand("spatialize", "Spat of a system");
  spat->add_option("file", spat_file)->required();

  std::string embed_file;
  auto* embed = app.add_subcommand("embed", "E of a space");
  embed->add_option("file", embed_file)->required();

  // sierpinski {--system|--space} --L FILE
  bool sier_system = false, sier_space = false;
  std::string sier_L;
  auto* sier = app.add_subcommand("sierpinski", "The Sierpinski system or space over L");
  auto* o_sys = sier->add_flag("--system", sier_system);
  auto* o_spc = sier->add_flag("--space", sier_space);
  o_sys->excludes(o_spc);
  sier->add_option("--L", sier_L)->required();

  std::vector<std::string> product_files;
  auto* product = app.add_subcommand("product", "Product of systems");
  product->add_option("files", product_files)->required();

  std::vector<std::string> homs_files;
  auto* homs = app.add_subcommand("homs", "All homomorphisms between two algebras");
  homs->add_option("files", homs_files)->required()->expected(2);

  std::vector<std::string> coprod_files;
  auto* coprod = app.add_subcommand("coproduct", "Coproduct of algebras");
  coprod->add_option("files", coprod_files)->required();

  std::string canon_file;
  bool canon_materialize = false;
  auto* canon = app.add_subcommand("canonical", "Canonical morphism into a power of the Sierpinski system");
  canon->add_option("file", canon_file)->required();
  canon->add_flag("--materialize-powers", canon_materialize);

  // verify SUITE ...
  std::string suite, variety_name = "frame", verify_L;
  std::uint64_t seed = 1;
  std::size_t instances = 50, max_points = 4, max_algebra = 6;
  bool verify_materialize = false;
  std::optional<std::uint64_t> replay_seed;
  auto* verify = app.add_subcommand("verify", "Run a property suite");
  verify->add_option("suite", suite)->required()->check(CLI::IsMember(verify::suite_ids()));
  verify->add_option("--seed", seed);
  verify->add_option("--variety", variety_name)->check(CLI::IsMember({"set", "supsl", "frame", "cbalg", "uquant"}));
  verify->add_option("--L", verify_L);
  verify->add_option("--instances", instances)->check(CLI::PositiveNumber);
  verify->add_option("--max-points", max_points)->check(CLI::PositiveNumber);
  verify->add_option("--max-algebra", max_algebra)->check(CLI::PositiveNumber);
  verify->add_flag("--materialize-powers", verify_materialize);
  verify->add_option("--replay", replay_seed, "Run the single instance with this seed");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Exit::ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return Exit::input_error;
  }

  try {
    if (*validate) {
      const json doc = io::read_document(validate_file);
      const std::string kind = detail::doc_kind(doc);
      json body{{"file", validate_file}, {"document_kind", kind}, {"valid", true}};
      if (kind == "algebra") {
        const auto A = io::algebra_from_json(io::open_envelope(doc, kind));
        body["variety"] = std::string(to_string(A->variety()));
        body["size"] = A->size();
      } else if (kind == "space") {
        const auto s = io::space_from_json(io::open_envelope(doc, kind));
        body["points"] = s.size();
        body["opens"] = s.opens.size();
      } else if (kind == "system") {
        const auto s = io::system_from_json(io::open_envelope(doc, kind));
        body["points"] = s.size();
        body["algebra_size"] = s.A->size();
      } else if (kind == "morphism") {
        const auto m = io::morphism_from_json(io::open_envelope(doc, kind));
        const Verdict v = validate_morphism(m.source, m.target, m.morphism);
        body["valid"] = v.holds;
        if (!v) {
          body["detail"] = v.detail;
          body["witness"] = v.witness;
          code = Exit::refuted;
        }
      } else if (kind == "report") {
        io::open_envelope(doc, kind);
      } else {
        throw Error(ErrorKind::schema, "unknown document kind '" + kind + "'");
      }
      detail::emit(out, fmt(), detail::report("validate", body));
    } else if (*points) {
      const auto A = detail::load_algebra(points_algebra);
      const auto L = detail::load_algebra(points_into);
      json list = json::array();
      for (const auto& p : pts(A, L)) list.push_back(io::hom_to_json(p));
      detail::emit(out, fmt(), detail::report("points", {{"count", list.size()}, {"points", list}}));
    } else if (*check) {
      const AffineSystem sys = detail::load_system_or_space(check_file);
      json body{{"property", check_what}};
      if (check_what == "t0") {
        const Verdict v = is_t0(sys);
        body["holds"] = v.holds;
        if (!v) {
          body["witness"] = v.witness;
          code = Exit::refuted;
        }
      } else {
        const SoberVerdict v = is_sober(sys);
        body["holds"] = v.sober();
        body["status"] = std::string(to_string(v.status));
        if (!v.sober()) {
          body["witness"] = v.witness;
          code = Exit::refuted;
        }
      }
      detail::emit(out, fmt(), detail::report("check", body));
    } else if (*spat) {
      detail::emit(out, fmt(), io::envelope("space", io::space_to_json(spatialize(detail::load_system(spat_file)))));
    } else if (*embed) {
      detail::emit(out, fmt(), io::envelope("system", io::system_to_json(embed_E(detail::load_space(embed_file)))));
    } else if (*sier) {
      const auto L = detail::load_algebra(sier_L);
      if (sier_space) {
        detail::emit(out, fmt(), io::envelope("space", io::space_to_json(sierpinski_space(L))));
      } else {
        if (L->variety() == Variety::uquant) {
          throw Error(ErrorKind::unsupported_variety,
                      "the unital-quantale Sierpinski system is infinite; only its evaluator is available");
        }
        detail::emit(out, fmt(), io::envelope("system", io::system_to_json(sierpinski_system(L))));
      }
    } else if (*product) {
      std::vector<AffineSystem> systems;
      for (const auto& f : product_files) systems.push_back(detail::load_system(f));
      std::vector<const AffineSystem*> fs;
      for (const auto& s : systems) {
        if (s.L->names() != systems.front().L->names() || s.L->variety() != systems.front().L->variety())
          throw Error(ErrorKind::variety_mismatch, "product factors must share L");
        fs.push_back(&s);
      }
      const ProductSystem P = product_systems(fs, systems.front().L);
      detail::emit(out, fmt(), io::envelope("system", io::system_to_json(P.system)));
    } else if (*homs) {
      const auto A = detail::load_algebra(homs_files[0]);
      const auto B = detail::load_algebra(homs_files[1]);
      json list = json::array();
      for (const auto& h : enumerate_homs(A, B)) list.push_back(io::hom_to_json(h));
      detail::emit(out, fmt(), detail::report("homs", {{"count", list.size()}, {"homs", list}}));
    } else if (*coprod) {
      std::vector<AlgebraPtr> factors;
      for (const auto& f : coprod_files) factors.push_back(detail::load_algebra(f));
      const CoproductResult C = coproduct(factors.front()->variety(), factors);
      detail::emit(out, fmt(), io::envelope("algebra", io::algebra_to_json(*C.algebra)));
    } else if (*canon) {
      const AffineSystem sys = detail::load_system(canon_file);
      const FreeOnOne S = free_on_one(sys.L->variety());
      if (S.symbolic()) throw Error(ErrorKind::unsupported_variety, "powers of the quantale Sierpinski system");
      const auto c = canonical_to_power(sys, S, canon_materialize);
      json images = json::object();
      for (std::size_t x = 0; x < sys.size(); ++x) images[sys.points[x]] = fn_name(*sys.L, c.images[x]);
      const bool t0 = is_t0(sys).holds;
      json body{{"index", sys.A->names()},
                {"images", images},
                {"f_injective", c.f_injective},
                {"phi_surjective", c.phi_surjective},
                {"t0", t0},
                {"in_M", c.f_injective && c.phi_surjective && t0},
                {"sober_mono", is_sober_mono_lazy(sys, S, c).holds},
                {"materialized", c.materialized != nullptr}};
      if (c.phi_surjective_scan) body["phi_surjective_scan"] = *c.phi_surjective_scan;
      detail::emit(out, fmt(), detail::report("canonical", body));
    } else if (*verify) {
      verify::GenConfig cfg;
      cfg.seed = seed;
      cfg.variety = *parse_variety(variety_name);
      cfg.L = verify_L.empty() ? verify::default_L(cfg.variety) : detail::load_algebra(verify_L);
      cfg.instance_count = instances;
      cfg.max_points = max_points;
      cfg.max_algebra = max_algebra;
      cfg.materialize_powers = verify_materialize;
      if (const char* ms = std::getenv("VERIFY_BUDGET_MS")) {
        const long v = std::strtol(ms, nullptr, 10);
        if (v > 0) cfg.instance_budget = std::chrono::milliseconds(v);
      }
      if (replay_seed) {
        const verify::Outcome o = verify::replay(suite, cfg, *replay_seed);
        detail::emit(out, fmt(), detail::report("verify", {{"suite", suite}, {"seed", *replay_seed},
                                                           {"pass", o.pass}, {"detail", o.detail},
                                                           {"witness", o.witness}}));
        return o.pass ? Exit::ok : Exit::refuted;
      }
      const verify::SuiteReport rep = verify::run_suite(suite, cfg);
      json body = verify::report_to_json(rep);
      detail::emit(out, fmt(), detail::report("verify", body));
      if (rep.refuted()) code = Exit::refuted;
      else if (rep.budget_exceeded()) code = Exit::budget;
    }
  } catch (const Error& e) {
    json body{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}, {"witness", e.witness()}};
    detail::emit(out, fmt(), detail::report("error", body));
    err << e.what() << "\n";
    return e.kind() == ErrorKind::budget_exceeded ? Exit::budget : Exit::input_error;
  }
  return code;
}

}  // namespace affine::cli

#endif
