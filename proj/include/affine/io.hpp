#ifndef AFFINE_IO_HPP
#define AFFINE_IO_HPP

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "affine/algebra.hpp"
#include "affine/space.hpp"
#include "affine/system.hpp"

// Documents are {"kind", "version": "1", "payload"}. Payloads name elements
// and points; indices never leave the process.

namespace affine::io {

using json = nlohmann::json;

inline constexpr const char* kVersion = "1";

namespace detail {

[[noreturn]] inline void schema(const std::string& msg) { throw Error(ErrorKind::schema, msg); }

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) schema(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline std::string str(const json& j, const std::string& what) {
  if (!j.is_string()) schema(what + " must be a string");
  return j.get<std::string>();
}

inline std::vector<std::string> names(const json& j, const std::string& what) {
  if (!j.is_array()) schema(what + " must be an array of names");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(str(e, what));
  std::vector<std::string> sorted = out;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) schema(what + " has duplicates");
  return out;
}

inline Elem elem(const FiniteAlgebra& A, const json& j, const std::string& what) {
  const std::string s = str(j, what);
  auto e = A.find(s);
  if (!e) schema(what + ": unknown element '" + s + "'");
  return *e;
}

inline std::size_t index_in(const std::vector<std::string>& names, const std::string& s,
                            const std::string& what) {
  auto it = std::find(names.begin(), names.end(), s);
  if (it == names.end()) schema(what + ": unknown name '" + s + "'");
  return static_cast<std::size_t>(it - names.begin());
}

// {point: element} over all points, in carrier order of `points`.
inline Fn point_map(const json& j, const std::vector<std::string>& points, const FiniteAlgebra& L,
                    const std::string& what) {
  if (!j.is_object()) schema(what + " must map point names to elements");
  if (j.size() != points.size()) schema(what + " must list every point exactly once");
  Fn f(points.size());
  for (std::size_t x = 0; x < points.size(); ++x) {
    if (!j.contains(points[x])) schema(what + " is missing point '" + points[x] + "'");
    f[x] = elem(L, j.at(points[x]), what);
  }
  return f;
}

inline json point_map_json(const Fn& f, const std::vector<std::string>& points,
                           const FiniteAlgebra& L) {
  json j = json::object();
  for (std::size_t x = 0; x < points.size(); ++x) j[points[x]] = L.name(f[x]);
  return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Envelope

inline json envelope(const std::string& kind, json payload) {
  return json{{"kind", kind}, {"version", kVersion}, {"payload", std::move(payload)}};
}

/// Checks kind and version before the payload is looked at.
inline const json& open_envelope(const json& doc, const std::string& kind) {
  const std::string k = detail::str(detail::field(doc, "kind"), "kind");
  if (k != kind) detail::schema("expected a '" + kind + "' document, got '" + k + "'");
  const std::string v = detail::str(detail::field(doc, "version"), "version");
  if (v != kVersion) detail::schema("unsupported version '" + v + "'");
  return detail::field(doc, "payload");
}

inline json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, e.what());
  }
}

/// Reads a file, or stdin for "-".
inline json read_document(const std::string& path) {
  std::stringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::parse, "cannot open '" + path + "'");
    ss << in.rdbuf();
  }
  return parse(ss.str());
}

/// Canonical text: sorted keys, two-space indent, trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Algebras

/// "le" is any generating relation; the loader takes its reflexive-transitive
/// closure.
inline AlgebraPtr algebra_from_json(const json& p) {
  const auto variety_name = detail::str(detail::field(p, "variety"), "variety");
  const auto variety = parse_variety(variety_name);
  if (!variety) detail::schema("unknown variety '" + variety_name + "'");
  auto names = detail::names(detail::field(p, "elements"), "elements");
  const std::size_t n = names.size();
  if (n == 0) detail::schema("elements must be non-empty");
  if (!is_ordered(*variety)) return share(FiniteAlgebra::validate(*variety, std::move(names)));
  std::vector<std::uint8_t> le(n * n, 0);
  if (p.contains("le")) {
    const json& rel = p.at("le");
    if (!rel.is_array()) detail::schema("le must be an array of pairs");
    for (const auto& pair : rel) {
      if (!pair.is_array() || pair.size() != 2) detail::schema("le entries must be pairs");
      const auto a = detail::index_in(names, detail::str(pair[0], "le"), "le");
      const auto b = detail::index_in(names, detail::str(pair[1], "le"), "le");
      le[a * n + b] = 1;
    }
  }
  le = reflexive_transitive_closure(std::move(le), n);
  std::vector<Elem> tensor;
  std::optional<Elem> unit;
  if (*variety == Variety::uquant) {
    const json& t = detail::field(p, "tensor");
    if (!t.is_object()) detail::schema("tensor must be a nested object");
    tensor.assign(n * n, 0);
    for (std::size_t a = 0; a < n; ++a) {
      const json& row = detail::field(t, names[a].c_str());
      for (std::size_t b = 0; b < n; ++b) {
        const auto v = detail::index_in(names, detail::str(detail::field(row, names[b].c_str()), "tensor"), "tensor");
        tensor[a * n + b] = static_cast<Elem>(v);
      }
    }
    unit = static_cast<Elem>(detail::index_in(names, detail::str(detail::field(p, "unit"), "unit"), "unit"));
  }
  return share(FiniteAlgebra::validate(*variety, std::move(names), std::move(le),
                                       std::move(tensor), unit));
}

/// Hasse pairs in carrier order, so saves are byte-stable.
inline json algebra_to_json(const FiniteAlgebra& A) {
  json p;
  p["variety"] = std::string(to_string(A.variety()));
  p["elements"] = A.names();
  if (is_ordered(A.variety())) {
    json le = json::array();
    for (Elem a = 0; a < A.size(); ++a)
      for (Elem b = 0; b < A.size(); ++b) {
        if (a == b || !A.le(a, b)) continue;
        bool covers = true;
        for (Elem c = 0; c < A.size() && covers; ++c)
          covers = c == a || c == b || !(A.le(a, c) && A.le(c, b));
        if (covers) le.push_back({A.name(a), A.name(b)});
      }
    p["le"] = std::move(le);
  }
  if (A.variety() == Variety::uquant) {
    json t = json::object();
    for (Elem a = 0; a < A.size(); ++a)
      for (Elem b = 0; b < A.size(); ++b) t[A.name(a)][A.name(b)] = A.name(A.tensor(a, b));
    p["tensor"] = std::move(t);
    p["unit"] = A.name(A.unit());
  }
  return p;
}

// ---------------------------------------------------------------------------
// Spaces

/// "autoclose": true replaces the listed opens by the subalgebra they
/// generate; otherwise they must already be closed.
inline AffineSpace space_from_json(const json& p) {
  AlgebraPtr L = algebra_from_json(detail::field(p, "L"));
  auto points = detail::names(detail::field(p, "points"), "points");
  const json& opens_j = detail::field(p, "opens");
  if (!opens_j.is_array()) detail::schema("opens must be an array");
  std::vector<Fn> opens;
  for (const auto& o : opens_j) opens.push_back(detail::point_map(o, points, *L, "open"));
  const bool autoclose = p.value("autoclose", false);
  return validate_space(std::move(L), std::move(points), std::move(opens), autoclose);
}

inline json space_to_json(const AffineSpace& s) {
  json p;
  p["L"] = algebra_to_json(*s.L);
  p["points"] = s.points;
  json opens = json::array();
  for (const auto& f : s.opens) opens.push_back(detail::point_map_json(f, s.points, *s.L));
  p["opens"] = std::move(opens);
  return p;
}

// ---------------------------------------------------------------------------
// Systems

inline AffineSystem system_from_json(const json& p) {
  AlgebraPtr L = algebra_from_json(detail::field(p, "L"));
  auto points = detail::names(detail::field(p, "points"), "points");
  AlgebraPtr A = algebra_from_json(detail::field(p, "algebra"));
  const json& k = detail::field(p, "kappa");
  if (!k.is_object() || k.size() != A->size()) detail::schema("kappa must have one entry per element");
  std::vector<Fn> kappa;
  for (Elem a = 0; a < A->size(); ++a)
    kappa.push_back(detail::point_map(detail::field(k, A->name(a).c_str()), points, *L, "kappa"));
  return validate_system(std::move(L), std::move(points), std::move(A), std::move(kappa));
}

inline json system_to_json(const AffineSystem& s) {
  json p;
  p["L"] = algebra_to_json(*s.L);
  p["points"] = s.points;
  p["algebra"] = algebra_to_json(*s.A);
  json k = json::object();
  for (Elem a = 0; a < s.A->size(); ++a)
    k[s.A->name(a)] = detail::point_map_json(s.kappa[a], s.points, *s.L);
  p["kappa"] = std::move(k);
  return p;
}

// ---------------------------------------------------------------------------
// Morphisms

struct LoadedMorphism {
  AffineSystem source;
  AffineSystem target;
  SystemMorphism morphism;
};

inline LoadedMorphism morphism_from_json(const json& p) {
  LoadedMorphism m{system_from_json(detail::field(p, "source")),
                   system_from_json(detail::field(p, "target")), {}};
  const json& f = detail::field(p, "f");
  if (!f.is_object() || f.size() != m.source.size()) detail::schema("f must map every source point");
  for (const auto& x : m.source.points)
    m.morphism.f.push_back(
        detail::index_in(m.target.points, detail::str(detail::field(f, x.c_str()), "f"), "f"));
  const json& phi = detail::field(p, "phi");
  if (!phi.is_object() || phi.size() != m.target.A->size()) detail::schema("phi must map every target element");
  Fn map;
  for (const auto& a2 : m.target.A->names())
    map.push_back(detail::elem(*m.source.A, detail::field(phi, a2.c_str()), "phi"));
  m.morphism.phi = {m.target.A, m.source.A, std::move(map)};
  return m;
}

inline json morphism_to_json(const AffineSystem& s1, const AffineSystem& s2,
                             const SystemMorphism& m) {
  json p;
  p["source"] = system_to_json(s1);
  p["target"] = system_to_json(s2);
  json f = json::object();
  for (std::size_t x = 0; x < m.f.size(); ++x) f[s1.points[x]] = s2.points[m.f[x]];
  p["f"] = std::move(f);
  json phi = json::object();
  for (Elem a = 0; a < m.phi.map.size(); ++a) phi[s2.A->name(a)] = s1.A->name(m.phi.map[a]);
  p["phi"] = std::move(phi);
  return p;
}

/// Compact form of a homomorphism for reports.
inline json hom_to_json(const Hom& h) {
  json j = json::object();
  for (Elem a = 0; a < h.map.size(); ++a) j[h.source->name(a)] = h.target->name(h.map[a]);
  return j;
}

}  // namespace affine::io

#endif
