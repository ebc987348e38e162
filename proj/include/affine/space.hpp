#ifndef AFFINE_SPACE_HPP
#define AFFINE_SPACE_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "affine/algebra.hpp"

namespace affine {

/// Outcome of a yes/no check, with the offending data when it is "no".
struct Verdict {
  bool holds = true;
  std::vector<std::string> witness;
  std::string detail;

  explicit operator bool() const { return holds; }
  static Verdict yes() { return {}; }
  static Verdict no(std::string detail, std::vector<std::string> witness = {}) {
    return {false, std::move(witness), std::move(detail)};
  }
};

/// Pointwise operations on functions X -> L.
struct PointwiseOps {
  const FiniteAlgebra& L;
  std::size_t points;
  using value_type = Fn;

  Signature sig() const { return L.signature(); }
  Fn constant(Elem v) const { return Fn(points, v); }
  Fn bottom() const { return constant(L.bottom()); }
  Fn top() const { return constant(L.top()); }
  Fn unit() const { return constant(L.unit()); }
  template <class Op>
  Fn zip(const Fn& a, const Fn& b, Op op) const {
    Fn r(points);
    for (std::size_t x = 0; x < points; ++x) r[x] = op(a[x], b[x]);
    return r;
  }
  Fn join(const Fn& a, const Fn& b) const {
    return zip(a, b, [&](Elem u, Elem v) { return L.join(u, v); });
  }
  Fn meet(const Fn& a, const Fn& b) const {
    return zip(a, b, [&](Elem u, Elem v) { return L.meet(u, v); });
  }
  Fn tensor(const Fn& a, const Fn& b) const {
    return zip(a, b, [&](Elem u, Elem v) { return L.tensor(u, v); });
  }
  Fn complement(const Fn& a) const {
    Fn r(points);
    for (std::size_t x = 0; x < points; ++x) r[x] = L.complement(a[x]);
    return r;
  }
};

/// Subalgebra of L^X generated by `seed`, computed without materializing
/// L^X. For the set variety the seed itself (deduplicated, sorted).
inline std::vector<Fn> generate_pointwise(const FiniteAlgebra& L, std::size_t points,
                                          std::vector<Fn> seed,
                                          std::size_t cap = kDefaultAlgebraCap) {
  if (L.variety() == Variety::set) {
    std::sort(seed.begin(), seed.end());
    seed.erase(std::unique(seed.begin(), seed.end()), seed.end());
    return seed;
  }
  return close_under(PointwiseOps{L, points}, std::move(seed), cap);
}

inline std::string fn_name(const FiniteAlgebra& L, const Fn& f) {
  std::string s = "[";
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) s += ",";
    s += L.name(f[i]);
  }
  return s + "]";
}

/// Affine space (X, tau): tau is a subalgebra of L^X, stored extensionally
/// and sorted.
struct AffineSpace {
  AlgebraPtr L;
  std::vector<std::string> points;
  std::vector<Fn> opens;

  std::size_t size() const { return points.size(); }
  bool is_open(const Fn& f) const {
    return std::binary_search(opens.begin(), opens.end(), f);
  }
  std::size_t index_of_open(const Fn& f) const {
    return static_cast<std::size_t>(
        std::lower_bound(opens.begin(), opens.end(), f) - opens.begin());
  }
};

inline std::vector<std::string> default_point_names(std::size_t n, const std::string& prefix = "p") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

namespace detail {

// First operation instance whose result leaves `members`, if any.
inline std::optional<std::vector<std::string>> closure_failure(
    const FiniteAlgebra& L, std::size_t points, const std::vector<Fn>& members) {
  if (L.variety() == Variety::set) return std::nullopt;
  const PointwiseOps ops{L, points};
  const Signature sig = L.signature();
  auto in = [&](const Fn& f) { return std::binary_search(members.begin(), members.end(), f); };
  if (sig.bottom && !in(ops.bottom())) return std::vector<std::string>{"bottom"};
  if (sig.top && !in(ops.top())) return std::vector<std::string>{"top"};
  if (sig.unit && !in(ops.unit())) return std::vector<std::string>{"unit"};
  for (const auto& a : members) {
    if (sig.complement && !in(ops.complement(a)))
      return std::vector<std::string>{"complement", fn_name(L, a)};
    for (const auto& b : members) {
      if (sig.join && !in(ops.join(a, b)))
        return std::vector<std::string>{"join", fn_name(L, a), fn_name(L, b)};
      if (sig.meet && !in(ops.meet(a, b)))
        return std::vector<std::string>{"meet", fn_name(L, a), fn_name(L, b)};
      if (sig.tensor && !in(ops.tensor(a, b)))
        return std::vector<std::string>{"tensor", fn_name(L, a), fn_name(L, b)};
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Builds a space from listed opens. With `autoclose` the opens are replaced
/// by the subalgebra they generate; otherwise a non-closed list is rejected.
inline AffineSpace validate_space(AlgebraPtr L, std::vector<std::string> points,
                                  std::vector<Fn> opens, bool autoclose) {
  for (const auto& f : opens) {
    if (f.size() != points.size())
      throw Error(ErrorKind::malformed, "open has the wrong number of points");
    for (Elem v : f)
      if (v >= L->size()) throw Error(ErrorKind::malformed, "open value out of range");
  }
  std::sort(opens.begin(), opens.end());
  opens.erase(std::unique(opens.begin(), opens.end()), opens.end());
  AffineSpace s{L, std::move(points), {}};
  if (autoclose) {
    s.opens = generate_pointwise(*L, s.size(), std::move(opens));
  } else {
    if (auto w = detail::closure_failure(*L, s.size(), opens)) {
      throw Error(ErrorKind::not_a_subalgebra, "opens are not closed under " + w->front(), *w);
    }
    s.opens = std::move(opens);
  }
  return s;
}

/// tau as an algebra in its own right; carrier order follows `s.opens`.
inline AlgebraPtr opens_algebra(const AffineSpace& s) {
  const FiniteAlgebra& L = *s.L;
  const std::size_t k = s.opens.size();
  std::vector<std::string> names;
  for (const auto& f : s.opens) names.push_back(fn_name(L, f));
  if (L.variety() == Variety::set) return share(FiniteAlgebra::validate(Variety::set, names));
  std::vector<std::uint8_t> le(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      bool ok = true;
      for (std::size_t x = 0; x < s.size() && ok; ++x) ok = L.le(s.opens[i][x], s.opens[j][x]);
      le[i * k + j] = ok;
    }
  std::vector<Elem> tensor;
  std::optional<Elem> unit;
  if (L.variety() == Variety::uquant) {
    const PointwiseOps ops{L, s.size()};
    tensor.resize(k * k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        tensor[i * k + j] = static_cast<Elem>(s.index_of_open(ops.tensor(s.opens[i], s.opens[j])));
    unit = static_cast<Elem>(s.index_of_open(ops.unit()));
  }
  return share(FiniteAlgebra::validate(L.variety(), std::move(names), std::move(le),
                                       std::move(tensor), unit));
}

inline Fn precompose(const Fn& alpha, std::span<const std::size_t> f) {
  Fn r(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) r[x] = alpha[f[x]];
  return r;
}

/// Continuity of f: X1 -> X2: every open of the target pulls back to an open.
inline Verdict is_continuous(const AffineSpace& s1, const AffineSpace& s2,
                             std::span<const std::size_t> f) {
  if (f.size() != s1.size()) throw Error(ErrorKind::malformed, "map has the wrong length");
  for (const auto& alpha : s2.opens) {
    if (!s1.is_open(precompose(alpha, f))) {
      return Verdict::no("pullback of an open is not open", {fn_name(*s2.L, alpha)});
    }
  }
  return Verdict::yes();
}

/// A structured map f: X -> |target|.
struct ConeLeg {
  std::vector<std::size_t> map;
  const AffineSpace* target;
};

/// Initial structure on X for a cone: the subalgebra generated by all
/// pullbacks of target opens.
inline AffineSpace initial_structure(AlgebraPtr L, std::vector<std::string> points,
                                     const std::vector<ConeLeg>& cone,
                                     std::size_t cap = kDefaultAlgebraCap) {
  std::vector<Fn> seed;
  for (const auto& leg : cone) {
    if (leg.map.size() != points.size())
      throw Error(ErrorKind::malformed, "cone leg has the wrong length");
    for (const auto& alpha : leg.target->opens) seed.push_back(precompose(alpha, leg.map));
  }
  AffineSpace s{L, std::move(points), {}};
  s.opens = generate_pointwise(*s.L, s.size(), std::move(seed), cap);
  return s;
}

inline Fn identity_fn(std::size_t n) {
  Fn f(n);
  for (Elem i = 0; i < n; ++i) f[i] = i;
  return f;
}

/// (|L|, <1_L>): points are the elements of L.
inline AffineSpace sierpinski_space(const AlgebraPtr& L) {
  AffineSpace s{L, L->names(), {}};
  s.opens = generate_pointwise(*L, L->size(), {identity_fn(L->size())});
  return s;
}

inline Verdict is_t0_space(const AffineSpace& s) {
  for (std::size_t x = 0; x < s.size(); ++x)
    for (std::size_t y = x + 1; y < s.size(); ++y) {
      bool separated = false;
      for (const auto& a : s.opens) separated = separated || a[x] != a[y];
      if (!separated) return Verdict::no("points not separated", {s.points[x], s.points[y]});
    }
  return Verdict::yes();
}

/// Every map Y -> X of a probe space that becomes continuous after each
/// cone leg must itself be continuous. Exhaustive over all maps from each
/// probe; returns the first violation.
inline Verdict space_initiality_audit(const AffineSpace& source,
                                      const std::vector<ConeLeg>& cone,
                                      const std::vector<AffineSpace>& probes,
                                      std::uint64_t cap = kDefaultCandidateCap) {
  for (const auto& probe : probes) {
    const std::size_t m = probe.size();
    check_budget(sat_pow(source.size(), m), cap, "probe maps");
    if (m > 0 && source.size() == 0) continue;
    std::vector<std::size_t> g(m, 0);
    while (true) {
      bool all_legs = true;
      for (const auto& leg : cone) {
        std::vector<std::size_t> comp(m);
        for (std::size_t y = 0; y < m; ++y) comp[y] = leg.map[g[y]];
        if (!is_continuous(probe, *leg.target, comp)) {
          all_legs = false;
          break;
        }
      }
      if (all_legs && !is_continuous(probe, source, g)) {
        std::vector<std::string> w;
        for (auto v : g) w.push_back(source.points[v]);
        return Verdict::no("composites continuous but map is not", w);
      }
      std::size_t k = 0;
      while (k < m && ++g[k] == source.size()) g[k++] = 0;
      if (k == m) break;
    }
  }
  return Verdict::yes();
}

/// f: X -> |L|^tau, x |-> (alpha(x))_alpha, into the tau-indexed power of
/// the Sierpinski space.
struct SpaceEmbedding {
  std::vector<Fn> images;  // per point, a tuple indexed by tau
  bool injective = false;
  bool initial = false;
  bool embedding() const { return injective && initial; }
};

/// The power of the Sierpinski space carries the initial structure for its
/// projections, so f is initial exactly when X carries the initial structure
/// for the composites pi_alpha . f = alpha. That structure is computed on X
/// directly; the power itself is never materialized.
inline SpaceEmbedding canonical_space_embedding(const AffineSpace& s,
                                                std::size_t cap = kDefaultAlgebraCap) {
  SpaceEmbedding e;
  for (std::size_t x = 0; x < s.size(); ++x) {
    Fn t;
    for (const auto& a : s.opens) t.push_back(a[x]);
    e.images.push_back(std::move(t));
  }
  std::vector<Fn> sorted = e.images;
  std::sort(sorted.begin(), sorted.end());
  e.injective = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
  const AffineSpace sier = sierpinski_space(s.L);
  std::vector<ConeLeg> cone;
  std::vector<std::vector<std::size_t>> maps;
  for (const auto& a : s.opens) maps.emplace_back(a.begin(), a.end());
  for (const auto& m : maps) cone.push_back({m, &sier});
  const AffineSpace induced = initial_structure(s.L, s.points, cone, cap);
  e.initial = induced.opens == s.opens;
  return e;
}

}  // namespace affine

#endif
