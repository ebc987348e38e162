#ifndef AFFINE_ALGEBRA_HPP
#define AFFINE_ALGEBRA_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "affine/error.hpp"

namespace affine {

enum class Variety { set, supsl, frame, cbalg, uquant };

inline std::string_view to_string(Variety v) {
  switch (v) {
    case Variety::set: return "set";
    case Variety::supsl: return "supsl";
    case Variety::frame: return "frame";
    case Variety::cbalg: return "cbalg";
    case Variety::uquant: return "uquant";
  }
  return "?";
}

inline std::optional<Variety> parse_variety(std::string_view s) {
  for (auto v : {Variety::set, Variety::supsl, Variety::frame, Variety::cbalg,
                 Variety::uquant}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

/// Index into a carrier.
using Elem = std::uint32_t;

/// A function from a finite index set into a carrier, stored as a table.
using Fn = std::vector<Elem>;

/// Which operations a variety's homomorphisms and subalgebras must respect.
struct Signature {
  bool bottom = false;
  bool top = false;
  bool unit = false;
  bool join = false;
  bool meet = false;
  bool tensor = false;
  bool complement = false;

  static constexpr Signature of(Variety v) {
    switch (v) {
      case Variety::set: return {};
      case Variety::supsl: return {true, false, false, true, false, false, false};
      case Variety::frame: return {true, true, false, true, true, false, false};
      case Variety::cbalg: return {true, true, false, true, true, false, true};
      case Variety::uquant: return {true, false, true, true, false, true, false};
    }
    return {};
  }
};

inline constexpr bool is_ordered(Variety v) { return v != Variety::set; }

inline constexpr std::size_t kDefaultAlgebraCap = 1024;
inline constexpr std::uint64_t kDefaultCandidateCap = 5'000'000;

class FiniteAlgebra;
using AlgebraPtr = std::shared_ptr<const FiniteAlgebra>;

/// A finite algebra of one of the hard-coded varieties. Immutable once built.
///
/// Two construction paths exist. `validate` takes user data (order plus,
/// for quantales, a tensor table), derives joins, meets and complements, and
/// checks every axiom of the variety exhaustively. `assemble` takes complete
/// tables from a construction that is correct by design (products, down-set
/// lattices) and only fills the derived caches; callers that want the axioms
/// audited run `check_axioms` on the result.
class FiniteAlgebra {
 public:
  static FiniteAlgebra validate(Variety variety, std::vector<std::string> names,
                                std::vector<std::uint8_t> le = {},
                                std::vector<Elem> tensor = {},
                                std::optional<Elem> unit = std::nullopt);

  struct Tables {
    std::vector<std::uint8_t> le;
    std::vector<Elem> join;
    std::vector<Elem> meet;
    std::vector<Elem> tensor;
    std::vector<Elem> complement;
    std::optional<Elem> unit;
  };
  static FiniteAlgebra assemble(Variety variety, std::vector<std::string> names,
                                Tables tables);

  Variety variety() const noexcept { return variety_; }
  Signature signature() const noexcept { return Signature::of(variety_); }
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(Elem e) const { return names_.at(e); }
  std::optional<Elem> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool le(Elem a, Elem b) const {
    return is_ordered(variety_) ? le_[a * size() + b] != 0 : a == b;
  }
  Elem join(Elem a, Elem b) const { return join_[a * size() + b]; }
  Elem meet(Elem a, Elem b) const { return meet_[a * size() + b]; }
  Elem tensor(Elem a, Elem b) const { return tensor_[a * size() + b]; }
  Elem complement(Elem a) const { return complement_.at(a); }
  Elem bottom() const noexcept { return bottom_; }
  Elem top() const noexcept { return top_; }
  Elem unit() const noexcept { return unit_; }

  bool has_tensor() const noexcept { return !tensor_.empty(); }
  bool has_complement() const noexcept { return !complement_.empty(); }

  /// Quantale whose unit is the top element.
  bool is_integral() const noexcept {
    return variety_ == Variety::uquant && size() > 0 && unit_ == top_;
  }

  /// Elements j != bottom that are not the join of two strictly smaller
  /// elements. Empty for the set variety.
  const std::vector<Elem>& join_irreducible_elements() const noexcept {
    return join_irreducibles_;
  }

  const std::vector<std::uint8_t>& le_table() const noexcept { return le_; }
  const std::vector<Elem>& tensor_table() const noexcept { return tensor_; }

 private:
  FiniteAlgebra() = default;
  void build_index();
  void derive_caches();

  Variety variety_ = Variety::set;
  std::vector<std::string> names_;
  std::unordered_map<std::string, Elem> index_;
  std::vector<std::uint8_t> le_;
  std::vector<Elem> join_;
  std::vector<Elem> meet_;
  std::vector<Elem> tensor_;
  std::vector<Elem> complement_;
  std::vector<Elem> join_irreducibles_;
  Elem bottom_ = 0;
  Elem top_ = 0;
  Elem unit_ = 0;
};

inline AlgebraPtr share(FiniteAlgebra a) {
  return std::make_shared<const FiniteAlgebra>(std::move(a));
}

namespace detail {

inline std::vector<std::string> names3(const FiniteAlgebra& A, Elem a, Elem b,
                                       Elem c) {
  return {A.name(a), A.name(b), A.name(c)};
}

// Least upper bound of a and b under `le`, if one exists.
inline std::optional<Elem> lub(const std::vector<std::uint8_t>& le,
                               std::size_t n, Elem a, Elem b) {
  std::optional<Elem> best;
  for (Elem u = 0; u < n; ++u) {
    if (!le[a * n + u] || !le[b * n + u]) continue;
    if (!best || le[u * n + *best]) best = u;
  }
  if (!best) return std::nullopt;
  for (Elem u = 0; u < n; ++u) {
    if (le[a * n + u] && le[b * n + u] && !le[*best * n + u]) return std::nullopt;
  }
  return best;
}

inline std::optional<Elem> glb(const std::vector<std::uint8_t>& le,
                               std::size_t n, Elem a, Elem b) {
  std::optional<Elem> best;
  for (Elem u = 0; u < n; ++u) {
    if (!le[u * n + a] || !le[u * n + b]) continue;
    if (!best || le[*best * n + u]) best = u;
  }
  if (!best) return std::nullopt;
  for (Elem u = 0; u < n; ++u) {
    if (le[u * n + a] && le[u * n + b] && !le[u * n + *best]) return std::nullopt;
  }
  return best;
}

}  // namespace detail

inline void FiniteAlgebra::build_index() {
  index_.clear();
  for (Elem i = 0; i < names_.size(); ++i) {
    if (!index_.emplace(names_[i], i).second) {
      throw Error(ErrorKind::malformed, "duplicate element name '" + names_[i] + "'",
                  {names_[i]});
    }
  }
}

inline void FiniteAlgebra::derive_caches() {
  const std::size_t n = size();
  join_irreducibles_.clear();
  if (!is_ordered(variety_) || n == 0) return;
  bottom_ = top_ = 0;
  for (Elem a = 0; a < n; ++a) {
    if (le(a, bottom_)) bottom_ = a;
    if (le(top_, a)) top_ = a;
  }
  // j is join-irreducible iff the join of everything strictly below it is
  // strictly below it.
  for (Elem j = 0; j < n; ++j) {
    if (j == bottom_) continue;
    Elem acc = bottom_;
    for (Elem b = 0; b < n; ++b) {
      if (b != j && le(b, j)) acc = join(acc, b);
    }
    if (acc != j) join_irreducibles_.push_back(j);
  }
}

inline FiniteAlgebra FiniteAlgebra::assemble(Variety variety,
                                             std::vector<std::string> names,
                                             Tables t) {
  FiniteAlgebra A;
  A.variety_ = variety;
  A.names_ = std::move(names);
  A.build_index();
  const std::size_t n = A.size();
  if (is_ordered(variety)) {
    if (t.le.size() != n * n || t.join.size() != n * n || t.meet.size() != n * n) {
      throw Error(ErrorKind::malformed, "lattice tables have the wrong shape");
    }
    A.le_ = std::move(t.le);
    A.join_ = std::move(t.join);
    A.meet_ = std::move(t.meet);
  }
  if (variety == Variety::uquant) {
    if (t.tensor.size() != n * n || !t.unit) {
      throw Error(ErrorKind::malformed, "quantale needs a tensor table and a unit");
    }
    A.tensor_ = std::move(t.tensor);
    A.unit_ = *t.unit;
  }
  A.derive_caches();
  if (variety == Variety::cbalg) {
    if (t.complement.empty()) {
      // Derive: the unique b with a v b = top and a ^ b = bottom.
      t.complement.assign(n, 0);
      for (Elem a = 0; a < n; ++a) {
        bool found = false;
        for (Elem b = 0; b < n && !found; ++b) {
          if (A.join(a, b) == A.top_ && A.meet(a, b) == A.bottom_) {
            t.complement[a] = b;
            found = true;
          }
        }
        if (!found) {
          throw Error(ErrorKind::complement_failure,
                      "element '" + A.names_[a] + "' has no complement",
                      {A.names_[a]});
        }
      }
    }
    A.complement_ = std::move(t.complement);
  }
  return A;
}

/// Exhaustive axiom audit; returns the first failure.
inline std::optional<Error> check_axioms(const FiniteAlgebra& A) {
  const std::size_t n = A.size();
  const Variety v = A.variety();
  if (!is_ordered(v)) return std::nullopt;
  if (n == 0) return Error(ErrorKind::malformed, "empty carrier");
  for (Elem a = 0; a < n; ++a) {
    if (!A.le(a, a)) {
      return Error(ErrorKind::not_a_partial_order, "not reflexive at " + A.name(a),
                   {A.name(a)});
    }
    for (Elem b = 0; b < n; ++b) {
      if (a != b && A.le(a, b) && A.le(b, a)) {
        return Error(ErrorKind::not_a_partial_order,
                     "antisymmetry fails for " + A.name(a) + ", " + A.name(b),
                     {A.name(a), A.name(b)});
      }
      for (Elem c = 0; c < n; ++c) {
        if (A.le(a, b) && A.le(b, c) && !A.le(a, c)) {
          return Error(ErrorKind::not_a_partial_order, "transitivity fails",
                       detail::names3(A, a, b, c));
        }
      }
    }
  }
  for (Elem a = 0; a < n; ++a) {
    if (!A.le(A.bottom(), a)) {
      return Error(ErrorKind::missing_join, "no bottom (empty join)", {A.name(a)});
    }
    for (Elem b = 0; b < n; ++b) {
      const Elem j = A.join(a, b);
      if (!A.le(a, j) || !A.le(b, j)) {
        return Error(ErrorKind::missing_join, "join table is not an upper bound",
                     {A.name(a), A.name(b)});
      }
      const Elem m = A.meet(a, b);
      if (!A.le(m, a) || !A.le(m, b)) {
        return Error(ErrorKind::missing_join, "meet table is not a lower bound",
                     {A.name(a), A.name(b)});
      }
      for (Elem u = 0; u < n; ++u) {
        if (A.le(a, u) && A.le(b, u) && !A.le(j, u)) {
          return Error(ErrorKind::missing_join, "join table is not least",
                       detail::names3(A, a, b, u));
        }
        if (A.le(u, a) && A.le(u, b) && !A.le(u, m)) {
          return Error(ErrorKind::missing_join, "meet table is not greatest",
                       detail::names3(A, a, b, u));
        }
      }
    }
  }
  if (v == Variety::frame || v == Variety::cbalg) {
    for (Elem a = 0; a < n; ++a) {
      for (Elem b = 0; b < n; ++b) {
        for (Elem c = 0; c < n; ++c) {
          if (A.meet(a, A.join(b, c)) != A.join(A.meet(a, b), A.meet(a, c))) {
            return Error(ErrorKind::distributivity_failure,
                         "a ^ (b v c) != (a ^ b) v (a ^ c)",
                         detail::names3(A, a, b, c));
          }
        }
      }
    }
  }
  if (v == Variety::cbalg) {
    for (Elem a = 0; a < n; ++a) {
      const Elem c = A.complement(a);
      if (A.join(a, c) != A.top() || A.meet(a, c) != A.bottom()) {
        return Error(ErrorKind::complement_failure, "complement law fails",
                     {A.name(a), A.name(c)});
      }
    }
  }
  if (v == Variety::uquant) {
    const Elem u = A.unit();
    for (Elem a = 0; a < n; ++a) {
      if (A.tensor(a, u) != a || A.tensor(u, a) != a) {
        return Error(ErrorKind::tensor_axiom_failure, "unit is not two-sided",
                     {A.name(a), A.name(u), A.name(A.tensor(a, u))});
      }
      if (A.tensor(a, A.bottom()) != A.bottom() ||
          A.tensor(A.bottom(), a) != A.bottom()) {
        return Error(ErrorKind::tensor_axiom_failure,
                     "tensor does not preserve the empty join",
                     {A.name(a), A.name(A.bottom()), ""});
      }
      for (Elem b = 0; b < n; ++b) {
        for (Elem c = 0; c < n; ++c) {
          if (A.tensor(A.tensor(a, b), c) != A.tensor(a, A.tensor(b, c))) {
            return Error(ErrorKind::tensor_axiom_failure, "tensor not associative",
                         detail::names3(A, a, b, c));
          }
          if (A.tensor(a, A.join(b, c)) != A.join(A.tensor(a, b), A.tensor(a, c))) {
            return Error(ErrorKind::tensor_axiom_failure,
                         "tensor does not distribute over joins on the left",
                         detail::names3(A, a, b, c));
          }
          if (A.tensor(A.join(b, c), a) != A.join(A.tensor(b, a), A.tensor(c, a))) {
            return Error(ErrorKind::tensor_axiom_failure,
                         "tensor does not distribute over joins on the right",
                         detail::names3(A, a, b, c));
          }
        }
      }
    }
  }
  return std::nullopt;
}

inline FiniteAlgebra FiniteAlgebra::validate(Variety variety,
                                             std::vector<std::string> names,
                                             std::vector<std::uint8_t> le,
                                             std::vector<Elem> tensor,
                                             std::optional<Elem> unit) {
  const std::size_t n = names.size();
  if (n == 0) throw Error(ErrorKind::malformed, "carrier must be non-empty");
  if (!is_ordered(variety)) {
    return assemble(variety, std::move(names), {});
  }
  if (le.size() != n * n) {
    throw Error(ErrorKind::malformed, "order relation has the wrong shape");
  }
  if (variety == Variety::uquant) {
    if (tensor.size() != n * n) {
      throw Error(ErrorKind::malformed, "tensor table has the wrong shape");
    }
    if (!unit || *unit >= n) throw Error(ErrorKind::malformed, "missing unit");
    for (Elem t : tensor) {
      if (t >= n) throw Error(ErrorKind::malformed, "tensor value out of range");
    }
  }
  // Order axioms first so the join search below is meaningful.
  for (Elem a = 0; a < n; ++a) {
    if (!le[a * n + a]) {
      throw Error(ErrorKind::not_a_partial_order, "not reflexive at " + names[a],
                  {names[a]});
    }
    for (Elem b = 0; b < n; ++b) {
      if (a != b && le[a * n + b] && le[b * n + a]) {
        throw Error(ErrorKind::not_a_partial_order,
                    "antisymmetry fails for " + names[a] + ", " + names[b],
                    {names[a], names[b]});
      }
      if (!le[a * n + b]) continue;
      for (Elem c = 0; c < n; ++c) {
        if (le[b * n + c] && !le[a * n + c]) {
          throw Error(ErrorKind::not_a_partial_order, "transitivity fails",
                      {names[a], names[b], names[c]});
        }
      }
    }
  }
  std::optional<Elem> bottom;
  for (Elem a = 0; a < n && !bottom; ++a) {
    bool below_all = true;
    for (Elem b = 0; b < n && below_all; ++b) below_all = le[a * n + b] != 0;
    if (below_all) bottom = a;
  }
  if (!bottom) throw Error(ErrorKind::missing_join, "no bottom element (empty join)");
  Tables t;
  t.join.resize(n * n);
  t.meet.resize(n * n);
  for (Elem a = 0; a < n; ++a) {
    for (Elem b = 0; b < n; ++b) {
      auto j = detail::lub(le, n, a, b);
      if (!j) {
        throw Error(ErrorKind::missing_join,
                    "no join of " + names[a] + " and " + names[b], {names[a], names[b]});
      }
      t.join[a * n + b] = *j;
      // A finite poset with bottom and binary joins is a complete lattice.
      auto m = detail::glb(le, n, a, b);
      if (!m) {
        throw Error(ErrorKind::missing_join,
                    "no meet of " + names[a] + " and " + names[b], {names[a], names[b]});
      }
      t.meet[a * n + b] = *m;
    }
  }
  t.le = std::move(le);
  t.tensor = std::move(tensor);
  t.unit = unit;
  if (variety == Variety::cbalg) {
    // Distributivity before complements so the derived complement is unique.
    for (Elem a = 0; a < n; ++a)
      for (Elem b = 0; b < n; ++b)
        for (Elem c = 0; c < n; ++c)
          if (t.meet[a * n + t.join[b * n + c]] !=
              t.join[t.meet[a * n + b] * n + t.meet[a * n + c]])
            throw Error(ErrorKind::distributivity_failure,
                        "a ^ (b v c) != (a ^ b) v (a ^ c)", {names[a], names[b], names[c]});
  }
  FiniteAlgebra A = assemble(variety, std::move(names), std::move(t));
  if (auto err = check_axioms(A)) throw *err;
  return A;
}

/// Reflexive-transitive closure of a relation given as an n*n table.
inline std::vector<std::uint8_t> reflexive_transitive_closure(
    std::vector<std::uint8_t> rel, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) rel[i * n + i] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (rel[i * n + k])
        for (std::size_t j = 0; j < n; ++j)
          if (rel[k * n + j]) rel[i * n + j] = 1;
  return rel;
}

// ---------------------------------------------------------------------------
// Homomorphisms

/// A map between carriers, stored in the concrete direction.
struct Hom {
  AlgebraPtr source;
  AlgebraPtr target;
  Fn map;

  Elem operator()(Elem a) const { return map[a]; }
  friend bool operator==(const Hom& a, const Hom& b) { return a.map == b.map; }
};

struct HomCheck {
  bool ok = true;
  std::string failure;
  std::vector<std::string> witness;

  explicit operator bool() const { return ok; }
};

inline HomCheck hom_failure(std::string what, std::vector<std::string> witness) {
  return {false, std::move(what), std::move(witness)};
}

/// Checks that `map` preserves every operation of the shared variety.
/// Finite carriers make binary-join preservation equal to full join
/// preservation.
inline HomCheck is_homomorphism(const FiniteAlgebra& A, const FiniteAlgebra& B,
                                std::span<const Elem> map) {
  if (A.variety() != B.variety()) {
    throw Error(ErrorKind::variety_mismatch, std::string(to_string(A.variety())) +
                                                 " vs " + std::string(to_string(B.variety())));
  }
  if (map.size() != A.size()) return hom_failure("map has the wrong length", {});
  for (Elem v : map) {
    if (v >= B.size()) return hom_failure("map value out of range", {});
  }
  const Signature sig = A.signature();
  const std::size_t n = A.size();
  if (sig.bottom && map[A.bottom()] != B.bottom())
    return hom_failure("bottom not preserved", {A.name(A.bottom())});
  if (sig.top && map[A.top()] != B.top())
    return hom_failure("top not preserved", {A.name(A.top())});
  if (sig.unit && map[A.unit()] != B.unit())
    return hom_failure("unit not preserved", {A.name(A.unit())});
  for (Elem a = 0; a < n; ++a) {
    if (sig.complement && map[A.complement(a)] != B.complement(map[a]))
      return hom_failure("complement not preserved", {A.name(a)});
    for (Elem b = 0; b < n; ++b) {
      if (sig.join && map[A.join(a, b)] != B.join(map[a], map[b]))
        return hom_failure("join not preserved", {A.name(a), A.name(b)});
      if (sig.meet && map[A.meet(a, b)] != B.meet(map[a], map[b]))
        return hom_failure("meet not preserved", {A.name(a), A.name(b)});
      if (sig.tensor && map[A.tensor(a, b)] != B.tensor(map[a], map[b]))
        return hom_failure("tensor not preserved", {A.name(a), A.name(b)});
    }
  }
  return {};
}

inline HomCheck is_homomorphism(const Hom& h) {
  return is_homomorphism(*h.source, *h.target, h.map);
}

inline Hom identity_hom(const AlgebraPtr& A) {
  Fn m(A->size());
  for (Elem i = 0; i < m.size(); ++i) m[i] = i;
  return {A, A, std::move(m)};
}

/// g after f.
inline Hom compose(const Hom& g, const Hom& f) {
  Fn m(f.map.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = g.map[f.map[i]];
  return {f.source, g.target, std::move(m)};
}

inline bool is_surjective(std::span<const Elem> map, std::size_t codomain) {
  std::vector<char> hit(codomain, 0);
  for (Elem v : map) hit[v] = 1;
  return std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
}

inline bool is_injective(std::span<const Elem> map) {
  std::vector<Elem> s(map.begin(), map.end());
  std::sort(s.begin(), s.end());
  return std::adjacent_find(s.begin(), s.end()) == s.end();
}

// ---------------------------------------------------------------------------
// Closure under the variety's operations

/// Operations of `A` on element indices, in the shape the closure engine
/// expects. A pointwise counterpart for functions X -> L lives in space.hpp.
struct ElementOps {
  const FiniteAlgebra& A;
  using value_type = Elem;
  Signature sig() const { return A.signature(); }
  Elem bottom() const { return A.bottom(); }
  Elem top() const { return A.top(); }
  Elem unit() const { return A.unit(); }
  Elem join(Elem a, Elem b) const { return A.join(a, b); }
  Elem meet(Elem a, Elem b) const { return A.meet(a, b); }
  Elem tensor(Elem a, Elem b) const { return A.tensor(a, b); }
  Elem complement(Elem a) const { return A.complement(a); }
};

/// Least superset of `seed` closed under the operations (nullary ones
/// included) named by `ops.sig()`. Result is sorted.
template <class Ops>
std::vector<typename Ops::value_type> close_under(
    const Ops& ops, std::vector<typename Ops::value_type> seed,
    std::size_t cap = SIZE_MAX) {
  using T = typename Ops::value_type;
  const Signature sig = ops.sig();
  std::set<T> seen;
  std::vector<T> members;
  auto add = [&](T v) {
    if (seen.insert(v).second) {
      members.push_back(std::move(v));
      check_budget(members.size(), cap, "subalgebra closure");
    }
  };
  if (sig.bottom) add(ops.bottom());
  if (sig.top) add(ops.top());
  if (sig.unit) add(ops.unit());
  for (auto& s : seed) add(std::move(s));
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (sig.complement) add(ops.complement(members[i]));
    for (std::size_t j = 0; j <= i; ++j) {
      // members may reallocate inside add(); copy the operands first.
      const T x = members[i];
      const T y = members[j];
      if (sig.join) add(ops.join(x, y));
      if (sig.meet) add(ops.meet(x, y));
      if (sig.tensor) {
        add(ops.tensor(x, y));
        add(ops.tensor(y, x));
      }
    }
  }
  return {seen.begin(), seen.end()};
}

struct Subalgebra {
  AlgebraPtr parent;
  std::vector<Elem> members;  // sorted parent indices
  AlgebraPtr induced;         // carrier order follows `members`
};

/// Algebra induced on a closed subset of `parent`.
inline FiniteAlgebra induced_algebra(const FiniteAlgebra& parent,
                                     std::span<const Elem> members) {
  const std::size_t k = members.size();
  std::vector<std::string> names;
  names.reserve(k);
  std::unordered_map<Elem, Elem> pos;
  for (Elem i = 0; i < k; ++i) {
    names.push_back(parent.name(members[i]));
    pos[members[i]] = i;
  }
  if (!is_ordered(parent.variety())) {
    return FiniteAlgebra::validate(parent.variety(), std::move(names));
  }
  std::vector<std::uint8_t> le(k * k);
  for (Elem i = 0; i < k; ++i)
    for (Elem j = 0; j < k; ++j) le[i * k + j] = parent.le(members[i], members[j]);
  std::vector<Elem> tensor;
  std::optional<Elem> unit;
  if (parent.variety() == Variety::uquant) {
    tensor.resize(k * k);
    for (Elem i = 0; i < k; ++i)
      for (Elem j = 0; j < k; ++j)
        tensor[i * k + j] = pos.at(parent.tensor(members[i], members[j]));
    unit = pos.at(parent.unit());
  }
  return FiniteAlgebra::validate(parent.variety(), std::move(names), std::move(le),
                                 std::move(tensor), unit);
}

inline Subalgebra generated_subalgebra(const AlgebraPtr& parent,
                                       std::vector<Elem> seed) {
  Subalgebra s;
  s.parent = parent;
  if (parent->variety() == Variety::set) {
    std::sort(seed.begin(), seed.end());
    seed.erase(std::unique(seed.begin(), seed.end()), seed.end());
    s.members = std::move(seed);
  } else {
    s.members = close_under(ElementOps{*parent}, std::move(seed));
  }
  s.induced = s.members.empty() ? nullptr : share(induced_algebra(*parent, s.members));
  return s;
}

// ---------------------------------------------------------------------------
// Homomorphism enumeration

/// Greedy generating set: starting from the nullary closure, repeatedly add
/// the candidate whose addition enlarges the closure most (ties: lowest
/// index). Candidates are the join-irreducibles, which generate any finite
/// lattice under joins alone; for the set variety every element is needed.
inline std::vector<Elem> generating_set(const FiniteAlgebra& A) {
  std::vector<Elem> gens;
  if (A.variety() == Variety::set) {
    for (Elem i = 0; i < A.size(); ++i) gens.push_back(i);
    return gens;
  }
  const ElementOps ops{A};
  auto closure = close_under(ops, {});
  while (closure.size() < A.size()) {
    std::optional<Elem> best;
    std::size_t best_size = 0;
    for (Elem c : A.join_irreducible_elements()) {
      if (std::binary_search(closure.begin(), closure.end(), c)) continue;
      auto seed = gens;
      seed.push_back(c);
      const std::size_t sz = close_under(ops, seed).size();
      if (!best || sz > best_size) {
        best = c;
        best_size = sz;
      }
    }
    gens.push_back(*best);
    closure = close_under(ops, gens);
  }
  return gens;
}

inline constexpr Elem kUnset = UINT32_MAX;

/// Extends `gens -> images` to a homomorphism by closure, failing on the
/// first conflict. Returns nullopt on conflict or if `gens` do not generate A.
/// Every pair of assigned elements is checked against every operation, so a
/// complete result is a homomorphism.
inline std::optional<Fn> extend_by_closure(const FiniteAlgebra& A,
                                           const FiniteAlgebra& B,
                                           std::span<const Elem> gens,
                                           std::span<const Elem> images) {
  const Signature sig = A.signature();
  Fn h(A.size(), kUnset);
  std::vector<Elem> order;
  order.reserve(A.size());
  auto assign = [&](Elem x, Elem y) {
    if (h[x] == kUnset) {
      h[x] = y;
      order.push_back(x);
      return true;
    }
    return h[x] == y;
  };
  if (sig.bottom && !assign(A.bottom(), B.bottom())) return std::nullopt;
  if (sig.top && !assign(A.top(), B.top())) return std::nullopt;
  if (sig.unit && !assign(A.unit(), B.unit())) return std::nullopt;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (!assign(gens[i], images[i])) return std::nullopt;
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Elem x = order[i];
    if (sig.complement && !assign(A.complement(x), B.complement(h[x]))) return std::nullopt;
    for (std::size_t j = 0; j <= i; ++j) {
      const Elem y = order[j];
      if (sig.join && !assign(A.join(x, y), B.join(h[x], h[y]))) return std::nullopt;
      if (sig.meet && !assign(A.meet(x, y), B.meet(h[x], h[y]))) return std::nullopt;
      if (sig.tensor) {
        if (!assign(A.tensor(x, y), B.tensor(h[x], h[y]))) return std::nullopt;
        if (!assign(A.tensor(y, x), B.tensor(h[y], h[x]))) return std::nullopt;
      }
    }
  }
  if (order.size() != A.size()) return std::nullopt;
  return h;
}

inline void require_same_variety(const FiniteAlgebra& A, const FiniteAlgebra& B) {
  if (A.variety() != B.variety()) {
    throw Error(ErrorKind::variety_mismatch, std::string(to_string(A.variety())) +
                                                 " vs " + std::string(to_string(B.variety())));
  }
}

/// All homomorphisms A -> B, lexicographic in the map arrays.
inline std::vector<Hom> enumerate_homs(const AlgebraPtr& A, const AlgebraPtr& B,
                                       std::uint64_t cap = kDefaultCandidateCap) {
  require_same_variety(*A, *B);
  const auto gens = generating_set(*A);
  check_budget(sat_pow(B->size(), gens.size()), cap, "hom enumeration candidates");
  std::vector<Hom> out;
  std::vector<Elem> images(gens.size(), 0);
  if (!gens.empty() && B->size() == 0) return out;
  while (true) {
    if (auto h = extend_by_closure(*A, *B, gens, images)) {
      out.push_back({A, B, std::move(*h)});
    }
    std::size_t k = 0;
    while (k < images.size() && ++images[k] == B->size()) images[k++] = 0;
    if (k == images.size()) break;
  }
  std::sort(out.begin(), out.end(),
            [](const Hom& a, const Hom& b) { return a.map < b.map; });
  return out;
}

/// Reference enumeration: every map A -> B filtered through is_homomorphism.
inline std::vector<Hom> enumerate_homs_naive(const AlgebraPtr& A, const AlgebraPtr& B,
                                             std::uint64_t cap = kDefaultCandidateCap) {
  require_same_variety(*A, *B);
  check_budget(sat_pow(B->size(), A->size()), cap, "naive hom scan");
  std::vector<Hom> out;
  Fn m(A->size(), 0);
  if (A->size() > 0 && B->size() == 0) return out;
  while (true) {
    if (is_homomorphism(*A, *B, m)) out.push_back({A, B, m});
    // Odometer with the last position fastest, so output is lexicographic.
    std::size_t k = m.size();
    while (k > 0 && ++m[k - 1] == B->size()) m[--k] = 0;
    if (k == 0) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Products and powers

struct ProductAlgebra {
  AlgebraPtr algebra;
  std::vector<AlgebraPtr> factors;

  /// Mixed-radix code; component 0 is most significant so carrier order is
  /// lexicographic in the tuples.
  Elem encode(std::span<const Elem> tuple) const {
    Elem code = 0;
    for (std::size_t i = 0; i < factors.size(); ++i)
      code = code * static_cast<Elem>(factors[i]->size()) + tuple[i];
    return code;
  }
  Fn decode(Elem code) const {
    Fn t(factors.size());
    for (std::size_t i = factors.size(); i-- > 0;) {
      const auto r = static_cast<Elem>(factors[i]->size());
      t[i] = code % r;
      code /= r;
    }
    return t;
  }

  Hom projection(std::size_t i) const {
    Fn m(algebra->size());
    for (Elem c = 0; c < m.size(); ++c) m[c] = decode(c)[i];
    return {algebra, factors[i], std::move(m)};
  }

  /// The unique map into the product whose composites with the projections
  /// are `legs`.
  Hom mediate(std::span<const Hom> legs) const {
    if (legs.size() != factors.size()) {
      throw Error(ErrorKind::cocone_shape_mismatch, "cone has the wrong arity");
    }
    if (legs.empty()) {
      throw Error(ErrorKind::cocone_shape_mismatch,
                  "empty cone: use a source algebra explicitly");
    }
    const AlgebraPtr& src = legs.front().source;
    Fn m(src->size());
    Fn t(factors.size());
    for (Elem a = 0; a < m.size(); ++a) {
      for (std::size_t i = 0; i < legs.size(); ++i) t[i] = legs[i].map[a];
      m[a] = encode(t);
    }
    return {src, algebra, std::move(m)};
  }
};

inline ProductAlgebra product_algebras(std::vector<AlgebraPtr> factors,
                                       std::size_t cap = kDefaultAlgebraCap,
                                       std::optional<Variety> variety = std::nullopt) {
  if (factors.empty() && !variety) {
    throw Error(ErrorKind::malformed, "empty product needs an explicit variety");
  }
  const Variety v = variety ? *variety : factors.front()->variety();
  for (const auto& f : factors) {
    if (f->variety() != v) throw Error(ErrorKind::variety_mismatch, "product factors");
  }
  std::uint64_t total = 1;
  for (const auto& f : factors) total = sat_mul(total, f->size());
  check_budget(total, cap, "product algebra size");
  ProductAlgebra P;
  P.factors = factors;
  const std::size_t n = total;
  const std::size_t k = factors.size();
  std::vector<Fn> tuples(n);
  std::vector<std::string> names(n);
  {
    ProductAlgebra tmp{nullptr, factors};
    for (Elem c = 0; c < n; ++c) {
      tuples[c] = tmp.decode(c);
      std::string s = "(";
      for (std::size_t i = 0; i < k; ++i) {
        if (i) s += ",";
        s += factors[i]->name(tuples[c][i]);
      }
      names[c] = s + ")";
    }
  }
  auto enc = [&](const Fn& t) { return ProductAlgebra{nullptr, factors}.encode(t); };
  FiniteAlgebra::Tables t;
  if (is_ordered(v)) {
    t.le.resize(n * n);
    t.join.resize(n * n);
    t.meet.resize(n * n);
    const Signature sig = Signature::of(v);
    if (v == Variety::uquant) t.tensor.resize(n * n);
    Fn w(k);
    for (Elem a = 0; a < n; ++a) {
      for (Elem b = 0; b < n; ++b) {
        bool le = true;
        for (std::size_t i = 0; i < k; ++i) le = le && factors[i]->le(tuples[a][i], tuples[b][i]);
        t.le[a * n + b] = le;
        for (std::size_t i = 0; i < k; ++i) w[i] = factors[i]->join(tuples[a][i], tuples[b][i]);
        t.join[a * n + b] = enc(w);
        for (std::size_t i = 0; i < k; ++i) w[i] = factors[i]->meet(tuples[a][i], tuples[b][i]);
        t.meet[a * n + b] = enc(w);
        if (sig.tensor) {
          for (std::size_t i = 0; i < k; ++i)
            w[i] = factors[i]->tensor(tuples[a][i], tuples[b][i]);
          t.tensor[a * n + b] = enc(w);
        }
      }
    }
    if (v == Variety::uquant) {
      for (std::size_t i = 0; i < k; ++i) w[i] = factors[i]->unit();
      t.unit = enc(w);
    }
    if (v == Variety::cbalg) {
      t.complement.resize(n);
      for (Elem a = 0; a < n; ++a) {
        for (std::size_t i = 0; i < k; ++i) w[i] = factors[i]->complement(tuples[a][i]);
        t.complement[a] = enc(w);
      }
    }
  }
  P.algebra = share(FiniteAlgebra::assemble(v, std::move(names), std::move(t)));
  return P;
}

/// L^X with pointwise structure, X = {0, ..., points-1}.
inline ProductAlgebra power_algebra(const AlgebraPtr& L, std::size_t points,
                                    std::size_t cap = kDefaultAlgebraCap) {
  return product_algebras(std::vector<AlgebraPtr>(points, L), cap, L->variety());
}

/// (P_L f)^-: L^{X2} -> L^{X1}, alpha |-> alpha . f, for f: X1 -> X2.
inline Hom precomposition(const ProductAlgebra& over_x2, const ProductAlgebra& over_x1,
                          std::span<const std::size_t> f) {
  Fn m(over_x2.algebra->size());
  Fn t(over_x1.factors.size());
  for (Elem c = 0; c < m.size(); ++c) {
    const Fn alpha = over_x2.decode(c);
    for (std::size_t x = 0; x < f.size(); ++x) t[x] = alpha[f[x]];
    m[c] = over_x1.encode(t);
  }
  return {over_x2.algebra, over_x1.algebra, std::move(m)};
}

// ---------------------------------------------------------------------------
// Birkhoff duality for finite distributive lattices

/// A finite poset with named points; `le` is an n*n table.
struct Poset {
  std::vector<std::string> names;
  std::vector<std::uint8_t> le;

  std::size_t size() const { return names.size(); }
  bool leq(std::size_t a, std::size_t b) const { return le[a * size() + b] != 0; }
};

/// Join-irreducibles of a frame as a subposet. `elements` maps poset points
/// back to carrier indices.
struct JoinIrreducibles {
  Poset poset;
  std::vector<Elem> elements;
};

inline JoinIrreducibles join_irreducibles(const FiniteAlgebra& F) {
  if (F.variety() != Variety::frame) {
    throw Error(ErrorKind::variety_mismatch, "join_irreducibles expects a frame");
  }
  JoinIrreducibles J;
  J.elements = F.join_irreducible_elements();
  const std::size_t k = J.elements.size();
  J.poset.le.resize(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    J.poset.names.push_back(F.name(J.elements[i]));
    for (std::size_t j = 0; j < k; ++j)
      J.poset.le[i * k + j] = F.le(J.elements[i], J.elements[j]);
  }
  return J;
}

/// Product poset with componentwise order; points in lexicographic order.
inline Poset product_poset(const std::vector<Poset>& ps) {
  std::size_t n = 1;
  for (const auto& p : ps) n *= p.size();
  Poset out;
  std::vector<std::vector<std::size_t>> tuples(n, std::vector<std::size_t>(ps.size()));
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t code = c;
    for (std::size_t i = ps.size(); i-- > 0;) {
      tuples[c][i] = code % ps[i].size();
      code /= ps[i].size();
    }
    std::string s = "(";
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (i) s += ",";
      s += ps[i].names[tuples[c][i]];
    }
    out.names.push_back(s + ")");
  }
  out.le.resize(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      bool le = true;
      for (std::size_t i = 0; i < ps.size(); ++i) le = le && ps[i].leq(tuples[a][i], tuples[b][i]);
      out.le[a * n + b] = le;
    }
  return out;
}

/// Down-set lattice of P. `sets[i]` lists the poset points of carrier element
/// i; carrier order is by size, then lexicographic.
struct DownsetFrame {
  AlgebraPtr algebra;
  Poset poset;
  std::vector<std::vector<std::size_t>> sets;
  std::map<std::vector<std::size_t>, Elem> index;

  Elem element_of(std::vector<std::size_t> pts) const {
    std::sort(pts.begin(), pts.end());
    return index.at(pts);
  }
};

inline std::vector<std::vector<std::size_t>> enumerate_downsets(
    const Poset& P, std::size_t cap = kDefaultAlgebraCap) {
  const std::size_t m = P.size();
  // Linear extension: sort by number of elements below.
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::vector<std::size_t> below(m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) below[i] += P.leq(j, i);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return below[a] < below[b]; });
  std::vector<std::vector<std::size_t>> out;
  std::vector<char> in(m, 0);
  // Decide points in linear-extension order; a point may join only if
  // everything below it already has.
  auto rec = [&](auto&& self, std::size_t pos) -> void {
    if (pos == m) {
      std::vector<std::size_t> s;
      for (std::size_t i = 0; i < m; ++i)
        if (in[i]) s.push_back(i);
      out.push_back(std::move(s));
      check_budget(out.size(), cap, "down-set enumeration");
      return;
    }
    const std::size_t p = order[pos];
    self(self, pos + 1);
    bool ok = true;
    for (std::size_t q = 0; q < m && ok; ++q)
      if (q != p && P.leq(q, p) && !in[q]) ok = false;
    if (ok) {
      in[p] = 1;
      self(self, pos + 1);
      in[p] = 0;
    }
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

/// Lattice of down-sets of P under inclusion, tagged `variety` (frame by
/// default; cbalg for antichains).
inline DownsetFrame downset_frame(const Poset& P, std::size_t cap = kDefaultAlgebraCap,
                                  Variety variety = Variety::frame) {
  DownsetFrame D;
  D.poset = P;
  D.sets = enumerate_downsets(P, cap);
  const std::size_t n = D.sets.size();
  for (Elem i = 0; i < n; ++i) D.index[D.sets[i]] = i;
  std::vector<std::string> names(n);
  for (Elem i = 0; i < n; ++i) {
    std::string s = "{";
    for (std::size_t k = 0; k < D.sets[i].size(); ++k) {
      if (k) s += ",";
      s += P.names[D.sets[i][k]];
    }
    names[i] = s + "}";
  }
  // Down-sets as bitmaps for fast union/intersection.
  const std::size_t m = P.size();
  std::vector<std::vector<char>> bits(n, std::vector<char>(m, 0));
  for (Elem i = 0; i < n; ++i)
    for (auto p : D.sets[i]) bits[i][p] = 1;
  std::map<std::vector<char>, Elem> by_bits;
  for (Elem i = 0; i < n; ++i) by_bits[bits[i]] = i;
  FiniteAlgebra::Tables t;
  t.le.resize(n * n);
  t.join.resize(n * n);
  t.meet.resize(n * n);
  std::vector<char> w(m);
  for (Elem a = 0; a < n; ++a)
    for (Elem b = 0; b < n; ++b) {
      bool sub = true;
      for (std::size_t p = 0; p < m; ++p) sub = sub && (!bits[a][p] || bits[b][p]);
      t.le[a * n + b] = sub;
      for (std::size_t p = 0; p < m; ++p) w[p] = bits[a][p] | bits[b][p];
      t.join[a * n + b] = by_bits.at(w);
      for (std::size_t p = 0; p < m; ++p) w[p] = bits[a][p] & bits[b][p];
      t.meet[a * n + b] = by_bits.at(w);
    }
  D.algebra = share(FiniteAlgebra::assemble(variety, std::move(names), std::move(t)));
  return D;
}

/// The Birkhoff isomorphism F -> Down(J(F)), a |-> {j | j <= a}.
inline Hom birkhoff_iso(const AlgebraPtr& F, const DownsetFrame& D,
                        const JoinIrreducibles& J) {
  Fn m(F->size());
  for (Elem a = 0; a < F->size(); ++a) {
    std::vector<std::size_t> pts;
    for (std::size_t j = 0; j < J.elements.size(); ++j)
      if (F->le(J.elements[j], a)) pts.push_back(j);
    m[a] = D.element_of(pts);
  }
  return {F, D.algebra, std::move(m)};
}

// ---------------------------------------------------------------------------
// Small named algebras used throughout

inline std::vector<std::uint8_t> chain_order(std::size_t n) {
  std::vector<std::uint8_t> le(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) le[i * n + j] = 1;
  return le;
}

inline AlgebraPtr chain(Variety v, std::vector<std::string> names) {
  const std::size_t n = names.size();
  if (v == Variety::uquant) {
    // Meet as tensor: the chain as an idempotent integral quantale.
    std::vector<Elem> t(n * n);
    for (Elem a = 0; a < n; ++a)
      for (Elem b = 0; b < n; ++b) t[a * n + b] = std::min(a, b);
    return share(FiniteAlgebra::validate(v, std::move(names), chain_order(n), std::move(t),
                                         static_cast<Elem>(n - 1)));
  }
  return share(FiniteAlgebra::validate(v, std::move(names), chain_order(n)));
}

/// {0 < 1/(n-1) < ... < 1} with a (x) b = max(0, a + b - 1).
inline AlgebraPtr lukasiewicz_chain(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) names.push_back("0");
    else if (i + 1 == n) names.push_back("1");
    else names.push_back(std::to_string(i) + "/" + std::to_string(n - 1));
  }
  std::vector<Elem> t(n * n);
  const auto top = static_cast<long>(n - 1);
  for (long a = 0; a <= top; ++a)
    for (long b = 0; b <= top; ++b)
      t[a * n + b] = static_cast<Elem>(std::max(0L, a + b - top));
  return share(FiniteAlgebra::validate(Variety::uquant, std::move(names), chain_order(n),
                                       std::move(t), static_cast<Elem>(n - 1)));
}

inline AlgebraPtr discrete_set(std::vector<std::string> names) {
  return share(FiniteAlgebra::validate(Variety::set, std::move(names)));
}

/// Powerset of k atoms as a Boolean algebra of the given lattice variety.
inline AlgebraPtr boolean_algebra(std::size_t atoms, Variety v = Variety::cbalg) {
  Poset antichain;
  for (std::size_t i = 0; i < atoms; ++i) antichain.names.push_back("a" + std::to_string(i));
  antichain.le.assign(atoms * atoms, 0);
  for (std::size_t i = 0; i < atoms; ++i) antichain.le[i * atoms + i] = 1;
  return downset_frame(antichain, kDefaultAlgebraCap, v).algebra;
}

}  // namespace affine

#endif
