#ifndef AFFINE_FREE_HPP
#define AFFINE_FREE_HPP

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "affine/algebra.hpp"

namespace affine {

/// Finite set of naturals (0 allowed), kept sorted and duplicate-free. These
/// are the finitely generated elements of the free unital quantale on one
/// generator: join is union, tensor is Minkowski addition, unit is {0}.
class FinNatSet {
 public:
  FinNatSet() = default;
  FinNatSet(std::initializer_list<std::uint32_t> xs) : xs_(xs) { normalize(); }
  explicit FinNatSet(std::vector<std::uint32_t> xs) : xs_(std::move(xs)) { normalize(); }

  const std::vector<std::uint32_t>& values() const noexcept { return xs_; }
  bool empty() const noexcept { return xs_.empty(); }
  bool contains(std::uint32_t n) const {
    return std::binary_search(xs_.begin(), xs_.end(), n);
  }
  std::uint32_t min() const { return xs_.front(); }

  friend bool operator==(const FinNatSet&, const FinNatSet&) = default;
  friend auto operator<=>(const FinNatSet&, const FinNatSet&) = default;

  std::string str() const {
    std::string s = "{";
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(xs_[i]);
    }
    return s + "}";
  }

 private:
  void normalize() {
    std::sort(xs_.begin(), xs_.end());
    xs_.erase(std::unique(xs_.begin(), xs_.end()), xs_.end());
  }
  std::vector<std::uint32_t> xs_;
};

inline FinNatSet set_union(const FinNatSet& s, const FinNatSet& t) {
  std::vector<std::uint32_t> out;
  std::set_union(s.values().begin(), s.values().end(), t.values().begin(),
                 t.values().end(), std::back_inserter(out));
  return FinNatSet(std::move(out));
}

/// {n + m | n in s, m in t}.
inline FinNatSet minkowski_mul(const FinNatSet& s, const FinNatSet& t) {
  std::vector<std::uint32_t> out;
  out.reserve(s.values().size() * t.values().size());
  for (auto n : s.values())
    for (auto m : t.values()) out.push_back(n + m);
  return FinNatSet(std::move(out));
}

/// Free algebra on a single generator. The unital-quantale case is infinite
/// and stays symbolic: `algebra` is null and elements are FinNatSets, with
/// the generator {1}.
struct FreeOnOne {
  Variety variety;
  AlgebraPtr algebra;
  Elem generator = 0;

  bool symbolic() const noexcept { return algebra == nullptr; }
};

inline FreeOnOne free_on_one(Variety v) {
  switch (v) {
    case Variety::set:
      return {v, discrete_set({"*"}), 0};
    case Variety::supsl:
      return {v, chain(v, {"bot", "top"}), 1};
    case Variety::frame:
      return {v, chain(v, {"bot", "c", "top"}), 1};
    case Variety::cbalg: {
      // bot < a, b < top with b = a*.
      std::vector<std::uint8_t> le = {1, 1, 1, 1,  //
                                      0, 1, 0, 1,  //
                                      0, 0, 1, 1,  //
                                      0, 0, 0, 1};
      return {v, share(FiniteAlgebra::validate(v, {"bot", "a", "b", "top"}, le)), 1};
    }
    case Variety::uquant:
      return {v, nullptr, 0};
  }
  return {v, nullptr, 0};
}

/// a^n in a unital quantale, with a^0 = unit.
inline Elem tensor_power(const FiniteAlgebra& L, Elem a, std::uint32_t n) {
  Elem r = L.unit();
  for (std::uint32_t i = 0; i < n; ++i) r = L.tensor(r, a);
  return r;
}

/// Value of the unique unital-quantale map from the free quantale into L
/// sending {1} to a: the join of a^n over n in the set. For integral L the
/// closed form (top if 0 is present, a^min otherwise, bottom for the empty
/// set) is computed as well and must agree.
inline Elem eval_free_quantale_extension(const FiniteAlgebra& L, Elem a,
                                         const FinNatSet& s) {
  if (L.variety() != Variety::uquant) {
    throw Error(ErrorKind::variety_mismatch, "free quantale evaluation needs a uquant");
  }
  Elem acc = L.bottom();
  // Powers repeat eventually; walk them once up to the largest exponent.
  Elem power = L.unit();
  std::uint32_t next = 0;
  for (auto n : s.values()) {
    while (next < n) {
      power = L.tensor(power, a);
      ++next;
    }
    acc = L.join(acc, power);
  }
  if (L.is_integral()) {
    Elem shortcut = L.bottom();
    if (s.contains(0)) shortcut = L.top();
    else if (!s.empty()) shortcut = tensor_power(L, a, s.min());
    if (shortcut != acc) {
      throw Error(ErrorKind::integral_shortcut_mismatch,
                  "general " + L.name(acc) + " vs shortcut " + L.name(shortcut),
                  {L.name(a), s.str()});
    }
  }
  return acc;
}

/// Map out of the symbolic free quantale determined by the generator image.
struct QuantaleEvaluator {
  AlgebraPtr target;
  Elem generator_image;

  Elem operator()(const FinNatSet& s) const {
    return eval_free_quantale_extension(*target, generator_image, s);
  }
};

/// The unique homomorphism S -> A sending the generator to `a`.
inline Hom extend(const FreeOnOne& S, const AlgebraPtr& A, Elem a) {
  if (S.symbolic()) {
    throw Error(ErrorKind::unsupported_variety,
                "the free unital quantale is symbolic; use extend_symbolic");
  }
  require_same_variety(*S.algebra, *A);
  const Elem gens[] = {S.generator};
  const Elem imgs[] = {a};
  auto h = extend_by_closure(*S.algebra, *A, gens, imgs);
  if (!h) {
    throw Error(ErrorKind::malformed, "generator image does not extend");
  }
  return {S.algebra, A, std::move(*h)};
}

inline QuantaleEvaluator extend_symbolic(const FreeOnOne& S, const AlgebraPtr& A, Elem a) {
  if (!S.symbolic()) throw Error(ErrorKind::malformed, "extend_symbolic on a finite S");
  if (A->variety() != Variety::uquant) {
    throw Error(ErrorKind::variety_mismatch, "symbolic free object is a unital quantale");
  }
  return {A, a};
}

}  // namespace affine

#endif
