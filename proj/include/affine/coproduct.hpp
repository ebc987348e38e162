#ifndef AFFINE_COPRODUCT_HPP
#define AFFINE_COPRODUCT_HPP

#include <map>
#include <string>
#include <vector>

#include "affine/algebra.hpp"

namespace affine {

/// A finite coproduct with its injections. The coding fields hold whatever
/// the variety's construction needs to build mediating maps:
///   set    - `offsets`: factor i occupies [offsets[i], offsets[i+1]);
///   supsl  - `product`: coproduct = product, tuples in mixed radix;
///   frame  - `downsets` over the product of join-irreducible posets;
///   cbalg  - `downsets` over the (discrete) product of atom sets.
/// For frame and cbalg, `basis[i]` lists the carrier indices of factor i's
/// join-irreducibles (atoms), in the order used by the product poset.
struct CoproductResult {
  Variety variety;
  AlgebraPtr algebra;
  std::vector<AlgebraPtr> factors;
  std::vector<Hom> injections;

  std::vector<std::size_t> offsets;
  std::optional<ProductAlgebra> product;
  std::optional<DownsetFrame> downsets;
  std::vector<std::vector<Elem>> basis;
};

namespace detail {

inline Poset basis_poset(const FiniteAlgebra& A, const std::vector<Elem>& basis) {
  Poset P;
  const std::size_t k = basis.size();
  P.le.assign(k * k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    P.names.push_back(A.name(basis[i]));
    for (std::size_t j = 0; j < k; ++j) P.le[i * k + j] = A.le(basis[i], basis[j]);
  }
  return P;
}

inline std::vector<Elem> atoms(const FiniteAlgebra& A) {
  std::vector<Elem> out;
  for (Elem j : A.join_irreducible_elements()) out.push_back(j);
  return out;  // in a Boolean algebra the join-irreducibles are the atoms
}

// Decodes a point of the product basis poset into per-factor basis indices.
inline std::vector<std::size_t> decode_basis(const std::vector<std::vector<Elem>>& basis,
                                             std::size_t code) {
  std::vector<std::size_t> t(basis.size());
  for (std::size_t i = basis.size(); i-- > 0;) {
    t[i] = code % basis[i].size();
    code /= basis[i].size();
  }
  return t;
}

}  // namespace detail

inline CoproductResult coproduct(Variety variety, std::vector<AlgebraPtr> factors,
                                 std::size_t cap = kDefaultAlgebraCap) {
  for (const auto& f : factors) {
    if (f->variety() != variety) throw Error(ErrorKind::variety_mismatch, "coproduct factor");
  }
  CoproductResult C;
  C.variety = variety;
  C.factors = factors;
  switch (variety) {
    case Variety::uquant:
      throw Error(ErrorKind::unsupported_variety,
                  "coproducts of unital quantales are not implemented");
    case Variety::set: {
      std::vector<std::string> names;
      C.offsets.push_back(0);
      for (std::size_t i = 0; i < factors.size(); ++i) {
        for (const auto& nm : factors[i]->names())
          names.push_back(std::to_string(i) + ":" + nm);
        C.offsets.push_back(names.size());
      }
      check_budget(names.size(), cap, "set coproduct size");
      C.algebra = share(FiniteAlgebra::assemble(Variety::set, std::move(names), {}));
      for (std::size_t i = 0; i < factors.size(); ++i) {
        Fn m(factors[i]->size());
        for (Elem a = 0; a < m.size(); ++a) m[a] = static_cast<Elem>(C.offsets[i] + a);
        C.injections.push_back({factors[i], C.algebra, std::move(m)});
      }
      return C;
    }
    case Variety::supsl: {
      C.product = product_algebras(factors, cap, Variety::supsl);
      C.algebra = C.product->algebra;
      for (std::size_t i = 0; i < factors.size(); ++i) {
        Fn m(factors[i]->size());
        Fn t(factors.size());
        for (Elem a = 0; a < m.size(); ++a) {
          for (std::size_t k = 0; k < factors.size(); ++k) t[k] = factors[k]->bottom();
          t[i] = a;
          m[a] = C.product->encode(t);
        }
        C.injections.push_back({factors[i], C.algebra, std::move(m)});
      }
      return C;
    }
    case Variety::frame:
    case Variety::cbalg: {
      std::vector<Poset> posets;
      std::uint64_t points = 1;
      for (const auto& f : factors) {
        C.basis.push_back(variety == Variety::frame ? f->join_irreducible_elements()
                                                    : detail::atoms(*f));
        posets.push_back(detail::basis_poset(*f, C.basis.back()));
        points = sat_mul(points, C.basis.back().size());
      }
      // Down-set counts grow like Dedekind numbers; 64 basis points is already
      // far past any feasible cap.
      check_budget(points, 64, "coproduct basis points");
      Poset P = product_poset(posets);
      if (variety == Variety::cbalg) {
        // Atom tuples are pairwise incomparable.
        for (std::size_t a = 0; a < P.size(); ++a)
          for (std::size_t b = 0; b < P.size(); ++b) P.le[a * P.size() + b] = (a == b);
      }
      C.downsets = downset_frame(P, cap, variety);
      C.algebra = C.downsets->algebra;
      for (std::size_t i = 0; i < factors.size(); ++i) {
        Fn m(factors[i]->size());
        for (Elem a = 0; a < m.size(); ++a) {
          std::vector<std::size_t> pts;
          for (std::size_t p = 0; p < P.size(); ++p) {
            const auto t = detail::decode_basis(C.basis, p);
            if (factors[i]->le(C.basis[i][t[i]], a)) pts.push_back(p);
          }
          m[a] = C.downsets->element_of(pts);
        }
        C.injections.push_back({factors[i], C.algebra, std::move(m)});
      }
      return C;
    }
  }
  return C;
}

/// The unique h with h . injection_i = cocone_i.
inline Hom mediate(const CoproductResult& C, std::span<const Hom> cocone,
                   const AlgebraPtr& target) {
  if (cocone.size() != C.factors.size()) {
    throw Error(ErrorKind::cocone_shape_mismatch, "cocone arity differs from factor count");
  }
  for (std::size_t i = 0; i < cocone.size(); ++i) {
    if (cocone[i].map.size() != C.factors[i]->size() ||
        cocone[i].target->size() != target->size()) {
      throw Error(ErrorKind::cocone_shape_mismatch,
                  "cocone leg " + std::to_string(i) + " has the wrong shape");
    }
  }
  const FiniteAlgebra& B = *target;
  Fn m(C.algebra->size());
  switch (C.variety) {
    case Variety::set:
      for (std::size_t i = 0; i < cocone.size(); ++i)
        for (Elem a = 0; a < C.factors[i]->size(); ++a)
          m[C.offsets[i] + a] = cocone[i].map[a];
      break;
    case Variety::supsl:
      for (Elem c = 0; c < m.size(); ++c) {
        const Fn t = C.product->decode(c);
        Elem acc = B.bottom();
        for (std::size_t i = 0; i < t.size(); ++i) acc = B.join(acc, cocone[i].map[t[i]]);
        m[c] = acc;
      }
      break;
    case Variety::frame:
    case Variety::cbalg:
      for (Elem c = 0; c < m.size(); ++c) {
        Elem acc = B.bottom();
        for (std::size_t p : C.downsets->sets[c]) {
          const auto t = detail::decode_basis(C.basis, p);
          Elem conj = B.top();
          for (std::size_t i = 0; i < t.size(); ++i)
            conj = B.meet(conj, cocone[i].map[C.basis[i][t[i]]]);
          acc = B.join(acc, conj);
        }
        m[c] = acc;
      }
      break;
    case Variety::uquant:
      throw Error(ErrorKind::unsupported_variety, "uquant coproducts");
  }
  return {C.algebra, target, std::move(m)};
}

struct CoproductAudit {
  bool ok = true;
  std::size_t cocones_checked = 0;
  std::vector<std::string> failures;
};

/// For every cocone into every target: the mediating map is a homomorphism,
/// commutes with the injections, and is the only enumerated homomorphism out
/// of the coproduct that does.
inline CoproductAudit verify_coproduct_universal(const CoproductResult& C,
                                                 const std::vector<AlgebraPtr>& targets,
                                                 std::uint64_t cap = kDefaultCandidateCap) {
  CoproductAudit out;
  for (const auto& inj : C.injections) {
    if (auto chk = is_homomorphism(inj); !chk) {
      out.ok = false;
      out.failures.push_back("injection is not a homomorphism: " + chk.failure);
    }
  }
  for (const auto& B : targets) {
    // Restriction of every hom out of the coproduct, keyed by its legs.
    std::map<std::vector<Fn>, std::vector<Fn>> by_legs;
    for (const auto& h : enumerate_homs(C.algebra, B, cap)) {
      std::vector<Fn> legs;
      for (const auto& inj : C.injections) legs.push_back(compose(h, inj).map);
      by_legs[legs].push_back(h.map);
    }
    std::vector<std::vector<Hom>> per_factor;
    std::uint64_t total = 1;
    for (const auto& f : C.factors) {
      per_factor.push_back(enumerate_homs(f, B, cap));
      total = sat_mul(total, per_factor.back().size());
    }
    check_budget(total, cap, "cocone enumeration");
    std::vector<std::size_t> idx(C.factors.size(), 0);
    if (total == 0) continue;
    while (true) {
      std::vector<Hom> cocone;
      std::vector<Fn> key;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        cocone.push_back(per_factor[i][idx[i]]);
        key.push_back(per_factor[i][idx[i]].map);
      }
      ++out.cocones_checked;
      const Hom h = mediate(C, cocone, B);
      auto fail = [&](const std::string& msg) {
        out.ok = false;
        out.failures.push_back(msg + " (target size " + std::to_string(B->size()) + ")");
      };
      if (auto chk = is_homomorphism(h); !chk) fail("mediator not a hom: " + chk.failure);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        if (compose(h, C.injections[i]).map != cocone[i].map) fail("mediator does not commute");
      }
      auto it = by_legs.find(key);
      if (it == by_legs.end() || it->second.size() != 1) {
        fail("mediator not unique among enumerated homs");
      } else if (it->second.front() != h.map) {
        fail("enumerated mediator differs from constructed one");
      }
      std::size_t k = 0;
      while (k < idx.size() && ++idx[k] == per_factor[k].size()) idx[k++] = 0;
      if (k == idx.size()) break;
    }
  }
  return out;
}

}  // namespace affine

#endif
