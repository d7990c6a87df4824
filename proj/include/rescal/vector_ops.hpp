#ifndef RESCAL_VECTOR_OPS_HPP
#define RESCAL_VECTOR_OPS_HPP

// Coefficient-weighted term vectors over a chosen semiring: term formers
// lifted linearly, ordinary (whole-vector) substitution, promotion
// coefficients, and normalization extended by linearity.
//
// Infinite vectors such as promotions are never materialized. They appear
// either as coefficient queries (the coefficient of one bag or stream in a
// promotion has a closed form) or as truncated enumerations over the bags of
// bounded length drawn from a finite support.

#include <cstdint>
#include <functional>
#include <vector>

#include "rescal/combinatorics.hpp"
#include "rescal/rational.hpp"
#include "rescal/reduce.hpp"
#include "rescal/subst.hpp"
#include "rescal/sum.hpp"
#include "rescal/term.hpp"

namespace rescal {

// ---------------------------------------------------------------------------
// Term formers lifted to vectors

template <class K>
ValueLin<K> vlambda(const BaseLin<K>& bodies) {
  ValueLin<K> out;
  for (const auto& [a, c] : bodies.entries()) out.add(mk_value(a), c);
  return out;
}

template <class K>
BaseLin<K> vapp(const HeadLin<K>& heads, const StreamLin<K>& streams) {
  return bilinear<BaseLin<K>>(
      heads, streams,
      [](const Head& h, const Stream& s) { return mk_base(h, s); });
}

template <class K>
BagLin<K> vbag_of(const ValueLin<K>& elems) {
  BagLin<K> out;
  for (const auto& [m, c] : elems.entries()) out.add(mk_bag({m}), c);
  return out;
}

template <class K>
BagLin<K> vbag_union(const BagLin<K>& a, const BagLin<K>& b) {
  return bilinear<BagLin<K>>(a, b, [](const Bag& x, const Bag& y) {
    std::vector<ValuePtr> elems = x.elems;
    elems.insert(elems.end(), y.elems.begin(), y.elems.end());
    return mk_bag(std::move(elems));
  });
}

template <class K>
StreamLin<K> vcons(const BagLin<K>& heads, const StreamLin<K>& tails) {
  return bilinear<StreamLin<K>>(
      heads, tails, [](const Bag& b, const Stream& s) { return mk_cons(b, s); });
}

// ---------------------------------------------------------------------------
// Head vectors: a value vector, or a bare variable, as substitution payload

template <class K>
HeadLin<K> head_vector(const ValueLin<K>& values) {
  HeadLin<K> out;
  for (const auto& [m, c] : values.entries()) out.add(Head::value(m), c);
  return out;
}

template <class K>
HeadLin<K> head_vector(const FreeVar& y) {
  return HeadLin<K>::unit(Head::free(y));
}

// ---------------------------------------------------------------------------
// Ordinary (non-linear) substitution of a head vector for a value variable.
//
// Every occurrence of the variable receives the whole vector; the results
// multiply out. Binders are nameless, and the payload carries only free
// names, so recursion under abstractions cannot capture.

template <class K>
ValueLin<K> subst_ordinary(const ValuePtr& m, const HeadLin<K>& F,
                           const FreeVar& x);
template <class K>
BaseLin<K> subst_ordinary(const Base& a, const HeadLin<K>& F, const FreeVar& x);
template <class K>
BagLin<K> subst_ordinary(const Bag& b, const HeadLin<K>& F, const FreeVar& x);
template <class K>
StreamLin<K> subst_ordinary(const Stream& s, const HeadLin<K>& F,
                            const FreeVar& x);

template <class K>
HeadLin<K> subst_ordinary_head(const Head& e, const HeadLin<K>& F,
                               const FreeVar& x) {
  switch (e.kind) {
    case Head::Kind::Bound:
      return HeadLin<K>::unit(e);
    case Head::Kind::Free:
      if (e.name == x.name && e.index == x.index) return F;
      return HeadLin<K>::unit(e);
    case Head::Kind::Value: {
      HeadLin<K> out;
      ValueLin<K> inner = subst_ordinary(e.val, F, x);
      for (const auto& [m, c] : inner.entries()) out.add(Head::value(m), c);
      return out;
    }
  }
  return {};
}

template <class K>
ValueLin<K> subst_ordinary(const ValuePtr& m, const HeadLin<K>& F,
                           const FreeVar& x) {
  return vlambda(subst_ordinary(m->body, F, x));
}

template <class K>
BaseLin<K> subst_ordinary(const Base& a, const HeadLin<K>& F, const FreeVar& x) {
  return vapp(subst_ordinary_head(a.head, F, x), subst_ordinary(a.args, F, x));
}

template <class K>
BagLin<K> subst_ordinary(const Bag& b, const HeadLin<K>& F, const FreeVar& x) {
  std::vector<ValueLin<K>> parts;
  parts.reserve(b.elems.size());
  for (const auto& e : b.elems) {
    parts.push_back(subst_ordinary(e, F, x));
    if (parts.back().is_zero()) return {};
  }
  BagLin<K> out;
  detail::for_each_product<ValuePtr, K, ValueLess>(
      parts, [&](const std::vector<ValuePtr>& picked, const K& c) {
        out.add(mk_bag(picked), c);
      });
  return out;
}

template <class K>
StreamLin<K> subst_ordinary(const Stream& s, const HeadLin<K>& F,
                            const FreeVar& x) {
  std::vector<BagLin<K>> parts;
  parts.reserve(s.bags.size());
  for (const auto& b : s.bags) {
    parts.push_back(subst_ordinary(b, F, x));
    if (parts.back().is_zero()) return {};
  }
  StreamLin<K> out;
  detail::for_each_product<Bag, K, BagLess>(
      parts, [&](const std::vector<Bag>& picked, const K& c) {
        out.add(mk_stream(picked), c);
      });
  return out;
}

template <class T, class K, class Less>
auto subst_ordinary(const Lin<T, K, Less>& Q, const HeadLin<K>& F,
                    const FreeVar& x) {
  decltype(subst_ordinary(std::declval<const T&>(), F, x)) out;
  for (const auto& [q, c] : Q.entries())
    out += subst_ordinary(q, F, x).scaled(c);
  return out;
}

// ---------------------------------------------------------------------------
// Promotion coefficients
//
// The promotion of a value vector M assigns to the bag [m_1, .., m_k] the
// coefficient (prod_i M_{@m_i}) / d(m̄). The whole promotion is infinite, so
// it is exposed as a per-bag query and a bounded-length enumeration.

template <class K>
using CoeffQuery = std::function<K(const ValuePtr&)>;

template <class K>
CoeffQuery<K> coeff_query(const ValueLin<K>& M) {
  return [M](const ValuePtr& m) { return M.coeff(m); };
}

template <class K>
K promotion_coeff(const CoeffQuery<K>& M, const Bag& b) {
  K prod = semiring<K>::one();
  for (const auto& e : b.elems) {
    prod = semiring<K>::mul(prod, M(e));
    if (semiring<K>::is_zero(prod)) return prod;
  }
  return semiring<K>::div_nat(prod, isotropy_degree(b));
}

template <class K>
K promotion_coeff(const ValueLin<K>& M, const Bag& b) {
  return promotion_coeff(coeff_query(M), b);
}

template <class K>
K stream_promotion_coeff(const std::vector<CoeffQuery<K>>& Ms,
                         const Stream& s) {
  K prod = semiring<K>::one();
  for (size_t i = 0; i < s.bags.size(); ++i) {
    if (i < Ms.size()) {
      prod = semiring<K>::mul(prod, promotion_coeff(Ms[i], s.bags[i]));
    } else if (!s.bags[i].elems.empty()) {
      // Beyond the given prefix the sequence is the zero vector, whose
      // promotion is supported on the empty bag alone.
      return semiring<K>::zero();
    }
    if (semiring<K>::is_zero(prod)) return prod;
  }
  return prod;
}

template <class K>
K stream_promotion_coeff(const std::vector<ValueLin<K>>& Ms, const Stream& s) {
  std::vector<CoeffQuery<K>> qs;
  qs.reserve(Ms.size());
  for (const auto& M : Ms) qs.push_back(coeff_query(M));
  return stream_promotion_coeff(qs, s);
}

// All bags of exactly k elements drawn from the support of M, each with its
// promotion coefficient.
template <class K>
void for_each_promotion_bag(const ValueLin<K>& M, size_t k,
                            const std::function<void(const Bag&, const K&)>& f) {
  std::vector<ValuePtr> supp;
  supp.reserve(M.support_size());
  for (const auto& [m, c] : M.entries()) supp.push_back(m);
  for_each_multiset(supp.size(), k, [&](const std::vector<size_t>& pick) {
    std::vector<ValuePtr> elems;
    elems.reserve(k);
    for (size_t i : pick) elems.push_back(supp[i]);
    Bag b = mk_bag(std::move(elems));
    K c = promotion_coeff(M, b);
    if (!semiring<K>::is_zero(c)) f(b, c);
  });
}

// The promotion truncated to bags of at most max_len elements.
template <class K>
BagLin<K> promotion_truncated(const ValueLin<K>& M, size_t max_len) {
  BagLin<K> out;
  for (size_t k = 0; k <= max_len; ++k)
    for_each_promotion_bag<K>(M, k,
                              [&](const Bag& b, const K& c) { out.add(b, c); });
  return out;
}

// ---------------------------------------------------------------------------
// Substitution of a bag vector, and normalization, extended by linearity

template <class K, class T>
auto subst_bag_linear(const T& q, const BagLin<K>& bags, const FreeVar& x) {
  decltype(convert_coeffs<K>(subst_bag(q, std::declval<const Bag&>(), x))) out;
  for (const auto& [b, c] : bags.entries())
    out += convert_coeffs<K>(subst_bag(q, b, x)).scaled(c);
  return out;
}

template <class K>
ValueLin<K> normalize_vector(const ValueLin<K>& V) {
  ValueLin<K> out;
  for (const auto& [m, c] : V.entries())
    out += convert_coeffs<K>(normalize(m)).scaled(c);
  return out;
}

template <class K>
BaseLin<K> normalize_vector(const BaseLin<K>& V) {
  BaseLin<K> out;
  for (const auto& [a, c] : V.entries())
    out += convert_coeffs<K>(normalize_base(a)).scaled(c);
  return out;
}

}  // namespace rescal

#endif  // RESCAL_VECTOR_OPS_HPP
