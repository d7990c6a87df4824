#ifndef RESCAL_SUM_HPP
#define RESCAL_SUM_HPP

// Finite formal linear combinations of canonical terms, keyed by the global
// term order. One container serves both the natural-number sums produced by
// reduction and the boolean/rational vectors of the coefficient semirings.
// Invariant: no entry carries a zero coefficient; the zero sum is the empty
// map.

#include <map>
#include <utility>

#include "rescal/rational.hpp"
#include "rescal/term.hpp"

namespace rescal {

template <class T, class K, class Less>
class Lin {
 public:
  using map_type = std::map<T, K, Less>;

  Lin() = default;

  static Lin unit(T t) {
    Lin l;
    l.entries_.emplace(std::move(t), semiring<K>::one());
    return l;
  }
  static Lin single(T t, K c) {
    Lin l;
    l.add(std::move(t), std::move(c));
    return l;
  }

  bool is_zero() const { return entries_.empty(); }
  size_t support_size() const { return entries_.size(); }
  const map_type& entries() const { return entries_; }

  K coeff(const T& t) const {
    auto it = entries_.find(t);
    return it == entries_.end() ? semiring<K>::zero() : it->second;
  }
  bool contains(const T& t) const { return entries_.count(t) != 0; }

  void add(T t, K c) {
    if (semiring<K>::is_zero(c)) return;
    auto [it, inserted] = entries_.emplace(std::move(t), c);
    if (!inserted) {
      it->second = semiring<K>::add(it->second, c);
      if (semiring<K>::is_zero(it->second)) entries_.erase(it);
    }
  }

  Lin& operator+=(const Lin& o) {
    for (const auto& [t, c] : o.entries_) add(t, c);
    return *this;
  }
  friend Lin operator+(Lin a, const Lin& b) {
    a += b;
    return a;
  }

  Lin scaled(const K& c) const {
    Lin r;
    if (semiring<K>::is_zero(c)) return r;
    for (const auto& [t, k] : entries_) r.add(t, semiring<K>::mul(c, k));
    return r;
  }

  friend bool operator==(const Lin& a, const Lin& b) {
    if (a.entries_.size() != b.entries_.size()) return false;
    auto ia = a.entries_.begin();
    auto ib = b.entries_.begin();
    for (; ia != a.entries_.end(); ++ia, ++ib) {
      if (!Less{}(ia->first, ib->first) && !Less{}(ib->first, ia->first) &&
          ia->second == ib->second)
        continue;
      return false;
    }
    return true;
  }
  friend bool operator!=(const Lin& a, const Lin& b) { return !(a == b); }

 private:
  map_type entries_;
};

template <class K>
using ValueLin = Lin<ValuePtr, K, ValueLess>;
template <class K>
using BaseLin = Lin<Base, K, BaseLess>;
template <class K>
using BagLin = Lin<Bag, K, BagLess>;
template <class K>
using StreamLin = Lin<Stream, K, StreamLess>;
template <class K>
using HeadLin = Lin<Head, K, HeadLess>;

using ValueSum = ValueLin<Nat>;
using BaseSum = BaseLin<Nat>;
using BagSum = BagLin<Nat>;
using StreamSum = StreamLin<Nat>;
using HeadSum = HeadLin<Nat>;

// Applies a sum-valued function to every support element and merges:
// map_lin(f, Σ cᵢ·tᵢ) = Σ cᵢ·f(tᵢ).
template <class Out, class T, class K, class Less, class F>
Out map_lin(const Lin<T, K, Less>& in, F&& f) {
  Out out;
  for (const auto& [t, c] : in.entries()) out += f(t).scaled(c);
  return out;
}

// Same, for functions returning plain terms rather than sums.
template <class Out, class T, class K, class Less, class F>
Out map_terms(const Lin<T, K, Less>& in, F&& f) {
  Out out;
  for (const auto& [t, c] : in.entries()) out.add(f(t), c);
  return out;
}

// Bilinear combination: combine(Σ aᵢ·sᵢ, Σ bⱼ·tⱼ) = Σ aᵢbⱼ·f(sᵢ, tⱼ).
template <class Out, class A, class B, class F>
Out bilinear(const A& lhs, const B& rhs, F&& f) {
  Out out;
  for (const auto& [s, a] : lhs.entries())
    for (const auto& [t, b] : rhs.entries()) {
      using K = std::decay_t<decltype(a)>;
      out.add(f(s, t), semiring<K>::mul(a, b));
    }
  return out;
}

// Converts the coefficients of a sum into another semiring.
template <class KOut, class T, class K, class Less>
Lin<T, KOut, Less> convert_coeffs(const Lin<T, K, Less>& in) {
  static_assert(std::is_same_v<K, Nat>);
  Lin<T, KOut, Less> out;
  for (const auto& [t, c] : in.entries())
    out.add(t, semiring<KOut>::from_nat(c));
  return out;
}

}  // namespace rescal

#endif  // RESCAL_SUM_HPP
