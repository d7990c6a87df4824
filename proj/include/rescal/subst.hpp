#ifndef RESCAL_SUBST_HPP
#define RESCAL_SUBST_HPP

// Substitution and binder bookkeeping.
//
// Two substitution operators drive the rewrite theory:
//
//   subst_bag(q, b, x)       substitutes a bag for one value variable. The
//                            result sums over all ways to partition b among
//                            the occurrences of x, and is zero unless |b|
//                            equals the occurrence count.
//   subst_stream(q, s, X)    substitutes a stream for a whole sequence
//                            variable, consuming the stream one bag at a
//                            time: substitute for X[0], shift the remaining
//                            components down, repeat, then erase X.
//
// subst_stream_direct computes the same operator in a single structural
// pass, partitioning the stream instead of a bag; it is kept as an
// independent implementation so tests can compare the two.
//
// Binders are nameless, so descending under one is done by opening it:
// bound components become components of a fresh free sequence variable.
// All operators here require their value-term arguments to have no bound
// variable pointing above their own root; callers that walk into a term
// open each binder they cross, which keeps every substitution capture-free.

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rescal/combinatorics.hpp"
#include "rescal/sum.hpp"
#include "rescal/term.hpp"

namespace rescal {

// ---------------------------------------------------------------------------
// Shifts of one free sequence variable

namespace detail {

inline ValuePtr shift_value(const ValuePtr& v, const std::string& name,
                            int dir);

inline Head shift_head(const Head& h, const std::string& name, int dir) {
  if (h.kind == Head::Kind::Free && h.name == name) {
    Head out = h;
    out.index = static_cast<uint32_t>(static_cast<int64_t>(h.index) + dir);
    return out;
  }
  if (h.kind == Head::Kind::Value)
    return Head::value(shift_value(h.val, name, dir));
  return h;
}

inline Bag shift_bag(const Bag& b, const std::string& name, int dir) {
  std::vector<ValuePtr> elems;
  elems.reserve(b.elems.size());
  for (const auto& e : b.elems) elems.push_back(shift_value(e, name, dir));
  return mk_bag(std::move(elems));
}

inline Stream shift_stream(const Stream& s, const std::string& name, int dir) {
  std::vector<Bag> bags;
  bags.reserve(s.bags.size());
  for (const auto& b : s.bags) bags.push_back(shift_bag(b, name, dir));
  return mk_stream(std::move(bags));
}

inline Base shift_base(const Base& b, const std::string& name, int dir) {
  return mk_base(shift_head(b.head, name, dir),
                 shift_stream(b.args, name, dir));
}

inline ValuePtr shift_value(const ValuePtr& v, const std::string& name,
                            int dir) {
  if (seq_occurrences(v, name) == 0) return v;
  return mk_value(shift_base(v->body, name, dir));
}

inline void require_no_component_zero(uint64_t zero_occurrences) {
  if (zero_occurrences != 0)
    throw std::invalid_argument(
        "shift_down: component 0 of the shifted variable occurs free");
}

}  // namespace detail

// q with every component X[i] renamed to X[i+1].
inline ValuePtr shift_up(const ValuePtr& v, const std::string& name) {
  return detail::shift_value(v, name, +1);
}
inline Base shift_up(const Base& b, const std::string& name) {
  return detail::shift_base(b, name, +1);
}
inline Bag shift_up(const Bag& b, const std::string& name) {
  return detail::shift_bag(b, name, +1);
}
inline Stream shift_up(const Stream& s, const std::string& name) {
  return detail::shift_stream(s, name, +1);
}

// q with every component X[i+1] renamed to X[i]. X[0] must not occur.
inline ValuePtr shift_down(const ValuePtr& v, const std::string& name) {
  detail::require_no_component_zero(occurrences(v, FreeVar{name, 0}));
  return detail::shift_value(v, name, -1);
}
inline Base shift_down(const Base& b, const std::string& name) {
  detail::require_no_component_zero(occurrences(b, FreeVar{name, 0}));
  return detail::shift_base(b, name, -1);
}
inline Bag shift_down(const Bag& b, const std::string& name) {
  detail::require_no_component_zero(occurrences(b, FreeVar{name, 0}));
  return detail::shift_bag(b, name, -1);
}
inline Stream shift_down(const Stream& s, const std::string& name) {
  detail::require_no_component_zero(occurrences(s, FreeVar{name, 0}));
  return detail::shift_stream(s, name, -1);
}

// Erasure: q itself when no component of X occurs free in q, zero otherwise.
inline ValueSum erase_seq(const ValuePtr& v, const std::string& name) {
  return seq_occurrences(v, name) ? ValueSum{} : ValueSum::unit(v);
}
inline BaseSum erase_seq(const Base& b, const std::string& name) {
  return seq_occurrences(b, name) ? BaseSum{} : BaseSum::unit(b);
}
inline BagSum erase_seq(const Bag& b, const std::string& name) {
  return seq_occurrences(b, name) ? BagSum{} : BagSum::unit(b);
}
inline StreamSum erase_seq(const Stream& s, const std::string& name) {
  return seq_occurrences(s, name) ? StreamSum{} : StreamSum::unit(s);
}

// ---------------------------------------------------------------------------
// Opening and closing binders

namespace detail {

inline ValuePtr open_value(const ValuePtr& v, const std::string& name,
                           uint32_t level);

// Opening preserves the position of every subterm (bags are not re-sorted
// even though the renaming can perturb the term order): paths computed on a
// closed term remain valid on its opened body. Everything is re-sorted when
// the binder is closed again.
inline Base open_base(const Base& b, const std::string& name, uint32_t level) {
  Head h = b.head;
  if (h.kind == Head::Kind::Bound && h.depth == level)
    h = Head::free(name, h.index);
  else if (h.kind == Head::Kind::Value)
    h = Head::value(open_value(h.val, name, level));
  std::vector<Bag> bags;
  bags.reserve(b.args.bags.size());
  for (const auto& bag : b.args.bags) {
    std::vector<ValuePtr> elems;
    elems.reserve(bag.elems.size());
    for (const auto& e : bag.elems)
      elems.push_back(open_value(e, name, level));
    bags.push_back(Bag{std::move(elems)});
  }
  return Base{std::move(h), Stream{std::move(bags)}};
}

inline ValuePtr open_value(const ValuePtr& v, const std::string& name,
                           uint32_t level) {
  return mk_value(open_base(v->body, name, level + 1));
}

inline ValuePtr close_value(const ValuePtr& v, const std::string& name,
                            uint32_t level);

inline Base close_base(const Base& b, const std::string& name,
                       uint32_t level) {
  Head h = b.head;
  if (h.kind == Head::Kind::Free && h.name == name)
    h = Head::bound(level, h.index);
  else if (h.kind == Head::Kind::Value)
    h = Head::value(close_value(h.val, name, level));
  std::vector<Bag> bags;
  bags.reserve(b.args.bags.size());
  for (const auto& bag : b.args.bags) {
    std::vector<ValuePtr> elems;
    elems.reserve(bag.elems.size());
    for (const auto& e : bag.elems)
      elems.push_back(close_value(e, name, level));
    bags.push_back(mk_bag(std::move(elems)));
  }
  return mk_base(std::move(h), mk_stream(std::move(bags)));
}

// Closing rebuilds unconditionally: bodies handed out by open_base keep
// their original bag order, so the rebuild here is what restores the sorted
// canonical form.
inline ValuePtr close_value(const ValuePtr& v, const std::string& name,
                            uint32_t level) {
  return mk_value(close_base(v->body, name, level + 1));
}

}  // namespace detail

// Opens the binder of a value term: the body is returned with the bound
// components replaced by a fresh free sequence variable, whose name avoids
// the free names of v and everything in `avoid`.
inline std::pair<std::string, Base> open_binder(
    const ValuePtr& v, const std::set<std::string>& avoid = {},
    const std::string& hint = "t") {
  std::set<std::string> names = free_names(v);
  names.insert(avoid.begin(), avoid.end());
  std::string name = fresh_name(names, hint);
  return {name, detail::open_base(v->body, name, 0)};
}

// Inverse of open_binder: rebinds the components of `name` in a base term.
inline ValuePtr close_binder(const std::string& name, const Base& body) {
  return mk_value(detail::close_base(body, name, 0));
}

// ---------------------------------------------------------------------------
// Plain variable renaming (one value variable to a head expression)

namespace detail {

inline ValuePtr replace_var_value(const ValuePtr& v, const FreeVar& x,
                                  const Head& h);

inline Base replace_var_base(const Base& b, const FreeVar& x, const Head& h) {
  Head head = b.head;
  if (head.kind == Head::Kind::Free && head.name == x.name &&
      head.index == x.index)
    head = h;
  else if (head.kind == Head::Kind::Value)
    head = Head::value(replace_var_value(head.val, x, h));
  std::vector<Bag> bags;
  bags.reserve(b.args.bags.size());
  for (const auto& bag : b.args.bags) {
    std::vector<ValuePtr> elems;
    elems.reserve(bag.elems.size());
    for (const auto& e : bag.elems)
      elems.push_back(replace_var_value(e, x, h));
    bags.push_back(mk_bag(std::move(elems)));
  }
  return mk_base(std::move(head), mk_stream(std::move(bags)));
}

inline ValuePtr replace_var_value(const ValuePtr& v, const FreeVar& x,
                                  const Head& h) {
  if (occurrences(v, x) == 0) return v;
  return mk_value(replace_var_base(v->body, x, h));
}

}  // namespace detail

// q{h/x}: every head occurrence of the value variable x becomes the head h.
// h must not be a bound variable (a free head or a value term never needs a
// depth adjustment when it lands under additional binders).
inline Base replace_var(const Base& b, const FreeVar& x, const Head& h) {
  if (h.kind == Head::Kind::Bound)
    throw std::invalid_argument("replace_var: replacement head is bound");
  return detail::replace_var_base(b, x, h);
}
inline ValuePtr replace_var(const ValuePtr& v, const FreeVar& x,
                            const Head& h) {
  if (h.kind == Head::Kind::Bound)
    throw std::invalid_argument("replace_var: replacement head is bound");
  return detail::replace_var_value(v, x, h);
}

// Single-variable abstraction: absorbs the free value variable x into the
// binder of m. The binder components of m move up one slot and x becomes
// component 0.
inline ValuePtr lambda_single(const FreeVar& x, const ValuePtr& m) {
  auto [y, body] = open_binder(m, {x.name});
  Base shifted = shift_up(body, y);
  Base renamed = replace_var(shifted, x, Head::free(y, 0));
  return close_binder(y, renamed);
}

// ---------------------------------------------------------------------------
// Bag substitution

namespace detail {

inline Bag bag_restrict(const Bag& b, const std::vector<size_t>& idx) {
  std::vector<ValuePtr> elems;
  elems.reserve(idx.size());
  for (size_t i : idx) elems.push_back(b.elems[i]);
  return mk_bag(std::move(elems));
}

// Enumerates the cartesian product of the supports of `parts`, reporting
// each selection together with the product of its coefficients.
template <class T, class K, class Less>
void for_each_product(
    const std::vector<Lin<T, K, Less>>& parts,
    const std::function<void(const std::vector<T>&, const K&)>& emit) {
  std::vector<T> picked;
  picked.reserve(parts.size());
  std::function<void(size_t, K)> go = [&](size_t i, K coeff) {
    if (i == parts.size()) {
      emit(picked, coeff);
      return;
    }
    for (const auto& [t, c] : parts[i].entries()) {
      picked.push_back(t);
      go(i + 1, semiring<K>::mul(coeff, c));
      picked.pop_back();
    }
  };
  go(0, semiring<K>::one());
}

}  // namespace detail

inline ValueSum subst_bag(const ValuePtr& m, const Bag& b, const FreeVar& x);
inline BaseSum subst_bag(const Base& a, const Bag& b, const FreeVar& x);
inline BagSum subst_bag(const Bag& m, const Bag& b, const FreeVar& x);
inline StreamSum subst_bag(const Stream& s, const Bag& b, const FreeVar& x);

inline HeadSum subst_bag_head(const Head& e, const Bag& b, const FreeVar& x) {
  switch (e.kind) {
    case Head::Kind::Bound:
      return b.elems.empty() ? HeadSum::unit(e) : HeadSum{};
    case Head::Kind::Free:
      if (e.name == x.name && e.index == x.index)
        return b.elems.size() == 1 ? HeadSum::unit(Head::value(b.elems[0]))
                                   : HeadSum{};
      return b.elems.empty() ? HeadSum::unit(e) : HeadSum{};
    case Head::Kind::Value: {
      ValueSum vs = subst_bag(e.val, b, x);
      return map_terms<HeadSum>(
          vs, [](const ValuePtr& v) { return Head::value(v); });
    }
  }
  return {};
}

inline ValueSum subst_bag(const ValuePtr& m, const Bag& b, const FreeVar& x) {
  if (occurrences(m, x) != b.elems.size()) return {};
  BaseSum inner = subst_bag(m->body, b, x);
  return map_terms<ValueSum>(inner,
                             [](const Base& a) { return mk_value(a); });
}

inline BaseSum subst_bag(const Base& a, const Bag& b, const FreeVar& x) {
  if (occurrences(a, x) != b.elems.size()) return {};
  BaseSum out;
  for_each_partitioning(
      b.elems.size(), 2, [&](const std::vector<std::vector<size_t>>& blocks) {
        HeadSum hs =
            subst_bag_head(a.head, detail::bag_restrict(b, blocks[0]), x);
        if (hs.is_zero()) return;
        StreamSum ss = subst_bag(a.args, detail::bag_restrict(b, blocks[1]), x);
        out += bilinear<BaseSum>(hs, ss, [](const Head& h, const Stream& s) {
          return mk_base(h, s);
        });
      });
  return out;
}

inline BagSum subst_bag(const Bag& m, const Bag& b, const FreeVar& x) {
  if (occurrences(m, x) != b.elems.size()) return {};
  size_t k = m.elems.size();
  BagSum out;
  for_each_partitioning(
      b.elems.size(), k, [&](const std::vector<std::vector<size_t>>& blocks) {
        std::vector<ValueSum> parts;
        parts.reserve(k);
        for (size_t i = 0; i < k; ++i) {
          parts.push_back(
              subst_bag(m.elems[i], detail::bag_restrict(b, blocks[i]), x));
          if (parts.back().is_zero()) return;
        }
        detail::for_each_product<ValuePtr, Nat, ValueLess>(
            parts, [&](const std::vector<ValuePtr>& picked, const Nat& c) {
              out.add(mk_bag(picked), c);
            });
      });
  return out;
}

inline StreamSum subst_bag(const Stream& s, const Bag& b, const FreeVar& x) {
  if (occurrences(s, x) != b.elems.size()) return {};
  size_t r = s.bags.size();
  if (r == 0)
    return b.elems.empty() ? StreamSum::unit(Stream{}) : StreamSum{};
  StreamSum out;
  for_each_partitioning(
      b.elems.size(), r, [&](const std::vector<std::vector<size_t>>& blocks) {
        std::vector<BagSum> parts;
        parts.reserve(r);
        for (size_t i = 0; i < r; ++i) {
          parts.push_back(
              subst_bag(s.bags[i], detail::bag_restrict(b, blocks[i]), x));
          if (parts.back().is_zero()) return;
        }
        detail::for_each_product<Bag, Nat, BagLess>(
            parts, [&](const std::vector<Bag>& picked, const Nat& c) {
              out.add(mk_stream(picked), c);
            });
      });
  return out;
}

// ---------------------------------------------------------------------------
// Stream substitution, one bag at a time

namespace detail {

template <class T, class Sum, class ShiftFn>
Sum subst_stream_iter(const T& q, const Stream& s, const std::string& X,
                      ShiftFn&& shift) {
  if (seq_occurrences(s, X) != 0)
    throw std::invalid_argument(
        "subst_stream: the stream mentions the substituted variable");
  Sum cur = Sum::unit(q);
  for (const auto& b : s.bags) {
    cur = map_lin<Sum>(cur,
                       [&](const T& t) { return subst_bag(t, b, FreeVar{X, 0}); });
    if (cur.is_zero()) return cur;
    cur = map_terms<Sum>(cur, [&](const T& t) { return shift(t, X); });
  }
  Sum out;
  for (const auto& [t, c] : cur.entries())
    if (seq_occurrences(t, X) == 0) out.add(t, c);
  return out;
}

}  // namespace detail

inline ValueSum subst_stream(const ValuePtr& m, const Stream& s,
                             const std::string& X) {
  return detail::subst_stream_iter<ValuePtr, ValueSum>(
      m, s, X,
      [](const ValuePtr& t, const std::string& n) { return shift_down(t, n); });
}
inline BaseSum subst_stream(const Base& a, const Stream& s,
                            const std::string& X) {
  return detail::subst_stream_iter<Base, BaseSum>(
      a, s, X,
      [](const Base& t, const std::string& n) { return shift_down(t, n); });
}
inline BagSum subst_stream(const Bag& b, const Stream& s,
                           const std::string& X) {
  return detail::subst_stream_iter<Bag, BagSum>(
      b, s, X,
      [](const Bag& t, const std::string& n) { return shift_down(t, n); });
}
inline StreamSum subst_stream(const Stream& t, const Stream& s,
                              const std::string& X) {
  return detail::subst_stream_iter<Stream, StreamSum>(
      t, s, X,
      [](const Stream& u, const std::string& n) { return shift_down(u, n); });
}

// ---------------------------------------------------------------------------
// Stream substitution, single structural pass

namespace detail {

inline uint64_t stream_element_count(const Stream& s) {
  uint64_t n = 0;
  for (const auto& b : s.bags) n += b.elems.size();
  return n;
}

// Enumerates all ways to split each component bag of s among k blocks,
// reporting the k resulting streams.
inline void for_each_stream_partitioning(
    const Stream& s, size_t k,
    const std::function<void(const std::vector<Stream>&)>& visit) {
  std::vector<std::pair<size_t, ValuePtr>> elems;
  for (size_t i = 0; i < s.bags.size(); ++i)
    for (const auto& e : s.bags[i].elems) elems.emplace_back(i, e);
  if (k == 0) {
    if (elems.empty()) visit({});
    return;
  }
  std::vector<size_t> assign(elems.size(), 0);
  for (;;) {
    std::vector<std::vector<std::vector<ValuePtr>>> buckets(
        k, std::vector<std::vector<ValuePtr>>(s.bags.size()));
    for (size_t j = 0; j < elems.size(); ++j)
      buckets[assign[j]][elems[j].first].push_back(elems[j].second);
    std::vector<Stream> blocks;
    blocks.reserve(k);
    for (size_t b = 0; b < k; ++b) {
      std::vector<Bag> bags;
      bags.reserve(s.bags.size());
      for (auto& picked : buckets[b]) bags.push_back(mk_bag(std::move(picked)));
      blocks.push_back(mk_stream(std::move(bags)));
    }
    visit(blocks);
    size_t j = 0;
    while (j < assign.size() && assign[j] == k - 1) assign[j++] = 0;
    if (j == assign.size()) break;
    ++assign[j];
  }
}

}  // namespace detail

inline ValueSum subst_stream_direct(const ValuePtr& m, const Stream& s,
                                    const std::string& X);
inline BaseSum subst_stream_direct(const Base& a, const Stream& s,
                                   const std::string& X);
inline BagSum subst_stream_direct(const Bag& b, const Stream& s,
                                  const std::string& X);
inline StreamSum subst_stream_direct(const Stream& t, const Stream& s,
                                     const std::string& X);

inline HeadSum subst_stream_direct_head(const Head& e, const Stream& s,
                                        const std::string& X) {
  switch (e.kind) {
    case Head::Kind::Bound:
      return s.bags.empty() ? HeadSum::unit(e) : HeadSum{};
    case Head::Kind::Free:
      if (e.name == X) {
        // The whole stream must be a single value sitting at component
        // e.index; in the trimmed representation that makes it the last bag.
        if (s.bags.size() == e.index + 1 &&
            s.bags[e.index].elems.size() == 1) {
          bool rest_empty = true;
          for (size_t i = 0; i < e.index; ++i)
            if (!s.bags[i].elems.empty()) rest_empty = false;
          if (rest_empty)
            return HeadSum::unit(Head::value(s.bags[e.index].elems[0]));
        }
        return {};
      }
      return s.bags.empty() ? HeadSum::unit(e) : HeadSum{};
    case Head::Kind::Value: {
      ValueSum vs = subst_stream_direct(e.val, s, X);
      return map_terms<HeadSum>(
          vs, [](const ValuePtr& v) { return Head::value(v); });
    }
  }
  return {};
}

inline ValueSum subst_stream_direct(const ValuePtr& m, const Stream& s,
                                    const std::string& X) {
  if (seq_occurrences(m, X) != detail::stream_element_count(s)) return {};
  BaseSum inner = subst_stream_direct(m->body, s, X);
  return map_terms<ValueSum>(inner,
                             [](const Base& a) { return mk_value(a); });
}

inline BaseSum subst_stream_direct(const Base& a, const Stream& s,
                                   const std::string& X) {
  if (seq_occurrences(a, X) != detail::stream_element_count(s)) return {};
  BaseSum out;
  detail::for_each_stream_partitioning(
      s, 2, [&](const std::vector<Stream>& blocks) {
        HeadSum hs = subst_stream_direct_head(a.head, blocks[0], X);
        if (hs.is_zero()) return;
        StreamSum ss = subst_stream_direct(a.args, blocks[1], X);
        out += bilinear<BaseSum>(hs, ss, [](const Head& h, const Stream& t) {
          return mk_base(h, t);
        });
      });
  return out;
}

inline BagSum subst_stream_direct(const Bag& b, const Stream& s,
                                  const std::string& X) {
  if (seq_occurrences(b, X) != detail::stream_element_count(s)) return {};
  size_t k = b.elems.size();
  BagSum out;
  detail::for_each_stream_partitioning(
      s, k, [&](const std::vector<Stream>& blocks) {
        std::vector<ValueSum> parts;
        parts.reserve(k);
        for (size_t i = 0; i < k; ++i) {
          parts.push_back(subst_stream_direct(b.elems[i], blocks[i], X));
          if (parts.back().is_zero()) return;
        }
        detail::for_each_product<ValuePtr, Nat, ValueLess>(
            parts, [&](const std::vector<ValuePtr>& picked, const Nat& c) {
              out.add(mk_bag(picked), c);
            });
      });
  return out;
}

inline StreamSum subst_stream_direct(const Stream& t, const Stream& s,
                                     const std::string& X) {
  if (seq_occurrences(t, X) != detail::stream_element_count(s)) return {};
  size_t r = t.bags.size();
  if (r == 0) return s.bags.empty() ? StreamSum::unit(Stream{}) : StreamSum{};
  StreamSum out;
  detail::for_each_stream_partitioning(
      s, r, [&](const std::vector<Stream>& blocks) {
        std::vector<BagSum> parts;
        parts.reserve(r);
        for (size_t i = 0; i < r; ++i) {
          parts.push_back(subst_stream_direct(t.bags[i], blocks[i], X));
          if (parts.back().is_zero()) return;
        }
        detail::for_each_product<Bag, Nat, BagLess>(
            parts, [&](const std::vector<Bag>& picked, const Nat& c) {
              out.add(mk_stream(picked), c);
            });
      });
  return out;
}

}  // namespace rescal

#endif  // RESCAL_SUBST_HPP
