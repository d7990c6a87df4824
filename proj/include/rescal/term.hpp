#ifndef RESCAL_TERM_HPP
#define RESCAL_TERM_HPP

// Canonical representation of extensional resource expressions. Four
// mutually recursive categories:
//
//   value   λ. body            -- binds one sequence variable (nameless)
//   base    head stream        -- head expression applied to a stream
//   bag     [v1, .., vk]       -- finite multiset of values, kept sorted
//   stream  b0 :: b1 :: .. ι   -- finite list of bags, no trailing empty bag
//
// A head is a variable (a component of a sequence variable) or a value term.
// Bound variables are (binder depth, component index) pairs; free variables
// are (name, component index) pairs. With nameless binders, α-equivalent
// terms are structurally identical, and a global total order on terms makes
// bags and formal sums canonical.

#include <algorithm>
#include <cassert>
#include <compare>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "rescal/combinatorics.hpp"
#include "rescal/rational.hpp"

namespace rescal {

struct ValueTerm;
using ValuePtr = std::shared_ptr<const ValueTerm>;

// Free value variable: component `index` of the sequence variable `name`.
struct FreeVar {
  std::string name;
  uint32_t index = 0;
  friend auto operator<=>(const FreeVar&, const FreeVar&) = default;
};

struct Head {
  enum class Kind : uint8_t { Bound, Free, Value };
  Kind kind = Kind::Free;
  uint32_t depth = 0;  // Bound: de Bruijn distance to the binder
  uint32_t index = 0;  // Bound/Free: component of the sequence variable
  std::string name;    // Free: sequence-variable name
  ValuePtr val;        // Value

  static Head bound(uint32_t depth, uint32_t index) {
    Head h;
    h.kind = Kind::Bound;
    h.depth = depth;
    h.index = index;
    return h;
  }
  static Head free(std::string name, uint32_t index) {
    Head h;
    h.kind = Kind::Free;
    h.name = std::move(name);
    h.index = index;
    return h;
  }
  static Head free(const FreeVar& v) { return free(v.name, v.index); }
  static Head value(ValuePtr v) {
    Head h;
    h.kind = Kind::Value;
    h.val = std::move(v);
    return h;
  }
};

struct Bag {
  std::vector<ValuePtr> elems;  // sorted under term_compare
};

struct Stream {
  std::vector<Bag> bags;  // trailing empty bags trimmed away
};

struct Base {
  Head head;
  Stream args;
};

struct ValueTerm {
  Base body;  // the implicit binder wraps this base term
  uint64_t cached_hash = 0;
  uint64_t cached_size = 0;
};

// ---------------------------------------------------------------------------
// Size, hashing, ordering

inline uint64_t term_size(const ValuePtr& v);
inline uint64_t term_size(const Base& b);
inline uint64_t term_size(const Bag& b);
inline uint64_t term_size(const Stream& s);
inline uint64_t term_size(const Head& h) {
  return h.kind == Head::Kind::Value ? term_size(h.val) : 1;
}
inline uint64_t term_size(const ValuePtr& v) { return v->cached_size; }
inline uint64_t term_size(const Base& b) {
  return 1 + term_size(b.head) + term_size(b.args);
}
inline uint64_t term_size(const Bag& b) {
  uint64_t s = 0;
  for (const auto& e : b.elems) s += term_size(e);
  return s;
}
inline uint64_t term_size(const Stream& s) {
  uint64_t n = 0;
  for (const auto& b : s.bags) n += term_size(b);
  return n;
}

inline uint64_t hash_mix(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

inline uint64_t term_hash(const ValuePtr& v) { return v->cached_hash; }
inline uint64_t term_hash(const Head& h) {
  switch (h.kind) {
    case Head::Kind::Bound:
      return hash_mix(hash_mix(1, h.depth), h.index);
    case Head::Kind::Free: {
      uint64_t x = 2;
      for (char c : h.name) x = hash_mix(x, static_cast<unsigned char>(c));
      return hash_mix(x, h.index);
    }
    case Head::Kind::Value:
      return hash_mix(3, term_hash(h.val));
  }
  return 0;
}
inline uint64_t term_hash(const Bag& b) {
  uint64_t x = 5;
  for (const auto& e : b.elems) x = hash_mix(x, term_hash(e));
  return x;
}
inline uint64_t term_hash(const Stream& s) {
  uint64_t x = 7;
  for (const auto& b : s.bags) x = hash_mix(x, term_hash(b));
  return x;
}
inline uint64_t term_hash(const Base& b) {
  return hash_mix(term_hash(b.head), term_hash(b.args));
}

inline int term_compare(const ValuePtr& a, const ValuePtr& b);
inline int term_compare(const Base& a, const Base& b);

inline int term_compare(const Head& a, const Head& b) {
  auto rank = [](const Head& h) { return static_cast<int>(h.kind); };
  if (rank(a) != rank(b)) return rank(a) < rank(b) ? -1 : 1;
  switch (a.kind) {
    case Head::Kind::Bound:
      if (a.depth != b.depth) return a.depth < b.depth ? -1 : 1;
      if (a.index != b.index) return a.index < b.index ? -1 : 1;
      return 0;
    case Head::Kind::Free:
      if (int c = a.name.compare(b.name)) return c < 0 ? -1 : 1;
      if (a.index != b.index) return a.index < b.index ? -1 : 1;
      return 0;
    case Head::Kind::Value:
      return term_compare(a.val, b.val);
  }
  return 0;
}

inline int term_compare(const Bag& a, const Bag& b) {
  size_t n = std::min(a.elems.size(), b.elems.size());
  for (size_t i = 0; i < n; ++i)
    if (int c = term_compare(a.elems[i], b.elems[i])) return c;
  if (a.elems.size() != b.elems.size())
    return a.elems.size() < b.elems.size() ? -1 : 1;
  return 0;
}

inline int term_compare(const Stream& a, const Stream& b) {
  size_t n = std::min(a.bags.size(), b.bags.size());
  for (size_t i = 0; i < n; ++i)
    if (int c = term_compare(a.bags[i], b.bags[i])) return c;
  if (a.bags.size() != b.bags.size())
    return a.bags.size() < b.bags.size() ? -1 : 1;
  return 0;
}

inline int term_compare(const Base& a, const Base& b) {
  if (int c = term_compare(a.head, b.head)) return c;
  return term_compare(a.args, b.args);
}

inline int term_compare(const ValuePtr& a, const ValuePtr& b) {
  if (a.get() == b.get()) return 0;
  return term_compare(a->body, b->body);
}

inline bool term_equal(const ValuePtr& a, const ValuePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->cached_hash != b->cached_hash || a->cached_size != b->cached_size)
    return false;
  return term_compare(a, b) == 0;
}
inline bool term_equal(const Base& a, const Base& b) {
  return term_compare(a, b) == 0;
}
inline bool term_equal(const Bag& a, const Bag& b) {
  return term_compare(a, b) == 0;
}
inline bool term_equal(const Stream& a, const Stream& b) {
  return term_compare(a, b) == 0;
}

struct ValueLess {
  bool operator()(const ValuePtr& a, const ValuePtr& b) const {
    return term_compare(a, b) < 0;
  }
};
struct BaseLess {
  bool operator()(const Base& a, const Base& b) const {
    return term_compare(a, b) < 0;
  }
};
struct BagLess {
  bool operator()(const Bag& a, const Bag& b) const {
    return term_compare(a, b) < 0;
  }
};
struct StreamLess {
  bool operator()(const Stream& a, const Stream& b) const {
    return term_compare(a, b) < 0;
  }
};
struct HeadLess {
  bool operator()(const Head& a, const Head& b) const {
    return term_compare(a, b) < 0;
  }
};

// ---------------------------------------------------------------------------
// Canonicalizing constructors

inline Bag mk_bag(std::vector<ValuePtr> elems) {
  std::sort(elems.begin(), elems.end(), ValueLess{});
  return Bag{std::move(elems)};
}

inline Stream mk_stream(std::vector<Bag> bags) {
  while (!bags.empty() && bags.back().elems.empty()) bags.pop_back();
  return Stream{std::move(bags)};
}

inline Stream iota() { return Stream{}; }

inline Stream mk_cons(Bag head, const Stream& tail) {
  std::vector<Bag> bags;
  bags.reserve(tail.bags.size() + 1);
  bags.push_back(std::move(head));
  for (const auto& b : tail.bags) bags.push_back(b);
  return mk_stream(std::move(bags));
}

inline Base mk_base(Head head, Stream args) {
  return Base{std::move(head), std::move(args)};
}

inline ValuePtr mk_value(Base body) {
  auto v = std::make_shared<ValueTerm>();
  v->body = std::move(body);
  v->cached_size = 1 + term_size(v->body);
  v->cached_hash = hash_mix(11, term_hash(v->body));
  return v;
}

// ---------------------------------------------------------------------------
// Structural measures and queries

// Width: the largest stream range and variable component index anywhere in
// the expression. Size alone does not make term enumerations finite (a head
// variable may use an arbitrarily large component); bounding the width does.
inline uint64_t term_width(const ValuePtr& v);
inline uint64_t term_width(const Base& b);
inline uint64_t term_width(const Bag& b) {
  uint64_t w = 0;
  for (const auto& e : b.elems) w = std::max(w, term_width(e));
  return w;
}
inline uint64_t term_width(const Stream& s) {
  uint64_t w = s.bags.size();
  for (const auto& b : s.bags) w = std::max(w, term_width(b));
  return w;
}
inline uint64_t term_width(const Head& h) {
  return h.kind == Head::Kind::Value ? term_width(h.val) : h.index;
}
inline uint64_t term_width(const Base& b) {
  return std::max(term_width(b.head), term_width(b.args));
}
inline uint64_t term_width(const ValuePtr& v) { return term_width(v->body); }

// Counts free occurrences of the value variable (name, index).
inline uint64_t occurrences(const ValuePtr& v, const FreeVar& x);
inline uint64_t occurrences(const Base& b, const FreeVar& x);
inline uint64_t occurrences(const Bag& b, const FreeVar& x) {
  uint64_t n = 0;
  for (const auto& e : b.elems) n += occurrences(e, x);
  return n;
}
inline uint64_t occurrences(const Stream& s, const FreeVar& x) {
  uint64_t n = 0;
  for (const auto& b : s.bags) n += occurrences(b, x);
  return n;
}
inline uint64_t occurrences(const Head& h, const FreeVar& x) {
  if (h.kind == Head::Kind::Free)
    return (h.name == x.name && h.index == x.index) ? 1 : 0;
  if (h.kind == Head::Kind::Value) return occurrences(h.val, x);
  return 0;
}
inline uint64_t occurrences(const Base& b, const FreeVar& x) {
  return occurrences(b.head, x) + occurrences(b.args, x);
}
inline uint64_t occurrences(const ValuePtr& v, const FreeVar& x) {
  return occurrences(v->body, x);
}

// Counts free occurrences of any component of the sequence variable `name`.
inline uint64_t seq_occurrences(const ValuePtr& v, const std::string& name);
inline uint64_t seq_occurrences(const Base& b, const std::string& name);
inline uint64_t seq_occurrences(const Bag& b, const std::string& name) {
  uint64_t n = 0;
  for (const auto& e : b.elems) n += seq_occurrences(e, name);
  return n;
}
inline uint64_t seq_occurrences(const Stream& s, const std::string& name) {
  uint64_t n = 0;
  for (const auto& b : s.bags) n += seq_occurrences(b, name);
  return n;
}
inline uint64_t seq_occurrences(const Head& h, const std::string& name) {
  if (h.kind == Head::Kind::Free) return h.name == name ? 1 : 0;
  if (h.kind == Head::Kind::Value) return seq_occurrences(h.val, name);
  return 0;
}
inline uint64_t seq_occurrences(const Base& b, const std::string& name) {
  return seq_occurrences(b.head, name) + seq_occurrences(b.args, name);
}
inline uint64_t seq_occurrences(const ValuePtr& v, const std::string& name) {
  return seq_occurrences(v->body, name);
}

// All free sequence-variable names.
inline void collect_free_names(const ValuePtr& v, std::set<std::string>& out);
inline void collect_free_names(const Base& b, std::set<std::string>& out);
inline void collect_free_names(const Bag& b, std::set<std::string>& out) {
  for (const auto& e : b.elems) collect_free_names(e, out);
}
inline void collect_free_names(const Stream& s, std::set<std::string>& out) {
  for (const auto& b : s.bags) collect_free_names(b, out);
}
inline void collect_free_names(const Head& h, std::set<std::string>& out) {
  if (h.kind == Head::Kind::Free) out.insert(h.name);
  if (h.kind == Head::Kind::Value) collect_free_names(h.val, out);
}
inline void collect_free_names(const Base& b, std::set<std::string>& out) {
  collect_free_names(b.head, out);
  collect_free_names(b.args, out);
}
inline void collect_free_names(const ValuePtr& v, std::set<std::string>& out) {
  collect_free_names(v->body, out);
}

template <class T>
std::set<std::string> free_names(const T& t) {
  std::set<std::string> s;
  collect_free_names(t, s);
  return s;
}

inline std::string fresh_name(const std::set<std::string>& avoid,
                              const std::string& hint = "t") {
  if (!avoid.count(hint)) return hint;
  for (uint64_t i = 0;; ++i) {
    std::string cand = hint + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

// Isotropy degree of a bag: the order of the stabilizer of any enumeration
// of it under permutations.
inline Nat isotropy_degree(const Bag& b) {
  return isotropy_degree_sorted(
      b.elems, [](const ValuePtr& a, const ValuePtr& c) {
        return term_equal(a, c);
      });
}

// Multiplicity coefficient: the product of the isotropy degrees of all bags
// in the expression. Variable η-expansions weight a support element m by
// 1/multiplicity(m).
inline Nat multiplicity(const ValuePtr& v);
inline Nat multiplicity(const Base& b);
inline Nat multiplicity(const Bag& b) {
  Nat m = isotropy_degree(b);
  for (const auto& e : b.elems) m *= multiplicity(e);
  return m;
}
inline Nat multiplicity(const Stream& s) {
  Nat m = 1;
  for (const auto& b : s.bags) m *= multiplicity(b);
  return m;
}
inline Nat multiplicity(const Head& h) {
  return h.kind == Head::Kind::Value ? multiplicity(h.val) : Nat(1);
}
inline Nat multiplicity(const Base& b) {
  return multiplicity(b.head) * multiplicity(b.args);
}
inline Nat multiplicity(const ValuePtr& v) { return multiplicity(v->body); }

// Number of base-term subterms (each contributes two events to the game
// encoding of a normal term).
inline uint64_t base_subterm_count(const ValuePtr& v);
inline uint64_t base_subterm_count(const Bag& b) {
  uint64_t n = 0;
  for (const auto& e : b.elems) n += base_subterm_count(e);
  return n;
}
inline uint64_t base_subterm_count(const Stream& s) {
  uint64_t n = 0;
  for (const auto& b : s.bags) n += base_subterm_count(b);
  return n;
}
inline uint64_t base_subterm_count(const Base& b) {
  uint64_t n = 1 + base_subterm_count(b.args);
  if (b.head.kind == Head::Kind::Value) n += base_subterm_count(b.head.val);
  return n;
}
inline uint64_t base_subterm_count(const ValuePtr& v) {
  return base_subterm_count(v->body);
}

// Rebuilds an expression bottom-up through the canonicalizing constructors.
// Code that bypasses them on purpose (an opened binder body keeps its bags
// in positional order) uses this to restore sortedness before results leave
// the rewrite machinery.
inline ValuePtr canonical(const ValuePtr& v);
inline Bag canonical(const Bag& b) {
  std::vector<ValuePtr> elems;
  elems.reserve(b.elems.size());
  for (const auto& e : b.elems) elems.push_back(canonical(e));
  return mk_bag(std::move(elems));
}
inline Stream canonical(const Stream& s) {
  std::vector<Bag> bags;
  bags.reserve(s.bags.size());
  for (const auto& b : s.bags) bags.push_back(canonical(b));
  return mk_stream(std::move(bags));
}
inline Head canonical(const Head& h) {
  return h.kind == Head::Kind::Value ? Head::value(canonical(h.val)) : h;
}
inline Base canonical(const Base& b) {
  return mk_base(canonical(b.head), canonical(b.args));
}
inline ValuePtr canonical(const ValuePtr& v) {
  return mk_value(canonical(v->body));
}

// A term is normal when no value term sits in head position anywhere.
inline bool is_normal(const ValuePtr& v);
inline bool is_normal(const Bag& b) {
  for (const auto& e : b.elems)
    if (!is_normal(e)) return false;
  return true;
}
inline bool is_normal(const Stream& s) {
  for (const auto& b : s.bags)
    if (!is_normal(b)) return false;
  return true;
}
inline bool is_normal(const Base& b) {
  if (b.head.kind == Head::Kind::Value) return false;
  return is_normal(b.args);
}
inline bool is_normal(const ValuePtr& v) { return is_normal(v->body); }

}  // namespace rescal

#endif  // RESCAL_TERM_HPP
