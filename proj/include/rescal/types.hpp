#ifndef RESCAL_TYPES_HPP
#define RESCAL_TYPES_HPP

// Rigid typing for resource expressions and ordinary λ-terms.
//
// Every value lands in the single ground sort `o` once fed an argument
// stream, so a value type is determined by the stream type it consumes and
// prints as `(S) -o o`. Bag types are finite multisets of value types (kept
// sorted), stream types are finite lists of bag types with trailing empty
// bags trimmed (mirroring the term-level convention `[] :: () = ()`), and
// the ground sort stands alone.
//
// Derivations consume context material linearly: each free occurrence of a
// variable component accounts for exactly one element of its context bag.
// As a consequence inference on resource expressions is syntax directed and
// deterministic; the only way it can fail is a value-headed base term whose
// head does not consume exactly the type of its argument stream.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rescal/lambda.hpp"
#include "rescal/reduce.hpp"
#include "rescal/subst.hpp"
#include "rescal/taylor.hpp"
#include "rescal/term.hpp"

namespace rescal {

// ---------------------------------------------------------------------------
// Type terms

struct ValueType;

// Finite multiset of value types; `elems` is kept sorted, use mk_bag_type.
struct BagType {
  std::vector<ValueType> elems;
};

// Finite list of bag types; trailing empty bags are trimmed, so the empty
// stream type is also the type of any stream padded with empty bags.
struct StreamType {
  std::vector<BagType> bags;
};

// (S) -o o: consumes an argument stream of type S.
struct ValueType {
  StreamType arg;
};

// The ground sort o inhabited by base terms.
struct BaseType {};

using TypeTerm = std::variant<ValueType, BagType, StreamType, BaseType>;

inline int type_compare(const ValueType& a, const ValueType& b);
inline int type_compare(const BagType& a, const BagType& b);
inline int type_compare(const StreamType& a, const StreamType& b);

inline int type_compare(const BagType& a, const BagType& b) {
  if (a.elems.size() != b.elems.size())
    return a.elems.size() < b.elems.size() ? -1 : 1;
  for (size_t i = 0; i < a.elems.size(); ++i)
    if (int c = type_compare(a.elems[i], b.elems[i])) return c;
  return 0;
}

inline int type_compare(const StreamType& a, const StreamType& b) {
  if (a.bags.size() != b.bags.size())
    return a.bags.size() < b.bags.size() ? -1 : 1;
  for (size_t i = 0; i < a.bags.size(); ++i)
    if (int c = type_compare(a.bags[i], b.bags[i])) return c;
  return 0;
}

inline int type_compare(const ValueType& a, const ValueType& b) {
  return type_compare(a.arg, b.arg);
}

inline int type_compare(const BaseType&, const BaseType&) { return 0; }

inline int type_compare(const TypeTerm& a, const TypeTerm& b) {
  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  return std::visit(
      [&](const auto& x) {
        return type_compare(x, std::get<std::decay_t<decltype(x)>>(b));
      },
      a);
}

inline bool operator==(const ValueType& a, const ValueType& b) {
  return type_compare(a, b) == 0;
}
inline bool operator==(const BagType& a, const BagType& b) {
  return type_compare(a, b) == 0;
}
inline bool operator==(const StreamType& a, const StreamType& b) {
  return type_compare(a, b) == 0;
}
inline bool operator==(const BaseType&, const BaseType&) { return true; }

inline BagType mk_bag_type(std::vector<ValueType> elems) {
  std::sort(elems.begin(), elems.end(),
            [](const ValueType& a, const ValueType& b) {
              return type_compare(a, b) < 0;
            });
  return BagType{std::move(elems)};
}

inline StreamType mk_stream_type(std::vector<BagType> bags) {
  while (!bags.empty() && bags.back().elems.empty()) bags.pop_back();
  return StreamType{std::move(bags)};
}

inline StreamType iota_type() { return StreamType{}; }

inline ValueType mk_value_type(StreamType arg = {}) {
  return ValueType{std::move(arg)};
}

inline StreamType cons_type(BagType head, const StreamType& tail) {
  std::vector<BagType> bags;
  bags.reserve(tail.bags.size() + 1);
  bags.push_back(std::move(head));
  bags.insert(bags.end(), tail.bags.begin(), tail.bags.end());
  return mk_stream_type(std::move(bags));
}

// Number of value-type nodes (equivalently arrow constructors).
inline uint64_t type_size(const ValueType& v);
inline uint64_t type_size(const BagType& b) {
  uint64_t n = 0;
  for (const auto& e : b.elems) n += type_size(e);
  return n;
}
inline uint64_t type_size(const StreamType& s) {
  uint64_t n = 0;
  for (const auto& b : s.bags) n += type_size(b);
  return n;
}
inline uint64_t type_size(const ValueType& v) { return 1 + type_size(v.arg); }
inline uint64_t type_size(const BaseType&) { return 0; }
inline uint64_t type_size(const TypeTerm& t) {
  return std::visit([](const auto& x) { return type_size(x); }, t);
}

// Largest stream length occurring anywhere inside the type.
inline uint64_t type_width(const ValueType& v);
inline uint64_t type_width(const BagType& b) {
  uint64_t w = 0;
  for (const auto& e : b.elems) w = std::max(w, type_width(e));
  return w;
}
inline uint64_t type_width(const StreamType& s) {
  uint64_t w = s.bags.size();
  for (const auto& b : s.bags) w = std::max(w, type_width(b));
  return w;
}
inline uint64_t type_width(const ValueType& v) { return type_width(v.arg); }
inline uint64_t type_width(const BaseType&) { return 0; }
inline uint64_t type_width(const TypeTerm& t) {
  return std::visit([](const auto& x) { return type_width(x); }, t);
}

// ---------------------------------------------------------------------------
// Type printing: o, () -o o, ([() -o o] :: ()) -o o, ...

inline void print_type(std::ostream& os, const ValueType& v);

inline void print_type(std::ostream& os, const BagType& b) {
  os << '[';
  for (size_t i = 0; i < b.elems.size(); ++i) {
    if (i) os << ", ";
    print_type(os, b.elems[i]);
  }
  os << ']';
}

inline void print_type(std::ostream& os, const StreamType& s) {
  for (const auto& b : s.bags) {
    print_type(os, b);
    os << " :: ";
  }
  os << "()";
}

inline void print_type(std::ostream& os, const ValueType& v) {
  if (v.arg.bags.empty()) {
    os << "() -o o";
    return;
  }
  os << '(';
  print_type(os, v.arg);
  os << ") -o o";
}

inline void print_type(std::ostream& os, const BaseType&) { os << 'o'; }

inline void print_type(std::ostream& os, const TypeTerm& t) {
  std::visit([&](const auto& x) { print_type(os, x); }, t);
}

template <class T>
std::string type_text(const T& t) {
  std::ostringstream os;
  print_type(os, t);
  return os.str();
}

// ---------------------------------------------------------------------------
// Typing contexts: finitely supported maps from variable components to bag
// types. Absent entries mean the empty bag; empty bags are never stored.

class TypingContext {
 public:
  TypingContext() = default;

  static TypingContext singleton(const FreeVar& x, BagType b) {
    TypingContext g;
    if (!b.elems.empty()) g.entries_.emplace(x, std::move(b));
    return g;
  }

  bool empty() const { return entries_.empty(); }

  const BagType& at(const FreeVar& x) const {
    static const BagType none{};
    auto it = entries_.find(x);
    return it == entries_.end() ? none : it->second;
  }

  // Multiset union into x's bag.
  void add(const FreeVar& x, const BagType& b) {
    if (b.elems.empty()) return;
    BagType& slot = entries_[x];
    slot.elems.insert(slot.elems.end(), b.elems.begin(), b.elems.end());
    std::sort(slot.elems.begin(), slot.elems.end(),
              [](const ValueType& a, const ValueType& c) {
                return type_compare(a, c) < 0;
              });
  }

  const std::map<FreeVar, BagType>& entries() const { return entries_; }

 private:
  std::map<FreeVar, BagType> entries_;
};

inline int context_compare(const TypingContext& a, const TypingContext& b) {
  auto ia = a.entries().begin(), ea = a.entries().end();
  auto ib = b.entries().begin(), eb = b.entries().end();
  for (; ia != ea && ib != eb; ++ia, ++ib) {
    if (ia->first != ib->first) return ia->first < ib->first ? -1 : 1;
    if (int c = type_compare(ia->second, ib->second)) return c;
  }
  if (ia != ea) return 1;
  if (ib != eb) return -1;
  return 0;
}

inline bool operator==(const TypingContext& a, const TypingContext& b) {
  return context_compare(a, b) == 0;
}

inline TypingContext context_concat(const TypingContext& a,
                                    const TypingContext& b) {
  TypingContext out = a;
  for (const auto& [x, bag] : b.entries()) out.add(x, bag);
  return out;
}

// Drops one variable component.
inline TypingContext context_remove(const TypingContext& g, const FreeVar& x) {
  TypingContext out;
  for (const auto& [y, bag] : g.entries())
    if (!(y == x)) out.add(y, bag);
  return out;
}

// Drops every component of a sequence variable.
inline TypingContext context_remove_name(const TypingContext& g,
                                         const std::string& name) {
  TypingContext out;
  for (const auto& [y, bag] : g.entries())
    if (y.name != name) out.add(y, bag);
  return out;
}

// The stream of bags assigned to the components of a sequence variable;
// finite support makes this a well-defined stream type.
inline StreamType context_stream(const TypingContext& g,
                                 const std::string& name) {
  uint32_t len = 0;
  for (const auto& [y, bag] : g.entries())
    if (y.name == name) len = std::max(len, y.index + 1);
  std::vector<BagType> bags(len);
  for (const auto& [y, bag] : g.entries())
    if (y.name == name) bags[y.index] = bag;
  return mk_stream_type(std::move(bags));
}

inline void print_context(std::ostream& os, const TypingContext& g) {
  if (g.empty()) {
    os << '*';
    return;
  }
  bool first = true;
  for (const auto& [x, bag] : g.entries()) {
    if (!first) os << ", ";
    first = false;
    os << x.name << '.' << x.index << ':';
    print_type(os, bag);
  }
}

inline std::string context_text(const TypingContext& g) {
  std::ostringstream os;
  print_context(os, g);
  return os.str();
}

// A context together with the type it supports.
struct Typing {
  TypingContext ctx;
  TypeTerm type;
};

inline int typing_compare(const Typing& a, const Typing& b) {
  if (int c = context_compare(a.ctx, b.ctx)) return c;
  return type_compare(a.type, b.type);
}

inline bool operator==(const Typing& a, const Typing& b) {
  return typing_compare(a, b) == 0;
}

// ---------------------------------------------------------------------------
// Inference on resource expressions. Syntax directed: at most one judgement
// can be derived, and the search fails only when a value-headed base term
// applies its head to a stream of the wrong type.

namespace detail {

inline std::optional<std::pair<TypingContext, ValueType>> infer_value(
    const ValuePtr& m);

inline std::optional<std::pair<TypingContext, BagType>> infer_bag(
    const Bag& b) {
  TypingContext ctx;
  std::vector<ValueType> types;
  types.reserve(b.elems.size());
  for (const auto& e : b.elems) {
    auto t = infer_value(e);
    if (!t) return std::nullopt;
    ctx = context_concat(ctx, t->first);
    types.push_back(std::move(t->second));
  }
  return std::make_pair(std::move(ctx), mk_bag_type(std::move(types)));
}

inline std::optional<std::pair<TypingContext, StreamType>> infer_stream(
    const Stream& s) {
  TypingContext ctx;
  std::vector<BagType> bags;
  bags.reserve(s.bags.size());
  for (const auto& b : s.bags) {
    auto t = infer_bag(b);
    if (!t) return std::nullopt;
    ctx = context_concat(ctx, t->first);
    bags.push_back(std::move(t->second));
  }
  return std::make_pair(std::move(ctx), mk_stream_type(std::move(bags)));
}

inline std::optional<TypingContext> infer_base(const Base& b) {
  auto args = infer_stream(b.args);
  if (!args) return std::nullopt;
  switch (b.head.kind) {
    case Head::Kind::Free: {
      BagType entry{{mk_value_type(args->second)}};
      TypingContext head = TypingContext::singleton(
          FreeVar{b.head.name, b.head.index}, std::move(entry));
      return context_concat(args->first, head);
    }
    case Head::Kind::Value: {
      auto head = infer_value(b.head.val);
      if (!head) return std::nullopt;
      if (!(head->second.arg == args->second)) return std::nullopt;
      return context_concat(head->first, args->first);
    }
    case Head::Kind::Bound:
      throw std::invalid_argument(
          "type inference reached a dangling bound head");
  }
  return std::nullopt;
}

inline std::optional<std::pair<TypingContext, ValueType>> infer_value(
    const ValuePtr& m) {
  auto [y, body] = open_binder(m);
  auto inner = infer_base(body);
  if (!inner) return std::nullopt;
  StreamType consumed = context_stream(*inner, y);
  return std::make_pair(context_remove_name(*inner, y),
                        mk_value_type(std::move(consumed)));
}

}  // namespace detail

inline std::optional<Typing> infer(const ResourceExpr& e) {
  if (const auto* m = std::get_if<ValuePtr>(&e)) {
    auto t = detail::infer_value(*m);
    if (!t) return std::nullopt;
    return Typing{std::move(t->first), TypeTerm{std::move(t->second)}};
  }
  if (const auto* b = std::get_if<Base>(&e)) {
    auto ctx = detail::infer_base(*b);
    if (!ctx) return std::nullopt;
    return Typing{std::move(*ctx), TypeTerm{BaseType{}}};
  }
  if (const auto* bag = std::get_if<Bag>(&e)) {
    auto t = detail::infer_bag(*bag);
    if (!t) return std::nullopt;
    return Typing{std::move(t->first), TypeTerm{std::move(t->second)}};
  }
  auto t = detail::infer_stream(std::get<Stream>(e));
  if (!t) return std::nullopt;
  return Typing{std::move(t->first), TypeTerm{std::move(t->second)}};
}

// ---------------------------------------------------------------------------
// Canonical inhabitants: for each value type exactly one element of the
// expansion of a variable has that type, and it is built by mirroring the
// type structure with one head occurrence per node.

inline ValuePtr eta_witness(const FreeVar& x, const ValueType& a);

inline Bag eta_witness(const FreeVar& x, const BagType& b) {
  std::vector<ValuePtr> elems;
  elems.reserve(b.elems.size());
  for (const auto& t : b.elems) elems.push_back(eta_witness(x, t));
  return mk_bag(std::move(elems));
}

inline Stream eta_witness_seq(const std::string& y, const StreamType& s) {
  std::vector<Bag> bags;
  bags.reserve(s.bags.size());
  for (uint32_t i = 0; i < s.bags.size(); ++i)
    bags.push_back(eta_witness(FreeVar{y, i}, s.bags[i]));
  return mk_stream(std::move(bags));
}

inline ValuePtr eta_witness(const FreeVar& x, const ValueType& a) {
  std::string y = fresh_name({x.name}, "y");
  return close_binder(y, mk_base(Head::free(x), eta_witness_seq(y, a.arg)));
}

// Dispatcher over type shapes: a value or bag type takes a variable
// component, a stream type takes a sequence-variable name.
inline ResourceExpr eta_witness_for_type(const CopycatTarget& target,
                                         const TypeTerm& t) {
  if (const auto* x = std::get_if<FreeVar>(&target)) {
    if (const auto* v = std::get_if<ValueType>(&t))
      return eta_witness(*x, *v);
    if (const auto* b = std::get_if<BagType>(&t)) return eta_witness(*x, *b);
    throw std::invalid_argument(
        "variable witnesses exist for value and bag types only");
  }
  const auto& y = std::get<std::string>(target);
  if (const auto* s = std::get_if<StreamType>(&t))
    return eta_witness_seq(y, *s);
  throw std::invalid_argument(
      "sequence witnesses exist for stream types only");
}

// ---------------------------------------------------------------------------
// Deciding judgements on ordinary λ-terms.
//
// The rules are not syntax directed: an application must guess the bag type
// fed to the function. The search below draws candidate bags from the bag
// nodes of the goal (context and target type), which anchors every judgement
// whose head is a variable, plus bounded multisets over the goal's value
// nodes for redex functions. Candidate bag sizes for a redex are capped by
// the syntactic occurrence count of the bound variable, so derivations that
// duplicate an argument below another application can escape the search;
// goals of that shape do not arise from the enumerations used here.

namespace detail {

inline void collect_type_nodes(const ValueType& v,
                               std::vector<ValueType>& values,
                               std::vector<BagType>& bags);

inline void collect_type_nodes(const StreamType& s,
                               std::vector<ValueType>& values,
                               std::vector<BagType>& bags) {
  for (const auto& b : s.bags) {
    bags.push_back(b);
    for (const auto& e : b.elems) collect_type_nodes(e, values, bags);
  }
}

inline void collect_type_nodes(const ValueType& v,
                               std::vector<ValueType>& values,
                               std::vector<BagType>& bags) {
  values.push_back(v);
  collect_type_nodes(v.arg, values, bags);
}

template <class T>
void sort_unique_types(std::vector<T>& xs) {
  std::sort(xs.begin(), xs.end(),
            [](const T& a, const T& b) { return type_compare(a, b) < 0; });
  xs.erase(std::unique(xs.begin(), xs.end(),
                       [](const T& a, const T& b) { return a == b; }),
           xs.end());
}

// Every split of g into (left, right) with left * right == g, pointwise on
// sorted bags.
inline void for_each_context_split(
    const TypingContext& g,
    const std::function<void(const TypingContext&, const TypingContext&)>&
        fn) {
  std::vector<std::pair<FreeVar, BagType>> entries(g.entries().begin(),
                                                   g.entries().end());
  TypingContext left, right;
  std::function<void(size_t)> walk_entries = [&](size_t i) {
    if (i == entries.size()) {
      fn(left, right);
      return;
    }
    const auto& [x, bag] = entries[i];
    // Runs of equal elements: pick how many of each run go left.
    std::vector<std::pair<ValueType, size_t>> runs;
    for (const auto& e : bag.elems) {
      if (!runs.empty() && runs.back().first == e)
        ++runs.back().second;
      else
        runs.emplace_back(e, 1);
    }
    std::vector<ValueType> lhs, rhs;
    std::function<void(size_t)> walk_runs = [&](size_t r) {
      if (r == runs.size()) {
        left.add(x, BagType{lhs});
        right.add(x, BagType{rhs});
        walk_entries(i + 1);
        left = context_remove(left, x);
        right = context_remove(right, x);
        return;
      }
      const auto& [elem, count] = runs[r];
      for (size_t k = 0; k <= count; ++k) {
        size_t nl = lhs.size(), nr = rhs.size();
        for (size_t j = 0; j < k; ++j) lhs.push_back(elem);
        for (size_t j = k; j < count; ++j) rhs.push_back(elem);
        walk_runs(r + 1);
        lhs.resize(nl);
        rhs.resize(nr);
      }
    };
    walk_runs(0);
  };
  walk_entries(0);
}

inline uint64_t lam_occurrences(const LambdaPtr& t, const std::string& name) {
  switch (t->kind) {
    case LambdaTerm::Kind::Var:
      return t->name == name ? 1 : 0;
    case LambdaTerm::Kind::Abs:
      return t->name == name ? 0 : lam_occurrences(t->body, name);
    case LambdaTerm::Kind::App:
      return lam_occurrences(t->fun, name) + lam_occurrences(t->arg, name);
  }
  return 0;
}

class LambdaChecker {
 public:
  bool check(const TypingContext& g, const LambdaPtr& m, const ValueType& a) {
    MemoKey key{m.get(), g, a};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    // Seed false so self-referential re-entry through an identical goal
    // cannot loop; the search never needs such a derivation.
    auto slot = memo_.emplace(std::move(key), false).first;
    bool out = run(g, m, a);
    slot->second = out;
    return out;
  }

 private:
  struct MemoKey {
    const LambdaTerm* node;
    TypingContext ctx;
    ValueType type;
    bool operator<(const MemoKey& o) const {
      if (node != o.node) return node < o.node;
      if (int c = context_compare(ctx, o.ctx)) return c < 0;
      return type_compare(type, o.type) < 0;
    }
  };

  std::map<MemoKey, bool> memo_;

  bool run(const TypingContext& g, const LambdaPtr& m, const ValueType& a) {
    switch (m->kind) {
      case LambdaTerm::Kind::Var:
        return g == TypingContext::singleton(FreeVar{m->name, 0},
                                             BagType{{a}});
      case LambdaTerm::Kind::Abs: {
        // The bound variable absorbs the first bag of the target stream.
        if (!g.at(FreeVar{m->name, 0}).elems.empty() ||
            !context_stream(g, m->name).bags.empty())
          return check_abs_renamed(g, m, a);
        BagType head =
            a.arg.bags.empty() ? BagType{} : a.arg.bags.front();
        StreamType tail =
            a.arg.bags.empty()
                ? StreamType{}
                : mk_stream_type({a.arg.bags.begin() + 1, a.arg.bags.end()});
        TypingContext inner = context_concat(
            g, TypingContext::singleton(FreeVar{m->name, 0}, head));
        return check(inner, m->body, mk_value_type(std::move(tail)));
      }
      case LambdaTerm::Kind::App: {
        StreamType target = a.arg;
        bool found = false;
        for (const BagType& guess : argument_candidates(g, a, m->fun)) {
          ValueType fun_type = mk_value_type(cons_type(guess, target));
          for_each_context_split(
              g, [&](const TypingContext& gl, const TypingContext& gr) {
                if (found) return;
                if (!check(gl, m->fun, fun_type)) return;
                if (check_promotion(gr, m->arg, guess.elems, 0)) found = true;
              });
          if (found) break;
        }
        return found;
      }
    }
    return false;
  }

  bool check_abs_renamed(const TypingContext& g, const LambdaPtr& m,
                         const ValueType& a) {
    std::set<std::string> avoid = lam_free_vars(m);
    for (const auto& [x, bag] : g.entries()) avoid.insert(x.name);
    std::string fresh = fresh_name(avoid, m->name);
    LambdaPtr renamed =
        lam_abs(fresh, lam_subst(m->body, m->name, lam_var(fresh)));
    return check(g, renamed, a);
  }

  // Promotion: split the context over one subderivation per bag element.
  bool check_promotion(const TypingContext& g, const LambdaPtr& m,
                       const std::vector<ValueType>& elems, size_t i) {
    if (i == elems.size()) return g.empty();
    bool found = false;
    for_each_context_split(
        g, [&](const TypingContext& gl, const TypingContext& gr) {
          if (found) return;
          if (!check(gl, m, elems[i])) return;
          if (check_promotion(gr, m, elems, i + 1)) found = true;
        });
    return found;
  }

  std::vector<BagType> argument_candidates(const TypingContext& g,
                                           const ValueType& a,
                                           const LambdaPtr& fun) {
    std::vector<ValueType> values;
    std::vector<BagType> bags;
    collect_type_nodes(a, values, bags);
    for (const auto& [x, bag] : g.entries()) {
      bags.push_back(bag);
      for (const auto& e : bag.elems) collect_type_nodes(e, values, bags);
    }
    bags.push_back(BagType{});
    if (fun->kind == LambdaTerm::Kind::Abs) {
      sort_unique_types(values);
      uint64_t cap = lam_occurrences(fun->body, fun->name);
      std::vector<ValueType> picked;
      std::function<void(size_t)> grow = [&](size_t start) {
        if (!picked.empty()) bags.push_back(mk_bag_type(picked));
        if (picked.size() == cap) return;
        for (size_t j = start; j < values.size(); ++j) {
          picked.push_back(values[j]);
          grow(j);
          picked.pop_back();
        }
      };
      if (cap > 0) grow(0);
    }
    sort_unique_types(bags);
    return bags;
  }
};

}  // namespace detail

inline bool typecheck_lambda(const TypingContext& g, const LambdaPtr& m,
                             const ValueType& a) {
  detail::LambdaChecker checker;
  return checker.check(g, m, a);
}

// ---------------------------------------------------------------------------
// Bounded enumeration of derivable judgements for a λ-term. The window keeps
// every type term at most `bound` nodes in size, every stream inside it at
// most `bound` bags long, and every context bag at most `bound` elements.

namespace detail {

class TypeEnumerator {
 public:
  explicit TypeEnumerator(uint64_t bound) : bound_(bound) {}

  // All value types of node count <= size within the width window.
  std::vector<ValueType> values_up_to(uint64_t size) {
    std::vector<ValueType> out;
    for (uint64_t s = 1; s <= size; ++s) {
      const auto& vs = values_of(s);
      out.insert(out.end(), vs.begin(), vs.end());
    }
    return out;
  }

 private:
  uint64_t bound_;
  std::map<uint64_t, std::vector<ValueType>> value_memo_;

  const std::vector<ValueType>& values_of(uint64_t size) {
    auto it = value_memo_.find(size);
    if (it != value_memo_.end()) return it->second;
    std::vector<ValueType> out;
    if (size >= 1)
      for (auto& s : streams_of(size - 1))
        out.push_back(mk_value_type(std::move(s)));
    return value_memo_.emplace(size, std::move(out)).first->second;
  }

  std::vector<StreamType> streams_of(uint64_t size) {
    std::vector<StreamType> out;
    std::vector<BagType> prefix;
    // Canonical streams: the final bag is nonempty.
    std::function<void(uint64_t)> grow = [&](uint64_t budget) {
      if (budget == 0 && (prefix.empty() || !prefix.back().elems.empty()))
        out.push_back(mk_stream_type(prefix));
      if (prefix.size() >= bound_) return;
      for (uint64_t take = 0; take <= budget; ++take)
        for (auto& b : bags_of(take)) {
          prefix.push_back(std::move(b));
          grow(budget - take);
          prefix.pop_back();
        }
    };
    grow(size);
    return out;
  }

  std::vector<BagType> bags_of(uint64_t size) {
    std::vector<BagType> out;
    if (size == 0) {
      out.push_back(BagType{});
      return out;
    }
    std::vector<ValueType> flat = values_up_to(size);
    std::vector<ValueType> picked;
    std::function<void(uint64_t, size_t)> grow = [&](uint64_t budget,
                                                     size_t start) {
      if (budget == 0) {
        out.push_back(mk_bag_type(picked));
        return;
      }
      for (size_t j = start; j < flat.size(); ++j) {
        uint64_t s = type_size(flat[j]);
        if (s > budget) continue;
        picked.push_back(flat[j]);
        grow(budget - s, j);
        picked.pop_back();
      }
    };
    grow(size, 0);
    return out;
  }
};

}  // namespace detail

// True when every type term of the pair fits the enumeration window.
inline bool typing_within_bound(const Typing& t, uint64_t bound) {
  if (type_size(t.type) > bound || type_width(t.type) > bound) return false;
  for (const auto& [x, bag] : t.ctx.entries()) {
    if (bag.elems.size() > bound) return false;
    for (const auto& e : bag.elems)
      if (type_size(e) > bound || type_width(e) > bound) return false;
  }
  return true;
}

inline std::vector<Typing> typings_of_lambda(const LambdaPtr& m,
                                             uint64_t type_size_bound) {
  detail::TypeEnumerator types(type_size_bound);
  std::vector<ValueType> candidates = types.values_up_to(type_size_bound);

  std::set<std::string> free_set = lam_free_vars(m);
  std::vector<std::string> free(free_set.begin(), free_set.end());
  std::vector<TypingContext> contexts{TypingContext{}};
  for (const auto& name : free) {
    // Every bag of at most `bound` candidate types for this variable.
    std::vector<BagType> bags{BagType{}};
    std::vector<ValueType> picked;
    std::function<void(size_t)> grow = [&](size_t start) {
      if (picked.size() == type_size_bound) return;
      for (size_t j = start; j < candidates.size(); ++j) {
        picked.push_back(candidates[j]);
        bags.push_back(mk_bag_type(picked));
        grow(j);
        picked.pop_back();
      }
    };
    grow(0);
    std::vector<TypingContext> next;
    for (const auto& ctx : contexts)
      for (const auto& bag : bags)
        next.push_back(context_concat(
            ctx, TypingContext::singleton(FreeVar{name, 0}, bag)));
    contexts = std::move(next);
  }

  detail::LambdaChecker checker;
  std::vector<Typing> out;
  for (const auto& ctx : contexts)
    for (const auto& a : candidates)
      if (checker.check(ctx, m, a)) out.push_back(Typing{ctx, TypeTerm{a}});
  std::sort(out.begin(), out.end(), [](const Typing& a, const Typing& b) {
    return typing_compare(a, b) < 0;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Subject reduction: every one-step reduct sum of an expression preserves
// typability, and each typed element of the sum carries the expression's own
// context and type.

namespace detail {

template <class Sum>
bool reduct_sum_matches(const Sum& sum, const std::optional<Typing>& expected) {
  bool any_typed = false;
  for (const auto& [t, coeff] : sum.entries()) {
    (void)coeff;
    auto typing = infer(ResourceExpr{t});
    if (!typing) continue;
    any_typed = true;
    if (!expected || !(*typing == *expected)) return false;
  }
  if (expected && !sum.entries().empty() && !any_typed) return false;
  return true;
}

}  // namespace detail

inline bool subject_reduction_check(const ResourceExpr& e) {
  auto expected = infer(e);
  if (const auto* m = std::get_if<ValuePtr>(&e)) {
    for (const auto& [r, sum] : one_step_reducts(*m)) {
      (void)r;
      if (!detail::reduct_sum_matches(sum, expected)) return false;
      // A typed redex never annihilates: bag sizes match occurrence counts.
      if (expected && sum.entries().empty()) return false;
    }
    return true;
  }
  if (const auto* b = std::get_if<Base>(&e)) {
    for (const auto& r : redexes(*b)) {
      BaseSum sum = fire(*b, r);
      if (!detail::reduct_sum_matches(sum, expected)) return false;
      if (expected && sum.entries().empty()) return false;
    }
    return true;
  }
  if (const auto* bag = std::get_if<Bag>(&e)) {
    for (size_t i = 0; i < bag->elems.size(); ++i)
      for (const auto& [r, sum] : one_step_reducts(bag->elems[i])) {
        (void)r;
        BagSum lifted = map_terms<BagSum>(sum, [&](const ValuePtr& v) {
          Bag nb = *bag;
          nb.elems[i] = v;
          return mk_bag(std::move(nb.elems));
        });
        if (!detail::reduct_sum_matches(lifted, expected)) return false;
        if (expected && lifted.entries().empty()) return false;
      }
    return true;
  }
  const auto& s = std::get<Stream>(e);
  for (size_t i = 0; i < s.bags.size(); ++i)
    for (size_t j = 0; j < s.bags[i].elems.size(); ++j)
      for (const auto& [r, sum] : one_step_reducts(s.bags[i].elems[j])) {
        (void)r;
        StreamSum lifted = map_terms<StreamSum>(sum, [&](const ValuePtr& v) {
          Stream ns = s;
          ns.bags[i].elems[j] = v;
          ns.bags[i] = mk_bag(std::move(ns.bags[i].elems));
          return mk_stream(std::move(ns.bags));
        });
        if (!detail::reduct_sum_matches(lifted, expected)) return false;
        if (expected && lifted.entries().empty()) return false;
      }
  return true;
}

}  // namespace rescal

#endif  // RESCAL_TYPES_HPP
