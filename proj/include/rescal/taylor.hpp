#ifndef RESCAL_TAYLOR_HPP
#define RESCAL_TAYLOR_HPP

// Taylor expansion of ordinary λ-terms into resource value vectors.
//
// The expansion vectors are infinite; this header materializes the finite
// window that fits a Truncation (a size bound plus a width bound) and
// answers exact coefficient queries for single terms. Two expansion
// flavors are provided: the structural one, which recurses through every
// application, and the head one, which follows the head spine and keeps
// normal source terms normal. On top of those sit the copycat witnesses
// (the unique expansion elements surviving an interaction with a given
// term), head reduction for both calculi, truncated normalized expansion
// vectors, and a bound-relative equivalence check.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "rescal/lambda.hpp"
#include "rescal/print.hpp"
#include "rescal/rational.hpp"
#include "rescal/reduce.hpp"
#include "rescal/subst.hpp"
#include "rescal/sum.hpp"
#include "rescal/term.hpp"
#include "rescal/vector_ops.hpp"

namespace rescal {

// Finite window into an expansion vector: keep the elements whose size and
// width measure both fit. The width measure bounds every stream range and
// every variable component index, which is what makes the window finite
// (size alone does not: λy⃗.y⃗[k] ι has size 3 for every k).
struct Truncation {
  uint64_t max_size = 0;
  uint64_t max_width = 0;
};

enum class TaylorFlavor : uint8_t { Structural, Head };

using ResourceExpr = std::variant<ValuePtr, Base, Bag, Stream>;

namespace detail {

// Enumeration order: by size, then width, then canonical term order.
inline bool enum_less(const ValuePtr& a, const ValuePtr& b) {
  if (term_size(a) != term_size(b)) return term_size(a) < term_size(b);
  if (term_width(a) != term_width(b)) return term_width(a) < term_width(b);
  return term_compare(a, b) < 0;
}

inline bool enum_less_stream(const Stream& a, const Stream& b) {
  if (term_size(a) != term_size(b)) return term_size(a) < term_size(b);
  if (term_width(a) != term_width(b)) return term_width(a) < term_width(b);
  return term_compare(a, b) < 0;
}

// Largest component index of the sequence variable `name` occurring free,
// or -1 when it does not occur.
inline int64_t max_seq_index(const ValuePtr& v, const std::string& name);
inline int64_t max_seq_index(const Base& b, const std::string& name);
inline int64_t max_seq_index(const Bag& b, const std::string& name) {
  int64_t k = -1;
  for (const auto& e : b.elems) k = std::max(k, max_seq_index(e, name));
  return k;
}
inline int64_t max_seq_index(const Stream& s, const std::string& name) {
  int64_t k = -1;
  for (const auto& b : s.bags) k = std::max(k, max_seq_index(b, name));
  return k;
}
inline int64_t max_seq_index(const Head& h, const std::string& name) {
  if (h.kind == Head::Kind::Free && h.name == name)
    return static_cast<int64_t>(h.index);
  if (h.kind == Head::Kind::Value) return max_seq_index(h.val, name);
  return -1;
}
inline int64_t max_seq_index(const Base& b, const std::string& name) {
  return std::max(max_seq_index(b.head, name), max_seq_index(b.args, name));
}
inline int64_t max_seq_index(const ValuePtr& v, const std::string& name) {
  return max_seq_index(v->body, name);
}

// Inverse of lambda_single on its image: peels one absorbed variable off
// the binder. lambda_single(x, unlambda_single(x, m)) == m holds exactly
// when m is of the form λx.m' for some m'.
inline ValuePtr unlambda_single(const FreeVar& x, const ValuePtr& m) {
  auto [y, body] = open_binder(m, {x.name});
  Base renamed = replace_var(body, FreeVar{y, 0}, Head::free(x));
  return close_binder(y, shift_down(renamed, y));
}

inline void collect_lambda_names(const LambdaPtr& t,
                                 std::set<std::string>& out) {
  switch (t->kind) {
    case LambdaTerm::Kind::Var:
      out.insert(t->name);
      return;
    case LambdaTerm::Kind::Abs:
      out.insert(t->name);
      collect_lambda_names(t->body, out);
      return;
    case LambdaTerm::Kind::App:
      collect_lambda_names(t->fun, out);
      collect_lambda_names(t->arg, out);
      return;
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Copycat witnesses
//
// For a resource expression u and a variable under substitution, exactly one
// element of the variable's expansion survives the interaction, reproducing
// u scaled by the witness's own multiplicity. The constructions below build
// that element; every sibling in the expansion annihilates.

inline Bag copycat_minus(const ValuePtr& u, const FreeVar& x);
inline Bag copycat_minus(const Base& u, const FreeVar& x);
inline Bag copycat_minus(const Bag& u, const FreeVar& x);
inline Bag copycat_minus(const Stream& u, const FreeVar& x);
inline ValuePtr copycat_applied(const Stream& u, const FreeVar& x);
inline ValuePtr copycat_plus(const ValuePtr& m, const FreeVar& x);
inline Bag copycat_plus(const Bag& mb, const FreeVar& x);
inline Stream copycat_plus_seq(const Stream& ms, const std::string& y);

// Stream witness for the whole sequence variable `y`: one bag witness per
// component that actually occurs.
template <class T>
Stream copycat_minus_seq(const T& u, const std::string& y) {
  int64_t top = detail::max_seq_index(u, y);
  std::vector<Bag> bags;
  for (int64_t j = 0; j <= top; ++j)
    bags.push_back(copycat_minus(u, FreeVar{y, static_cast<uint32_t>(j)}));
  return mk_stream(std::move(bags));
}

inline Bag copycat_minus(const ValuePtr& u, const FreeVar& x) {
  auto [y, body] = open_binder(u, {x.name});
  return copycat_minus(body, x);
}

inline Bag copycat_minus(const Base& u, const FreeVar& x) {
  std::vector<ValuePtr> elems;
  if (u.head.kind == Head::Kind::Free && u.head.name == x.name &&
      u.head.index == x.index) {
    elems.push_back(copycat_applied(u.args, x));
  } else if (u.head.kind == Head::Kind::Value) {
    Bag sub = copycat_minus(u.head.val, x);
    elems.insert(elems.end(), sub.elems.begin(), sub.elems.end());
  }
  Bag rest = copycat_minus(u.args, x);
  elems.insert(elems.end(), rest.elems.begin(), rest.elems.end());
  return mk_bag(std::move(elems));
}

inline Bag copycat_minus(const Bag& u, const FreeVar& x) {
  std::vector<ValuePtr> elems;
  for (const auto& e : u.elems) {
    Bag sub = copycat_minus(e, x);
    elems.insert(elems.end(), sub.elems.begin(), sub.elems.end());
  }
  return mk_bag(std::move(elems));
}

inline Bag copycat_minus(const Stream& u, const FreeVar& x) {
  std::vector<ValuePtr> elems;
  for (const auto& b : u.bags) {
    Bag sub = copycat_minus(b, x);
    elems.insert(elems.end(), sub.elems.begin(), sub.elems.end());
  }
  return mk_bag(std::move(elems));
}

// c⟨x, u⟩: the element of x's value expansion that, applied to the stream
// u, reduces to x u (up to the witness's multiplicity).
inline ValuePtr copycat_applied(const Stream& u, const FreeVar& x) {
  std::set<std::string> avoid = free_names(u);
  avoid.insert(x.name);
  std::string y = fresh_name(avoid, "y");
  return close_binder(y, mk_base(Head::free(x), copycat_plus_seq(u, y)));
}

// c⁺⟨x, m⟩: the element of x's value expansion that m substitutes into
// without annihilating.
inline ValuePtr copycat_plus(const ValuePtr& m, const FreeVar& x) {
  auto [y, body] = open_binder(m, {x.name});
  return close_binder(y, mk_base(Head::free(x), copycat_minus_seq(body, y)));
}

inline Bag copycat_plus(const Bag& mb, const FreeVar& x) {
  std::vector<ValuePtr> elems;
  elems.reserve(mb.elems.size());
  for (const auto& e : mb.elems) elems.push_back(copycat_plus(e, x));
  return mk_bag(std::move(elems));
}

inline Stream copycat_plus_seq(const Stream& ms, const std::string& y) {
  if (ms.bags.empty()) return iota();
  Stream tail{std::vector<Bag>(ms.bags.begin() + 1, ms.bags.end())};
  Stream rec = shift_up(copycat_plus_seq(tail, y), y);
  return mk_cons(copycat_plus(ms.bags.front(), FreeVar{y, 0}), rec);
}

enum class CopycatMode : uint8_t { Minus, Plus, Applied };
using CopycatTarget = std::variant<FreeVar, std::string>;

// Dispatcher over the mode/category table. Minus accepts any expression
// and either target kind; Plus accepts a value or bag against a value
// variable and a stream against a sequence variable; Applied accepts a
// stream against a value variable.
inline ResourceExpr copycat_witness(const ResourceExpr& u,
                                    const CopycatTarget& target,
                                    CopycatMode mode) {
  if (mode == CopycatMode::Minus) {
    if (const auto* x = std::get_if<FreeVar>(&target))
      return std::visit([&](const auto& e) { return copycat_minus(e, *x); },
                        u);
    const auto& y = std::get<std::string>(target);
    return std::visit(
        [&](const auto& e) { return copycat_minus_seq(e, y); }, u);
  }
  if (mode == CopycatMode::Plus) {
    if (const auto* x = std::get_if<FreeVar>(&target)) {
      if (const auto* m = std::get_if<ValuePtr>(&u))
        return copycat_plus(*m, *x);
      if (const auto* mb = std::get_if<Bag>(&u)) return copycat_plus(*mb, *x);
      throw std::invalid_argument(
          "copycat_witness: plus mode with a value variable expects a value "
          "or a bag");
    }
    const auto& y = std::get<std::string>(target);
    if (const auto* ms = std::get_if<Stream>(&u))
      return copycat_plus_seq(*ms, y);
    throw std::invalid_argument(
        "copycat_witness: plus mode with a sequence variable expects a "
        "stream");
  }
  const auto* x = std::get_if<FreeVar>(&target);
  if (!x)
    throw std::invalid_argument(
        "copycat_witness: applied mode expects a value variable");
  if (const auto* ms = std::get_if<Stream>(&u)) return copycat_applied(*ms, *x);
  throw std::invalid_argument(
      "copycat_witness: applied mode expects a stream");
}

// ---------------------------------------------------------------------------
// Expansion trees
//
// Both flavors produce vectors generated by two formers: absorbing a bound
// λ-variable into the binder, and the spine form λy⃗.h A₁^! :: … :: A_k^! :: y⃗^!
// whose head h is a variable or another expansion. The structural flavor
// nests one spine per application; the head flavor flattens each maximal
// spine.

namespace detail {

struct ExpNode;
using ExpNodePtr = std::shared_ptr<const ExpNode>;

struct ExpNode {
  enum class Kind : uint8_t { Lam, Spine };
  Kind kind = Kind::Spine;
  // Lam
  FreeVar binder{};
  ExpNodePtr body;
  // Spine
  bool head_is_var = false;
  FreeVar head_var{};
  ExpNodePtr head_node;
  std::vector<ExpNodePtr> args;
};

inline ExpNodePtr make_lam_node(FreeVar x, ExpNodePtr body) {
  auto n = std::make_shared<ExpNode>();
  n->kind = ExpNode::Kind::Lam;
  n->binder = std::move(x);
  n->body = std::move(body);
  return n;
}

inline ExpNodePtr make_spine_var(FreeVar x, std::vector<ExpNodePtr> args) {
  auto n = std::make_shared<ExpNode>();
  n->kind = ExpNode::Kind::Spine;
  n->head_is_var = true;
  n->head_var = std::move(x);
  n->args = std::move(args);
  return n;
}

inline ExpNodePtr make_spine_node(ExpNodePtr head,
                                  std::vector<ExpNodePtr> args) {
  auto n = std::make_shared<ExpNode>();
  n->kind = ExpNode::Kind::Spine;
  n->head_is_var = false;
  n->head_node = std::move(head);
  n->args = std::move(args);
  return n;
}

inline ExpNodePtr build_structural(const LambdaPtr& m) {
  switch (m->kind) {
    case LambdaTerm::Kind::Var:
      return make_spine_var(FreeVar{m->name, 0}, {});
    case LambdaTerm::Kind::Abs:
      return make_lam_node(FreeVar{m->name, 0}, build_structural(m->body));
    case LambdaTerm::Kind::App:
      return make_spine_node(build_structural(m->fun),
                             {build_structural(m->arg)});
  }
  throw std::logic_error("build_structural: unreachable");
}

inline ExpNodePtr build_head(const LambdaPtr& m) {
  if (m->kind == LambdaTerm::Kind::Abs)
    return make_lam_node(FreeVar{m->name, 0}, build_head(m->body));
  LambdaSpine s = lam_spine(m);
  std::vector<ExpNodePtr> args;
  args.reserve(s.args.size());
  for (const auto& a : s.args) args.push_back(build_head(a));
  if (s.head->kind == LambdaTerm::Kind::Var)
    return make_spine_var(FreeVar{s.head->name, 0}, std::move(args));
  return make_spine_node(build_head(s.head), std::move(args));
}

// -------------------------------------------------------------------------
// Exact coefficient queries (no truncation involved)

template <class K>
K eta_value_coeff(const FreeVar& x, const ValuePtr& m);

// Product over the explicit bags of the promotion coefficients against the
// per-component value expansions of `y`; components past the last bag hold
// the empty bag, whose factor is one.
template <class K>
K eta_stream_coeff(const std::string& y, const Stream& q) {
  K acc = semiring<K>::one();
  for (size_t j = 0; j < q.bags.size(); ++j) {
    FreeVar comp{y, static_cast<uint32_t>(j)};
    CoeffQuery<K> query = [&comp](const ValuePtr& e) {
      return eta_value_coeff<K>(comp, e);
    };
    acc = semiring<K>::mul(acc, promotion_coeff<K>(query, q.bags[j]));
    if (semiring<K>::is_zero(acc)) return acc;
  }
  return acc;
}

template <class K>
K eta_value_coeff(const FreeVar& x, const ValuePtr& m) {
  auto [z, body] = open_binder(m, {x.name});
  if (!(body.head.kind == Head::Kind::Free && body.head.name == x.name &&
        body.head.index == x.index))
    return semiring<K>::zero();
  return eta_stream_coeff<K>(z, body.args);
}

template <class K>
K coeff_node(const ExpNodePtr& n, const ValuePtr& m) {
  if (n->kind == ExpNode::Kind::Lam) {
    ValuePtr peeled = unlambda_single(n->binder, m);
    if (!term_equal(lambda_single(n->binder, peeled), m))
      return semiring<K>::zero();
    return coeff_node<K>(n->body, peeled);
  }
  std::set<std::string> avoid;
  if (n->head_is_var) avoid.insert(n->head_var.name);
  auto [y, body] = open_binder(m, avoid);
  K acc = semiring<K>::one();
  if (n->head_is_var) {
    if (!(body.head.kind == Head::Kind::Free &&
          body.head.name == n->head_var.name &&
          body.head.index == n->head_var.index))
      return semiring<K>::zero();
  } else {
    if (body.head.kind != Head::Kind::Value) return semiring<K>::zero();
    acc = coeff_node<K>(n->head_node, body.head.val);
    if (semiring<K>::is_zero(acc)) return acc;
  }
  const size_t k = n->args.size();
  for (size_t i = 0; i < k; ++i) {
    Bag bi = i < body.args.bags.size() ? body.args.bags[i] : Bag{};
    const ExpNodePtr& arg = n->args[i];
    CoeffQuery<K> query = [&arg](const ValuePtr& e) {
      return coeff_node<K>(arg, e);
    };
    acc = semiring<K>::mul(acc, promotion_coeff<K>(query, bi));
    if (semiring<K>::is_zero(acc)) return acc;
  }
  Stream tail;
  if (body.args.bags.size() > k)
    tail = Stream{std::vector<Bag>(body.args.bags.begin() + k,
                                   body.args.bags.end())};
  return semiring<K>::mul(acc, eta_stream_coeff<K>(y, tail));
}

// -------------------------------------------------------------------------
// Truncated enumeration

class Expander {
 public:
  explicit Expander(const std::set<std::string>& avoid)
      : seq_name_(fresh_name(avoid, "y")) {}

  const std::string& seq_name() const { return seq_name_; }

  std::vector<ValuePtr> enum_node(const ExpNodePtr& n, uint64_t max_size,
                                  uint64_t max_width) {
    auto key = std::make_tuple(n.get(), max_size, max_width);
    if (auto it = node_memo_.find(key); it != node_memo_.end())
      return *it->second;
    std::vector<ValuePtr> out;
    if (n->kind == ExpNode::Kind::Lam) {
      for (const auto& body : enum_node(n->body, max_size, max_width)) {
        ValuePtr v = lambda_single(n->binder, body);
        if (term_width(v) <= max_width) out.push_back(v);
      }
    } else {
      out = enum_spine(*n, max_size, max_width);
    }
    std::sort(out.begin(), out.end(), enum_less);
    node_memo_[key] = std::make_shared<const std::vector<ValuePtr>>(out);
    return out;
  }

  std::vector<ValuePtr> enum_eta_value(const FreeVar& x, uint64_t max_size,
                                       uint64_t max_width) {
    auto key = std::make_tuple(x.name, x.index, max_size, max_width);
    if (auto it = eta_value_memo_.find(key); it != eta_value_memo_.end())
      return *it->second;
    std::vector<ValuePtr> out;
    if (max_size >= 3 && x.index <= max_width) {
      std::string z = fresh_name({x.name}, "y");
      for (const auto& q :
           enum_eta_stream(z, max_size - 3, max_width, max_width)) {
        ValuePtr v = close_binder(z, mk_base(Head::free(x), q));
        if (term_width(v) <= max_width) out.push_back(v);
      }
    }
    std::sort(out.begin(), out.end(), enum_less);
    eta_value_memo_[key] = std::make_shared<const std::vector<ValuePtr>>(out);
    return out;
  }

  // Streams in the expansion of the sequence variable `y`: at most
  // max_range explicit components, the bag at position j drawing from the
  // value expansion of y[j].
  std::vector<Stream> enum_eta_stream(const std::string& y, uint64_t max_size,
                                      uint64_t max_width,
                                      uint64_t max_range) {
    auto key = std::make_tuple(y, max_size, max_width, max_range);
    if (auto it = eta_stream_memo_.find(key); it != eta_stream_memo_.end())
      return *it->second;
    std::vector<Stream> out;
    out.push_back(iota());
    std::vector<Bag> cur;
    std::function<void(uint64_t, uint64_t)> rec = [&](uint64_t j,
                                                      uint64_t budget) {
      if (j >= max_range) return;
      FreeVar comp{y, static_cast<uint32_t>(j)};
      auto elems = enum_eta_value(comp, budget, max_width);
      for_each_size_bounded_bag(elems, budget, [&](const Bag& b,
                                                   uint64_t used) {
        cur.push_back(b);
        if (!b.elems.empty()) out.push_back(mk_stream(cur));
        rec(j + 1, budget - used);
        cur.pop_back();
      });
    };
    rec(0, max_size);
    std::sort(out.begin(), out.end(), enum_less_stream);
    eta_stream_memo_[key] = std::make_shared<const std::vector<Stream>>(out);
    return out;
  }

 private:
  // All multisets over `elems` (sorted by size) with total size at most
  // `budget`, reported with the size they consume.
  static void for_each_size_bounded_bag(
      const std::vector<ValuePtr>& elems, uint64_t budget,
      const std::function<void(const Bag&, uint64_t)>& emit) {
    std::vector<ValuePtr> cur;
    std::function<void(size_t, uint64_t)> rec = [&](size_t start,
                                                    uint64_t rem) {
      emit(mk_bag(cur), budget - rem);
      for (size_t i = start; i < elems.size(); ++i) {
        uint64_t s = term_size(elems[i]);
        if (s > rem) break;
        cur.push_back(elems[i]);
        rec(i, rem - s);
        cur.pop_back();
      }
    };
    rec(0, budget);
  }

  std::vector<ValuePtr> enum_spine(const ExpNode& n, uint64_t max_size,
                                   uint64_t max_width) {
    std::vector<ValuePtr> out;
    if (max_size < 3) return out;
    struct HeadCand {
      Head head;
      uint64_t size;
    };
    std::vector<HeadCand> heads;
    if (n.head_is_var) {
      heads.push_back({Head::free(n.head_var), 1});
    } else {
      for (const auto& hv :
           enum_node(n.head_node, max_size - 2, max_width))
        heads.push_back({Head::value(hv), term_size(hv)});
    }
    const size_t k = n.args.size();
    for (const auto& hc : heads) {
      if (hc.size + 2 > max_size) continue;
      uint64_t budget = max_size - 2 - hc.size;
      std::vector<Bag> arg_bags(k);
      std::function<void(size_t, uint64_t)> rec = [&](size_t i,
                                                      uint64_t rem) {
        if (i == k) {
          uint64_t range =
              max_width > k ? max_width - static_cast<uint64_t>(k) : 0;
          for (const auto& q :
               enum_eta_stream(seq_name_, rem, max_width, range)) {
            std::vector<Bag> bags = arg_bags;
            bags.insert(bags.end(), q.bags.begin(), q.bags.end());
            ValuePtr v = close_binder(
                seq_name_, mk_base(hc.head, mk_stream(std::move(bags))));
            if (term_width(v) <= max_width) out.push_back(v);
          }
          return;
        }
        if (i >= max_width) {
          // Components past the width window only carry the empty bag.
          arg_bags[i] = Bag{};
          rec(i + 1, rem);
          return;
        }
        auto elems = enum_node(n.args[i], rem, max_width);
        for_each_size_bounded_bag(elems, rem,
                                  [&](const Bag& b, uint64_t used) {
                                    arg_bags[i] = b;
                                    rec(i + 1, rem - used);
                                  });
      };
      rec(0, budget);
    }
    return out;
  }

  std::string seq_name_;
  std::map<std::tuple<const ExpNode*, uint64_t, uint64_t>,
           std::shared_ptr<const std::vector<ValuePtr>>>
      node_memo_;
  std::map<std::tuple<std::string, uint32_t, uint64_t, uint64_t>,
           std::shared_ptr<const std::vector<ValuePtr>>>
      eta_value_memo_;
  std::map<std::tuple<std::string, uint64_t, uint64_t, uint64_t>,
           std::shared_ptr<const std::vector<Stream>>>
      eta_stream_memo_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Public expansion interface

class ExpansionHandle {
 public:
  ExpansionHandle(LambdaPtr source, TaylorFlavor flavor)
      : source_(std::move(source)), flavor_(flavor) {
    std::set<std::string> names;
    detail::collect_lambda_names(source_, names);
    expander_ = std::make_shared<detail::Expander>(names);
    root_ = flavor_ == TaylorFlavor::Structural
                ? detail::build_structural(source_)
                : detail::build_head(source_);
  }

  const LambdaPtr& source() const { return source_; }
  TaylorFlavor flavor() const { return flavor_; }

  std::vector<ValuePtr> enumerate(const Truncation& t) const {
    return expander_->enum_node(root_, t.max_size, t.max_width);
  }

  template <class K = Rat>
  K coeff(const ValuePtr& m) const {
    return detail::coeff_node<K>(root_, m);
  }

 private:
  LambdaPtr source_;
  TaylorFlavor flavor_;
  std::shared_ptr<detail::Expander> expander_;
  detail::ExpNodePtr root_;
};

inline std::vector<ValuePtr> taylor_enum(const ExpansionHandle& h,
                                         const Truncation& t) {
  return h.enumerate(t);
}

template <class K = Rat>
K taylor_coeff(const ExpansionHandle& h, const ValuePtr& m) {
  return h.template coeff<K>(m);
}

inline std::vector<ValuePtr> eta_var_enum(const FreeVar& x,
                                          const Truncation& t) {
  detail::Expander e({x.name});
  return e.enum_eta_value(x, t.max_size, t.max_width);
}

template <class K = Rat>
K eta_var_coeff(const FreeVar& x, const ValuePtr& m) {
  return detail::eta_value_coeff<K>(x, m);
}

// ---------------------------------------------------------------------------
// Truncated normalized expansion

// Sum of coeff(m)·normalize(m) over the truncated support. Every reduct is
// checked against the window: normalization must not grow the size or the
// width of an expansion element, otherwise the truncated vector would be
// missing mass and silently wrong.
template <class K = Rat>
ValueLin<K> nt_truncated(const ExpansionHandle& h, const Truncation& t) {
  ValueLin<K> out;
  for (const auto& m : h.enumerate(t)) {
    K c = h.template coeff<K>(m);
    ValueSum reduced = normalize(m);
    for (const auto& [r, n] : reduced.entries()) {
      if (term_size(r) > term_size(m) || term_width(r) > term_width(m))
        throw std::logic_error(
            "nt_truncated: normal form escapes the truncation window: " +
            to_text(m) + " reduces to " + to_text(r));
    }
    out += convert_coeffs<K>(reduced).scaled(c);
  }
  return out;
}

template <class K = Rat>
ValueLin<K> nt_truncated(const LambdaPtr& m, const Truncation& t) {
  return nt_truncated<K>(ExpansionHandle(m, TaylorFlavor::Head), t);
}

// ---------------------------------------------------------------------------
// Head reduction

// One head step on an ordinary λ-term; the identity exactly on head normal
// forms.
inline LambdaPtr head_reduce_lambda(const LambdaPtr& m) {
  if (m->kind == LambdaTerm::Kind::Abs) {
    LambdaPtr body = head_reduce_lambda(m->body);
    return body == m->body ? m : lam_abs(m->name, body);
  }
  LambdaSpine s = lam_spine(m);
  if (s.head->kind != LambdaTerm::Kind::Abs || s.args.empty()) return m;
  LambdaPtr reduced = lam_subst(s.head->body, s.head->name, s.args.front());
  for (size_t i = 1; i < s.args.size(); ++i)
    reduced = lam_app(reduced, s.args[i]);
  return reduced;
}

inline bool lambda_head_normal(const LambdaPtr& m) {
  LambdaPtr t = m;
  while (t->kind == LambdaTerm::Kind::Abs) t = t->body;
  return lam_spine(t).head->kind == LambdaTerm::Kind::Var;
}

// One head step on a resource term: fires the base redex under the binder
// when the head is a value, and returns the term untouched otherwise. The
// fixed points are exactly the head normal forms.
inline BaseSum head_reduce_resource(const Base& a) {
  if (a.head.kind != Head::Kind::Value) return BaseSum::unit(a);
  auto [x, body] = open_binder(a.head.val, free_names(a));
  return subst_stream_direct(body, a.args, x);
}

inline ValueSum head_reduce_resource(const ValuePtr& m) {
  auto [y, body] = open_binder(m);
  if (body.head.kind != Head::Kind::Value) return ValueSum::unit(m);
  BaseSum inner = head_reduce_resource(body);
  return map_terms<ValueSum>(
      inner, [&y](const Base& b) { return close_binder(y, b); });
}

template <class K>
ValueLin<K> head_reduce_resource(const ValueLin<K>& m) {
  ValueLin<K> out;
  for (const auto& [t, c] : m.entries()) {
    ValueSum step = head_reduce_resource(t);
    out += convert_coeffs<K>(step).scaled(c);
  }
  return out;
}

inline bool resource_head_normal(const ValuePtr& m) {
  return m->body.head.kind != Head::Kind::Value;
}

// ---------------------------------------------------------------------------
// Bound-relative equivalence

// Outcome of comparing two truncated normalized expansions. A distinct
// verdict carries a witness present in exactly one side (or with differing
// coefficients) that also survives growing the window by one size and one
// width step; anything else is only "indistinguishable at this bound",
// never a claim about the full vectors.
struct EquivTVerdict {
  bool distinct = false;
  ValuePtr witness;
};

inline EquivTVerdict equiv_T(const LambdaPtr& m, const LambdaPtr& n,
                             const Truncation& t) {
  ValueLin<Rat> vm = nt_truncated<Rat>(m, t);
  ValueLin<Rat> vn = nt_truncated<Rat>(n, t);
  std::vector<ValuePtr> diff;
  for (const auto& [term, c] : vm.entries())
    if (vn.coeff(term) != c) diff.push_back(term);
  for (const auto& [term, c] : vn.entries())
    if (semiring<Rat>::is_zero(vm.coeff(term))) diff.push_back(term);
  if (diff.empty()) return {};
  std::sort(diff.begin(), diff.end(), detail::enum_less);
  Truncation grown{t.max_size + 1, t.max_width + 1};
  ValueLin<Rat> vm2 = nt_truncated<Rat>(m, grown);
  ValueLin<Rat> vn2 = nt_truncated<Rat>(n, grown);
  for (const auto& w : diff)
    if (vm2.coeff(w) != vn2.coeff(w)) return {true, w};
  return {};
}

}  // namespace rescal

#endif  // RESCAL_TAYLOR_HPP
