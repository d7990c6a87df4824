#ifndef RESCAL_REDUCE_HPP
#define RESCAL_REDUCE_HPP

// Rewrite engine: small-step and big-step reduction, normalization, and a
// constructive confluence witness.
//
// A redex is addressed by a path of hops from the root base term to the base
// whose head is a value, plus a rule tag:
//
//   Beta  (λ.a)(b :: s)  reduces to  (λ. a[b / binder 0, shifted]) s.
//         With an empty stream this still applies (the stream is read as
//         [] :: itself), which is how a reduction step can return its own
//         source; such steps are exposed only when callers ask for the full
//         relation.
//   Iota  (λ.a)()        reduces to  a  if the binder does not occur in a,
//         and to zero otherwise.
//
// Firing opens every binder it crosses, so substitution never needs to
// adjust bound-variable depths. Opened bodies keep bag elements in their
// original positions; results are re-canonicalized when binders are closed
// on the way back up.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rescal/subst.hpp"
#include "rescal/sum.hpp"
#include "rescal/term.hpp"

namespace rescal {

enum class Rule : uint8_t { Beta, Iota };

// One step from a base term to the base inside one of its immediate value
// subterms: either the value in head position, or element `elem` of the bag
// at stream component `comp`.
struct Hop {
  bool into_head = false;
  uint32_t comp = 0;
  uint32_t elem = 0;
  friend bool operator==(const Hop&, const Hop&) = default;
};

struct Redex {
  std::vector<Hop> hops;
  Rule rule = Rule::Beta;
  friend bool operator==(const Redex&, const Redex&) = default;
};

// ---------------------------------------------------------------------------
// Redex enumeration (depth-first, leftmost-outermost first)

namespace detail {

inline void collect_redexes(const Base& b, std::vector<Hop>& prefix,
                            bool include_identity, std::vector<Redex>& out) {
  if (b.head.kind == Head::Kind::Value) {
    bool iota_args = b.args.bags.empty();
    // On an empty stream the Beta step loops or annihilates; the Iota step
    // makes the same progress, so strategies skip Beta there.
    if (!iota_args || include_identity) out.push_back({prefix, Rule::Beta});
    if (iota_args) out.push_back({prefix, Rule::Iota});
    prefix.push_back(Hop{true, 0, 0});
    collect_redexes(b.head.val->body, prefix, include_identity, out);
    prefix.pop_back();
  }
  for (uint32_t i = 0; i < b.args.bags.size(); ++i)
    for (uint32_t j = 0; j < b.args.bags[i].elems.size(); ++j) {
      prefix.push_back(Hop{false, i, j});
      collect_redexes(b.args.bags[i].elems[j]->body, prefix, include_identity,
                      out);
      prefix.pop_back();
    }
}

}  // namespace detail

inline std::vector<Redex> redexes(const Base& b, bool include_identity = true) {
  std::vector<Redex> out;
  std::vector<Hop> prefix;
  detail::collect_redexes(b, prefix, include_identity, out);
  return out;
}

inline std::vector<Redex> redexes(const ValuePtr& m,
                                  bool include_identity = true) {
  return redexes(m->body, include_identity);
}

// ---------------------------------------------------------------------------
// Firing

namespace detail {

// Walks `hops` starting at index i, opening each crossed binder, applies
// `at_target` to the addressed base, and extends the result linearly back
// through the context. `avoid` carries every name free in the root plus the
// names opened so far, so each new opened name is globally fresh.
inline BaseSum descend_fire(
    const Base& b, const std::vector<Hop>& hops, size_t i,
    std::set<std::string> avoid,
    const std::function<BaseSum(const Base&, const std::set<std::string>&)>&
        at_target) {
  if (i == hops.size()) return at_target(b, avoid);
  const Hop& h = hops[i];
  if (h.into_head) {
    if (b.head.kind != Head::Kind::Value)
      throw std::logic_error("redex path walks into a variable head");
    auto [y, body] = open_binder(b.head.val, avoid);
    avoid.insert(y);
    BaseSum inner = descend_fire(body, hops, i + 1, avoid, at_target);
    return map_terms<BaseSum>(inner, [&](const Base& t) {
      return mk_base(Head::value(close_binder(y, t)), b.args);
    });
  }
  const ValuePtr& target = b.args.bags.at(h.comp).elems.at(h.elem);
  auto [y, body] = open_binder(target, avoid);
  avoid.insert(y);
  BaseSum inner = descend_fire(body, hops, i + 1, avoid, at_target);
  return map_terms<BaseSum>(inner, [&](const Base& t) {
    Base nb = b;
    nb.args.bags[h.comp].elems[h.elem] = close_binder(y, t);
    return nb;
  });
}

// (λ.a)(b :: s) at the addressed base itself.
inline BaseSum beta_at(const Base& b, const std::set<std::string>& avoid) {
  if (b.head.kind != Head::Kind::Value)
    throw std::logic_error("beta step at a variable-headed base");
  auto [y, a] = open_binder(b.head.val, avoid);
  Bag first = b.args.bags.empty() ? Bag{} : b.args.bags[0];
  Stream rest;
  if (!b.args.bags.empty())
    rest = Stream{std::vector<Bag>(b.args.bags.begin() + 1, b.args.bags.end())};
  BaseSum sub = subst_bag(a, first, FreeVar{y, 0});
  return map_terms<BaseSum>(sub, [&, y = y](const Base& t) {
    return mk_base(Head::value(close_binder(y, shift_down(t, y))), rest);
  });
}

// (λ.a)() at the addressed base itself.
inline BaseSum iota_at(const Base& b, const std::set<std::string>& avoid) {
  if (b.head.kind != Head::Kind::Value)
    throw std::logic_error("iota step at a variable-headed base");
  if (!b.args.bags.empty())
    throw std::logic_error("iota step with a non-empty stream");
  auto [y, a] = open_binder(b.head.val, avoid);
  return erase_seq(a, y);
}

inline BaseSum rule_at(Rule rule, const Base& b,
                       const std::set<std::string>& avoid) {
  return rule == Rule::Beta ? beta_at(b, avoid) : iota_at(b, avoid);
}

// Fires a redex living inside a value term (used by the join construction).
inline ValueSum fire_value(const ValuePtr& v, const std::vector<Hop>& hops,
                           size_t i, Rule rule, std::set<std::string> avoid) {
  auto [y, body] = open_binder(v, avoid);
  avoid.insert(y);
  BaseSum inner =
      descend_fire(body, hops, i, avoid, [&](const Base& t, const auto& av) {
        return rule_at(rule, t, av);
      });
  return map_terms<ValueSum>(
      inner, [&, y = y](const Base& t) { return close_binder(y, t); });
}

}  // namespace detail

inline BaseSum fire(const Base& root, const Redex& r) {
  BaseSum out = detail::descend_fire(
      root, r.hops, 0, free_names(root),
      [&](const Base& t, const std::set<std::string>& av) {
        return detail::rule_at(r.rule, t, av);
      });
  return map_terms<BaseSum>(out, [](const Base& t) { return canonical(t); });
}

inline ValueSum fire(const ValuePtr& m, const Redex& r) {
  return detail::fire_value(m, r.hops, 0, r.rule, free_names(m));
}

// Every one-step result of the small-step relation, paired with its redex.
inline std::vector<std::pair<Redex, ValueSum>> one_step_reducts(
    const ValuePtr& m, bool include_identity = true) {
  std::vector<std::pair<Redex, ValueSum>> out;
  for (const auto& r : redexes(m, include_identity))
    out.emplace_back(r, fire(m, r));
  return out;
}

// ---------------------------------------------------------------------------
// Big-step firing: the addressed base substitutes its whole argument stream

namespace detail {

inline BaseSum big_at(const Base& b, const std::set<std::string>& avoid) {
  if (b.head.kind != Head::Kind::Value)
    throw std::logic_error("big step at a variable-headed base");
  auto [y, a] = open_binder(b.head.val, avoid);
  return subst_stream(a, b.args, y);
}

}  // namespace detail

inline ValueSum fire_big(const ValuePtr& m, const std::vector<Hop>& hops) {
  auto [y, body] = open_binder(m);
  std::set<std::string> avoid = free_names(m);
  avoid.insert(y);
  BaseSum inner = detail::descend_fire(body, hops, 0, avoid, detail::big_at);
  return map_terms<ValueSum>(
      inner, [&, y = y](const Base& t) { return close_binder(y, t); });
}

inline std::vector<std::pair<Redex, ValueSum>> big_step_reducts(
    const ValuePtr& m) {
  std::vector<std::pair<Redex, ValueSum>> out;
  for (const auto& r : redexes(m, true))
    if (r.rule == Rule::Beta) out.emplace_back(r, fire_big(m, r.hops));
  return out;
}

inline BaseSum fire_big(const Base& root, const std::vector<Hop>& hops) {
  BaseSum raw =
      detail::descend_fire(root, hops, 0, free_names(root), detail::big_at);
  return map_terms<BaseSum>(raw, [](const Base& t) { return canonical(t); });
}

inline std::vector<std::pair<Redex, BaseSum>> big_step_reducts(const Base& b) {
  std::vector<std::pair<Redex, BaseSum>> out;
  for (const auto& r : redexes(b, true))
    if (r.rule == Rule::Beta) out.emplace_back(r, fire_big(b, r.hops));
  return out;
}

// ---------------------------------------------------------------------------
// Constructive confluence

namespace detail {

inline BaseSum join_beta_with_body(const Base& b, const BaseSum& bodies,
                                   const std::string& y) {
  Bag first = b.args.bags.empty() ? Bag{} : b.args.bags[0];
  Stream rest;
  if (!b.args.bags.empty())
    rest = Stream{std::vector<Bag>(b.args.bags.begin() + 1, b.args.bags.end())};
  return map_lin<BaseSum>(bodies, [&](const Base& a) {
    BaseSum sub = subst_bag(a, first, FreeVar{y, 0});
    return map_terms<BaseSum>(sub, [&](const Base& t) {
      return mk_base(Head::value(close_binder(y, shift_down(t, y))), rest);
    });
  });
}

// Both redexes address bases inside b (given by the hop suffixes at i1/i2).
// Returns one sum that both one-step results reduce to in one more parallel
// step. The construction mirrors the case analysis that proves the diamond
// property.
inline BaseSum join_base(const Base& b, const Redex& r1, size_t i1,
                         const Redex& r2, size_t i2,
                         std::set<std::string> avoid) {
  bool end1 = i1 == r1.hops.size();
  bool end2 = i2 == r2.hops.size();

  if (end1 && end2) {
    if (r1.rule == r2.rule) return rule_at(r1.rule, b, avoid);
    // Beta and Iota on the same empty-stream base: the Iota result is final
    // (the Beta result reaches it by an Iota step of its own).
    return iota_at(b, avoid);
  }

  if (!end1 && end2)
    return join_base(b, r2, i2, r1, i1, std::move(avoid));

  if (end1) {
    // r1 fires this base; r2 fires strictly inside it.
    const Hop& h = r2.hops[i2];
    if (h.into_head) {
      auto [y, a] = open_binder(b.head.val, avoid);
      avoid.insert(y);
      BaseSum inner =
          descend_fire(a, r2.hops, i2 + 1, avoid,
                       [&](const Base& t, const std::set<std::string>& av) {
                         return rule_at(r2.rule, t, av);
                       });
      if (r1.rule == Rule::Iota)
        return map_lin<BaseSum>(
            inner, [&, y = y](const Base& t) { return erase_seq(t, y); });
      return join_beta_with_body(b, inner, y);
    }
    // A hop into the arguments: only Beta can fire here (an Iota base has an
    // empty stream, hence no argument subterms).
    if (r1.rule != Rule::Beta)
      throw std::logic_error("argument redex under an empty stream");
    const ValuePtr& target = b.args.bags[h.comp].elems[h.elem];
    ValueSum fired = fire_value(target, r2.hops, i2 + 1, r2.rule, avoid);
    BaseSum out;
    for (const auto& [t, c] : fired.entries()) {
      Base nb = b;
      nb.args.bags[h.comp].elems[h.elem] = t;
      out += beta_at(nb, avoid).scaled(c);
    }
    return out;
  }

  const Hop& h1 = r1.hops[i1];
  const Hop& h2 = r2.hops[i2];
  if (h1 == h2) {
    // Both continue into the same immediate subterm: recurse.
    const ValuePtr& child =
        h1.into_head ? b.head.val : b.args.bags[h1.comp].elems[h1.elem];
    auto [y, body] = open_binder(child, avoid);
    avoid.insert(y);
    BaseSum inner = join_base(body, r1, i1 + 1, r2, i2 + 1, avoid);
    return map_terms<BaseSum>(inner, [&, y = y](const Base& t) {
      ValuePtr closed = close_binder(y, t);
      Base nb = b;
      if (h1.into_head)
        nb.head = Head::value(closed);
      else
        nb.args.bags[h1.comp].elems[h1.elem] = closed;
      return nb;
    });
  }

  // Disjoint subterms: fire both, bilinearly.
  auto fire_child = [&](const Hop& h, const Redex& r,
                        size_t i) -> ValueSum {
    const ValuePtr& child =
        h.into_head ? b.head.val : b.args.bags[h.comp].elems[h.elem];
    return fire_value(child, r.hops, i, r.rule, avoid);
  };
  ValueSum s1 = fire_child(h1, r1, i1 + 1);
  ValueSum s2 = fire_child(h2, r2, i2 + 1);
  return bilinear<BaseSum>(s1, s2, [&](const ValuePtr& t1, const ValuePtr& t2) {
    Base nb = b;
    auto put = [&nb](const Hop& h, const ValuePtr& t) {
      if (h.into_head)
        nb.head = Head::value(t);
      else
        nb.args.bags[h.comp].elems[h.elem] = t;
    };
    put(h1, t1);
    put(h2, t2);
    return nb;
  });
}

}  // namespace detail

// Given two redexes of m, a sum that both fire(m, r1) and fire(m, r2) reach
// in at most one further parallel small step.
inline ValueSum join(const ValuePtr& m, const Redex& r1, const Redex& r2) {
  auto [y, body] = open_binder(m);
  std::set<std::string> avoid = free_names(m);
  avoid.insert(y);
  BaseSum inner = detail::join_base(body, r1, 0, r2, 0, avoid);
  return map_terms<ValueSum>(
      inner, [&, y = y](const Base& t) { return close_binder(y, t); });
}

// ---------------------------------------------------------------------------
// Checking one parallel step between sums

namespace detail {

inline std::optional<ValueSum> try_subtract(const ValueSum& have,
                                            const ValueSum& take,
                                            const Nat& k) {
  ValueSum out = have;
  for (const auto& [t, c] : take.entries()) {
    Nat need = c * k;
    if (have.coeff(t) < need) return std::nullopt;
    out.add(t, -need);
  }
  return out;
}

}  // namespace detail

// Does S reach T in one parallel small step? Every occurrence of every
// summand of S independently either stays or fires one of its redexes; the
// results must add up to T exactly. (All redexes count here, including the
// empty-stream Beta steps, and staying put is always allowed, so the
// relation is reflexive.)
inline bool sum_steps_to(const ValueSum& S, const ValueSum& T) {
  std::vector<std::pair<ValuePtr, Nat>> items(S.entries().begin(),
                                              S.entries().end());
  std::vector<std::vector<ValueSum>> menus;
  menus.reserve(items.size());
  for (const auto& [u, c] : items) {
    std::vector<ValueSum> opts{ValueSum::unit(u)};
    for (const auto& r : redexes(u, true)) {
      ValueSum f = fire(u, r);
      if (std::find(opts.begin(), opts.end(), f) == opts.end())
        opts.push_back(std::move(f));
    }
    menus.push_back(std::move(opts));
  }
  std::function<bool(size_t, const ValueSum&)> place =
      [&](size_t idx, const ValueSum& remaining) -> bool {
    if (idx == items.size()) return remaining.is_zero();
    const Nat& c = items[idx].second;
    const auto& opts = menus[idx];
    std::function<bool(size_t, const Nat&, const ValueSum&)> dist =
        [&](size_t oi, const Nat& left, const ValueSum& rem) -> bool {
      if (oi + 1 == opts.size()) {
        auto r2 = detail::try_subtract(rem, opts[oi], left);
        return r2.has_value() && place(idx + 1, *r2);
      }
      for (Nat k = 0; k <= left; ++k) {
        auto r2 = detail::try_subtract(rem, opts[oi], k);
        if (!r2.has_value()) break;
        if (dist(oi + 1, left - k, *r2)) return true;
      }
      return false;
    };
    return dist(0, c, remaining);
  };
  return place(0, T);
}

// ---------------------------------------------------------------------------
// Normalization by structural recursion

namespace detail {

struct Normalizer {
  std::map<ValuePtr, ValueSum, ValueLess> memo;

  ValueSum value(const ValuePtr& v) {
    auto it = memo.find(v);
    if (it != memo.end()) return it->second;
    auto [y, body] = open_binder(v);
    BaseSum inner = base(body);
    ValueSum out = map_terms<ValueSum>(
        inner, [&, y = y](const Base& t) { return close_binder(y, t); });
    memo.emplace(v, out);
    return out;
  }

  BagSum bag(const Bag& b) {
    std::vector<ValueSum> parts;
    parts.reserve(b.elems.size());
    for (const auto& e : b.elems) {
      parts.push_back(value(e));
      if (parts.back().is_zero()) return {};
    }
    BagSum out;
    for_each_product<ValuePtr, Nat, ValueLess>(
        parts, [&](const std::vector<ValuePtr>& picked, const Nat& c) {
          out.add(mk_bag(picked), c);
        });
    return out;
  }

  StreamSum stream(const Stream& s) {
    std::vector<BagSum> parts;
    parts.reserve(s.bags.size());
    for (const auto& b : s.bags) {
      parts.push_back(bag(b));
      if (parts.back().is_zero()) return {};
    }
    StreamSum out;
    for_each_product<Bag, Nat, BagLess>(
        parts, [&](const std::vector<Bag>& picked, const Nat& c) {
          out.add(mk_stream(picked), c);
        });
    return out;
  }

  // Normalizes the arguments first; while the head is a value, fires it on
  // the whole (now normal) stream and keeps normalizing the outcome. Each
  // firing yields strictly smaller terms, so the recursion bottoms out.
  BaseSum base(const Base& a) {
    StreamSum args = stream(a.args);
    if (args.is_zero()) return {};
    if (a.head.kind != Head::Kind::Value)
      return map_terms<BaseSum>(
          args, [&](const Stream& s) { return mk_base(a.head, s); });
    ValueSum heads = value(a.head.val);
    BaseSum out;
    for (const auto& [f, c1] : heads.entries())
      for (const auto& [s, c2] : args.entries()) {
        auto [y, body] = open_binder(f, free_names(s));
        BaseSum fired = subst_stream(body, s, y);
        Nat c12 = c1 * c2;
        for (const auto& [r, c3] : fired.entries())
          out += base(r).scaled(c12 * c3);
      }
    return out;
  }
};

}  // namespace detail

inline ValueSum normalize(const ValuePtr& m) {
  detail::Normalizer n;
  return n.value(m);
}

inline BaseSum normalize_base(const Base& a) {
  detail::Normalizer n;
  return n.base(a);
}

inline ValueSum normalize(const ValueSum& m) {
  detail::Normalizer n;
  return map_lin<ValueSum>(m, [&](const ValuePtr& v) { return n.value(v); });
}

// ---------------------------------------------------------------------------
// Strategy-driven normalization (one redex at a time)

using RedexChooser =
    std::function<size_t(const ValuePtr&, const std::vector<Redex>&)>;

inline size_t leftmost_chooser(const ValuePtr&, const std::vector<Redex>&) {
  return 0;
}

struct RandomChooser {
  std::mt19937_64 rng;
  explicit RandomChooser(uint64_t seed) : rng(seed) {}
  size_t operator()(const ValuePtr&, const std::vector<Redex>& rs) {
    return static_cast<size_t>(rng() % rs.size());
  }
};

struct TraceStep {
  ValuePtr term;
  Redex redex;
  Nat coeff;
};

struct ReductionTrace {
  ValuePtr start;
  std::vector<TraceStep> steps;
  ValueSum result;
};

// Repeatedly picks one pending summand and fires one of its progressing
// redexes (empty-stream Beta steps are skipped; the Iota step subsumes
// them). Terminates with the normal form of m.
inline ValueSum normalize_strategy(const ValuePtr& m,
                                   const RedexChooser& choose,
                                   ReductionTrace* trace = nullptr) {
  if (trace) {
    trace->start = m;
    trace->steps.clear();
  }
  ValueSum done;
  ValueSum pending = ValueSum::unit(m);
  while (!pending.is_zero()) {
    auto [u, c] = *pending.entries().begin();
    pending.add(u, -c);
    auto rs = redexes(u, false);
    if (rs.empty()) {
      done.add(u, c);
      continue;
    }
    size_t pick = choose(u, rs) % rs.size();
    if (trace) trace->steps.push_back({u, rs[pick], c});
    pending += fire(u, rs[pick]).scaled(c);
  }
  if (trace) trace->result = done;
  return done;
}

// Re-runs a recorded reduction and returns the final sum; throws if any step
// no longer matches the pending state.
inline ValueSum replay_trace(const ReductionTrace& tr) {
  ValueSum pending = ValueSum::unit(tr.start);
  for (const auto& st : tr.steps) {
    if (pending.coeff(st.term) != st.coeff)
      throw std::logic_error("trace replay: pending coefficient mismatch");
    pending.add(st.term, -st.coeff);
    pending += fire(st.term, st.redex).scaled(st.coeff);
  }
  return pending;
}

}  // namespace rescal

#endif  // RESCAL_REDUCE_HPP
