#ifndef RESCAL_SEPARATE_HPP
#define RESCAL_SEPARATE_HPP

// Böhm transformations and a constructive separation procedure. When the
// truncated normalized expansions of two λ-terms disagree on a stable
// witness, `separate` builds a sequence of applications and substitutions
// driving one term to a head normal form while the other exhausts its head
// reduction fuel. Every returned transform is re-verified against the
// original pair before it is handed out.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rescal/lambda.hpp"
#include "rescal/print.hpp"
#include "rescal/taylor.hpp"

namespace rescal {

// ---------------------------------------------------------------------------
// Transforms

// One context move: apply the current term to `term`, or substitute `term`
// for the free variable `var`. A transform is a list of moves applied
// left-to-right, so steps {s1, s2} send M to (M s1) s2.
struct BohmStep {
  enum class Kind : uint8_t { Apply, Subst };
  Kind kind;
  std::string var;  // Subst target; empty for Apply
  LambdaPtr term;
};

struct BohmTransform {
  std::vector<BohmStep> steps;
};

inline BohmStep bohm_apply(LambdaPtr n) {
  return {BohmStep::Kind::Apply, "", std::move(n)};
}
inline BohmStep bohm_subst(std::string x, LambdaPtr n) {
  return {BohmStep::Kind::Subst, std::move(x), std::move(n)};
}

inline LambdaPtr apply_step(const LambdaPtr& m, const BohmStep& s) {
  return s.kind == BohmStep::Kind::Apply ? lam_app(m, s.term)
                                         : lam_subst(m, s.var, s.term);
}

inline LambdaPtr apply_transform(LambdaPtr m, const BohmTransform& t) {
  for (const auto& s : t.steps) m = apply_step(m, s);
  return m;
}

// ---------------------------------------------------------------------------
// Stock combinators

// λx1…λxk.λy. y x1 … xk; rho(0) is λy.y.
inline LambdaPtr rho(std::size_t k) {
  LambdaPtr body = lam_var("y");
  for (std::size_t i = 1; i <= k; ++i)
    body = lam_app(body, lam_var("x" + std::to_string(i)));
  LambdaPtr t = lam_abs("y", std::move(body));
  for (std::size_t i = k; i > 0; --i)
    t = lam_abs("x" + std::to_string(i), std::move(t));
  return t;
}

// λx1…λxk.xi, the k-ary projection on slot i (1-based).
inline LambdaPtr proj(std::size_t k, std::size_t i) {
  if (i < 1 || i > k)
    throw std::out_of_range("proj: slot " + std::to_string(i) +
                            " outside 1.." + std::to_string(k));
  LambdaPtr t = lam_var("x" + std::to_string(i));
  for (std::size_t j = k; j > 0; --j)
    t = lam_abs("x" + std::to_string(j), std::move(t));
  return t;
}

// (λx.x x)(λx.x x), the canonical unsolvable filler.
inline LambdaPtr omega_term() {
  auto d = lam_abs("x", lam_app(lam_var("x"), lam_var("x")));
  return lam_app(d, d);
}

inline std::string to_text(const BohmTransform& t) {
  auto term_text = [](const LambdaPtr& n) {
    return lam_alpha_equal(n, omega_term()) ? std::string("Ω") : to_text(n);
  };
  std::ostringstream os;
  bool first = true;
  for (const auto& s : t.steps) {
    if (!first) os << " ";
    first = false;
    if (s.kind == BohmStep::Kind::Apply) {
      if (s.term->kind == LambdaTerm::Kind::Var)
        os << "@" << s.term->name;
      else
        os << "@(" << term_text(s.term) << ")";
    } else {
      os << "{" << s.var << ":=" << term_text(s.term) << "}";
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Bounded head normalization probe

// Outcome of running head reduction for at most `fuel` steps. `normal` set
// means a head normal form was reached in `steps` reductions and `term`
// holds it; otherwise the fuel ran out and `term` is the last form reached.
// Exhaustion is never a divergence claim.
struct HeadProbe {
  bool normal = false;
  std::size_t steps = 0;
  LambdaPtr term;
};

inline HeadProbe head_normalizable(const LambdaPtr& m, std::size_t fuel) {
  LambdaPtr cur = m;
  for (std::size_t s = 0;; ++s) {
    if (lambda_head_normal(cur)) return {true, s, cur};
    if (s == fuel) return {false, s, cur};
    cur = head_reduce_lambda(cur);
  }
}

// ---------------------------------------------------------------------------
// Separation

enum class SepSide : uint8_t { first, second };

struct Separation {
  BohmTransform transform;
  // Which input the transform drives to a head normal form; the other side
  // exhausts its fuel.
  SepSide head_normal_side = SepSide::first;
};

namespace detail {

inline void lam_names(const LambdaPtr& t, std::set<std::string>& out) {
  switch (t->kind) {
    case LambdaTerm::Kind::Var:
      out.insert(t->name);
      return;
    case LambdaTerm::Kind::Abs:
      out.insert(t->name);
      lam_names(t->body, out);
      return;
    case LambdaTerm::Kind::App:
      lam_names(t->fun, out);
      lam_names(t->arg, out);
      return;
  }
}

// A term present in one side's truncated expansion and absent from the
// other's even after growing the window one step in each direction. Only
// such support differences can steer the walk; coefficient-only differences
// carry no usable shape.
struct SupportWitness {
  ValuePtr term;
  bool in_first = false;
};

inline std::optional<SupportWitness> stable_support_witness(
    const LambdaPtr& m, const LambdaPtr& n, const Truncation& t) {
  ValueLin<Rat> vm = nt_truncated<Rat>(m, t);
  ValueLin<Rat> vn = nt_truncated<Rat>(n, t);
  Truncation grown{t.max_size + 1, t.max_width + 1};
  ValueLin<Rat> vm2 = nt_truncated<Rat>(m, grown);
  ValueLin<Rat> vn2 = nt_truncated<Rat>(n, grown);
  std::optional<ValuePtr> in_m, in_n;
  for (const auto& [w, c] : vm.entries())
    if (semiring<Rat>::is_zero(vn2.coeff(w)) && (!in_m || enum_less(w, *in_m)))
      in_m = w;
  for (const auto& [w, c] : vn.entries())
    if (semiring<Rat>::is_zero(vm2.coeff(w)) && (!in_n || enum_less(w, *in_n)))
      in_n = w;
  if (in_m) return SupportWitness{*in_m, true};
  if (in_n) return SupportWitness{*in_n, false};
  return std::nullopt;
}

// Walk the head normal forms of the evolving pair, emitting one batch of
// moves per round:
//   - binders are opened by applying fresh variables (or, when the
//     dispreferred head is a binder the preferred side provably survives,
//     by applying identity fillers with the unsolvable at that slot);
//   - distinct free heads are settled by substituting the unsolvable for
//     the dispreferred one;
//   - equal heads of distinct arity get an applicator substituted so the
//     next rounds expose heads at distinct slots;
//   - equal shapes recurse into the first argument pair with a stable
//     support witness, extracted by applicator + fillers + projection.
// The round budget bounds the walk; the caller rechecks the outcome.
inline std::optional<Separation> drive_separation(
    const LambdaPtr& m0, const LambdaPtr& n0, const Truncation& t,
    std::size_t fuel, std::size_t budget, std::size_t scale,
    bool prefer_first) {
  BohmTransform tau;
  LambdaPtr a = m0, b = n0;
  std::set<std::string> avoid;
  lam_names(a, avoid);
  lam_names(b, avoid);
  std::size_t fresh_id = 0, picked = 0, arity_max = 0;
  auto fresh = [&] {
    std::string name;
    do {
      name = "w" + std::to_string(++fresh_id);
    } while (avoid.count(name));
    avoid.insert(name);
    return name;
  };
  // Pairwise-distinct applicator ranks, each exceeding every arity and
  // variable count seen so far; `scale` doubles the base on retries.
  auto next_rank = [&](std::size_t at_least) {
    std::size_t base = scale * (arity_max + avoid.size() + 1) + picked++;
    return std::max(base, at_least + 1);
  };
  auto push_apply = [&](const LambdaPtr& p) {
    tau.steps.push_back(bohm_apply(p));
    a = lam_app(a, p);
    b = lam_app(b, p);
  };
  auto push_subst = [&](const std::string& x, const LambdaPtr& p) {
    tau.steps.push_back(bohm_subst(x, p));
    a = lam_subst(a, x, p);
    b = lam_subst(b, x, p);
  };
  // 1-based slot of the spine head among its own binders (innermost match),
  // or -1 when the head is free.
  auto bound_slot = [](const LambdaSpine& s) -> long {
    for (std::size_t i = s.binders.size(); i-- > 0;)
      if (s.binders[i] == s.head->name) return static_cast<long>(i) + 1;
    return -1;
  };

  for (std::size_t round = 0; round < budget; ++round) {
    HeadProbe pa = head_normalizable(a, fuel);
    HeadProbe pb = head_normalizable(b, fuel);
    if (pa.normal != pb.normal)
      return Separation{std::move(tau),
                        pa.normal ? SepSide::first : SepSide::second};
    if (!pa.normal) return std::nullopt;
    a = pa.term;
    b = pb.term;
    LambdaSpine sa = lam_spine(a), sb = lam_spine(b);
    arity_max = std::max({arity_max, sa.binders.size(), sb.binders.size(),
                          sa.args.size(), sb.args.size()});
    std::size_t strip = std::max(sa.binders.size(), sb.binders.size());

    if (strip > 0) {
      const LambdaSpine& sw = prefer_first ? sa : sb;
      const LambdaSpine& sl = prefer_first ? sb : sa;
      long slot_w = bound_slot(sw), slot_l = bound_slot(sl);
      if (slot_l > 0) {
        // The survivor is safe under identity fillers when its head is free,
        // or when it is a different slot of an argument-free prefix that
        // consumes the unsolvable filler outright.
        bool winner_safe =
            slot_w == -1 ||
            (slot_w != slot_l && sw.args.empty() &&
             static_cast<std::size_t>(slot_l) <= sw.binders.size());
        if (winner_safe) {
          LambdaPtr eye = lam_abs("z", lam_var("z"));
          for (std::size_t i = 1; i <= strip; ++i)
            push_apply(static_cast<long>(i) == slot_l ? omega_term() : eye);
          continue;
        }
      }
      for (std::size_t i = 0; i < strip; ++i) push_apply(lam_var(fresh()));
      continue;
    }

    const std::string& ha = sa.head->name;
    const std::string& hb = sb.head->name;
    if (ha != hb) {
      push_subst(prefer_first ? hb : ha, omega_term());
      continue;
    }
    std::size_t na = sa.args.size(), nb = sb.args.size();
    if (na != nb) {
      push_subst(ha, rho(next_rank(std::max(na, nb))));
      continue;
    }
    bool advanced = false;
    for (std::size_t i = 0; i < na && !advanced; ++i) {
      auto w = stable_support_witness(sa.args[i], sb.args[i], t);
      if (!w) continue;
      prefer_first = w->in_first;
      std::size_t rank = next_rank(na);
      push_subst(ha, rho(rank));
      for (std::size_t j = na; j < rank; ++j) push_apply(omega_term());
      push_apply(proj(rank, i + 1));
      advanced = true;
    }
    if (!advanced) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace detail

// Search for a transform separating m from n (in either direction). Returns
// a transform only after confirming it: applied to the originals, the
// claimed side reaches a head normal form within `fuel` and the other side
// exhausts it. Returns nothing when the truncated expansions agree at the
// bound, differ only in coefficients, or no confirmed transform is found
// within the retry budget; `diagnostic`, when given, says which.
inline std::optional<Separation> separate(const LambdaPtr& m,
                                          const LambdaPtr& n,
                                          const Truncation& t,
                                          std::size_t fuel,
                                          std::string* diagnostic = nullptr) {
  auto fail = [&](const char* why) {
    if (diagnostic) *diagnostic = why;
    return std::nullopt;
  };
  if (!equiv_T(m, n, t).distinct)
    return fail("indistinguishable at this bound");
  auto witness = detail::stable_support_witness(m, n, t);
  if (!witness)
    return fail("expansions differ only in coefficients at this bound");
  std::size_t budget = 4 * term_size(witness->term) + 16;

  for (int attempt = 0; attempt < 4; ++attempt) {
    auto out = detail::drive_separation(m, n, t, fuel, budget,
                                        std::size_t{1} << attempt,
                                        witness->in_first);
    if (!out) continue;
    LambdaPtr ma = apply_transform(m, out->transform);
    LambdaPtr na = apply_transform(n, out->transform);
    bool first_claims = out->head_normal_side == SepSide::first;
    if (head_normalizable(ma, fuel).normal == first_claims &&
        head_normalizable(na, fuel).normal == !first_claims)
      return out;
  }
  return fail("no confirmed transform within the retry budget");
}

}  // namespace rescal

#endif  // RESCAL_SEPARATE_HPP
