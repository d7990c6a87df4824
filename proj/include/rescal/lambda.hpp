#ifndef RESCAL_LAMBDA_HPP
#define RESCAL_LAMBDA_HPP

// Ordinary pure λ-terms with named variables. α-equivalence is decided by
// comparison under de Bruijn numbering; the stored names are kept for
// printing.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace rescal {

struct LambdaTerm;
using LambdaPtr = std::shared_ptr<const LambdaTerm>;

struct LambdaTerm {
  enum class Kind : uint8_t { Var, Abs, App };
  Kind kind;
  std::string name;      // Var / Abs binder name
  LambdaPtr body;        // Abs
  LambdaPtr fun, arg;    // App
};

inline LambdaPtr lam_var(std::string name) {
  auto t = std::make_shared<LambdaTerm>();
  t->kind = LambdaTerm::Kind::Var;
  t->name = std::move(name);
  return t;
}
inline LambdaPtr lam_abs(std::string name, LambdaPtr body) {
  auto t = std::make_shared<LambdaTerm>();
  t->kind = LambdaTerm::Kind::Abs;
  t->name = std::move(name);
  t->body = std::move(body);
  return t;
}
inline LambdaPtr lam_app(LambdaPtr fun, LambdaPtr arg) {
  auto t = std::make_shared<LambdaTerm>();
  t->kind = LambdaTerm::Kind::App;
  t->fun = std::move(fun);
  t->arg = std::move(arg);
  return t;
}

inline void lam_free_vars(const LambdaPtr& t, std::set<std::string>& bound,
                          std::set<std::string>& out) {
  switch (t->kind) {
    case LambdaTerm::Kind::Var:
      if (!bound.count(t->name)) out.insert(t->name);
      return;
    case LambdaTerm::Kind::Abs: {
      bool fresh = bound.insert(t->name).second;
      lam_free_vars(t->body, bound, out);
      if (fresh) bound.erase(t->name);
      return;
    }
    case LambdaTerm::Kind::App:
      lam_free_vars(t->fun, bound, out);
      lam_free_vars(t->arg, bound, out);
      return;
  }
}

inline std::set<std::string> lam_free_vars(const LambdaPtr& t) {
  std::set<std::string> bound, out;
  lam_free_vars(t, bound, out);
  return out;
}

inline int lam_compare(const LambdaPtr& a, const LambdaPtr& b,
                       std::vector<std::string>& env_a,
                       std::vector<std::string>& env_b) {
  if (a->kind != b->kind)
    return static_cast<int>(a->kind) < static_cast<int>(b->kind) ? -1 : 1;
  switch (a->kind) {
    case LambdaTerm::Kind::Var: {
      // Innermost binder index, or the free name when unbound.
      auto index_of = [](const std::vector<std::string>& env,
                         const std::string& n) -> long {
        for (size_t i = env.size(); i-- > 0;)
          if (env[i] == n) return static_cast<long>(env.size() - 1 - i);
        return -1;
      };
      long ia = index_of(env_a, a->name);
      long ib = index_of(env_b, b->name);
      if (ia != ib) return ia < ib ? -1 : 1;
      if (ia == -1) {
        if (int c = a->name.compare(b->name)) return c < 0 ? -1 : 1;
      }
      return 0;
    }
    case LambdaTerm::Kind::Abs: {
      env_a.push_back(a->name);
      env_b.push_back(b->name);
      int c = lam_compare(a->body, b->body, env_a, env_b);
      env_a.pop_back();
      env_b.pop_back();
      return c;
    }
    case LambdaTerm::Kind::App: {
      if (int c = lam_compare(a->fun, b->fun, env_a, env_b)) return c;
      return lam_compare(a->arg, b->arg, env_a, env_b);
    }
  }
  return 0;
}

inline bool lam_alpha_equal(const LambdaPtr& a, const LambdaPtr& b) {
  std::vector<std::string> ea, eb;
  return lam_compare(a, b, ea, eb) == 0;
}

// Capture-avoiding substitution M{N/x}, renaming binders when needed.
inline LambdaPtr lam_subst(const LambdaPtr& m, const std::string& x,
                           const LambdaPtr& n) {
  switch (m->kind) {
    case LambdaTerm::Kind::Var:
      return m->name == x ? n : m;
    case LambdaTerm::Kind::App:
      return lam_app(lam_subst(m->fun, x, n), lam_subst(m->arg, x, n));
    case LambdaTerm::Kind::Abs: {
      if (m->name == x) return m;
      auto n_free = lam_free_vars(n);
      if (n_free.count(m->name)) {
        auto body_free = lam_free_vars(m->body);
        std::string fresh = m->name;
        do {
          fresh += "'";
        } while (n_free.count(fresh) || body_free.count(fresh));
        auto renamed = lam_subst(m->body, m->name, lam_var(fresh));
        return lam_abs(fresh, lam_subst(renamed, x, n));
      }
      return lam_abs(m->name, lam_subst(m->body, x, n));
    }
  }
  return m;
}

// Head-spine decomposition: M = λx₁…λxₚ. h N₁ … N_q.
struct LambdaSpine {
  std::vector<std::string> binders;
  LambdaPtr head;  // Var or Abs (Abs head means a head β-redex when args follow)
  std::vector<LambdaPtr> args;
};

inline LambdaSpine lam_spine(LambdaPtr m) {
  LambdaSpine s;
  while (m->kind == LambdaTerm::Kind::Abs) {
    s.binders.push_back(m->name);
    m = m->body;
  }
  std::vector<LambdaPtr> rev;
  while (m->kind == LambdaTerm::Kind::App) {
    rev.push_back(m->arg);
    m = m->fun;
  }
  s.head = m;
  s.args.assign(rev.rbegin(), rev.rend());
  return s;
}

inline bool lam_is_hnf(const LambdaPtr& m) {
  return lam_spine(m).head->kind == LambdaTerm::Kind::Var;
}

}  // namespace rescal

#endif  // RESCAL_LAMBDA_HPP
