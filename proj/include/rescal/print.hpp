#ifndef RESCAL_PRINT_HPP
#define RESCAL_PRINT_HPP

// Text form of resource expressions, λ-terms, and sums.
//
//   value  := "\" IDENT "." base
//   base   := head stream
//   head   := IDENT "." NAT | "(" value ")"
//   bag    := "[" [ value { "," value } ] "]"
//   stream := "()" | bag "::" stream
//
// Binders are nameless internally, so the printer assigns names depth by
// depth, skipping names that collide with free variables or enclosing
// binders; parsing the output reproduces the term exactly.

#include <sstream>
#include <string>
#include <vector>

#include "rescal/lambda.hpp"
#include "rescal/sum.hpp"
#include "rescal/term.hpp"

namespace rescal {

namespace detail {

inline std::string pick_binder_name(const std::set<std::string>& avoid,
                                    const std::vector<std::string>& stack) {
  static const char* candidates[] = {"x", "y", "z", "u", "v", "w"};
  auto taken = [&](const std::string& n) {
    if (avoid.count(n)) return true;
    for (const auto& s : stack)
      if (s == n) return true;
    return false;
  };
  for (const char* c : candidates)
    if (!taken(c)) return c;
  for (uint64_t i = 1;; ++i)
    for (const char* c : candidates) {
      std::string n = std::string(c) + std::to_string(i);
      if (!taken(n)) return n;
    }
}

inline void print_value(std::ostream& os, const ValuePtr& v,
                        const std::set<std::string>& avoid,
                        std::vector<std::string>& stack);

inline void print_bag(std::ostream& os, const Bag& b,
                      const std::set<std::string>& avoid,
                      std::vector<std::string>& stack) {
  os << "[";
  bool first = true;
  for (const auto& e : b.elems) {
    if (!first) os << ", ";
    first = false;
    print_value(os, e, avoid, stack);
  }
  os << "]";
}

inline void print_stream(std::ostream& os, const Stream& s,
                         const std::set<std::string>& avoid,
                         std::vector<std::string>& stack) {
  for (const auto& b : s.bags) {
    print_bag(os, b, avoid, stack);
    os << " :: ";
  }
  os << "()";
}

inline void print_base(std::ostream& os, const Base& b,
                       const std::set<std::string>& avoid,
                       std::vector<std::string>& stack) {
  switch (b.head.kind) {
    case Head::Kind::Bound: {
      size_t pos = stack.size() - 1 - b.head.depth;
      os << stack[pos] << "." << b.head.index;
      break;
    }
    case Head::Kind::Free:
      os << b.head.name << "." << b.head.index;
      break;
    case Head::Kind::Value:
      os << "(";
      print_value(os, b.head.val, avoid, stack);
      os << ")";
      break;
  }
  os << " ";
  print_stream(os, b.args, avoid, stack);
}

inline void print_value(std::ostream& os, const ValuePtr& v,
                        const std::set<std::string>& avoid,
                        std::vector<std::string>& stack) {
  std::string name = pick_binder_name(avoid, stack);
  os << "\\" << name << ". ";
  stack.push_back(name);
  print_base(os, v->body, avoid, stack);
  stack.pop_back();
}

}  // namespace detail

inline std::string to_text(const ValuePtr& v) {
  std::ostringstream os;
  std::vector<std::string> stack;
  auto avoid = free_names(v);
  detail::print_value(os, v, avoid, stack);
  return os.str();
}

inline std::string to_text(const Base& b) {
  std::ostringstream os;
  std::vector<std::string> stack;
  auto avoid = free_names(b);
  detail::print_base(os, b, avoid, stack);
  return os.str();
}

inline std::string to_text(const Bag& b) {
  std::ostringstream os;
  std::vector<std::string> stack;
  auto avoid = free_names(b);
  detail::print_bag(os, b, avoid, stack);
  return os.str();
}

inline std::string to_text(const Stream& s) {
  std::ostringstream os;
  std::vector<std::string> stack;
  auto avoid = free_names(s);
  detail::print_stream(os, s, avoid, stack);
  return os.str();
}

template <class T, class K, class Less>
std::string to_text(const Lin<T, K, Less>& sum) {
  if (sum.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [t, c] : sum.entries()) {
    if (!first) os << " + ";
    first = false;
    os << semiring<K>::str(c) << " * " << to_text(t);
  }
  return os.str();
}

// λ-terms: applications associate left; abstraction bodies extend right.
inline void print_lambda(std::ostream& os, const LambdaPtr& t, bool atom_pos) {
  switch (t->kind) {
    case LambdaTerm::Kind::Var:
      os << t->name;
      return;
    case LambdaTerm::Kind::Abs:
      if (atom_pos) os << "(";
      os << "\\" << t->name << ". ";
      print_lambda(os, t->body, false);
      if (atom_pos) os << ")";
      return;
    case LambdaTerm::Kind::App: {
      if (atom_pos) os << "(";
      bool fun_needs_parens = t->fun->kind == LambdaTerm::Kind::Abs;
      print_lambda(os, t->fun, fun_needs_parens);
      os << " ";
      bool arg_needs_parens = t->arg->kind != LambdaTerm::Kind::Var;
      print_lambda(os, t->arg, arg_needs_parens);
      if (atom_pos) os << ")";
      return;
    }
  }
}

inline std::string to_text(const LambdaPtr& t) {
  std::ostringstream os;
  print_lambda(os, t, false);
  return os.str();
}

}  // namespace rescal

#endif  // RESCAL_PRINT_HPP
