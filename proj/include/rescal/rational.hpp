#ifndef RESCAL_RATIONAL_HPP
#define RESCAL_RATIONAL_HPP

// Coefficient semirings: arbitrary-precision naturals, exact nonnegative
// rationals, and booleans. Every coefficient computed in this library is a
// quotient of products of factorials and multiset stabilizer orders, so
// nothing beyond exact integer arithmetic is ever needed.

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace rescal {

using Nat = mpz_class;
using Rat = mpq_class;

inline Nat nat(unsigned long v) { return Nat(v); }

inline Nat factorial(unsigned n) {
  Nat r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

inline Rat rat_of(const Nat& n) { return Rat(n); }

inline Rat rat_frac(const Nat& num, const Nat& den) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// Boolean semiring coefficient: addition is "or", multiplication is "and".
struct BoolK {
  bool v = false;
  BoolK() = default;
  explicit BoolK(bool b) : v(b) {}
  friend bool operator==(BoolK a, BoolK b) { return a.v == b.v; }
};

// Uniform semiring access used by the generic linear-combination container.
template <class K>
struct semiring;

template <>
struct semiring<Nat> {
  static Nat zero() { return Nat(0); }
  static Nat one() { return Nat(1); }
  static bool is_zero(const Nat& x) { return x == 0; }
  static Nat add(const Nat& a, const Nat& b) { return a + b; }
  static Nat mul(const Nat& a, const Nat& b) { return a * b; }
  static Nat from_nat(const Nat& n) { return n; }
  // Exact division; callers only divide when the theory guarantees it.
  static Nat div_nat(const Nat& a, const Nat& n) { return a / n; }
  static std::string str(const Nat& x) { return x.get_str(); }
};

template <>
struct semiring<Rat> {
  static Rat zero() { return Rat(0); }
  static Rat one() { return Rat(1); }
  static bool is_zero(const Rat& x) { return x == 0; }
  static Rat add(const Rat& a, const Rat& b) { return a + b; }
  static Rat mul(const Rat& a, const Rat& b) { return a * b; }
  static Rat from_nat(const Nat& n) { return Rat(n); }
  static Rat div_nat(const Rat& a, const Nat& n) { return rat_frac(1, n) * a; }
  static std::string str(const Rat& x) {
    if (x.get_den() == 1) return x.get_num().get_str();
    return x.get_num().get_str() + "/" + x.get_den().get_str();
  }
};

template <>
struct semiring<BoolK> {
  static BoolK zero() { return BoolK(false); }
  static BoolK one() { return BoolK(true); }
  static bool is_zero(BoolK x) { return !x.v; }
  static BoolK add(BoolK a, BoolK b) { return BoolK(a.v || b.v); }
  static BoolK mul(BoolK a, BoolK b) { return BoolK(a.v && b.v); }
  static BoolK from_nat(const Nat& n) { return BoolK(n != 0); }
  // Every nonzero natural is invertible in the booleans, with inverse 1.
  static BoolK div_nat(BoolK a, const Nat&) { return a; }
  static std::string str(BoolK x) { return x.v ? "1" : "0"; }
};

}  // namespace rescal

#endif  // RESCAL_RATIONAL_HPP
