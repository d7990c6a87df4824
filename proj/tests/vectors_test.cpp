#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "rescal/generators.hpp"
#include "rescal/parse.hpp"
#include "rescal/print.hpp"
#include "rescal/vector_ops.hpp"

using namespace rescal;

namespace {

// Coefficient of one bag in the k-fold self-product of M, computed the long
// way: sum over all ordered tuples from the support whose multiset is b.
Rat self_product_coeff(const ValueLin<Rat>& M, const Bag& b) {
  std::vector<ValuePtr> supp;
  for (const auto& [m, c] : M.entries()) supp.push_back(m);
  size_t k = b.elems.size();
  Rat total = 0;
  std::vector<size_t> pick(k, 0);
  for (;;) {
    std::vector<ValuePtr> tuple;
    for (size_t i : pick) tuple.push_back(supp[i]);
    if (term_equal(mk_bag(tuple), b)) {
      Rat prod = 1;
      for (size_t i : pick) prod *= M.coeff(supp[i]);
      total += prod;
    }
    size_t pos = 0;
    while (pos < k) {
      if (++pick[pos] < supp.size()) break;
      pick[pos] = 0;
      ++pos;
    }
    if (pos == k || supp.empty()) break;
  }
  return total;
}

}  // namespace

TEST_CASE("lifted term formers distribute over sums") {
  ValuePtr m = parse_value("\\y. z.0 ()");
  ValuePtr n = parse_value("\\y. w.0 ()");
  ValueLin<Rat> sum = ValueLin<Rat>::unit(m) + ValueLin<Rat>::unit(n);

  ValueLin<Rat> zero;
  CHECK(zero + sum == sum);

  BagLin<Rat> bagged = vbag_of(sum);
  CHECK(bagged == BagLin<Rat>::unit(mk_bag({m})) +
                      BagLin<Rat>::unit(mk_bag({n})));

  StreamLin<Rat> tail = StreamLin<Rat>::unit(iota());
  BagLin<Rat> two_bags =
      BagLin<Rat>::unit(mk_bag({m})) + BagLin<Rat>::unit(mk_bag({n}));
  StreamLin<Rat> consed = vcons(two_bags, tail);
  CHECK(consed == StreamLin<Rat>::unit(mk_stream({mk_bag({m})})) +
                      StreamLin<Rat>::unit(mk_stream({mk_bag({n})})));

  BaseLin<Rat> apped =
      vapp(head_vector(sum), StreamLin<Rat>::unit(iota()));
  CHECK(apped.support_size() == 2);
  CHECK(apped.coeff(mk_base(Head::value(m), iota())) == 1);
}

TEST_CASE("ordinary substitution replaces every occurrence by the vector") {
  FreeVar x{"x", 0};
  ValuePtr m = parse_value("\\y. z.0 ()");
  ValuePtr n = parse_value("\\y. w.0 ()");
  ValueLin<Rat> F = ValueLin<Rat>::single(m, rat_frac(1, 2)) +
                    ValueLin<Rat>::single(n, rat_frac(1, 3));

  // At the variable itself the whole vector comes back.
  HeadLin<Rat> at_var =
      subst_ordinary_head(Head::free("x", 0), head_vector(F), x);
  CHECK(at_var == head_vector(F));

  // With the zero vector, terms using the variable vanish and others stay.
  Base used = parse_base("x.0 ()");
  Base unused = parse_base("z.0 ()");
  CHECK(subst_ordinary(used, HeadLin<Rat>{}, x).is_zero());
  CHECK(subst_ordinary(unused, HeadLin<Rat>{}, x) == BaseLin<Rat>::unit(unused));

  // Two occurrences multiply out: coefficients are products, and mixed
  // choices land on the same bag twice.
  Base twice = parse_base("x.0 [\\u. x.0 ()] :: ()");
  BaseLin<Rat> out = subst_ordinary(twice, head_vector(F), x);
  Base mm = parse_base("(\\y. z.0 ()) [\\u. (\\y. z.0 ()) ()] :: ()");
  Base mn = parse_base("(\\y. z.0 ()) [\\u. (\\y. w.0 ()) ()] :: ()");
  CHECK(out.coeff(mm) == rat_frac(1, 4));
  CHECK(out.coeff(mn) == rat_frac(1, 6));
  CHECK(out.support_size() == 4);

  // Substituting a bare variable renames occurrences.
  BaseLin<Rat> renamed =
      subst_ordinary(twice, head_vector<Rat>(FreeVar{"v", 1}), x);
  CHECK(renamed == BaseLin<Rat>::unit(parse_base("v.1 [\\u. v.1 ()] :: ()")));
}

TEST_CASE("single-occurrence ordinary substitution is bag substitution") {
  FreeVar x{"x", 0};
  TermGen qgen(2101, 2, {"x", "z"});
  TermGen fgen(2102, 2, {"z"});
  int checked = 0;
  for (int trial = 0; trial < 2000 && checked < 40; ++trial) {
    ValuePtr q = qgen.gen_value(3 + qgen.pick(8));
    if (occurrences(q, x) != 1) continue;
    ValueLin<Rat> F = ValueLin<Rat>::single(fgen.gen_value(3 + fgen.pick(5)),
                                            rat_frac(2, 3));
    if (fgen.coin(50)) F += ValueLin<Rat>::unit(fgen.gen_value(3));
    CHECK(subst_ordinary(q, head_vector(F), x) ==
          subst_bag_linear(q, vbag_of(F), x));
    ++checked;
  }
  CHECK(checked >= 30);
}

TEST_CASE("promotion coefficients follow the closed form") {
  ValuePtr m = parse_value("\\y. z.0 ()");
  ValuePtr n = parse_value("\\y. w.0 ()");
  ValueLin<Rat> M = ValueLin<Rat>::unit(m);

  CHECK(promotion_coeff(M, mk_bag({m, m})) == rat_frac(1, 2));
  CHECK(promotion_coeff(M, Bag{}) == 1);
  CHECK(promotion_coeff(M, mk_bag({n})) == 0);
  CHECK(promotion_coeff(M, mk_bag({m, m, m})) == rat_frac(1, 6));

  ValueLin<Rat> rich = ValueLin<Rat>::single(m, rat_frac(1, 2)) +
                       ValueLin<Rat>::single(n, 3);
  CHECK(promotion_coeff(rich, mk_bag({m, m, n})) ==
        rat_frac(1, 2) * rat_frac(1, 2) * 3 / 2);

  // Booleans have fractions too: every stabilizer order divides to itself.
  ValueLin<BoolK> MB = ValueLin<BoolK>::unit(m);
  CHECK(promotion_coeff(MB, mk_bag({m, m})) == BoolK(true));
  CHECK(promotion_coeff(MB, mk_bag({n})) == BoolK(false));
}

TEST_CASE("stream promotion multiplies componentwise") {
  ValuePtr m = parse_value("\\y. z.0 ()");
  ValueLin<Rat> M = ValueLin<Rat>::unit(m);
  std::vector<ValueLin<Rat>> Ms{M};

  CHECK(stream_promotion_coeff(Ms, iota()) == 1);
  CHECK(stream_promotion_coeff(Ms, mk_stream({mk_bag({m})})) == 1);
  CHECK(stream_promotion_coeff(Ms, mk_stream({mk_bag({m, m})})) ==
        rat_frac(1, 2));

  // A nonempty bag beyond the sequence's support makes the product vanish.
  CHECK(stream_promotion_coeff(Ms, mk_stream({mk_bag({m}), mk_bag({m})})) == 0);

  std::vector<ValueLin<Rat>> Ms2{M, M};
  CHECK(stream_promotion_coeff(Ms2, mk_stream({mk_bag({m, m}), mk_bag({m})})) ==
        rat_frac(1, 2));
}

TEST_CASE("substituting a vector is the promotion-weighted bag sum") {
  FreeVar x{"x", 0};
  TermGen qgen(2201, 2, {"x", "z"});
  TermGen fgen(2202, 2, {"z"});
  int nonzero = 0;
  for (int trial = 0; trial < 80; ++trial) {
    ValuePtr e = qgen.gen_value(3 + qgen.pick(6));
    uint64_t k = occurrences(e, x);
    if (k > 3) continue;
    ValueLin<Rat> M = ValueLin<Rat>::single(fgen.gen_value(3 + fgen.pick(4)),
                                            rat_frac(1, 2));
    if (fgen.coin(60)) M += ValueLin<Rat>::single(fgen.gen_value(3), 2);

    ValueLin<Rat> lhs = subst_ordinary(e, head_vector(M), x);
    ValueLin<Rat> rhs;
    for_each_promotion_bag<Rat>(M, k, [&](const Bag& b, const Rat& c) {
      rhs += convert_coeffs<Rat>(subst_bag(e, b, x)).scaled(c);
    });
    CHECK(lhs == rhs);
    if (!lhs.is_zero()) ++nonzero;
  }
  CHECK(nonzero > 20);
}

TEST_CASE("promotion commutes with ordinary substitution") {
  FreeVar x{"x", 0};
  TermGen ngen(2301, 1, {"x", "z"});
  TermGen mgen(2302, 1, {"z"});
  for (int trial = 0; trial < 30; ++trial) {
    ValueLin<Rat> N = ValueLin<Rat>::single(ngen.gen_value(3 + ngen.pick(3)),
                                            rat_frac(1, 2));
    if (ngen.coin(60)) N += ValueLin<Rat>::unit(ngen.gen_value(3));
    ValueLin<Rat> M = ValueLin<Rat>::single(mgen.gen_value(3), 3);

    // Left side: the promotion of N, substituted bag by bag, truncated to
    // bags of length at most 3 (ordinary substitution preserves lengths).
    BagLin<Rat> lhs;
    for (size_t k = 0; k <= 3; ++k)
      for_each_promotion_bag<Rat>(N, k, [&](const Bag& b, const Rat& c) {
        lhs += subst_ordinary(b, head_vector(M), x).scaled(c);
      });

    ValueLin<Rat> Nsub = subst_ordinary(N, head_vector(M), x);
    BagLin<Rat> rhs = promotion_truncated(Nsub, 3);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("the promotion stream expands through degree streams") {
  ValuePtr m = parse_value("\\y. z.0 ()");
  ValuePtr n = parse_value("\\y. w.0 ()");
  ValueLin<Rat> M = ValueLin<Rat>::single(m, rat_frac(1, 2)) +
                    ValueLin<Rat>::single(n, 2);
  ValueLin<Rat> N = ValueLin<Rat>::unit(n);
  std::vector<ValueLin<Rat>> Ms{M, N};

  // On any stream, the only degree stream contributing to the expansion has
  // exactly the lengths of the stream's bags, and its term reduces to the
  // per-component self-products over the factorials.
  std::vector<Stream> samples{
      iota(),
      mk_stream({mk_bag({m, n})}),
      mk_stream({mk_bag({m, m}), mk_bag({n})}),
      mk_stream({Bag{}, mk_bag({n, n, n})}),
      mk_stream({mk_bag({m}), mk_bag({m})}),
  };
  for (const auto& s : samples) {
    Rat direct = stream_promotion_coeff(Ms, s);
    Rat expanded = 1;
    for (size_t i = 0; i < s.bags.size(); ++i) {
      const ValueLin<Rat>& Mi = i < Ms.size() ? Ms[i] : ValueLin<Rat>{};
      size_t k = s.bags[i].elems.size();
      expanded *= self_product_coeff(Mi, s.bags[i]) / Rat(factorial(k));
    }
    CHECK(direct == expanded);
  }
}

TEST_CASE("normalization extends linearly to vectors") {
  BaseLin<Rat> half = BaseLin<Rat>::single(
      parse_base("(\\x. x.0 ()) [\\y. z.0 ()] :: ()"), rat_frac(1, 2));
  CHECK(normalize_vector(half) ==
        BaseLin<Rat>::single(parse_base("z.0 ()"), rat_frac(1, 2)));

  BaseLin<Rat> already = BaseLin<Rat>::unit(parse_base("z.0 ()"));
  CHECK(normalize_vector(already) == already);

  BaseLin<Rat> annihilates =
      BaseLin<Rat>::single(parse_base("(\\x. x.0 ()) ()"), 5);
  CHECK(normalize_vector(annihilates).is_zero());

  TermGen gen(2401, 2, {"a"});
  for (int i = 0; i < 40; ++i) {
    ValueLin<Rat> U = ValueLin<Rat>::single(gen.gen_value(3 + gen.pick(8)),
                                            rat_frac(1, 3));
    ValueLin<Rat> V = ValueLin<Rat>::single(gen.gen_value(3 + gen.pick(8)), 2);
    ValueLin<Rat> combined =
        normalize_vector<Rat>(U.scaled(2) + V.scaled(rat_frac(1, 5)));
    CHECK(combined == normalize_vector(U).scaled(2) +
                          normalize_vector(V).scaled(rat_frac(1, 5)));
  }
}
