#include <catch2/catch_amalgamated.hpp>

#include <stdexcept>
#include <string>
#include <vector>

#include "rescal/combinatorics.hpp"
#include "rescal/generators.hpp"
#include "rescal/parse.hpp"
#include "rescal/print.hpp"
#include "rescal/subst.hpp"
#include "rescal/sum.hpp"
#include "rescal/term.hpp"

using namespace rescal;

namespace {

// Substitution extended linearly to a sum of bags in the second argument.
ValueSum subst_bag_sum(const ValuePtr& q, const BagSum& bags, const FreeVar& x) {
  ValueSum out;
  for (const auto& [b, c] : bags.entries())
    out += subst_bag(q, b, x).scaled(c);
  return out;
}

ValueSum subst_bag_sum(const ValueSum& qs, const Bag& b, const FreeVar& x) {
  ValueSum out;
  for (const auto& [q, c] : qs.entries()) out += subst_bag(q, b, x).scaled(c);
  return out;
}

Bag bag_of(const std::vector<ValuePtr>& elems, const std::vector<size_t>& idx) {
  std::vector<ValuePtr> picked;
  for (size_t i : idx) picked.push_back(elems[i]);
  return mk_bag(std::move(picked));
}

uint64_t bag_occurrences(const Bag& b, const FreeVar& x) {
  return occurrences(b, x);
}

}  // namespace

TEST_CASE("bag substitution on the structural cases") {
  FreeVar x{"x", 0};
  ValuePtr n = parse_value("\\u. w.0 ()");

  // The variable itself consumes a singleton bag.
  HeadSum hs = subst_bag_head(Head::free("x", 0), mk_bag({n}), x);
  REQUIRE(hs.support_size() == 1);
  CHECK(hs.coeff(Head::value(n)) == 1);

  BaseSum var = subst_bag(parse_base("x.0 ()"), mk_bag({n}), x);
  REQUIRE(var.support_size() == 1);
  CHECK(var.coeff(mk_base(Head::value(n), iota())) == 1);

  // A different variable passes an empty bag through and refuses others.
  Base y_base = parse_base("y.0 ()");
  CHECK(subst_bag(y_base, Bag{}, x) == BaseSum::unit(y_base));
  CHECK(subst_bag(y_base, mk_bag({n}), x).is_zero());

  // An empty bag against a variable that does occur gives zero.
  CHECK(subst_bag(parse_base("x.0 ()"), Bag{}, x).is_zero());
}

TEST_CASE("bag substitution distributes over the occurrences") {
  FreeVar x{"x", 0};
  Base q = parse_base("x.0 [\\y. x.0 ()] :: ()");
  ValuePtr m = parse_value("\\u. z.0 ()");
  ValuePtr n = parse_value("\\u. w.0 ()");

  BaseSum got = subst_bag(q, mk_bag({m, n}), x);
  Base t1 = parse_base("(\\u. z.0 ()) [\\y. (\\u. w.0 ()) ()] :: ()");
  Base t2 = parse_base("(\\u. w.0 ()) [\\y. (\\u. z.0 ()) ()] :: ()");
  REQUIRE(got.support_size() == 2);
  CHECK(got.coeff(t1) == 1);
  CHECK(got.coeff(t2) == 1);

  // Two equal elements into two occurrences: both assignments produce the
  // same term, so its coefficient is 2.
  BaseSum dup = subst_bag(q, mk_bag({m, m}), x);
  Base t3 = parse_base("(\\u. z.0 ()) [\\y. (\\u. z.0 ()) ()] :: ()");
  REQUIRE(dup.support_size() == 1);
  CHECK(dup.coeff(t3) == 2);
}

TEST_CASE("bag substitution is nonzero exactly when the sizes agree") {
  FreeVar x{"x", 0};
  TermGen qgen(301, 2, {"x", "z"});
  TermGen bgen(302, 2, {"x", "z"});
  int nonzero_seen = 0;
  for (int trial = 0; trial < 150; ++trial) {
    ValuePtr q = qgen.gen_value(3 + qgen.pick(9));
    uint64_t kx = occurrences(q, x);
    if (kx > 3) continue;
    size_t nb = bgen.pick(4);
    std::vector<ValuePtr> elems;
    for (size_t i = 0; i < nb; ++i) elems.push_back(bgen.gen_value(3 + bgen.pick(5)));
    Bag b = mk_bag(std::move(elems));

    ValueSum out = subst_bag(q, b, x);
    CHECK(out.is_zero() == (kx != b.elems.size()));
    if (!out.is_zero()) ++nonzero_seen;
  }
  CHECK(nonzero_seen > 10);
}

TEST_CASE("sizes and occurrence counts of substitution results") {
  FreeVar x{"x", 0};
  TermGen qgen(777, 2, {"x", "z"});
  TermGen bgen(778, 2, {"x", "z"});
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 60; ++trial) {
    ValuePtr q = qgen.gen_value(3 + qgen.pick(9));
    uint64_t kx = occurrences(q, x);
    if (kx > 3) continue;
    std::vector<ValuePtr> elems;
    for (uint64_t i = 0; i < kx; ++i)
      elems.push_back(bgen.gen_value(3 + bgen.pick(5)));
    Bag b = mk_bag(std::move(elems));

    ValueSum out = subst_bag(q, b, x);
    REQUIRE(!out.is_zero());
    ++checked;
    for (const auto& [e, c] : out.entries()) {
      CHECK(term_size(e) == term_size(q) + term_size(b) - b.elems.size());
      CHECK(occurrences(e, x) == bag_occurrences(b, x));
      for (const FreeVar& y :
           {FreeVar{"z", 0}, FreeVar{"z", 1}, FreeVar{"x", 1}})
        CHECK(occurrences(e, y) == occurrences(q, y) + bag_occurrences(b, y));
    }
  }
  CHECK(checked >= 30);
}

TEST_CASE("substitutions for distinct variables commute") {
  FreeVar x{"x", 0};
  FreeVar y{"y", 0};
  TermGen qgen(41, 1, {"x", "y"});
  TermGen mgen(42, 1, {"y", "z"});
  TermGen ngen(43, 1, {"z"});
  int nonzero_seen = 0;
  for (int trial = 0; trial < 120; ++trial) {
    ValuePtr q = qgen.gen_value(3 + qgen.pick(7));
    uint64_t kx = occurrences(q, x);
    uint64_t ky = occurrences(q, y);
    if (kx > 2 || ky > 2) continue;

    std::vector<ValuePtr> m_elems;
    for (uint64_t i = 0; i < kx; ++i)
      m_elems.push_back(mgen.gen_value(3 + mgen.pick(4)));
    Bag mbar = mk_bag(std::move(m_elems));

    uint64_t need_y = ky + occurrences(mbar, y);
    if (need_y > 3) continue;
    std::vector<ValuePtr> n_elems;
    for (uint64_t i = 0; i < need_y; ++i)
      n_elems.push_back(ngen.gen_value(3 + ngen.pick(4)));
    Bag nbar = mk_bag(std::move(n_elems));
    REQUIRE(occurrences(nbar, x) == 0);

    ValueSum lhs = subst_bag_sum(subst_bag(q, mbar, x), nbar, y);

    ValueSum rhs;
    for_each_partitioning(
        nbar.elems.size(), 2,
        [&](const std::vector<std::vector<size_t>>& blocks) {
          Bag n1 = bag_of(nbar.elems, blocks[0]);
          Bag n2 = bag_of(nbar.elems, blocks[1]);
          ValueSum qy = subst_bag(q, n1, y);
          BagSum m2 = subst_bag(mbar, n2, y);
          for (const auto& [u, cu] : qy.entries())
            rhs += subst_bag_sum(u, m2, x).scaled(cu);
        });

    CHECK(lhs == rhs);
    if (!lhs.is_zero()) ++nonzero_seen;
  }
  CHECK(nonzero_seen > 5);
}

TEST_CASE("component shifts") {
  CHECK(term_equal(shift_up(parse_base("x.0 ()"), "x"), parse_base("x.1 ()")));
  CHECK(term_equal(shift_up(parse_base("x.1 [\\y. x.0 ()] :: ()"), "x"),
                   parse_base("x.2 [\\y. x.1 ()] :: ()")));
  CHECK(term_equal(shift_up(parse_base("z.0 ()"), "x"), parse_base("z.0 ()")));

  CHECK(term_equal(shift_down(parse_base("x.1 ()"), "x"), parse_base("x.0 ()")));
  CHECK_THROWS_AS(shift_down(parse_base("x.0 ()"), "x"), std::invalid_argument);

  TermGen gen(555, 2, {"x", "z"});
  for (int i = 0; i < 100; ++i) {
    ValuePtr q = gen.gen_value(3 + gen.pick(10));
    ValuePtr up = shift_up(q, "x");
    CHECK(term_size(up) == term_size(q));
    CHECK(term_equal(shift_down(up, "x"), q));
  }
}

TEST_CASE("erasure keeps exactly the terms avoiding the variable") {
  CHECK(erase_seq(parse_base("z.0 ()"), "x") ==
        BaseSum::unit(parse_base("z.0 ()")));
  CHECK(erase_seq(parse_base("x.2 ()"), "x").is_zero());
  CHECK(erase_seq(parse_base("z.0 [\\y. x.0 ()] :: ()"), "x").is_zero());

  // Erasure ignores shifts, and composing with a lived-through shift-down is
  // harmless when component 0 is absent.
  TermGen gen(556, 2, {"x", "z"});
  for (int i = 0; i < 100; ++i) {
    ValuePtr q = gen.gen_value(3 + gen.pick(10));
    CHECK(erase_seq(shift_up(q, "x"), "x") == erase_seq(q, "x"));
    if (occurrences(q, FreeVar{"x", 0}) == 0) {
      ValueSum direct = erase_seq(q, "x");
      ValueSum shifted = erase_seq(shift_down(q, "x"), "x");
      CHECK(direct.is_zero() == shifted.is_zero());
      if (!direct.is_zero()) CHECK(shifted == direct);
    }
  }
}

TEST_CASE("binding a value variable in front of an abstraction") {
  FreeVar x{"x", 0};
  CHECK(term_equal(lambda_single(x, parse_value("\\y. x.0 ()")),
                   parse_value("\\y. y.0 ()")));
  CHECK(term_equal(lambda_single(x, parse_value("\\y. z.0 ()")),
                   parse_value("\\y. z.0 ()")));
  CHECK(term_equal(lambda_single(x, parse_value("\\y. x.0 [\\z. y.0 ()] :: ()")),
                   parse_value("\\y. y.0 [\\z. y.1 ()] :: ()")));
}

TEST_CASE("opening and closing a binder") {
  ValuePtr v = parse_value("\\x. x.0 [\\y. x.1 ()] :: ()");
  auto [name, body] = open_binder(v);
  CHECK(occurrences(body, FreeVar{name, 0}) == 1);
  CHECK(occurrences(body, FreeVar{name, 1}) == 1);
  CHECK(term_equal(close_binder(name, body), v));

  auto [other, body2] = open_binder(v, {"t"});
  CHECK(other != "t");
  CHECK(term_equal(close_binder(other, body2), v));
}

TEST_CASE("stream substitution on the structural cases") {
  ValuePtr m = parse_value("\\u. z.0 ()");

  Base zb = parse_base("z.0 ()");
  CHECK(subst_stream(zb, iota(), "x") == BaseSum::unit(zb));
  CHECK(subst_stream_direct(zb, iota(), "x") == BaseSum::unit(zb));

  Base xb = parse_base("x.0 ()");
  Stream s = mk_stream({mk_bag({m})});
  BaseSum expect = BaseSum::unit(parse_base("(\\u. z.0 ()) ()"));
  CHECK(subst_stream(xb, s, "x") == expect);
  CHECK(subst_stream_direct(xb, s, "x") == expect);

  CHECK(subst_stream(xb, iota(), "x").is_zero());
  CHECK(subst_stream_direct(xb, iota(), "x").is_zero());

  // The iterated form requires the stream to avoid the variable.
  Stream bad = mk_stream({mk_bag({parse_value("\\u. x.0 ()")})});
  CHECK_THROWS_AS(subst_stream(xb, bad, "x"), std::invalid_argument);
}

TEST_CASE("stream substitution agrees with its bag-by-bag factorization") {
  TermGen qgen(611, 2, {"x", "z"});
  TermGen sgen(612, 2, {"z"});
  int nonzero_seen = 0;
  for (int trial = 0; trial < 120; ++trial) {
    ValuePtr q = qgen.gen_value(3 + qgen.pick(8));
    uint64_t k0 = occurrences(q, FreeVar{"x", 0});
    uint64_t k1 = occurrences(q, FreeVar{"x", 1});
    uint64_t k2 = occurrences(q, FreeVar{"x", 2});
    if (k0 + k1 + k2 > 3) continue;

    std::vector<Bag> bags;
    for (uint64_t k : {k0, k1, k2}) {
      std::vector<ValuePtr> elems;
      for (uint64_t i = 0; i < k; ++i)
        elems.push_back(sgen.gen_value(3 + sgen.pick(4)));
      bags.push_back(mk_bag(std::move(elems)));
    }
    Stream s = mk_stream(std::move(bags));

    ValueSum iterated = subst_stream(q, s, "x");
    ValueSum direct = subst_stream_direct(q, s, "x");
    CHECK(iterated == direct);
    REQUIRE(!iterated.is_zero());
    ++nonzero_seen;

    uint64_t selems = 0;
    for (const auto& b : s.bags) selems += b.elems.size();
    for (const auto& [e, c] : iterated.entries()) {
      CHECK(seq_occurrences(e, "x") == 0);
      CHECK(term_size(e) == term_size(q) + term_size(s) - selems);
      for (const FreeVar& y : {FreeVar{"z", 0}, FreeVar{"z", 1}})
        CHECK(occurrences(e, y) == occurrences(q, y) + occurrences(s, y));
    }
  }
  CHECK(nonzero_seen > 20);
}

TEST_CASE("stream substitution is nonzero exactly on componentwise matches") {
  TermGen qgen(613, 2, {"x", "z"});
  TermGen sgen(614, 2, {"z"});
  for (int trial = 0; trial < 120; ++trial) {
    ValuePtr q = qgen.gen_value(3 + qgen.pick(7));
    size_t range = sgen.pick(3);
    std::vector<Bag> bags;
    for (size_t i = 0; i < range; ++i) {
      std::vector<ValuePtr> elems;
      size_t k = sgen.pick(3);
      for (size_t j = 0; j < k; ++j)
        elems.push_back(sgen.gen_value(3 + sgen.pick(4)));
      bags.push_back(mk_bag(std::move(elems)));
    }
    Stream s = mk_stream(std::move(bags));

    bool matches = true;
    for (uint64_t i = 0; i < 4; ++i) {
      uint64_t want = i < s.bags.size() ? s.bags[i].elems.size() : 0;
      if (occurrences(q, FreeVar{"x", i}) != want) matches = false;
    }
    CHECK(subst_stream(q, s, "x").is_zero() == !matches);
    CHECK(subst_stream_direct(q, s, "x").is_zero() == !matches);
  }
}

TEST_CASE("substituting the empty stream is erasure") {
  TermGen gen(615, 2, {"x", "z"});
  for (int i = 0; i < 100; ++i) {
    ValuePtr q = gen.gen_value(3 + gen.pick(10));
    CHECK(subst_stream(q, iota(), "x") == erase_seq(q, "x"));
    CHECK(subst_stream_direct(q, iota(), "x") == erase_seq(q, "x"));
  }
}
