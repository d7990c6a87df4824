#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rescal/generators.hpp"
#include "rescal/parse.hpp"
#include "rescal/print.hpp"
#include "rescal/reduce.hpp"
#include "rescal/sum.hpp"
#include "rescal/term.hpp"

using namespace rescal;

namespace {

// Occurrence profile over every free variable component appearing in either
// term, used to compare variable usage across a step.
std::set<std::pair<std::string, uint64_t>> components_of(const ValuePtr& v) {
  std::set<std::pair<std::string, uint64_t>> out;
  for (const auto& name : free_names(v))
    for (uint64_t i = 0; i <= term_width(v) + 1; ++i) out.insert({name, i});
  return out;
}

}  // namespace

TEST_CASE("redexes of an applied abstraction over the empty stream") {
  // (\x. z ()) () supports both rules at the root: reading the stream as
  // [] :: itself gives a step back to the source, and the empty-stream rule
  // erases the binder.
  Base b = parse_base("(\\x. z.0 ()) ()");
  auto rs = redexes(b, true);
  REQUIRE(rs.size() == 2);
  CHECK(rs[0].rule == Rule::Beta);
  CHECK(rs[1].rule == Rule::Iota);
  CHECK(rs[0].hops.empty());
  CHECK(rs[1].hops.empty());

  BaseSum beta = fire(b, rs[0]);
  CHECK(beta == BaseSum::unit(b));
  BaseSum iota_step = fire(b, rs[1]);
  CHECK(iota_step == BaseSum::unit(parse_base("z.0 ()")));

  // Without identity steps only the erasing rule remains.
  auto progressing = redexes(b, false);
  REQUIRE(progressing.size() == 1);
  CHECK(progressing[0].rule == Rule::Iota);
}

TEST_CASE("firing a bag step consumes the first bag") {
  // (\x. x.0 ()) [\y. z.0 ()] :: ()  reduces in one step to  (\y. z.0 ()) ().
  Base b = parse_base("(\\x. x.0 ()) [\\y. z.0 ()] :: ()");
  auto rs = redexes(b, false);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].rule == Rule::Beta);
  BaseSum got = fire(b, rs[0]);
  // The contracted body still wears its binder: (\x. (\y. z.0 ()) ()) ().
  CHECK(got == BaseSum::unit(parse_base("(\\x. (\\y. z.0 ()) ()) ()")));
}

TEST_CASE("an abstraction binding a used variable annihilates on iota") {
  Base b = parse_base("(\\x. x.0 ()) ()");
  auto rs = redexes(b, true);
  REQUIRE(rs.size() == 2);
  BaseSum beta = fire(b, rs[0]);
  CHECK(beta.is_zero());
  BaseSum erased = fire(b, rs[1]);
  CHECK(erased.is_zero());
}

TEST_CASE("normal forms have no redex") {
  CHECK(redexes(parse_value("\\y. z.0 ()"), true).empty());
  CHECK(redexes(parse_base("z.0 [\\y. w.0 ()] :: ()"), true).empty());
  CHECK(is_normal(parse_value("\\y. z.0 ()")));
}

TEST_CASE("big steps consume the whole argument stream") {
  Base b = parse_base("(\\x. x.0 ()) [\\y. z.0 ()] :: ()");
  auto rs = big_step_reducts(b);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].second == BaseSum::unit(parse_base("(\\y. z.0 ()) ()")));

  Base empty = parse_base("(\\x. x.0 ()) ()");
  auto rs2 = big_step_reducts(empty);
  REQUIRE(rs2.size() == 1);
  CHECK(rs2[0].second.is_zero());

  CHECK(big_step_reducts(parse_value("\\y. z.0 ()")).empty());
}

TEST_CASE("big steps strictly shrink every element") {
  TermGen gen(909, 2, {"a", "b"});
  int steps_seen = 0;
  for (int i = 0; i < 200; ++i) {
    ValuePtr u = gen.gen_value(3 + gen.pick(10));
    for (const auto& [r, out] : big_step_reducts(u)) {
      for (const auto& [e, c] : out.entries()) {
        CHECK(term_size(e) < term_size(u));
        ++steps_seen;
      }
    }
  }
  CHECK(steps_seen > 50);
}

TEST_CASE("small steps preserve free variable usage") {
  TermGen gen(910, 2, {"a", "b"});
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    ValuePtr u = gen.gen_value(3 + gen.pick(10));
    for (const auto& [r, out] : one_step_reducts(u, true)) {
      for (const auto& [e, c] : out.entries()) {
        auto comps = components_of(u);
        comps.merge(components_of(e));
        for (const auto& [name, idx] : comps)
          CHECK(occurrences(e, FreeVar{name, idx}) ==
                occurrences(u, FreeVar{name, idx}));
        ++checked;
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("normalization of the worked examples") {
  CHECK(normalize_base(parse_base("(\\x. x.0 ()) [\\y. z.0 ()] :: ()")) ==
        BaseSum::unit(parse_base("z.0 ()")));
  CHECK(normalize_base(parse_base("(\\x. x.0 ()) ()")).is_zero());
  ValuePtr nf = parse_value("\\y. z.0 ()");
  CHECK(normalize(nf) == ValueSum::unit(nf));

  // The substituted body is normalized in turn: the inner application of the
  // argument to the empty stream erases its unused binder.
  BaseSum inner = normalize_base(parse_base(
      "(\\x. z.0 [\\u. x.0 ()] :: ()) [\\y. w.0 ()] :: ()"));
  CHECK(inner == BaseSum::unit(parse_base("z.0 [\\u. w.0 ()] :: ()")));

  // Two occurrences fed two equal copies: both assignments collapse onto the
  // same term, so it carries coefficient 2.
  BaseSum twice = normalize_base(parse_base(
      "(\\x. z.0 [\\u. x.0 ()] :: [\\u. x.0 ()] :: ()) "
      "[\\y. w.0 (), \\y. w.0 ()] :: ()"));
  CHECK(twice == BaseSum::single(
                     parse_base("z.0 [\\u. w.0 ()] :: [\\u. w.0 ()] :: ()"), 2));
}

TEST_CASE("normalization results are normal and no larger") {
  TermGen gen(911, 2, {"a", "b"});
  for (int i = 0; i < 120; ++i) {
    ValuePtr u = gen.gen_value(3 + gen.pick(11));
    ValueSum nf = normalize(u);
    for (const auto& [e, c] : nf.entries()) {
      CHECK(is_normal(e));
      CHECK(term_size(e) <= term_size(u));
    }
  }
}

TEST_CASE("one-step reducts rejoin after one more parallel round") {
  TermGen gen(912, 2, {"a", "b"});
  int pairs = 0;
  for (int i = 0; i < 50; ++i) {
    ValuePtr u = gen.gen_value(3 + gen.pick(8));
    auto rs = redexes(u, true);
    for (size_t a = 0; a < rs.size(); ++a) {
      for (size_t b = a + 1; b < rs.size(); ++b) {
        ValueSum u1 = fire(u, rs[a]);
        ValueSum u2 = fire(u, rs[b]);
        if (u1 == u2) continue;
        ValueSum w = join(u, rs[a], rs[b]);
        CHECK(sum_steps_to(u1, w));
        CHECK(sum_steps_to(u2, w));
        ++pairs;
        if (pairs > 120) return;
      }
    }
  }
  CHECK(pairs > 20);
}

TEST_CASE("the strategy loop agrees with structural normalization") {
  TermGen gen(913, 2, {"a", "b"});
  for (int i = 0; i < 100; ++i) {
    ValuePtr u = gen.gen_value(3 + gen.pick(10));
    ValueSum structural = normalize(u);
    ValueSum leftmost = normalize_strategy(u, leftmost_chooser);
    RandomChooser coin(1000 + i);
    ValueSum randomized = normalize_strategy(
        u, [&coin](const ValuePtr& v, const std::vector<Redex>& rs) {
          return coin(v, rs);
        });
    CHECK(leftmost == structural);
    CHECK(randomized == structural);
  }
}

TEST_CASE("traces replay to the recorded result") {
  TermGen gen(914, 2, {"a", "b"});
  for (int i = 0; i < 40; ++i) {
    ValuePtr u = gen.gen_value(3 + gen.pick(10));
    ReductionTrace tr;
    ValueSum nf = normalize_strategy(u, leftmost_chooser, &tr);
    CHECK(tr.result == nf);
    CHECK(replay_trace(tr) == nf);
    CHECK(term_equal(tr.start, u));
  }
}

TEST_CASE("big steps are simulated by small steps") {
  TermGen gen(915, 2, {"a", "b"});
  int checked = 0;
  for (int i = 0; i < 60 && checked < 40; ++i) {
    ValuePtr u = gen.gen_value(3 + gen.pick(8));
    for (const auto& [r, out] : big_step_reducts(u)) {
      // Both sides of a big step normalize to the same sum.
      CHECK(normalize(u) == normalize(out));
      ++checked;
    }
  }
  CHECK(checked > 10);
}
