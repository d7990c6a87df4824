#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <string>
#include <vector>

#include "rescal/generators.hpp"
#include "rescal/parse.hpp"
#include "rescal/print.hpp"
#include "rescal/sum.hpp"
#include "rescal/term.hpp"

using namespace rescal;

namespace {

// Rebuilds a term with every free variable name mapped through `ren`.
// Names missing from the map are kept.
std::string ren_name(const std::map<std::string, std::string>& ren,
                     const std::string& n) {
  auto it = ren.find(n);
  return it == ren.end() ? n : it->second;
}

ValuePtr rename_free(const ValuePtr& v,
                     const std::map<std::string, std::string>& ren);

Head rename_free(const Head& h, const std::map<std::string, std::string>& ren) {
  switch (h.kind) {
    case Head::Kind::Bound:
      return h;
    case Head::Kind::Free:
      return Head::free(ren_name(ren, h.name), h.index);
    case Head::Kind::Value:
      return Head::value(rename_free(h.val, ren));
  }
  return h;
}

Base rename_free(const Base& b, const std::map<std::string, std::string>& ren) {
  std::vector<Bag> bags;
  for (const auto& bag : b.args.bags) {
    std::vector<ValuePtr> elems;
    for (const auto& e : bag.elems) elems.push_back(rename_free(e, ren));
    bags.push_back(mk_bag(std::move(elems)));
  }
  return mk_base(rename_free(b.head, ren), mk_stream(std::move(bags)));
}

ValuePtr rename_free(const ValuePtr& v,
                     const std::map<std::string, std::string>& ren) {
  return mk_value(rename_free(v->body, ren));
}

}  // namespace

TEST_CASE("sizes of the structural cases") {
  CHECK(term_size(Head::bound(0, 0)) == 1);
  CHECK(term_size(Head::free("x", 4)) == 1);
  CHECK(term_size(iota()) == 0);
  CHECK(term_size(parse_value("\\y. x.0 ()")) == 3);
  CHECK(term_size(parse_base("x.0 ()")) == 2);
  CHECK(term_size(parse_value("\\x. x.0 [\\y. x.1 ()] :: ()")) == 6);

  TermGen gen(11, 2, {"a", "b"});
  for (int i = 0; i < 100; ++i) {
    ValuePtr v = gen.gen_value(3 + gen.pick(10));
    CHECK(term_size(v) >= 3);
    CHECK(term_size(v) == 1 + term_size(v->body));
    CHECK(term_size(v->body) ==
          1 + term_size(v->body.head) + term_size(v->body.args));
  }
}

TEST_CASE("occurrence counting distinguishes components and binders") {
  CHECK(occurrences(parse_base("x.0 ()"), FreeVar{"x", 0}) == 1);
  CHECK(occurrences(parse_base("x.0 [\\y. x.0 ()] :: ()"), FreeVar{"x", 0}) ==
        2);
  CHECK(occurrences(parse_value("\\y. y.0 ()"), FreeVar{"y", 0}) == 0);
  CHECK(occurrences(parse_base("x.1 ()"), FreeVar{"x", 0}) == 0);
  CHECK(seq_occurrences(parse_base("x.0 [\\y. x.2 ()] :: ()"), "x") == 2);
}

TEST_CASE("isotropy degree of value bags") {
  ValuePtr m = parse_value("\\y. z.0 ()");
  ValuePtr n = parse_value("\\y. w.0 ()");
  CHECK(isotropy_degree(mk_bag({})) == 1);
  CHECK(isotropy_degree(mk_bag({m, m})) == 2);
  CHECK(isotropy_degree(mk_bag({m, m, n})) == 2);
  CHECK(isotropy_degree(mk_bag({m, m, m})) == 6);
  CHECK(isotropy_degree(mk_bag({m, n})) == 1);
}

TEST_CASE("multiplicity multiplies isotropy degrees over all bags") {
  CHECK(multiplicity(parse_base("x.0 ()")) == 1);
  CHECK(multiplicity(parse_value("\\y. x.0 ()")) == 1);
  CHECK(multiplicity(parse_value(
            "\\y. x.0 [\\z. y.0 (), \\z. y.0 ()] :: ()")) == 2);
  CHECK(multiplicity(parse_value(
            "\\y. x.0 [\\z. y.0 (), \\z. y.0 ()] :: "
            "[\\z. y.0 (), \\z. y.0 (), \\z. y.0 ()] :: ()")) == 12);
}

TEST_CASE("parse and print round trip") {
  for (const char* text : {
           "\\x. x.0 ()",
           "\\x. x.0 [\\y. x.1 ()] :: ()",
           "\\y. x.0 ()",
           "\\x. (\\y. y.0 ()) [] :: [\\y. x.0 (), \\y. x.0 ()] :: ()",
       }) {
    ValuePtr v = parse_value(text);
    CHECK(to_text(v) == text);
    CHECK(term_equal(parse_value(to_text(v)), v));
  }

  Base b = parse_base("x.0 [\\y. z.1 ()] :: ()");
  CHECK(to_text(b) == "x.0 [\\y. z.1 ()] :: ()");

  // An explicit trailing empty bag is the same stream as no bag at all.
  CHECK(term_equal(parse_value("\\x. x.0 [] :: ()"), parse_value("\\x. x.0 ()")));
  CHECK(to_text(parse_value("\\x. x.0 [] :: ()")) == "\\x. x.0 ()");

  TermGen gen(2024, 2, {"a", "b"});
  for (int i = 0; i < 200; ++i) {
    ValuePtr v = gen.gen_value(3 + gen.pick(12));
    CHECK(term_equal(parse_value(to_text(v)), v));
  }
}

TEST_CASE("binder names carry no identity") {
  CHECK(term_equal(parse_value("\\x. x.0 ()"), parse_value("\\w. w.0 ()")));
  CHECK(term_equal(parse_value("\\x. x.0 [\\y. x.1 ()] :: ()"),
                   parse_value("\\u. u.0 [\\v. u.1 ()] :: ()")));
  CHECK(!term_equal(parse_value("\\x. x.0 ()"), parse_value("\\x. x.1 ()")));
}

TEST_CASE("injective renaming of free variables preserves structure") {
  std::map<std::string, std::string> fwd{{"a", "p"}, {"b", "q"}};
  std::map<std::string, std::string> bwd{{"p", "a"}, {"q", "b"}};
  TermGen gen(5150, 2, {"a", "b"});
  for (int i = 0; i < 200; ++i) {
    ValuePtr v = gen.gen_value(3 + gen.pick(12));
    ValuePtr r = rename_free(v, fwd);
    CHECK(term_equal(rename_free(r, bwd), v));
    CHECK(term_size(r) == term_size(v));
    CHECK(term_width(r) == term_width(v));
    for (uint32_t idx = 0; idx <= 2; ++idx) {
      CHECK(occurrences(r, FreeVar{"p", idx}) ==
            occurrences(v, FreeVar{"a", idx}));
      CHECK(occurrences(r, FreeVar{"q", idx}) ==
            occurrences(v, FreeVar{"b", idx}));
    }
    if (seq_occurrences(v, "a") > 0) CHECK(!term_equal(r, v));
  }
}

TEST_CASE("width bounds component indices and stream ranges") {
  CHECK(term_width(parse_value("\\x. x.0 ()")) == 0);
  CHECK(term_width(parse_value("\\x. x.2 ()")) == 2);
  CHECK(term_width(parse_value("\\x. x.0 [] :: [] :: [\\y. y.0 ()] :: ()")) ==
        3);

  TermGen gen(99, 2);
  for (int i = 0; i < 100; ++i)
    CHECK(term_width(gen.gen_value(3 + gen.pick(12))) <= 2);
}

TEST_CASE("bags are unordered and streams drop trailing empties") {
  ValuePtr m = parse_value("\\y. z.0 ()");
  ValuePtr n = parse_value("\\y. w.0 ()");
  CHECK(term_equal(mk_bag({m, n}), mk_bag({n, m})));
  CHECK(term_equal(mk_stream({mk_bag({m}), Bag{}, Bag{}}),
                   mk_stream({mk_bag({m})})));
  CHECK(term_equal(mk_cons(Bag{}, iota()), iota()));
}

TEST_CASE("sums print coefficients against a stable term order") {
  ValueSum zero;
  CHECK(to_text(zero) == "0");

  ValuePtr v = parse_value("\\x. x.0 ()");
  CHECK(to_text(ValueSum::single(v, 2)) == "2 * \\x. x.0 ()");

  ValueSum two = ValueSum::unit(v) + ValueSum::unit(v);
  CHECK(to_text(two) == "2 * \\x. x.0 ()");

  ValueSum cancel = ValueSum::single(v, 1);
  cancel += ValueSum::single(v, 0);
  CHECK(cancel.support_size() == 1);
}

TEST_CASE("the classical λ front end parses and prints") {
  LambdaPtr id = parse_lambda("\\x. x");
  CHECK(to_text(id) == "\\x. x");
  CHECK(lam_alpha_equal(id, parse_lambda("\\y. y")));

  LambdaPtr omega = parse_lambda("Omega");
  LambdaPtr spelled = parse_lambda("(\\x. x x) (\\x. x x)");
  CHECK(lam_alpha_equal(omega, spelled));

  LambdaPtr app = parse_lambda("\\f. \\x. f (f x)");
  CHECK(lam_alpha_equal(parse_lambda(to_text(app)), app));
}

TEST_CASE("malformed input reports a position") {
  CHECK_THROWS_AS(parse_value("\\x. x.0"), ParseError);
  CHECK_THROWS_AS(parse_value("\\x. x.0 [) :: ()"), ParseError);
  CHECK_THROWS_AS(parse_base("x ()"), ParseError);
  CHECK_THROWS_AS(parse_lambda("(\\x. x"), ParseError);
}
