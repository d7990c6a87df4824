#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rescal/parse.hpp"
#include "rescal/print.hpp"
#include "rescal/separate.hpp"

using namespace rescal;

namespace {

LambdaPtr L(const std::string& text) { return parse_lambda(text); }

const Truncation kBound{12, 2};
constexpr std::size_t kFuel = 200;

// Applies the transform to both originals and checks the claimed outcome:
// the winning side reaches a head normal form, the other side runs out of
// fuel.
void require_sound(const LambdaPtr& m, const LambdaPtr& n,
                   const Separation& sep, std::size_t fuel = kFuel) {
  LambdaPtr ma = apply_transform(m, sep.transform);
  LambdaPtr na = apply_transform(n, sep.transform);
  bool first = sep.head_normal_side == SepSide::first;
  CHECK(head_normalizable(ma, fuel).normal == first);
  CHECK(head_normalizable(na, fuel).normal == !first);
}

}  // namespace

TEST_CASE("rho and proj build the advertised combinators") {
  CHECK(lam_alpha_equal(rho(0), L("\\y. y")));
  CHECK(lam_alpha_equal(rho(1), L("\\a. \\y. y a")));
  CHECK(lam_alpha_equal(rho(2), L("\\a. \\b. \\y. y a b")));

  CHECK(lam_alpha_equal(proj(1, 1), L("\\a. a")));
  CHECK(lam_alpha_equal(proj(2, 1), L("\\a. \\b. a")));
  CHECK(lam_alpha_equal(proj(2, 2), L("\\a. \\b. b")));

  // proj picks its slot under head reduction.
  LambdaPtr picked = lam_app(lam_app(lam_app(proj(3, 2), L("a")), L("b")),
                             L("c"));
  HeadProbe probe = head_normalizable(picked, 10);
  REQUIRE(probe.normal);
  CHECK(lam_alpha_equal(probe.term, L("b")));

  CHECK_THROWS_AS(proj(0, 1), std::out_of_range);
  CHECK_THROWS_AS(proj(3, 0), std::out_of_range);
  CHECK_THROWS_AS(proj(3, 4), std::out_of_range);
}

TEST_CASE("rho applied to its full argument list exposes them under one binder") {
  std::vector<LambdaPtr> pool = {
      L("\\x. x"), L("\\a. \\b. a"), L("\\a. \\b. b"), L("\\x. x x"),
      L("Omega"),  L("\\f. \\x. f (f x)")};
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t k = rng() % 5;  // from rho(0) up to rho(4)
    std::vector<LambdaPtr> args;
    LambdaPtr applied = rho(k);
    LambdaPtr spread = lam_var("y");
    for (std::size_t i = 0; i < k; ++i) {
      LambdaPtr m = pool[rng() % pool.size()];
      applied = lam_app(applied, m);
      spread = lam_app(spread, m);
    }
    HeadProbe probe = head_normalizable(applied, 4 * k + 4);
    REQUIRE(probe.normal);
    CHECK(lam_alpha_equal(probe.term, lam_abs("y", spread)));
  }
}

TEST_CASE("transforms apply left to right") {
  CHECK(lam_alpha_equal(
      apply_transform(L("x"), BohmTransform{{bohm_apply(L("y"))}}),
      L("x y")));
  CHECK(lam_alpha_equal(
      apply_transform(L("x"), BohmTransform{{bohm_subst("x", L("\\z. z"))}}),
      L("\\z. z")));

  // Sequencing matters: applying first duplicates the substituted term.
  BohmTransform apply_then_subst{
      {bohm_apply(L("x")), bohm_subst("x", L("\\z. z"))}};
  BohmTransform subst_then_apply{
      {bohm_subst("x", L("\\z. z")), bohm_apply(L("x"))}};
  CHECK(lam_alpha_equal(apply_transform(L("x"), apply_then_subst),
                        L("(\\z. z) (\\z. z)")));
  CHECK(lam_alpha_equal(apply_transform(L("x"), subst_then_apply),
                        L("(\\z. z) x")));

  // The two-step transform on the first projection head-normalizes to the
  // first applied term.
  LambdaPtr out = apply_transform(
      L("\\x. \\y. x"),
      BohmTransform{{bohm_apply(L("\\z. z")), bohm_apply(L("Omega"))}});
  HeadProbe probe = head_normalizable(out, 50);
  REQUIRE(probe.normal);
  CHECK(probe.steps == 2);
  CHECK(lam_alpha_equal(probe.term, L("\\z. z")));
}

TEST_CASE("head probes report steps or exhaustion") {
  HeadProbe id = head_normalizable(L("\\x. x"), 0);
  CHECK(id.normal);
  CHECK(id.steps == 0);

  HeadProbe omega = head_normalizable(L("Omega"), 100);
  CHECK_FALSE(omega.normal);
  CHECK(omega.steps == 100);

  HeadProbe beta = head_normalizable(L("(\\x. x) y"), 1);
  CHECK(beta.normal);
  CHECK(beta.steps == 1);
  CHECK(lam_alpha_equal(beta.term, L("y")));

  CHECK_FALSE(head_normalizable(L("(\\x. x) y"), 0).normal);

  // Exhaustion is relative to fuel, not a divergence verdict.
  LambdaPtr slow = L("(\\x. x) ((\\x. x) ((\\x. x) y))");
  CHECK_FALSE(head_normalizable(slow, 2).normal);
  CHECK(head_normalizable(slow, 3).normal);
}

TEST_CASE("separate settles the stock pairs") {
  SECTION("the two projections part at their binder slots") {
    auto sep = separate(L("\\x. \\y. x"), L("\\x. \\y. y"), kBound, kFuel);
    REQUIRE(sep);
    CHECK(sep->head_normal_side == SepSide::first);
    REQUIRE(sep->transform.steps.size() == 2);
    CHECK(sep->transform.steps[0].kind == BohmStep::Kind::Apply);
    CHECK(lam_alpha_equal(sep->transform.steps[0].term, L("\\z. z")));
    CHECK(sep->transform.steps[1].kind == BohmStep::Kind::Apply);
    CHECK(lam_alpha_equal(sep->transform.steps[1].term, L("Omega")));
    CHECK(to_text(sep->transform) == "@(\\z. z) @(Ω)");
    require_sound(L("\\x. \\y. x"), L("\\x. \\y. y"), *sep);
  }

  SECTION("distinct free heads fall to one substitution") {
    auto sep = separate(L("x"), L("y"), kBound, kFuel);
    REQUIRE(sep);
    CHECK(sep->head_normal_side == SepSide::first);
    REQUIRE(sep->transform.steps.size() == 1);
    CHECK(sep->transform.steps[0].kind == BohmStep::Kind::Subst);
    CHECK(sep->transform.steps[0].var == "y");
    CHECK(lam_alpha_equal(sep->transform.steps[0].term, omega_term()));
    CHECK(to_text(sep->transform) == "{y:=Ω}");
    require_sound(L("x"), L("y"), *sep);

    auto swapped = separate(L("y"), L("x"), kBound, kFuel);
    REQUIRE(swapped);
    CHECK(swapped->head_normal_side == SepSide::first);
    CHECK(to_text(swapped->transform) == "{x:=Ω}");
    require_sound(L("y"), L("x"), *swapped);
  }

  SECTION("identity against the second projection") {
    auto sep = separate(L("\\x. x"), L("\\x. \\y. y"), kBound, kFuel);
    REQUIRE(sep);
    CHECK(sep->head_normal_side == SepSide::first);
    require_sound(L("\\x. x"), L("\\x. \\y. y"), *sep);
  }

  SECTION("identical and bound-equal pairs return nothing") {
    std::string why;
    CHECK_FALSE(separate(L("\\x. x"), L("\\x. x"), kBound, kFuel, &why));
    CHECK(why == "indistinguishable at this bound");
    CHECK_FALSE(separate(L("Omega"), L("Omega"), kBound, kFuel));
    // Bound-stable pairs that differ only by an outer expansion step of the
    // argument list are indistinguishable as well.
    CHECK_FALSE(separate(L("\\x. x"), L("\\x. \\y. x y"), kBound, kFuel));
  }

  SECTION("an unsolvable loses to anything solvable without any moves") {
    auto sep = separate(L("Omega"), L("\\x. x"), kBound, kFuel);
    REQUIRE(sep);
    CHECK(sep->head_normal_side == SepSide::second);
    CHECK(sep->transform.steps.empty());
    require_sound(L("Omega"), L("\\x. x"), *sep);

    auto flipped = separate(L("\\x. x"), L("Omega"), kBound, kFuel);
    REQUIRE(flipped);
    CHECK(flipped->head_normal_side == SepSide::first);
    CHECK(flipped->transform.steps.empty());
  }
}

TEST_CASE("separate digs through matching heads") {
  SECTION("nested argument extraction") {
    LambdaPtr m = L("\\x. \\y. x (y a)");
    LambdaPtr n = L("\\x. \\y. x (y b)");
    auto sep = separate(m, n, kBound, kFuel);
    REQUIRE(sep);
    require_sound(m, n, *sep);
  }

  SECTION("same head with distinct arities") {
    LambdaPtr m = L("\\x. x a a");
    LambdaPtr n = L("\\x. x a");
    auto sep = separate(m, n, kBound, kFuel);
    REQUIRE(sep);
    require_sound(m, n, *sep);
  }

  SECTION("witness living on the second side flips the direction") {
    LambdaPtr m = L("\\x. x Omega");
    LambdaPtr n = L("\\x. x (\\z. z)");
    auto sep = separate(m, n, kBound, kFuel);
    REQUIRE(sep);
    CHECK(sep->head_normal_side == SepSide::second);
    require_sound(m, n, *sep);
  }

  SECTION("head variable recurring inside its own arguments") {
    LambdaPtr m = L("\\x. x (x a)");
    LambdaPtr n = L("\\x. x (x b)");
    auto sep = separate(m, n, kBound, kFuel);
    REQUIRE(sep);
    require_sound(m, n, *sep);
  }
}

TEST_CASE("every returned transform survives the probe on random pairs") {
  std::vector<LambdaPtr> pool = {
      L("\\x. x"),
      L("\\x. \\y. x"),
      L("\\x. \\y. y"),
      L("x"),
      L("y"),
      L("\\f. \\x. f x"),
      L("\\f. \\x. f (f x)"),
      L("\\x. x Omega"),
      L("\\x. x a a"),
      L("\\x. x a"),
      L("Omega"),
  };
  std::size_t found = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = 0; j < pool.size(); ++j) {
      auto sep = separate(pool[i], pool[j], kBound, kFuel);
      if (i == j) {
        CHECK_FALSE(sep);
        continue;
      }
      if (!sep) continue;
      ++found;
      require_sound(pool[i], pool[j], *sep);
    }
  }
  // Most distinct pairs in the pool are separable at this bound.
  CHECK(found >= 80);
}

TEST_CASE("transform text uses apply and substitute markers") {
  BohmTransform t{{bohm_apply(lam_var("u")),
                   bohm_apply(L("\\z. z")),
                   bohm_subst("x", omega_term()),
                   bohm_apply(omega_term()),
                   bohm_subst("y", L("u v"))}};
  CHECK(to_text(t) == "@u @(\\z. z) {x:=Ω} @(Ω) {y:=u v}");
  CHECK(to_text(BohmTransform{}) == "");
}
