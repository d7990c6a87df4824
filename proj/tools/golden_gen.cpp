// Regenerates golden/nt_pairs.txt: reduction-related term pairs together
// with the truncation window, the enumeration bound at which both sides'
// windowed normalized expansions coincide, and the shared vector itself.
//
// For each pair the enumeration bound is grown until the windowed vectors
// match; the bound is then re-verified at one extra size and width step so
// a recorded entry never reflects a coincidental partial sum.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "rescal/games.hpp"
#include "rescal/parse.hpp"
#include "rescal/print.hpp"
#include "rescal/taylor.hpp"
#include "rescal/types.hpp"

using namespace rescal;

namespace {

ValueLin<Rat> windowed(const ValueLin<Rat>& v, Truncation w) {
  ValueLin<Rat> out;
  for (const auto& [t, c] : v.entries())
    if (term_size(t) <= w.max_size && term_width(t) <= w.max_width)
      out += ValueLin<Rat>::single(t, c);
  return out;
}

struct Pair {
  std::string name;
  std::string lhs;
  std::string rhs;
  Truncation window;
};

// The judgements carried by expansion elements inside the window.
std::vector<Typing> typings_from_expansion(const LambdaPtr& m, uint64_t bound,
                                           Truncation t) {
  ExpansionHandle h(m, TaylorFlavor::Head);
  std::vector<Typing> seen;
  for (const ValuePtr& e : taylor_enum(h, t)) {
    auto typing = infer(ResourceExpr{e});
    if (!typing || !typing_within_bound(*typing, bound)) continue;
    seen.push_back(*typing);
  }
  std::sort(seen.begin(), seen.end(), [](const Typing& a, const Typing& b) {
    return typing_compare(a, b) < 0;
  });
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  return seen;
}

// Finds an enumeration bound at which the judgements of the expansion
// elements stabilize onto the enumerated judgement set, writing one record
// per term. Exits nonzero when a term never stabilizes.
int write_typings_bounds(const std::string& dir) {
  struct Entry {
    std::string name;
    std::string term;
    uint64_t bound;
  };
  std::vector<Entry> entries = {
      {"identity", "\\x. x", 3},
      {"discard", "\\x. \\y. x", 3},
      {"selfapp", "\\x. x x", 3},
  };

  std::ofstream out(dir + "/typings_bounds.txt");
  if (!out.good()) {
    std::cerr << "cannot write to " << dir << "/typings_bounds.txt\n";
    return 1;
  }
  out << "# per term: judgement window bound and the expansion enumeration\n";
  out << "# bound at which the windowed judgement sets of the expansion\n";
  out << "# elements equal the enumerated judgements of the term itself\n";

  for (const auto& e : entries) {
    LambdaPtr m = parse_lambda(e.term);
    std::vector<Typing> expected = typings_of_lambda(m, e.bound);
    if (expected.empty()) {
      std::cerr << e.name << ": no judgements within bound\n";
      return 1;
    }
    bool found = false;
    for (uint64_t se = 3 * e.bound; !found && se <= 3 * e.bound + 12; ++se) {
      uint64_t we = e.bound;
      if (typings_from_expansion(m, e.bound, {se, we}) != expected) continue;
      if (typings_from_expansion(m, e.bound, {se + 2, we + 1}) != expected)
        continue;
      out << "name=" << e.name << "\tterm=" << e.term << "\tbound=" << e.bound
          << "\tenum_size=" << se << "\tenum_width=" << we
          << "\tcount=" << expected.size() << "\n";
      std::cout << e.name << ": " << expected.size()
                << " judgements, stable at enum(" << se << "," << we << ")\n";
      found = true;
    }
    if (!found) {
      std::cerr << e.name << ": expansion judgements never stabilized\n";
      return 1;
    }
  }
  return 0;
}

// Regenerates golden/term_game.txt: the canonical event list of the causal
// encoding of a fixed closed value exercising nested calls, repeated bag
// elements, and an empty stream slot.
int write_game_lines(const std::string& dir) {
  std::ofstream out(dir + "/term_game.txt");
  if (!out.good()) {
    std::cerr << "cannot write to " << dir << "/term_game.txt\n";
    return 1;
  }
  ValuePtr m = parse_value(
      "\\x. x.2 [\\y. x.3 (), \\y. x.2 ()] :: [] :: [\\y. y.0 ()] :: ()");
  Isogmentation q = encode(ResourceExpr{m}, {});
  out << serialize_augmentation(q);
  std::cout << "term_game: " << isog_size(q) << " events\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "golden";
  std::vector<Pair> pairs = {
      {"beta-id-id", "(\\x. x)(\\y. y)", "\\y. y", {3, 0}},
      {"beta-k-free", "(\\x. \\y. x) a b", "a", {8, 1}},
      {"eta-id", "\\x. x", "\\x. \\y. x y", {8, 2}},
  };

  std::ofstream out(dir + "/nt_pairs.txt");
  if (!out.good()) {
    std::cerr << "cannot write to " << dir << "/nt_pairs.txt\n";
    return 1;
  }
  out << "# pairs of terms whose windowed normalized expansions coincide\n";
  out << "# header line: tab-separated key=value fields; next line: vector\n";

  for (const auto& p : pairs) {
    ExpansionHandle lhs(parse_lambda(p.lhs), TaylorFlavor::Head);
    ExpansionHandle rhs(parse_lambda(p.rhs), TaylorFlavor::Head);
    bool found = false;
    for (uint64_t se = p.window.max_size; !found && se <= p.window.max_size + 24;
         ++se) {
      for (uint64_t we = p.window.max_width; we <= p.window.max_width + 3;
           ++we) {
        Truncation at{se, we};
        ValueLin<Rat> l = windowed(nt_truncated<Rat>(lhs, at), p.window);
        ValueLin<Rat> r = windowed(nt_truncated<Rat>(rhs, at), p.window);
        if (l != r || l.is_zero()) continue;
        ValueLin<Rat> l2 = windowed(
            nt_truncated<Rat>(lhs, {se + 1, we + 1}), p.window);
        ValueLin<Rat> r2 = windowed(
            nt_truncated<Rat>(rhs, {se + 1, we + 1}), p.window);
        if (l2 != l || r2 != r) continue;
        out << "name=" << p.name << "\tlhs=" << p.lhs << "\trhs=" << p.rhs
            << "\twindow_size=" << p.window.max_size
            << "\twindow_width=" << p.window.max_width << "\tenum_size=" << se
            << "\tenum_width=" << we << "\tsemiring=rat\n";
        out << to_text(l) << "\n";
        std::cout << p.name << ": stable at enum(" << se << "," << we
                  << "), " << l.entries().size() << " terms\n";
        found = true;
        break;
      }
    }
    if (!found) {
      std::cerr << p.name << ": no stable bound found\n";
      return 1;
    }
  }
  if (int rc = write_typings_bounds(dir)) return rc;
  return write_game_lines(dir);
}
