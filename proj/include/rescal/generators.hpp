#ifndef RESCAL_GENERATORS_HPP
#define RESCAL_GENERATORS_HPP

// Seeded random expression generator for tests and the self-test command.
// Every draw goes through one mt19937_64 reduced by plain modulo, so a fixed
// seed yields the same corpus on every platform and run.

#include <algorithm>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rescal/term.hpp"

namespace rescal {

struct TermGen {
  std::mt19937_64 rng;
  uint64_t max_width;
  std::vector<std::string> pool;  // free sequence variables, may be empty

  explicit TermGen(uint64_t seed, uint64_t width = 2,
                   std::vector<std::string> names = {})
      : rng(seed), max_width(width), pool(std::move(names)) {}

  uint64_t pick(uint64_t n) { return n ? rng() % n : 0; }
  bool coin(uint32_t percent) { return pick(100) < percent; }

  // A value term of size at least 3 and at most max(3, cap), with every
  // stream range and component index bounded by max_width. With `normal`
  // set, no value ever lands in head position.
  ValuePtr gen_value(uint64_t cap, bool normal = false) {
    return value(std::max<uint64_t>(3, cap), 0, normal);
  }

  Bag gen_bag(uint64_t cap, bool normal = false) {
    uint64_t budget = cap;
    return bag_term(budget, 0, normal);
  }

  Stream gen_stream(uint64_t cap, bool normal = false) {
    return stream(cap, 0, normal);
  }

 private:
  ValuePtr value(uint64_t cap, uint32_t depth, bool normal) {
    return mk_value(base(cap - 1, depth + 1, normal));
  }

  Base base(uint64_t cap, uint32_t depth, bool normal) {
    uint64_t rest = cap - 1;
    Head h;
    if (!normal && rest >= 3 && coin(35)) {
      uint64_t hsize = 3 + pick(rest - 2);
      h = Head::value(value(hsize, depth, normal));
      rest -= term_size(h.val);
    } else if (!pool.empty() && (depth == 0 || coin(35))) {
      h = Head::free(pool[pick(pool.size())],
                     static_cast<uint32_t>(pick(max_width + 1)));
      rest -= 1;
    } else {
      h = Head::bound(static_cast<uint32_t>(pick(depth)),
                      static_cast<uint32_t>(pick(max_width + 1)));
      rest -= 1;
    }
    return mk_base(std::move(h), stream(rest, depth, normal));
  }

  Stream stream(uint64_t cap, uint32_t depth, bool normal) {
    std::vector<Bag> bags;
    while (bags.size() < max_width && coin(55)) {
      bags.push_back(bag_term(cap, depth, normal));
      if (cap < 3 && coin(70)) break;
    }
    return mk_stream(std::move(bags));
  }

  // Consumes from `cap` as it emits elements; repeats an element now and
  // then so bags with non-trivial isotropy show up in the corpus.
  Bag bag_term(uint64_t& cap, uint32_t depth, bool normal) {
    std::vector<ValuePtr> elems;
    while (cap >= 3 && coin(45)) {
      uint64_t esize = 3 + pick(std::min<uint64_t>(cap, 9) - 2);
      ValuePtr e = value(esize, depth, normal);
      cap -= term_size(e);
      elems.push_back(e);
      if (cap >= term_size(e) && coin(25)) {
        cap -= term_size(e);
        elems.push_back(e);
      }
    }
    return mk_bag(std::move(elems));
  }

};

}  // namespace rescal

#endif  // RESCAL_GENERATORS_HPP
