#ifndef RESCAL_COMBINATORICS_HPP
#define RESCAL_COMBINATORICS_HPP

// Multiset (bag) combinatorics shared by substitution, promotion
// coefficients, and their tests: k-partitionings of an enumerated bag and
// the isotropy degree (stabilizer order) of a bag.

#include <algorithm>
#include <functional>
#include <vector>

#include "rescal/rational.hpp"

namespace rescal {

// Isotropy degree of a sorted enumeration: the number of permutations fixing
// the list, i.e. the product of factorials of the multiplicities of each
// distinct element. `eq` decides element equality; `elems` must be sorted so
// equal elements are adjacent.
template <class T, class Eq>
Nat isotropy_degree_sorted(const std::vector<T>& elems, Eq eq) {
  Nat d = 1;
  size_t i = 0;
  while (i < elems.size()) {
    size_t j = i + 1;
    while (j < elems.size() && eq(elems[i], elems[j])) ++j;
    d *= factorial(static_cast<unsigned>(j - i));
    i = j;
  }
  return d;
}

// Enumerates all k-partitionings of an n-element enumeration: every function
// from {0..n-1} to {0..k-1}. The callback receives, per block, the list of
// element indices assigned to it (in increasing order). Yields exactly k^n
// assignments; when the bag has repeated elements, identical block tuples
// appear with the multiplicity the stabilizer argument predicts.
inline void for_each_partitioning(
    size_t n, size_t k,
    const std::function<void(const std::vector<std::vector<size_t>>&)>& visit) {
  std::vector<std::vector<size_t>> blocks(k);
  if (k == 0) {
    if (n == 0) visit(blocks);
    return;
  }
  std::vector<size_t> assign(n, 0);
  for (;;) {
    for (auto& b : blocks) b.clear();
    for (size_t i = 0; i < n; ++i) blocks[assign[i]].push_back(i);
    visit(blocks);
    size_t pos = 0;
    while (pos < n) {
      if (++assign[pos] < k) break;
      assign[pos] = 0;
      ++pos;
    }
    if (pos == n) break;
  }
}

// Enumerates all k-element multisets over {0..n-1} as non-decreasing index
// tuples. Used to walk the bags of a given length over a finite support.
inline void for_each_multiset(
    size_t n, size_t k,
    const std::function<void(const std::vector<size_t>&)>& visit) {
  std::vector<size_t> pick(k, 0);
  if (k == 0) {
    visit(pick);
    return;
  }
  if (n == 0) return;
  for (;;) {
    visit(pick);
    size_t pos = k;
    while (pos > 0 && pick[pos - 1] == n - 1) --pos;
    if (pos == 0) break;
    size_t next = pick[pos - 1] + 1;
    for (size_t i = pos - 1; i < k; ++i) pick[i] = next;
  }
}

}  // namespace rescal

#endif  // RESCAL_COMBINATORICS_HPP
