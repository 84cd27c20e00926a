#pragma once

#include <vector>

#include "cantor/bits.hpp"
#include "cantor/dyadic.hpp"

namespace cantor {

// Finite generator presentation of a clopen subset of Cantor space: the union
// of the cylinders [x] over the generators. The empty string generates the
// whole space. prefix_free marks presentations known to be antichains.
struct ClopenSet {
  std::vector<Bits> generators;
  bool prefix_free = false;
};

// Minimal prefix-free presentation of the same union: keep exactly the
// prefix-minimal strings, deduplicated, in length-lexicographic order.
std::vector<Bits> minimal_prefix_free(std::vector<Bits> xs);

ClopenSet make_clopen(std::vector<Bits> generators);
ClopenSet reduce(const ClopenSet& a);

bool is_prefix_free(const std::vector<Bits>& xs);  // pairwise prefix-incomparable

// mu of the union of cylinders; reduces first unless marked prefix_free.
Dyadic measure(const ClopenSet& a);

// mu([A] inside [x]) / mu([x]) = 2^{|x|} * mu([A] cap [x]).
Dyadic conditional_measure(const ClopenSet& a, const Bits& x);

// Same, for a generator list already known to be an antichain (no copy).
Dyadic conditional_measure_antichain(const std::vector<Bits>& gens, const Bits& x);

// Set difference of generator lists as plain string sets (inputs sorted or
// not); result in length-lexicographic order.
std::vector<Bits> string_set_difference(const std::vector<Bits>& a, const std::vector<Bits>& b);

bool string_set_contains(const std::vector<Bits>& sorted, const Bits& x);

}  // namespace cantor
