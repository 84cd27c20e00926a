#include "cantor/clopen.hpp"

#include <algorithm>
#include <set>

namespace cantor {

std::vector<Bits> minimal_prefix_free(std::vector<Bits> xs) {
  std::sort(xs.begin(), xs.end());  // length-lex: prefixes come before extensions
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<Bits> kept;
  for (const Bits& x : xs) {
    bool covered = false;
    for (const Bits& y : kept)
      if (y.is_prefix_of(x)) {
        covered = true;
        break;
      }
    if (!covered) kept.push_back(x);
  }
  return kept;
}

ClopenSet make_clopen(std::vector<Bits> generators) {
  ClopenSet a;
  a.generators = std::move(generators);
  a.prefix_free = false;
  return a;
}

ClopenSet reduce(const ClopenSet& a) {
  ClopenSet r;
  r.generators = minimal_prefix_free(a.generators);
  r.prefix_free = true;
  return r;
}

bool is_prefix_free(const std::vector<Bits>& xs) {
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t j = 0; j < xs.size(); ++j)
      if (i != j && xs[i].is_prefix_of(xs[j])) return false;
  return true;
}

Dyadic measure(const ClopenSet& a) {
  const ClopenSet& r = a.prefix_free ? a : reduce(a);
  const std::vector<Bits>& gens = a.prefix_free ? a.generators : r.generators;
  Dyadic total = 0;
  for (const Bits& x : gens) total += Dyadic::pow2(-static_cast<int64_t>(x.size()));
  return total;
}

Dyadic conditional_measure(const ClopenSet& a, const Bits& x) {
  if (a.prefix_free) return conditional_measure_antichain(a.generators, x);
  return conditional_measure_antichain(reduce(a).generators, x);
}

Dyadic conditional_measure_antichain(const std::vector<Bits>& gens, const Bits& x) {
  Dyadic total = 0;
  for (const Bits& g : gens) {
    if (g.is_prefix_of(x)) return Dyadic(1);  // [x] inside [g]; antichain forbids others
    if (x.is_prefix_of(g)) total += Dyadic::pow2(-static_cast<int64_t>(g.size() - x.size()));
  }
  return total;
}

std::vector<Bits> string_set_difference(const std::vector<Bits>& a, const std::vector<Bits>& b) {
  std::set<Bits> drop(b.begin(), b.end());
  std::vector<Bits> out;
  for (const Bits& x : a)
    if (!drop.count(x)) out.push_back(x);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool string_set_contains(const std::vector<Bits>& sorted, const Bits& x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

}  // namespace cantor
