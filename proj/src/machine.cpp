#include "cantor/machine.hpp"

#include <algorithm>

namespace cantor {

MachineTable::MachineTable(std::vector<MachineEntry> entries) : entries_(std::move(entries)) {
  Dyadic weight = 0;
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].halt_time < 1) fail(Err::malformed_input, "machine halt time must be >= 1");
    weight += Dyadic::pow2(-static_cast<int64_t>(entries_[i].code.size()));
    for (size_t j = 0; j < entries_.size(); ++j)
      if (i != j && entries_[i].code.is_prefix_of(entries_[j].code))
        fail(Err::malformed_input,
             "machine codewords are not prefix-free: '" + entries_[i].code.str() + "' vs '" +
                 entries_[j].code.str() + "'");
  }
  if (weight > Dyadic(1)) fail(Err::malformed_input, "machine code weight exceeds 1");
}

int64_t MachineTable::max_halt_time() const {
  int64_t t = 0;
  for (const auto& e : entries_) t = std::max(t, e.halt_time);
  return t;
}

Dyadic MachineTable::omega() const {
  Dyadic w = 0;
  for (const auto& e : entries_) w += Dyadic::pow2(-static_cast<int64_t>(e.code.size()));
  return w;
}

Dyadic MachineTable::omega_at(int64_t t) const {
  Dyadic w = 0;
  for (const auto& e : entries_)
    if (e.halt_time <= t) w += Dyadic::pow2(-static_cast<int64_t>(e.code.size()));
  return w;
}

std::optional<int64_t> MachineTable::complexity(const Bits& x, std::optional<int64_t> stage) const {
  std::optional<int64_t> best;
  for (const auto& e : entries_) {
    if (e.out != x) continue;
    if (stage && e.halt_time > *stage) continue;
    int64_t len = static_cast<int64_t>(e.code.size());
    if (!best || len < *best) best = len;
  }
  return best;
}

ControlWitness verify_measure_computable(const MachineTable& m, const OrderFn& g, int64_t imax) {
  if (imax < 0) fail(Err::malformed_input, "control bound index must be nonnegative");
  ControlWitness w;
  w.imax = imax;
  Dyadic total = m.omega();
  for (int64_t i = 0; i <= imax; ++i) {
    Dyadic res = total - m.omega_at(g(i));
    if (!w.violated && res > Dyadic::pow2(-i)) w.violated = i;
    w.residuals.push_back(std::move(res));
  }
  return w;
}

ClopenSet compression_set(const MachineTable& m, int64_t b, int64_t maxlen,
                          const std::optional<OrderFn>& staged_with) {
  if (maxlen < 0) fail(Err::malformed_input, "maximum length must be nonnegative");
  if (staged_with && verify_measure_computable(m, *staged_with, maxlen).violated)
    fail(Err::precondition_violated,
         "staging order fails the measure control over the scanned lengths");
  ClopenSet out;
  for (int64_t len = 0; len <= maxlen; ++len) {
    std::optional<int64_t> stage;
    if (staged_with) stage = (*staged_with)(len);
    for (const Bits& x : all_strings(static_cast<size_t>(len))) {
      auto k = m.complexity(x, stage);
      if (k && *k <= len - b) out.generators.push_back(x);
    }
  }
  out.prefix_free = is_prefix_free(out.generators);
  return out;
}

std::optional<int64_t> kolmogorov_margin(const MachineTable& m, const SequenceSource& xi,
                                         int64_t horizon) {
  if (horizon < 0) fail(Err::malformed_input, "horizon must be nonnegative");
  std::optional<int64_t> margin;
  Bits prefix;
  for (int64_t n = 0; n <= horizon; ++n) {
    if (n > 0) prefix.push_back(xi.bit(n - 1));
    auto k = m.complexity(prefix);
    if (!k) continue;
    int64_t gain = n - *k;
    if (!margin || gain > *margin) margin = gain;
  }
  return margin;
}

OrderFn strict_residual_order(const MachineTable& m, int64_t imax) {
  if (imax < 0) fail(Err::malformed_input, "control bound index must be nonnegative");
  const Dyadic total = m.omega();
  const int64_t tmax = m.max_halt_time();
  std::vector<int64_t> vals;
  for (int64_t i = 0; i <= imax; ++i) {
    Dyadic bar = Dyadic::pow2(-i);
    int64_t t = 0;
    while (t <= tmax && total - m.omega_at(t) >= bar) ++t;
    // Past tmax the residual is 0 < 2^-i, so t is always found.
    vals.push_back(t);
  }
  return strictify(OrderFn::table(std::move(vals), true, 1));
}

}  // namespace cantor
