#pragma once

#include <optional>
#include <vector>

#include "cantor/clopen.hpp"
#include "cantor/order.hpp"
#include "cantor/sequence.hpp"

namespace cantor {

// One behaviour of a prefix-free machine: reading codeword prints output,
// halting at step halt_time (>= 1).
struct MachineEntry {
  Bits code;
  Bits out;
  int64_t halt_time = 1;
};

// Finite table of machine behaviours. Codewords are pairwise
// prefix-incomparable and distinct, and the total code weight is at most 1.
class MachineTable {
public:
  MachineTable() = default;
  explicit MachineTable(std::vector<MachineEntry> entries);

  const std::vector<MachineEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  int64_t max_halt_time() const;

  Dyadic omega() const;              // sum of 2^-|code|
  Dyadic omega_at(int64_t t) const;  // restricted to halt_time <= t

  // Least codeword length printing x by stage t (nullopt = never: infinity).
  std::optional<int64_t> complexity(const Bits& x, std::optional<int64_t> stage = {}) const;

private:
  std::vector<MachineEntry> entries_;
};

// Residuals omega - omega_at(g(i)) for i in [0, imax]; ok iff every residual
// is at most 2^-i. The first violation is recorded rather than thrown.
struct ControlWitness {
  int64_t imax = 0;
  std::vector<Dyadic> residuals;
  std::optional<int64_t> violated;  // first i with residual > 2^-i
  bool ok() const { return !violated.has_value(); }
};
ControlWitness verify_measure_computable(const MachineTable& m, const OrderFn& g, int64_t imax);

// {x : |x| <= maxlen, K(x) <= |x| - b}, with K evaluated at stage g(|x|) when
// a staging order is supplied and unbounded otherwise.
ClopenSet compression_set(const MachineTable& m, int64_t b, int64_t maxlen,
                          const std::optional<OrderFn>& staged_with = {});

// max over n in [0, horizon] of n - K(prefix of xi of length n); nullopt when
// no prefix is produced at all (margin minus infinity).
std::optional<int64_t> kolmogorov_margin(const MachineTable& m, const SequenceSource& xi,
                                         int64_t horizon);

// Least stage order derived from the table itself: g(i) = least t with
// omega - omega_at(t) < 2^-i (strictified). Always passes the control check
// with strict inequality, hence staged compression sets contain unstaged ones.
OrderFn strict_residual_order(const MachineTable& m, int64_t imax);

}  // namespace cantor
