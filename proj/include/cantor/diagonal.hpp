#pragma once

#include <optional>
#include <vector>

#include "cantor/martingale.hpp"

namespace cantor {

// Opponent slot: a martingale d_e starting at or below 1, a success order
// presented through its strictly increasing base (h_e = inverse of the base),
// and a visibility delay tau_e (nondecreasing): index m becomes usable at
// level s once tau_e(m) <= s+1 and m <= s.
struct BatteryEntry {
  Martingale d;
  OrderFn h_base;
  OrderFn tau;
};

class Battery {
public:
  Battery() = default;
  explicit Battery(std::vector<BatteryEntry> entries);
  const std::vector<BatteryEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }

private:
  std::vector<BatteryEntry> entries_;
};

OrderFn default_tau(int64_t e);  // m -> m + e

// Path construction: phi = weighted sum of the battery, delta = phi + 1/4
// (phi is exact, so rounding adds the head room and nothing else). At each
// level: if every opponent indexed e <= min(T, size-1) shows a usable m with
// h_e(m) > e + T + 3, take bit 0 and double F; otherwise follow the cheaper
// child under delta (ties to 0) and keep F, T.
struct DiagonalTrace {
  int64_t horizon = 0;
  int64_t battery_size = 0;  // quantifier cap used by the case split
  Bits bits;
  std::vector<int64_t> T;     // horizon+1 values
  std::vector<bool> case1;    // one flag per decided level (horizon values)
  std::vector<Dyadic> delta;  // delta along the path
  std::vector<Dyadic> F;      // doubling martingale along the path
};

DiagonalTrace build_path(const Battery& battery, int64_t horizon);

struct EntryClaims {
  int64_t e = 0;
  std::optional<int64_t> claim5_tail;   // least t with d_e below its bar on [t, horizon]
  bool claim5_tail_exists = false;
  std::optional<int64_t> claim4_from;   // first level after the triggering case-1
  bool claim4_ok = true;                // e + T(s) + 2 < h_e(s) from claim4_from on
  bool chain_ok = true;                 // d_e <= 2^e phi <= 2^e delta along the path
};

struct TraceReport {
  bool rebuilt_match = true;            // deterministic replay reproduces the trace
  bool claim3_ok = true;                // delta < 2^{T+2} at every prefix
  std::optional<int64_t> claim3_fail;
  bool f_shape_ok = true;               // F = 2^T, doubling exactly at case-1 levels
  int64_t case1_count = 0;
  std::vector<EntryClaims> entries;
  bool ok = true;
};

TraceReport verify_path(const Battery& battery, const DiagonalTrace& trace);

}  // namespace cantor
