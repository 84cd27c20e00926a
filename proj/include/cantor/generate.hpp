#pragma once

#include <cstdint>
#include <vector>

#include "cantor/bits.hpp"
#include "cantor/clopen.hpp"
#include "cantor/diagonal.hpp"
#include "cantor/family.hpp"
#include "cantor/kraft.hpp"
#include "cantor/machine.hpp"
#include "cantor/martingale.hpp"

namespace cantor {

// Deterministic 64-bit stream (SplitMix64). Fixtures must reproduce bit for
// bit across platforms, so no standard-library distributions are involved.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  // Uniform over [0, n), n >= 1; rejection sampled, no modulo bias.
  std::int64_t below(std::int64_t n);
  // Uniform over [lo, hi] inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi);
  int bit();

private:
  std::uint64_t state_;
};

Bits random_bits(Rng& rng, std::int64_t len);

// Arbitrary generator list: overlaps, nesting and duplicates allowed.
std::vector<Bits> random_generators(Rng& rng, int count, int max_len);

// Pairwise prefix-incomparable strings, length-lex sorted. May return fewer
// than `count` when the space fills up.
std::vector<Bits> random_antichain(Rng& rng, int count, int max_len);

// Table martingale defined on every node up to `depth`: the root holds
// root_sixteenths/16 and each split sends k/8 of the parent left, k in [0,16].
Martingale random_fair_table(Rng& rng, int depth, int root_sixteenths);

// Conditional-measure martingale over a random antichain.
Martingale random_conditional(Rng& rng, int count, int max_len);

// Free-standing codeword requests with total weight kept at most 1.
std::vector<Request> random_requests(Rng& rng, int count, int max_len, int max_payload_len);

MachineTable random_machine(Rng& rng, int entries, int max_code_len, int max_out_len,
                            std::int64_t max_halt);

struct FamilyGenOptions {
  std::int64_t n_max = 3;
  int max_per_level = 3;
  std::int64_t slope_min = 1, slope_max = 2;  // control f(j) = slope*j + offset
  std::int64_t offset_min = 1, offset_max = 4;
  bool deep = false;           // add two strings near deep_len whose stages sit
  std::int64_t deep_len = 34;  // at the top of the allowed window
};

// Staged family passing the strict verifier by construction: level n holds
// strings of distinct lengths starting at 2n+2 (2n+3 with deep extras), and a
// string of length L enters at a stage inside [L, f(L)], which caps the
// residual past stage f(n+i) by 2^-(n+i). The result is still gated through
// verify_family before being returned.
StagedTestFamily random_strict_family(Rng& rng, const FamilyGenOptions& opt);

// One string of length exactly 2n per level n in [1, n_max]. For these
// families the stratum census and the coverage order agree at every radius,
// because no string is longer than twice its level.
StagedTestFamily random_tight_family(Rng& rng, std::int64_t n_max);

// Mixed battery: law-of-large-numbers bettors, conditional-measure bettors
// and shallow fair tables, with affine or quadratic success bases and default,
// delayed or immediate visibility schedules.
Battery random_battery(Rng& rng, int size);

}  // namespace cantor
