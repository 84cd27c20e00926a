#pragma once

#include <optional>
#include <vector>

#include "cantor/family.hpp"
#include "cantor/machine.hpp"

namespace cantor {

// Codeword-length request: reserve a codeword of length len printing payload.
// Requests derived from a test carry their source index m (len = |x| - m + 1);
// free-standing requests leave m unset.
struct Request {
  std::optional<int64_t> m;
  Bits payload;
  int64_t len = 0;
};

Dyadic request_weight(const std::vector<Request>& reqs);  // sum of 2^-len

struct KCStep {
  Request req;
  Bits z;                      // residual consumed (longest of length <= len)
  Bits code;                   // assigned codeword z 0...0
  std::vector<Bits> residual;  // residual set after the step, llex sorted
  int64_t halt_time = 1;
};

struct KCResult {
  std::vector<KCStep> steps;
  MachineTable table;
  Dyadic gamma;  // total requested weight
};

// Run the residual-splitting construction over the requests in the given
// order; halt times are the 1-based step indices. Fails with weight-exceeded
// when the total weight passes 1 (before touching the residual set).
KCResult kc_assign(const std::vector<Request>& reqs);

// Independent replay: run the construction from scratch and report which
// payload the codeword was assigned to, if any.
std::optional<Bits> kc_replay(const std::vector<Request>& reqs, const Bits& code);

// --- requests scheduled from a staged test ------------------------------------

// (m, x) for x in X_m, sorted by the request well-ordering; validates the
// strict measure bound (else measure-bound-violated) and total weight.
std::vector<Request> family_requests(const StagedTestFamily& fam);

// Requests visible with budget r: m <= r, |x| <= 2r, stage(x) <= f(3r+1).
// Strata are initial segments of the request order.
std::vector<Request> stratum(const StagedTestFamily& fam, int64_t r);

// Full construction over family_requests with halt_time(m,x) = size of the
// first stratum containing (m,x).
KCResult build_machine_from_test(const StagedTestFamily& fam);

// r -> |stratum(r)|.
OrderFn stratum_size_order(const StagedTestFamily& fam);

// r -> max halt time over {(m,x) : m <= r, x in X_{m, f(3r+1)}} (no length
// filter); the emitted machine together with this order always passes the
// staged-measure check with bound 2^-r.
OrderFn coverage_order(const StagedTestFamily& fam, const KCResult& kc);

// Replay restricted to the budget visible from the codeword length: sweeps
// stratum(|code|) in request order. Pairs skipped by the sweep leave the
// residual state untouched, so this matches the full construction on every
// assigned codeword of that length.
std::optional<Bits> kc_replay_stratified(const StagedTestFamily& fam, const Bits& code);

// --- staged prefix-free hull -----------------------------------------------------

// Y receives x at stage |x| when [x] is newly covered: no prefix of x lies in
// X_{n,|x|-1} but some prefix lies in X_{n,|x|}. The staged inclusion
// [X_{n,s}] subset of [Y restricted to lengths <= s] is asserted; equality of
// the stage-s slices is only reported (it can genuinely fail).
struct PrefixFreeStages {
  std::vector<std::pair<int64_t, Bits>> added;  // (stage = length, string)
  bool antichain = true;
  bool limit_equal = true;              // [X_n] == [Y] at the horizon
  bool staged_inclusion_ok = true;      // for every s <= horizon
  std::vector<int64_t> slice_mismatch;  // s with [X_{n,s}] != [Y(s)]
  int64_t horizon = 0;
};
PrefixFreeStages prefix_free_stages(const StagedTestFamily& fam, int64_t n, int64_t horizon);

}  // namespace cantor
