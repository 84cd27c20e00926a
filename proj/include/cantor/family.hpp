#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cantor/martingale.hpp"

namespace cantor {

// Resource-staged test: for each index n <= n_max a monotone chain of finite
// string sets X_{n,t} (t <= t_max), together with a control order f. Queries
// past t_max clamp to the limit set; negative stages give the empty set.
class StagedTestFamily {
public:
  StagedTestFamily() = default;
  StagedTestFamily(OrderFn f, int64_t n_max, int64_t t_max);

  void add(int64_t n, int64_t t, const Bits& x);  // x enters X_n at stage t

  int64_t n_max() const;
  int64_t t_max() const;
  const OrderFn& f() const;

  // Cumulative stage set, length-lex sorted. Reference stays valid while the
  // family lives; results are cached per distinct clamped stage.
  const std::vector<Bits>& at_stage(int64_t n, int64_t t) const;
  const std::vector<Bits>& limit(int64_t n) const;
  std::optional<int64_t> stage_of(int64_t n, const Bits& x) const;  // first t containing x
  std::vector<std::pair<int64_t, Bits>> additions(int64_t n) const; // (t, x), sorted

private:
  struct Impl;
  std::shared_ptr<Impl> p_;
};

struct FamilyViolation {
  std::string check;  // def-ML-test | measure-2n | prefix-free | monotone | stage-length | order-flags
  int64_t n = -1;
  int64_t i = -1;
  std::string detail;
};

struct FamilyReport {
  bool pass = true;
  bool strict = false;
  std::vector<FamilyViolation> violations;
};

// Checks, per index n: generators prefix-free, mu <= 2^-n (strict: <= 2^-2n),
// stage monotonicity with stage >= length, and the control inequality
// mu(X_n) - mu(X_{n, f(n+i)}) <= 2^-i for every i up to stage exhaustion;
// f must be strictly increasing.
FamilyReport verify_family(const StagedTestFamily& fam, bool strict);

// Pass to the subsequence (X_{2n}) with control f'(j) = f(2j): turns a plain
// test into one with the strict measure bound.
StagedTestFamily reindex_strict(const StagedTestFamily& fam);

// --- test -> martingale -------------------------------------------------------

// Exact betting sum B(x) = sum_{n <= n_max} sum_{k <= k_cut} 2^k times the
// conditional measure of (X_n minus X_{n,g(k)}) given x, with g(i) = f(5i),
// plus the staged approximant F and its
// truncation ladder, and the success order h = Inv_g - 1 (truncated).
struct ConversionBundle {
  Martingale B;
  std::function<Dyadic(const Bits&, int64_t)> F;   // staged approximant
  std::function<Dyadic(const Bits&, int64_t)> B1;  // n-truncated partial sum
  std::function<Dyadic(const Bits&, int64_t)> B2;  // n- and k-truncated partial sum
  OrderFn g;
  OrderFn h;
  int64_t k_cut = 0;
  bool reindexed = false;
  std::shared_ptr<const StagedTestFamily> source;
};

// Requires the strict measure bound; families that only satisfy the plain
// bound are reindexed first (recorded in the bundle).
ConversionBundle test_to_martingale(const StagedTestFamily& fam);

struct HitRow {
  int64_t n = 0;
  int64_t i_n = 0;       // first entry depth of the path into X_n
  int64_t h_i = 0;       // success threshold exponent at i_n
  Dyadic b_value;
  bool asserted = false;  // the guarantee applies (n beyond g(0))
  bool pass = false;      // B(prefix) >= 2^h_i
};

struct HitReport {
  std::vector<HitRow> rows;
  int64_t g0 = 0;
  bool ok = true;  // every asserted row passes
};

// For each n whose limit set is entered by some prefix of xi within the
// horizon: record the first entry depth and check the success bound there.
HitReport hitting_witness(const ConversionBundle& bundle, const SequenceSource& xi, int64_t horizon);

// --- martingale -> test -------------------------------------------------------

// Y_n = minimal strings x (|x| <= depth) with d(x) >= 2^g(|x|) and
// 2^g(|x|) >= 2^n; stage of x is |x|. Requires d(eps) <= 1 and unbounded g.
// The emitted control order is gbar(r) = cost(Inv_g(r) + r).
StagedTestFamily martingale_to_test(const Martingale& d, const OrderFn& g, int64_t n_max,
                                    int64_t depth, std::optional<OrderFn> cost = {});

// First depth i <= horizon at which the prefix of xi becomes a minimal
// threshold witness for level n (the membership predicate of
// martingale_to_test evaluated along a single path).
std::optional<int64_t> first_capture_depth(const Martingale& d, const OrderFn& g, int64_t n,
                                           const SequenceSource& xi, int64_t horizon);

}  // namespace cantor
