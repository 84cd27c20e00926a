#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "cantor/clopen.hpp"
#include "cantor/order.hpp"
#include "cantor/sequence.hpp"

namespace cantor {

// Stack cursor tracking a martingale's value along a root path. push/pop move
// one level; peek looks at a child without committing. All values exact.
class MartCursor {
public:
  virtual ~MartCursor() = default;
  virtual const Dyadic& value() const = 0;
  virtual void push(int bit) = 0;
  virtual void pop() = 0;
  virtual Dyadic peek(int bit) = 0;
  virtual size_t depth() const = 0;
};

class MartingaleImpl {
public:
  virtual ~MartingaleImpl() = default;
  virtual std::unique_ptr<MartCursor> cursor() const = 0;
  virtual const char* tag() const = 0;
};

// Nonnegative dyadic martingale: d(x0) + d(x1) = 2 d(x) exactly.
class Martingale {
public:
  Martingale() = default;
  explicit Martingale(std::shared_ptr<const MartingaleImpl> p) : p_(std::move(p)) {}

  std::unique_ptr<MartCursor> cursor() const;
  Dyadic at(const Bits& x) const;
  Dyadic initial() const;  // value at the empty string
  const MartingaleImpl* impl() const { return p_.get(); }
  explicit operator bool() const { return static_cast<bool>(p_); }

private:
  std::shared_ptr<const MartingaleImpl> p_;
};

// --- builders ------------------------------------------------------------

// Values from an explicit table; children missing from the table inherit the
// parent value. Every listed node must satisfy fairness against its listed or
// inherited children; construction checks the listed entries.
Martingale table_martingale(std::map<Bits, Dyadic> values);

// Same table semantics but without the construction-time fairness screen;
// still requires a root value. Lets check_fairness exercise unfair inputs.
Martingale table_martingale_unchecked(std::map<Bits, Dyadic> values);

Martingale constant_martingale(const Dyadic& c);

// x -> conditional measure of a clopen set given x. Betting on membership.
Martingale conditional_martingale(const ClopenSet& a);

// Law-of-large-numbers bettor: F(eps) = 1, F(x1) = (1+q) F(x), F(x0) = (1-q) F(x),
// with dyadic q strictly between 0 and 1.
Martingale lln_martingale(const Dyadic& q);

// Sum of 2^-e d_e over the battery; every d_e must start at or below 1.
Martingale weighted_sum(const std::vector<Martingale>& battery);

// Nonnegative linear combination (used internally by conversions).
Martingale lin_comb(std::vector<std::pair<Dyadic, Martingale>> terms);

// --- checks ----------------------------------------------------------------

struct FairnessResult {
  bool ok = true;
  std::optional<Bits> witness;  // node violating fairness or nonnegativity
};
FairnessResult check_fairness(const Martingale& d, int64_t depth);

// Minimal strings x of length <= maxlen with d(x) >= 2^k. By the hitting-set
// bound, d(eps) <= 1 forces measure <= 2^-k.
ClopenSet threshold_hitting_set(const Martingale& d, int64_t k, int64_t maxlen);

struct SuccessReport {
  int64_t horizon = 0;
  std::vector<int64_t> hits;        // i in [0, horizon] with d(xi|i) >= 2^h(i)
  bool verdict_io = false;          // some hit
  std::optional<int64_t> ae_tail;   // least t with hits covering [t, horizon]
};
SuccessReport success_report(const Martingale& d, const OrderFn& h, const SequenceSource& xi,
                             int64_t horizon);

// --- savings transform (rational-valued) -----------------------------------

class SavCursor {
public:
  virtual ~SavCursor() = default;
  virtual const Rational& value() const = 0;
  virtual void push(int bit) = 0;
  virtual void pop() = 0;
  virtual Rational peek(int bit) = 0;
  virtual size_t depth() const = 0;
};

// Capital-preserving rebet of a base martingale along checkpoints f(n0) <
// f(n0+1) < ...: below the first checkpoint it copies the base, beyond it
// banks half of the checkpoint capital and rebets the remainder.
class SavingsMartingale {
public:
  SavingsMartingale() = default;
  SavingsMartingale(Martingale base, OrderFn f, int64_t n0);

  std::unique_ptr<SavCursor> cursor() const;
  Rational at(const Bits& x) const;
  const Martingale& base() const;
  const OrderFn& f() const;
  int64_t n0() const;
  explicit operator bool() const { return static_cast<bool>(p_); }

private:
  struct Impl;
  std::shared_ptr<const Impl> p_;
};

SavingsMartingale savings_transform(const Martingale& d, const OrderFn& f, int64_t n0);

FairnessResult check_fairness(const SavingsMartingale& d, int64_t depth);

// --- rounding to dyadic ------------------------------------------------------

// Approximation scheme for a martingale V: approx(x, i) must be dyadic and
// within 2^-i of V(x). When V is itself exact, set exact to it.
struct Approximable {
  std::function<Dyadic(const Bits&, int64_t)> approx;
  std::optional<Martingale> exact;
};

Approximable approx_exact(const Martingale& v);
Approximable approx_truncated(const Martingale& v);       // floor of V(x) at i+2 bits
Approximable approx_savings(const SavingsMartingale& v);  // rounding of delta(x) at i+1 bits

// Exact dyadic martingale within [V, V+2]: d(eps) = F(eps,5) + 1/4 and
// d(x b) = d(x) -+ (F(x0,|x|+5) - F(x,|x|+5)). Fair by construction.
Martingale round_to_dyadic(const Approximable& v);
Martingale round_to_dyadic(const SavingsMartingale& v);
Martingale round_truncated(const Martingale& v);  // rounding of the truncation scheme

// Introspection used by serialization.
enum class RoundedBaseKind { exact, truncated, savings, opaque };
struct RoundedView {
  RoundedBaseKind base_kind;
  const Martingale* base_martingale;        // exact/truncated
  const SavingsMartingale* base_savings;    // savings
};
std::optional<RoundedView> rounded_view(const Martingale& d);

struct WeightedSumView {
  const std::vector<Martingale>* battery;
};
std::optional<WeightedSumView> weighted_sum_view(const Martingale& d);
const std::map<Bits, Dyadic>* table_view(const Martingale& d);
const ClopenSet* conditional_view(const Martingale& d);
const Dyadic* lln_view(const Martingale& d);

}  // namespace cantor
