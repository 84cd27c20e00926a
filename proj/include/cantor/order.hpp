#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cantor/error.hpp"

namespace cantor {

struct OrderFlags {
  bool nondecreasing = false;
  bool strictly_increasing = false;
  // Scans (inverses, unboundedness witnesses) refuse to walk past this point.
  int64_t witness_horizon = int64_t{1} << 20;
};

// Total function from naturals to naturals with declared shape flags.
// Closed forms and tables round-trip through serialization; derived orders
// (inverses, recurrences) carry a label and serialize as samples.
class OrderFn {
public:
  enum class Kind { closed_form, table, derived };

  OrderFn();  // identity

  int64_t operator()(int64_t n) const;
  const OrderFlags& flags() const;
  Kind kind() const;
  const std::string& name() const;  // closed-form name or derived label
  const std::vector<std::pair<std::string, int64_t>>& params() const;
  const std::vector<int64_t>& table_values() const;
  bool table_extension_affine() const;
  int64_t table_extension_slope() const;

  OrderFn with_horizon(int64_t horizon) const;

  static OrderFn affine(int64_t a, int64_t b);   // n -> a*n + b
  static OrderFn constant(int64_t c);
  static OrderFn floor_div(int64_t k);           // n -> floor(n/k)
  static OrderFn ceil_div(int64_t k);            // n -> ceil(n/k)
  static OrderFn power(int64_t p);               // n -> n^p, p >= 1
  static OrderFn table(std::vector<int64_t> values, bool extension_affine, int64_t slope);
  static OrderFn derived(std::string label, std::function<int64_t(int64_t)> fn, OrderFlags flags);
  // Recurrence g(0) = init(), g(n) = step(g(n-1), n); evaluated iteratively
  // with an internal monotone cache.
  static OrderFn recurrence(std::string label, std::function<int64_t()> init,
                            std::function<int64_t(int64_t, int64_t)> step, OrderFlags flags);

private:
  struct Impl;
  explicit OrderFn(std::shared_ptr<const Impl> p) : p_(std::move(p)) {}
  std::shared_ptr<const Impl> p_;
};

// Least k with f(k) >= n (0 when n <= f(0)); horizon-exhausted if no witness
// at or below the declared witness horizon.
int64_t inverse_at(const OrderFn& f, int64_t n);

OrderFn inverse_order(const OrderFn& f);

// Incremental inverse for nondecreasing query sequences: amortizes the scan.
class InverseScanner {
public:
  explicit InverseScanner(OrderFn f) : f_(std::move(f)) {}
  int64_t at(int64_t n);  // queries must be nondecreasing

private:
  OrderFn f_;
  int64_t k_ = 0;
  int64_t last_n_ = INT64_MIN;
};

// Both sides of the double-inverse identity Inv_{Inv_f}(i) == f(i-1) + 1 for
// strictly increasing f and i >= 1.
std::pair<int64_t, int64_t> double_inverse_pair(const OrderFn& f, int64_t i);

// Least strictly increasing majorant: g(0) = f(0), g(n+1) = max(g(n)+1, f(n+1)).
OrderFn strictify(const OrderFn& f);

// Strictly increasing g with Inv_g(i) <= f(i) for all i >= i0, where i0 is the
// least index >= 1 with f(i0) > 0. Requires f nondecreasing and unbounded.
struct TrueOrderLower {
  OrderFn g;
  int64_t i0;
};
TrueOrderLower true_order_lower(const OrderFn& f);

// n -> max(f(n) - c, 0)  (truncated subtraction).
OrderFn minus_const_trunc(const OrderFn& f, int64_t c);

// n -> f(a*n + b).
OrderFn compose_affine_arg(const OrderFn& f, int64_t a, int64_t b, const std::string& label = "");

// True when f reaches at least the given value within its witness horizon.
bool reaches(const OrderFn& f, int64_t value);

std::vector<int64_t> sample_order(const OrderFn& f, int64_t count);

}  // namespace cantor
