#include "cantor/order.hpp"

#include <algorithm>
#include <mutex>

namespace cantor {

namespace {

constexpr int64_t kValueCap = int64_t{1} << 62;

int64_t checked(__int128 v, const char* what) {
  if (v < 0) fail(Err::malformed_input, std::string(what) + " produced a negative value");
  if (v >= kValueCap) fail(Err::overflow, std::string(what) + " exceeded the value cap");
  return static_cast<int64_t>(v);
}

struct RecState {
  std::mutex mu;
  std::vector<int64_t> vals;
  std::function<int64_t()> init;
  std::function<int64_t(int64_t, int64_t)> step;
};

}  // namespace

struct OrderFn::Impl {
  Kind kind = Kind::derived;
  std::string name;
  std::vector<std::pair<std::string, int64_t>> params;
  std::vector<int64_t> values;
  bool ext_affine = false;
  int64_t ext_slope = 0;
  OrderFlags flags;
  std::function<int64_t(int64_t)> eval;
};

OrderFn::OrderFn() { *this = affine(1, 0); }

int64_t OrderFn::operator()(int64_t n) const {
  if (n < 0) fail(Err::malformed_input, "order evaluated at a negative argument");
  int64_t v = p_->eval(n);
  if (v < 0) fail(Err::malformed_input, "order '" + p_->name + "' is negative at " + std::to_string(n));
  return v;
}

const OrderFlags& OrderFn::flags() const { return p_->flags; }
OrderFn::Kind OrderFn::kind() const { return p_->kind; }
const std::string& OrderFn::name() const { return p_->name; }
const std::vector<std::pair<std::string, int64_t>>& OrderFn::params() const { return p_->params; }
const std::vector<int64_t>& OrderFn::table_values() const { return p_->values; }
bool OrderFn::table_extension_affine() const { return p_->ext_affine; }
int64_t OrderFn::table_extension_slope() const { return p_->ext_slope; }

OrderFn OrderFn::with_horizon(int64_t horizon) const {
  if (horizon <= 0) fail(Err::malformed_input, "witness horizon must be positive");
  auto impl = std::make_shared<Impl>(*p_);
  impl->flags.witness_horizon = horizon;
  return OrderFn(std::move(impl));
}

OrderFn OrderFn::affine(int64_t a, int64_t b) {
  if (a < 0 || b < 0) fail(Err::malformed_input, "affine order needs a,b >= 0");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::closed_form;
  impl->name = "affine";
  impl->params = {{"a", a}, {"b", b}};
  impl->flags.nondecreasing = true;
  impl->flags.strictly_increasing = a >= 1;
  impl->eval = [a, b](int64_t n) { return checked(__int128{a} * n + b, "affine order"); };
  return OrderFn(std::move(impl));
}

OrderFn OrderFn::constant(int64_t c) {
  if (c < 0) fail(Err::malformed_input, "constant order needs c >= 0");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::closed_form;
  impl->name = "constant";
  impl->params = {{"c", c}};
  impl->flags.nondecreasing = true;
  impl->eval = [c](int64_t) { return c; };
  return OrderFn(std::move(impl));
}

OrderFn OrderFn::floor_div(int64_t k) {
  if (k <= 0) fail(Err::malformed_input, "floor_div order needs k >= 1");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::closed_form;
  impl->name = "floor_div";
  impl->params = {{"k", k}};
  impl->flags.nondecreasing = true;
  impl->eval = [k](int64_t n) { return n / k; };
  return OrderFn(std::move(impl));
}

OrderFn OrderFn::ceil_div(int64_t k) {
  if (k <= 0) fail(Err::malformed_input, "ceil_div order needs k >= 1");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::closed_form;
  impl->name = "ceil_div";
  impl->params = {{"k", k}};
  impl->flags.nondecreasing = true;
  impl->eval = [k](int64_t n) { return (n + k - 1) / k; };
  return OrderFn(std::move(impl));
}

OrderFn OrderFn::power(int64_t p) {
  if (p < 1) fail(Err::malformed_input, "power order needs p >= 1");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::closed_form;
  impl->name = "power";
  impl->params = {{"p", p}};
  impl->flags.nondecreasing = true;
  impl->flags.strictly_increasing = true;
  impl->eval = [p](int64_t n) {
    __int128 acc = 1;
    for (int64_t i = 0; i < p; ++i) {
      acc *= n;
      if (acc >= kValueCap) fail(Err::overflow, "power order exceeded the value cap");
    }
    return checked(acc, "power order");
  };
  return OrderFn(std::move(impl));
}

OrderFn OrderFn::table(std::vector<int64_t> values, bool extension_affine, int64_t slope) {
  if (values.empty()) fail(Err::malformed_input, "table order needs at least one value");
  for (int64_t v : values)
    if (v < 0) fail(Err::malformed_input, "table order has a negative value");
  if (slope < 0) fail(Err::malformed_input, "table extension slope must be >= 0");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::table;
  impl->name = "table";
  impl->values = values;
  impl->ext_affine = extension_affine;
  impl->ext_slope = extension_affine ? slope : 0;
  bool nondec = true, strict = true;
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[i - 1]) nondec = false;
    if (values[i] <= values[i - 1]) strict = false;
  }
  if (!extension_affine || slope == 0) strict = false;
  if (extension_affine && slope < 0) nondec = false;
  impl->flags.nondecreasing = nondec;
  impl->flags.strictly_increasing = nondec && strict;
  int64_t last_idx = static_cast<int64_t>(values.size()) - 1;
  int64_t last_val = values.back();
  int64_t eff_slope = impl->ext_slope;
  impl->eval = [values = std::move(values), last_idx, last_val, eff_slope](int64_t n) {
    if (n <= last_idx) return values[static_cast<size_t>(n)];
    return checked(__int128{last_val} + __int128{eff_slope} * (n - last_idx), "table order extension");
  };
  return OrderFn(std::move(impl));
}

OrderFn OrderFn::derived(std::string label, std::function<int64_t(int64_t)> fn, OrderFlags flags) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::derived;
  impl->name = std::move(label);
  impl->flags = flags;
  impl->eval = std::move(fn);
  return OrderFn(std::move(impl));
}

OrderFn OrderFn::recurrence(std::string label, std::function<int64_t()> init,
                            std::function<int64_t(int64_t, int64_t)> step, OrderFlags flags) {
  auto state = std::make_shared<RecState>();
  state->init = std::move(init);
  state->step = std::move(step);
  auto eval = [state](int64_t n) {
    std::lock_guard<std::mutex> lock(state->mu);
    if (state->vals.empty()) state->vals.push_back(state->init());
    while (static_cast<int64_t>(state->vals.size()) <= n)
      state->vals.push_back(state->step(state->vals.back(), static_cast<int64_t>(state->vals.size())));
    return state->vals[static_cast<size_t>(n)];
  };
  return derived(std::move(label), std::move(eval), flags);
}

int64_t inverse_at(const OrderFn& f, int64_t n) {
  if (n < 0) fail(Err::malformed_input, "inverse evaluated at a negative argument");
  if (f(0) >= n) return 0;
  const int64_t horizon = f.flags().witness_horizon;
  if (f.flags().nondecreasing) {
    int64_t lo = 0, hi = 1;
    while (hi < horizon && f(hi) < n) {
      lo = hi;
      hi = std::min(horizon, hi * 2);
    }
    if (f(hi) < n)
      fail(Err::horizon_exhausted, "no inverse witness for " + std::to_string(n) + " within horizon");
    while (lo + 1 < hi) {
      int64_t mid = lo + (hi - lo) / 2;
      (f(mid) >= n ? hi : lo) = mid;
    }
    return hi;
  }
  for (int64_t k = 1; k <= horizon; ++k)
    if (f(k) >= n) return k;
  fail(Err::horizon_exhausted, "no inverse witness for " + std::to_string(n) + " within horizon");
}

OrderFn inverse_order(const OrderFn& f) {
  OrderFlags fl;
  fl.nondecreasing = true;  // least witness index is monotone in the target
  fl.witness_horizon = f.flags().witness_horizon;
  return OrderFn::derived("inverse(" + f.name() + ")", [f](int64_t n) { return inverse_at(f, n); }, fl);
}

int64_t InverseScanner::at(int64_t n) {
  if (n < last_n_) fail(Err::precondition_violated, "inverse scanner queried out of order");
  last_n_ = n;
  if (n <= 0) return 0;
  const int64_t horizon = f_.flags().witness_horizon;
  while (f_(k_) < n) {
    if (++k_ > horizon)
      fail(Err::horizon_exhausted, "no inverse witness for " + std::to_string(n) + " within horizon");
  }
  return k_;
}

std::pair<int64_t, int64_t> double_inverse_pair(const OrderFn& f, int64_t i) {
  if (!f.flags().strictly_increasing)
    fail(Err::precondition_violated, "double-inverse identity needs a strictly increasing order");
  if (i < 1) fail(Err::malformed_input, "double-inverse identity holds for i >= 1");
  OrderFn inv = inverse_order(f);
  return {inverse_at(inv, i), f(i - 1) + 1};
}

OrderFn strictify(const OrderFn& f) {
  OrderFlags fl;
  fl.nondecreasing = true;
  fl.strictly_increasing = true;
  fl.witness_horizon = f.flags().witness_horizon;
  return OrderFn::recurrence(
      "strictify(" + f.name() + ")", [f]() { return f(0); },
      [f](int64_t prev, int64_t n) { return std::max(prev + 1, f(n)); }, fl);
}

TrueOrderLower true_order_lower(const OrderFn& f) {
  if (!f.flags().nondecreasing)
    fail(Err::precondition_violated, "true-order lower bound needs a nondecreasing order");
  const int64_t horizon = f.flags().witness_horizon;
  int64_t i0 = -1;
  for (int64_t i = 1; i <= horizon; ++i)
    if (f(i) > 0) {
      i0 = i;
      break;
    }
  if (i0 < 0) fail(Err::horizon_exhausted, "order never becomes positive within horizon");
  // fp(i) = f(i+1) - 1 truncated at zero; g majorizes its inverse strictly.
  OrderFlags fpfl;
  fpfl.nondecreasing = true;
  fpfl.witness_horizon = horizon;
  OrderFn fp = OrderFn::derived("shift_pred(" + f.name() + ")",
                                [f](int64_t i) { return std::max<int64_t>(f(i + 1) - 1, 0); }, fpfl);
  OrderFlags gfl;
  gfl.nondecreasing = true;
  gfl.strictly_increasing = true;
  gfl.witness_horizon = horizon;
  OrderFn g = OrderFn::recurrence(
      "true_order_lower(" + f.name() + ")", [fp]() { return inverse_at(fp, 0); },
      [fp](int64_t prev, int64_t n) { return std::max(inverse_at(fp, n), prev + 1); }, gfl);
  return {g, i0};
}

OrderFn minus_const_trunc(const OrderFn& f, int64_t c) {
  if (c < 0) fail(Err::malformed_input, "truncated subtraction needs c >= 0");
  OrderFlags fl;
  fl.nondecreasing = f.flags().nondecreasing;
  fl.witness_horizon = f.flags().witness_horizon;
  return OrderFn::derived(f.name() + "-" + std::to_string(c),
                          [f, c](int64_t n) { return std::max<int64_t>(f(n) - c, 0); }, fl);
}

OrderFn compose_affine_arg(const OrderFn& f, int64_t a, int64_t b, const std::string& label) {
  if (a < 0 || b < 0) fail(Err::malformed_input, "argument transform needs a,b >= 0");
  OrderFlags fl;
  fl.nondecreasing = f.flags().nondecreasing;
  fl.strictly_increasing = f.flags().strictly_increasing && a >= 1;
  fl.witness_horizon = f.flags().witness_horizon;
  std::string name = label.empty() ? f.name() + "@" + std::to_string(a) + "n+" + std::to_string(b) : label;
  return OrderFn::derived(
      name, [f, a, b](int64_t n) { return f(checked(__int128{a} * n + b, "argument transform")); }, fl);
}

bool reaches(const OrderFn& f, int64_t value) {
  const int64_t horizon = f.flags().witness_horizon;
  if (f.flags().nondecreasing) {
    if (f(horizon) >= value) return true;
    return false;
  }
  for (int64_t k = 0; k <= horizon; ++k)
    if (f(k) >= value) return true;
  return false;
}

std::vector<int64_t> sample_order(const OrderFn& f, int64_t count) {
  std::vector<int64_t> out;
  out.reserve(static_cast<size_t>(count));
  for (int64_t n = 0; n < count; ++n) out.push_back(f(n));
  return out;
}

}  // namespace cantor
