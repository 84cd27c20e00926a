#include "cantor/family.hpp"

#include <algorithm>
#include <mutex>
#include <tuple>

namespace cantor {

struct StagedTestFamily::Impl {
  OrderFn f;
  int64_t n_max = 0;
  int64_t t_max = 0;
  // Per index: additions (t, x), kept sorted by (t, llex).
  std::vector<std::vector<std::pair<int64_t, Bits>>> adds;
  mutable std::mutex mu;
  mutable std::vector<std::map<int64_t, std::vector<Bits>>> cache;  // clamped stage -> cumulative set
  std::vector<Bits> empty;
};

StagedTestFamily::StagedTestFamily(OrderFn f, int64_t n_max, int64_t t_max) {
  if (n_max < 0 || t_max < 0) fail(Err::malformed_input, "family bounds must be nonnegative");
  p_ = std::make_shared<Impl>();
  p_->f = std::move(f);
  p_->n_max = n_max;
  p_->t_max = t_max;
  p_->adds.resize(static_cast<size_t>(n_max) + 1);
  p_->cache.resize(static_cast<size_t>(n_max) + 1);
}

void StagedTestFamily::add(int64_t n, int64_t t, const Bits& x) {
  if (!p_) fail(Err::precondition_violated, "empty family");
  if (n < 0 || n > p_->n_max) fail(Err::malformed_input, "family index out of range");
  if (t < 0 || t > p_->t_max) fail(Err::malformed_input, "stage out of range");
  auto& list = p_->adds[static_cast<size_t>(n)];
  for (const auto& [t0, x0] : list)
    if (x0 == x)
      fail(Err::malformed_input, "string '" + x.str() + "' added twice at index " + std::to_string(n));
  list.emplace_back(t, x);
  std::sort(list.begin(), list.end());
  std::lock_guard<std::mutex> lock(p_->mu);
  p_->cache[static_cast<size_t>(n)].clear();
}

int64_t StagedTestFamily::n_max() const { return p_->n_max; }
int64_t StagedTestFamily::t_max() const { return p_->t_max; }
const OrderFn& StagedTestFamily::f() const { return p_->f; }

const std::vector<Bits>& StagedTestFamily::at_stage(int64_t n, int64_t t) const {
  if (n < 0 || n > p_->n_max) fail(Err::malformed_input, "family index out of range");
  if (t < 0) return p_->empty;
  int64_t ct = std::min(t, p_->t_max);
  std::lock_guard<std::mutex> lock(p_->mu);
  auto& per = p_->cache[static_cast<size_t>(n)];
  auto it = per.find(ct);
  if (it != per.end()) return it->second;
  std::vector<Bits> cum;
  for (const auto& [t0, x] : p_->adds[static_cast<size_t>(n)])
    if (t0 <= ct) cum.push_back(x);
  std::sort(cum.begin(), cum.end());
  return per.emplace(ct, std::move(cum)).first->second;
}

const std::vector<Bits>& StagedTestFamily::limit(int64_t n) const { return at_stage(n, p_->t_max); }

std::optional<int64_t> StagedTestFamily::stage_of(int64_t n, const Bits& x) const {
  if (n < 0 || n > p_->n_max) fail(Err::malformed_input, "family index out of range");
  for (const auto& [t, x0] : p_->adds[static_cast<size_t>(n)])
    if (x0 == x) return t;
  return std::nullopt;
}

std::vector<std::pair<int64_t, Bits>> StagedTestFamily::additions(int64_t n) const {
  if (n < 0 || n > p_->n_max) fail(Err::malformed_input, "family index out of range");
  return p_->adds[static_cast<size_t>(n)];
}

// --- verification --------------------------------------------------------------

FamilyReport verify_family(const StagedTestFamily& fam, bool strict) {
  FamilyReport rep;
  rep.strict = strict;
  auto flag = [&](std::string check, int64_t n, int64_t i, std::string detail) {
    rep.pass = false;
    rep.violations.push_back({std::move(check), n, i, std::move(detail)});
  };

  const OrderFn& f = fam.f();
  if (!f.flags().strictly_increasing)
    flag("order-flags", -1, -1, "control order is not declared strictly increasing");
  for (int64_t j = 0; j < 64; ++j)
    if (f(j + 1) <= f(j)) {
      flag("order-flags", -1, j, "control order is not strictly increasing at " + std::to_string(j));
      break;
    }

  for (int64_t n = 0; n <= fam.n_max(); ++n) {
    const std::vector<Bits>& lim = fam.limit(n);
    if (!is_prefix_free(lim)) flag("prefix-free", n, -1, "generators are not an antichain");
    for (const auto& [t, x] : fam.additions(n))
      if (static_cast<int64_t>(x.size()) > t)
        flag("stage-length", n, t, "string '" + x.str() + "' is longer than its stage");

    Dyadic mu_n = measure(make_clopen(lim));
    if (mu_n.geq_pow2(-n) && mu_n != Dyadic::pow2(-n))
      flag("def-ML-test", n, -1, "index measure exceeds its bound");
    if (strict && mu_n > Dyadic::pow2(-2 * n))
      flag("measure-2n", n, -1, "index measure exceeds the strict bound");

    // Control: residual after stage f(n+i) must be <= 2^-i; stop once the
    // staged set has saturated (f strictly increasing guarantees progress).
    for (int64_t i = 0;; ++i) {
      int64_t s = f(n + i);
      Dyadic res = mu_n - measure(make_clopen(fam.at_stage(n, s)));
      if (res > Dyadic::pow2(-i)) flag("def-ML-test", n, i, "control residual exceeds 2^-i");
      if (s >= fam.t_max()) break;
      if (i > fam.t_max() + 64) break;  // unreachable for strictly increasing f
    }
  }
  return rep;
}

StagedTestFamily reindex_strict(const StagedTestFamily& fam) {
  int64_t new_nmax = fam.n_max() / 2;
  StagedTestFamily out(compose_affine_arg(fam.f(), 2, 0, fam.f().name() + "(2j)"), new_nmax,
                       fam.t_max());
  for (int64_t j = 0; j <= new_nmax; ++j)
    for (const auto& [t, x] : fam.additions(2 * j)) out.add(j, t, x);
  return out;
}

// --- test -> martingale ----------------------------------------------------------

namespace {

struct BundleState {
  StagedTestFamily fam;
  OrderFn f, g;
  int64_t n_max = 0, t_max = 0, k_cut = 0;
  std::mutex mu;
  std::map<std::tuple<int64_t, int64_t, int64_t>, std::vector<Bits>> diffs;

  // X_{n, a} \ X_{n, b} with stages clamped to t_max; cached.
  const std::vector<Bits>& diff(int64_t n, int64_t a, int64_t b) {
    int64_t ca = std::min(a, t_max), cb = std::min(b, t_max);
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(n, ca, cb);
    auto it = diffs.find(key);
    if (it != diffs.end()) return it->second;
    std::vector<Bits> d;
    if (ca > cb) d = string_set_difference(fam.at_stage(n, ca), fam.at_stage(n, cb));
    return diffs.emplace(key, std::move(d)).first->second;
  }

  Dyadic cond_diff(int64_t n, int64_t a, int64_t b, const Bits& x) {
    return conditional_measure_antichain(diff(n, a, b), x);
  }
};

}  // namespace

ConversionBundle test_to_martingale(const StagedTestFamily& fam_in) {
  StagedTestFamily fam = fam_in;
  bool reindexed = false;
  FamilyReport rep = verify_family(fam, true);
  if (!rep.pass) {
    bool only_strictness = true;
    for (const auto& v : rep.violations)
      if (v.check != "measure-2n") only_strictness = false;
    if (!only_strictness)
      fail(Err::precondition_violated,
           "family fails verification (" + rep.violations.front().check + ")");
    fam = reindex_strict(fam);
    reindexed = true;
    FamilyReport rep2 = verify_family(fam, true);
    if (!rep2.pass)
      fail(Err::precondition_violated, "family still fails verification after reindexing");
  }

  auto st = std::make_shared<BundleState>();
  st->fam = fam;
  st->f = fam.f();
  st->g = compose_affine_arg(fam.f(), 5, 0, "g");
  st->n_max = fam.n_max();
  st->t_max = fam.t_max();
  st->k_cut = inverse_at(st->g, fam.t_max());

  // B = sum over n, k of 2^k times the conditional measure of X_n \ X_{n,g(k)}.
  std::vector<std::pair<Dyadic, Martingale>> terms;
  for (int64_t n = 0; n <= st->n_max; ++n)
    for (int64_t k = 0; k <= st->k_cut; ++k) {
      const std::vector<Bits>& d = st->diff(n, st->t_max, st->g(k));
      if (d.empty()) continue;
      ClopenSet c;
      c.generators = d;
      c.prefix_free = true;
      terms.emplace_back(Dyadic::pow2(k), conditional_martingale(c));
    }

  ConversionBundle bundle;
  bundle.B = lin_comb(std::move(terms));
  bundle.g = st->g;
  bundle.h = minus_const_trunc(inverse_order(st->g), 1);
  bundle.k_cut = st->k_cut;
  bundle.reindexed = reindexed;
  bundle.source = std::make_shared<const StagedTestFamily>(fam);

  // Staged approximant: replace each X_n by its stage-f(9r+9i+32) snapshot and
  // truncate both sums; the tail bounds keep the defect below 2^-i.
  bundle.F = [st](const Bits& x, int64_t i) {
    int64_t r = static_cast<int64_t>(x.size());
    int64_t kcap = std::min(st->k_cut, r + i + 4);
    int64_t a = st->f(9 * r + 9 * i + 32);
    Dyadic total = 0;
    for (int64_t k = 0; k <= kcap; ++k) {
      int64_t ncap = std::min(st->n_max, r + i + 2 * k + 3);
      Dyadic inner = 0;
      for (int64_t n = 0; n <= ncap; ++n) inner += st->cond_diff(n, a, st->g(k), x);
      total += inner.scaled_pow2(k);
    }
    return total;
  };
  bundle.B1 = [st](const Bits& x, int64_t i) {
    int64_t r = static_cast<int64_t>(x.size());
    Dyadic total = 0;
    for (int64_t k = 0; k <= st->k_cut; ++k) {
      int64_t ncap = std::min(st->n_max, r + i + 2 * k + 3);
      Dyadic inner = 0;
      for (int64_t n = 0; n <= ncap; ++n) inner += st->cond_diff(n, st->t_max, st->g(k), x);
      total += inner.scaled_pow2(k);
    }
    return total;
  };
  bundle.B2 = [st](const Bits& x, int64_t i) {
    int64_t r = static_cast<int64_t>(x.size());
    int64_t kcap = std::min(st->k_cut, r + i + 4);
    Dyadic total = 0;
    for (int64_t k = 0; k <= kcap; ++k) {
      int64_t ncap = std::min(st->n_max, r + i + 2 * k + 3);
      Dyadic inner = 0;
      for (int64_t n = 0; n <= ncap; ++n) inner += st->cond_diff(n, st->t_max, st->g(k), x);
      total += inner.scaled_pow2(k);
    }
    return total;
  };
  return bundle;
}

HitReport hitting_witness(const ConversionBundle& bundle, const SequenceSource& xi, int64_t horizon) {
  if (horizon < 0) fail(Err::malformed_input, "horizon must be nonnegative");
  const StagedTestFamily& fam = *bundle.source;
  HitReport rep;
  rep.g0 = bundle.g(0);

  // B along the path, once.
  std::vector<Dyadic> b_vals;
  b_vals.reserve(static_cast<size_t>(horizon) + 1);
  auto cur = bundle.B.cursor();
  for (int64_t i = 0;; ++i) {
    b_vals.push_back(cur->value());
    if (i == horizon) break;
    cur->push(xi.bit(i));
  }

  Bits prefix;
  std::vector<std::optional<int64_t>> entry(static_cast<size_t>(fam.n_max()) + 1);
  for (int64_t i = 0; i <= horizon; ++i) {
    if (i > 0) prefix.push_back(xi.bit(i - 1));
    for (int64_t n = 0; n <= fam.n_max(); ++n)
      if (!entry[static_cast<size_t>(n)] && string_set_contains(fam.limit(n), prefix))
        entry[static_cast<size_t>(n)] = i;
  }

  for (int64_t n = 0; n <= fam.n_max(); ++n) {
    if (!entry[static_cast<size_t>(n)]) continue;
    HitRow row;
    row.n = n;
    row.i_n = *entry[static_cast<size_t>(n)];
    row.h_i = bundle.h(row.i_n);
    row.b_value = b_vals[static_cast<size_t>(row.i_n)];
    row.asserted = n > rep.g0;
    row.pass = row.b_value.geq_pow2(row.h_i);
    if (row.asserted && !row.pass) rep.ok = false;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

// --- martingale -> test ------------------------------------------------------------

StagedTestFamily martingale_to_test(const Martingale& d, const OrderFn& g, int64_t n_max,
                                    int64_t depth, std::optional<OrderFn> cost) {
  if (!d) fail(Err::precondition_violated, "empty martingale");
  if (d.initial() > Dyadic(1))
    fail(Err::malformed_input, "martingale must start at or below 1 to bound level measures");
  if (!g.flags().nondecreasing)
    fail(Err::precondition_violated, "threshold order must be nondecreasing");
  OrderFn c = cost ? *cost : OrderFn::affine(1, 1);
  if (!c.flags().nondecreasing)
    fail(Err::precondition_violated, "cost order must be nondecreasing");
  for (int64_t j = 0; j <= 64; ++j)
    if (c(j) < j) fail(Err::precondition_violated, "cost order must dominate the identity");
  if (n_max < 0 || depth < 0) fail(Err::malformed_input, "bounds must be nonnegative");

  OrderFlags fl;
  fl.nondecreasing = true;
  fl.strictly_increasing = true;
  fl.witness_horizon = g.flags().witness_horizon;
  OrderFn gbar = OrderFn::derived(
      "stagecost(inverse(" + g.name() + "))",
      [g, c](int64_t r) { return c(inverse_at(g, r) + r); }, fl);

  StagedTestFamily out(gbar, n_max, depth);
  auto cur = d.cursor();
  Bits path;
  auto visit = [&](auto&& self, int64_t covered) -> void {
    int64_t len = static_cast<int64_t>(path.size());
    int64_t level = g(len);
    if (cur->value().geq_pow2(level)) {
      for (int64_t n = covered + 1; n <= std::min(level, n_max); ++n) out.add(n, len, path);
      covered = std::max(covered, level);
      if (covered >= n_max) return;  // nothing new can appear deeper
    }
    if (len >= depth) return;
    for (int b = 0; b < 2; ++b) {
      cur->push(b);
      path.push_back(b);
      self(self, covered);
      path.pop_back();
      cur->pop();
    }
  };
  visit(visit, -1);
  return out;
}

std::optional<int64_t> first_capture_depth(const Martingale& d, const OrderFn& g, int64_t n,
                                           const SequenceSource& xi, int64_t horizon) {
  auto cur = d.cursor();
  for (int64_t i = 0;; ++i) {
    int64_t level = g(i);
    if (level >= n && cur->value().geq_pow2(level)) return i;
    if (i == horizon) break;
    cur->push(xi.bit(i));
  }
  return std::nullopt;
}

}  // namespace cantor
