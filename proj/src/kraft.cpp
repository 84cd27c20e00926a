#include "cantor/kraft.hpp"

#include <algorithm>
#include <map>

namespace cantor {

Dyadic request_weight(const std::vector<Request>& reqs) {
  Dyadic w = 0;
  for (const Request& r : reqs) w += Dyadic::pow2(-r.len);
  return w;
}

namespace {

// One residual-splitting step against the residual set (pairwise distinct
// lengths). Returns the consumed residual z and the assigned codeword.
std::pair<Bits, Bits> split_residual(std::vector<Bits>& residual, int64_t len) {
  int best = -1;
  for (size_t i = 0; i < residual.size(); ++i) {
    int64_t sz = static_cast<int64_t>(residual[i].size());
    if (sz <= len && (best < 0 || sz > static_cast<int64_t>(residual[static_cast<size_t>(best)].size())))
      best = static_cast<int>(i);
  }
  if (best < 0)
    fail(Err::infeasible_step, "no residual of length <= " + std::to_string(len) +
                                   " (cannot happen while the weight stays at most 1)");
  Bits z = residual[static_cast<size_t>(best)];
  residual.erase(residual.begin() + best);
  Bits code = z;
  for (int64_t i = 0; i + static_cast<int64_t>(z.size()) < len; ++i) {
    // Peeling the codeword off [z] leaves the cylinders z 0^i 1.
    Bits leftover = code;
    leftover.push_back(1);
    residual.push_back(leftover);
    code.push_back(0);
  }
  std::sort(residual.begin(), residual.end());
  return {z, code};
}

void validate_request(const Request& r) {
  if (r.len < 0) fail(Err::malformed_input, "request length must be nonnegative");
  if (r.len > 10000) fail(Err::malformed_input, "request length is unreasonably large");
}

KCResult run_construction(const std::vector<Request>& reqs, const std::vector<int64_t>* halts) {
  for (const Request& r : reqs) validate_request(r);
  Dyadic gamma = request_weight(reqs);
  if (gamma > Dyadic(1))
    fail(Err::weight_exceeded, "total request weight " + gamma.str() + " exceeds 1");

  KCResult out;
  out.gamma = gamma;
  std::vector<Bits> residual{Bits()};
  std::vector<MachineEntry> entries;
  for (size_t j = 0; j < reqs.size(); ++j) {
    auto [z, code] = split_residual(residual, reqs[j].len);
    KCStep step;
    step.req = reqs[j];
    step.z = z;
    step.code = code;
    step.residual = residual;
    step.halt_time = halts ? (*halts)[j] : static_cast<int64_t>(j) + 1;
    entries.push_back({code, reqs[j].payload, step.halt_time});
    out.steps.push_back(std::move(step));
  }
  out.table = MachineTable(std::move(entries));
  return out;
}

}  // namespace

KCResult kc_assign(const std::vector<Request>& reqs) { return run_construction(reqs, nullptr); }

std::optional<Bits> kc_replay(const std::vector<Request>& reqs, const Bits& code) {
  for (const Request& r : reqs) validate_request(r);
  if (request_weight(reqs) > Dyadic(1))
    fail(Err::weight_exceeded, "total request weight exceeds 1");
  std::vector<Bits> residual{Bits()};
  for (const Request& r : reqs) {
    auto [z, w] = split_residual(residual, r.len);
    (void)z;
    if (w == code) return r.payload;
  }
  return std::nullopt;
}

// --- family-scheduled requests ------------------------------------------------

namespace {

Request make_family_request(int64_t m, const Bits& x) {
  Request r;
  r.m = m;
  r.payload = x;
  r.len = static_cast<int64_t>(x.size()) - m + 1;
  return r;
}

}  // namespace

std::vector<Request> family_requests(const StagedTestFamily& fam) {
  std::vector<Indexed> pairs;
  for (int64_t m = 0; m <= fam.n_max(); ++m) {
    Dyadic mu_m = measure(make_clopen(fam.limit(m)));
    if (mu_m > Dyadic::pow2(-2 * m))
      fail(Err::measure_bound_violated,
           "index " + std::to_string(m) + " breaks the strict measure bound");
    for (const Bits& x : fam.limit(m)) pairs.push_back({m, x});
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<Request> reqs;
  for (const Indexed& p : pairs) {
    Request r = make_family_request(p.m, p.x);
    // The strict bound forces |x| >= 2m, hence len >= m+1 >= 1 and |x| <= 2 len.
    if (static_cast<int64_t>(p.x.size()) < 2 * p.m)
      fail(Err::measure_bound_violated, "string shorter than twice its index survived the bound");
    reqs.push_back(std::move(r));
  }
  if (request_weight(reqs) > Dyadic(1))
    fail(Err::weight_exceeded, "family requests weigh more than 1");
  return reqs;
}

std::vector<Request> stratum(const StagedTestFamily& fam, int64_t r) {
  if (r < 0) fail(Err::malformed_input, "budget must be nonnegative");
  std::vector<Indexed> pairs;
  for (int64_t m = 0; m <= std::min(r, fam.n_max()); ++m)
    for (const Bits& x : fam.at_stage(m, fam.f()(3 * r + 1)))
      if (static_cast<int64_t>(x.size()) <= 2 * r) pairs.push_back({m, x});
  std::sort(pairs.begin(), pairs.end());
  std::vector<Request> reqs;
  for (const Indexed& p : pairs) reqs.push_back(make_family_request(p.m, p.x));
  return reqs;
}

namespace {

// Least budget whose stratum contains (m, x); bounded by the request length.
int64_t first_stratum(const StagedTestFamily& fam, int64_t m, const Bits& x, int64_t len) {
  for (int64_t r = 0; r <= len; ++r) {
    if (m > r || static_cast<int64_t>(x.size()) > 2 * r) continue;
    auto st = fam.stage_of(m, x);
    if (st && *st <= fam.f()(3 * r + 1)) return r;
  }
  fail(Err::precondition_violated, "request never enters a stratum within its own budget");
}

}  // namespace

KCResult build_machine_from_test(const StagedTestFamily& fam) {
  std::vector<Request> reqs = family_requests(fam);
  // halt(m,x) = |stratum(r*)| with r* the first budget seeing the request.
  std::vector<int64_t> first(reqs.size());
  for (size_t j = 0; j < reqs.size(); ++j)
    first[j] = first_stratum(fam, *reqs[j].m, reqs[j].payload, reqs[j].len);
  std::vector<int64_t> halts(reqs.size());
  for (size_t j = 0; j < reqs.size(); ++j) {
    int64_t count = 0;
    for (size_t j2 = 0; j2 < reqs.size(); ++j2)
      if (first[j2] <= first[j]) ++count;
    halts[j] = count;
  }
  return run_construction(reqs, &halts);
}

OrderFn stratum_size_order(const StagedTestFamily& fam) {
  OrderFlags fl;
  fl.nondecreasing = true;
  return OrderFn::derived(
      "stratum_size", [fam](int64_t r) { return static_cast<int64_t>(stratum(fam, r).size()); }, fl);
}

OrderFn coverage_order(const StagedTestFamily& fam, const KCResult& kc) {
  auto halt_of = std::make_shared<std::map<std::pair<int64_t, std::string>, int64_t>>();
  for (const KCStep& s : kc.steps)
    if (s.req.m) (*halt_of)[{*s.req.m, s.req.payload.str()}] = s.halt_time;
  OrderFlags fl;
  fl.nondecreasing = true;
  return OrderFn::derived(
      "coverage",
      [fam, halt_of](int64_t r) {
        int64_t t = 0;
        for (int64_t m = 0; m <= std::min(r, fam.n_max()); ++m)
          for (const Bits& x : fam.at_stage(m, fam.f()(3 * r + 1))) {
            auto it = halt_of->find({m, x.str()});
            if (it == halt_of->end())
              fail(Err::precondition_violated, "assignment is missing a scheduled request");
            t = std::max(t, it->second);
          }
        return t;
      },
      fl);
}

std::optional<Bits> kc_replay_stratified(const StagedTestFamily& fam, const Bits& code) {
  std::vector<Request> visible = stratum(fam, static_cast<int64_t>(code.size()));
  std::vector<Bits> residual{Bits()};
  for (const Request& r : visible) {
    auto [z, w] = split_residual(residual, r.len);
    (void)z;
    if (w == code) return r.payload;
  }
  return std::nullopt;
}

// --- staged prefix-free hull -------------------------------------------------------

PrefixFreeStages prefix_free_stages(const StagedTestFamily& fam, int64_t n, int64_t horizon) {
  if (horizon < 0) fail(Err::malformed_input, "horizon must be nonnegative");
  if (horizon > 20) fail(Err::malformed_input, "hull enumeration is capped at length 20");
  PrefixFreeStages out;
  out.horizon = horizon;

  auto covered_at = [&](const Bits& x, int64_t t) {
    const std::vector<Bits>& xs = fam.at_stage(n, t);
    for (const Bits& g : xs)
      if (g.is_prefix_of(x)) return true;
    return false;
  };

  for (int64_t len = 0; len <= horizon; ++len)
    for (const Bits& x : all_strings(static_cast<size_t>(len)))
      if (covered_at(x, len) && !covered_at(x, len - 1)) out.added.emplace_back(len, x);

  std::vector<Bits> y;
  for (const auto& [t, x] : out.added) y.push_back(x);
  out.antichain = is_prefix_free(y);

  // Union comparisons via measure: for clopen sets, equal measure of the
  // union with either side means the unions coincide.
  auto union_measure = [](std::vector<Bits> a, const std::vector<Bits>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return measure(make_clopen(std::move(a)));
  };

  for (int64_t s = 0; s <= horizon; ++s) {
    std::vector<Bits> xs = fam.at_stage(n, s);
    std::vector<Bits> ys;
    for (const auto& [t, x] : out.added)
      if (t <= s) ys.push_back(x);
    Dyadic mx = measure(make_clopen(xs));
    Dyadic my = measure(make_clopen(ys));
    Dyadic mu = union_measure(xs, ys);
    if (mu != my) out.staged_inclusion_ok = false;  // some [x] escapes the hull
    if (mx != my || mu != mx) out.slice_mismatch.push_back(s);
    if (s == horizon) out.limit_equal = (mx == my && mu == mx);
  }
  return out;
}

}  // namespace cantor
