#include "cantor/diagonal.hpp"

#include <algorithm>

namespace cantor {

Battery::Battery(std::vector<BatteryEntry> entries) : entries_(std::move(entries)) {
  for (size_t e = 0; e < entries_.size(); ++e) {
    const BatteryEntry& be = entries_[e];
    if (!be.d) fail(Err::precondition_violated, "battery entry " + std::to_string(e) + " is empty");
    if (be.d.initial() > Dyadic(1))
      fail(Err::malformed_input, "battery entry " + std::to_string(e) + " starts above 1");
    if (!be.h_base.flags().strictly_increasing)
      fail(Err::malformed_input,
           "battery entry " + std::to_string(e) + " needs a strictly increasing order base");
    if (!be.tau.flags().nondecreasing)
      fail(Err::malformed_input,
           "battery entry " + std::to_string(e) + " needs a nondecreasing visibility delay");
  }
}

OrderFn default_tau(int64_t e) { return OrderFn::affine(1, e); }

namespace {

// Incremental case-1 oracle for one opponent: tracks the largest usable bar
// max{h_e(m) : m <= s, tau_e(m) <= s+1} as the level grows.
struct Visibility {
  OrderFn tau;
  InverseScanner h;  // h_e(m) = least k with base(k) >= m
  int64_t next_m = 0;
  int64_t best = -1;  // -1: nothing visible yet

  Visibility(const OrderFn& tau_in, const OrderFn& base) : tau(tau_in), h(base) {}

  void advance(int64_t s) {
    while (next_m <= s && tau(next_m) <= s + 1) {
      best = std::max(best, h.at(next_m));
      ++next_m;
    }
  }
};

}  // namespace

DiagonalTrace build_path(const Battery& battery, int64_t horizon) {
  if (horizon < 0) fail(Err::malformed_input, "horizon must be nonnegative");
  const auto& entries = battery.entries();

  // delta = rounded weighted sum; with an exact approximant the rounding is
  // exactly phi + 1/4, which keeps the tie-breaking analysis exact.
  std::vector<Martingale> ds;
  for (const auto& be : entries) ds.push_back(be.d);
  Martingale delta = round_to_dyadic(approx_exact(weighted_sum(ds)));
  auto dc = delta.cursor();

  std::vector<Visibility> vis;
  vis.reserve(entries.size());
  for (const auto& be : entries) vis.emplace_back(be.tau, be.h_base);

  DiagonalTrace tr;
  tr.horizon = horizon;
  tr.battery_size = static_cast<int64_t>(entries.size());
  tr.T.push_back(0);
  tr.delta.push_back(dc->value());
  tr.F.push_back(Dyadic(1));

  for (int64_t s = 0; s < horizon; ++s) {
    for (auto& v : vis) v.advance(s);
    int64_t t = tr.T.back();
    int64_t cap = std::min<int64_t>(t, static_cast<int64_t>(entries.size()) - 1);
    bool case1 = true;
    for (int64_t e = 0; e <= cap; ++e)
      if (vis[static_cast<size_t>(e)].best <= e + t + 3) {
        case1 = false;
        break;
      }

    int bit;
    if (case1) {
      bit = 0;
      tr.T.push_back(t + 1);
      tr.F.push_back(tr.F.back() + tr.F.back());
    } else {
      Dyadic left = dc->peek(0);
      Dyadic right = dc->peek(1);
      bit = left <= right ? 0 : 1;
      tr.T.push_back(t);
      tr.F.push_back(tr.F.back());
    }
    tr.case1.push_back(case1);
    tr.bits.push_back(bit);
    dc->push(bit);
    tr.delta.push_back(dc->value());
  }
  return tr;
}

TraceReport verify_path(const Battery& battery, const DiagonalTrace& trace) {
  TraceReport rep;
  const auto& entries = battery.entries();

  // Deterministic replay.
  DiagonalTrace fresh = build_path(battery, trace.horizon);
  rep.rebuilt_match = fresh.bits == trace.bits && fresh.T == trace.T && fresh.case1 == trace.case1 &&
                      fresh.delta.size() == trace.delta.size() && fresh.F.size() == trace.F.size() &&
                      fresh.battery_size == trace.battery_size;
  if (rep.rebuilt_match) {
    for (size_t i = 0; i < fresh.delta.size(); ++i)
      if (fresh.delta[i] != trace.delta[i] || fresh.F[i] != trace.F[i]) {
        rep.rebuilt_match = false;
        break;
      }
  }

  for (size_t s = 0; s < trace.case1.size(); ++s)
    if (trace.case1[s]) ++rep.case1_count;

  // claim3: delta stays under 2^{T+2} everywhere.
  for (size_t s = 0; s < trace.delta.size(); ++s)
    if (trace.delta[s].geq_pow2(trace.T[s] + 2)) {
      rep.claim3_ok = false;
      rep.claim3_fail = static_cast<int64_t>(s);
      break;
    }

  // F = 2^T with doubling exactly at case-1 levels.
  for (size_t s = 0; s < trace.F.size(); ++s)
    if (trace.F[s] != Dyadic::pow2(trace.T[s])) rep.f_shape_ok = false;
  for (size_t s = 0; s < trace.case1.size(); ++s) {
    int64_t dt = trace.T[s + 1] - trace.T[s];
    if (trace.case1[s] ? dt != 1 : dt != 0) rep.f_shape_ok = false;
  }

  // Per-opponent walks along the path.
  Martingale phi = weighted_sum([&] {
    std::vector<Martingale> ds;
    for (const auto& be : entries) ds.push_back(be.d);
    return ds;
  }());
  auto phic = phi.cursor();
  std::vector<std::unique_ptr<MartCursor>> dcs;
  for (const auto& be : entries) dcs.push_back(be.d.cursor());
  std::vector<InverseScanner> hs;
  for (const auto& be : entries) hs.emplace_back(be.h_base);

  std::vector<EntryClaims> claims(entries.size());
  std::vector<std::vector<bool>> below(entries.size());
  std::vector<std::vector<int64_t>> hvals(entries.size());
  for (size_t e = 0; e < entries.size(); ++e) {
    claims[e].e = static_cast<int64_t>(e);
    below[e].resize(static_cast<size_t>(trace.horizon) + 1);
    hvals[e].resize(static_cast<size_t>(trace.horizon) + 1);
  }

  for (int64_t s = 0;; ++s) {
    for (size_t e = 0; e < entries.size(); ++e) {
      int64_t he = hs[e].at(s);
      hvals[e][static_cast<size_t>(s)] = he;
      const Dyadic& dv = dcs[e]->value();
      below[e][static_cast<size_t>(s)] = !dv.geq_pow2(he);
      // chain: d_e <= 2^e phi and phi <= delta (delta = phi + 1/4).
      if (dv > phic->value().scaled_pow2(static_cast<int64_t>(e))) claims[e].chain_ok = false;
      if (phic->value() > trace.delta[static_cast<size_t>(s)]) claims[e].chain_ok = false;
    }
    if (s == trace.horizon) break;
    int bit = trace.bits.bit(static_cast<size_t>(s));
    phic->push(bit);
    for (auto& c : dcs) c->push(bit);
  }

  for (size_t e = 0; e < entries.size(); ++e) {
    // claim5: the failure bar d_e < 2^{h_e(s)} holds on a tail.
    if (below[e][static_cast<size_t>(trace.horizon)]) {
      int64_t t = trace.horizon;
      while (t > 0 && below[e][static_cast<size_t>(t - 1)]) --t;
      claims[e].claim5_tail = t;
      claims[e].claim5_tail_exists = true;
    }
    // claim4: once T passes e and a case-1 level confirms it, the budget gap
    // e + T(s) + 2 < h_e(s) persists.
    std::optional<int64_t> s0;
    for (int64_t s = 0; s <= trace.horizon; ++s)
      if (trace.T[static_cast<size_t>(s)] > static_cast<int64_t>(e)) {
        s0 = s;
        break;
      }
    if (s0) {
      std::optional<int64_t> s1;
      for (int64_t s = *s0; s < static_cast<int64_t>(trace.case1.size()); ++s)
        if (trace.case1[static_cast<size_t>(s)]) {
          s1 = s;
          break;
        }
      if (s1) {
        claims[e].claim4_from = *s1 + 1;
        for (int64_t s = *s1 + 1; s <= trace.horizon; ++s)
          if (static_cast<int64_t>(e) + trace.T[static_cast<size_t>(s)] + 2 >=
              hvals[e][static_cast<size_t>(s)])
            claims[e].claim4_ok = false;
      }
    }
  }

  rep.entries = std::move(claims);
  rep.ok = rep.rebuilt_match && rep.claim3_ok && rep.f_shape_ok;
  for (const auto& c : rep.entries)
    rep.ok = rep.ok && c.chain_ok && c.claim4_ok && c.claim5_tail_exists;
  return rep;
}

}  // namespace cantor
