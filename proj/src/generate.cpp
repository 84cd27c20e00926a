#include "cantor/generate.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <utility>

#include "cantor/error.hpp"

namespace cantor {

std::uint64_t Rng::next() {
  state_ += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::int64_t Rng::below(std::int64_t n) {
  if (n <= 0) fail(Err::precondition_violated, "Rng::below needs a positive bound");
  const std::uint64_t un = static_cast<std::uint64_t>(n);
  const std::uint64_t threshold = (0 - un) % un;  // 2^64 mod n
  std::uint64_t v = next();
  while (v < threshold) v = next();
  return static_cast<std::int64_t>(v % un);
}

std::int64_t Rng::range(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) fail(Err::precondition_violated, "Rng::range needs lo <= hi");
  return lo + below(hi - lo + 1);
}

int Rng::bit() { return static_cast<int>(next() >> 63); }

Bits random_bits(Rng& rng, std::int64_t len) {
  Bits out;
  for (std::int64_t i = 0; i < len; ++i) out.push_back(rng.bit());
  return out;
}

std::vector<Bits> random_generators(Rng& rng, int count, int max_len) {
  std::vector<Bits> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(random_bits(rng, rng.range(1, max_len)));
  return out;
}

namespace {

bool comparable_with_any(const Bits& x, const std::vector<Bits>& chosen) {
  for (const Bits& g : chosen)
    if (g.is_prefix_of(x) || x.is_prefix_of(g)) return true;
  return false;
}

std::optional<Bits> pick_incomparable(Rng& rng, const std::vector<Bits>& chosen, std::int64_t len) {
  for (int tries = 0; tries < 200; ++tries) {
    Bits x = random_bits(rng, len);
    if (!comparable_with_any(x, chosen)) return x;
  }
  return std::nullopt;
}

}  // namespace

std::vector<Bits> random_antichain(Rng& rng, int count, int max_len) {
  std::vector<Bits> out;
  for (int i = 0; i < count; ++i) {
    auto x = pick_incomparable(rng, out, rng.range(1, max_len));
    if (x) out.push_back(*x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Martingale random_fair_table(Rng& rng, int depth, int root_sixteenths) {
  if (depth < 0 || depth > 16)
    fail(Err::precondition_violated, "table depth out of the supported range");
  if (root_sixteenths < 0 || root_sixteenths > 32)
    fail(Err::precondition_violated, "root mass out of range");
  std::map<Bits, Dyadic> table;
  struct Item {
    Bits node;
    Dyadic val;
    int level;
  };
  std::vector<Item> stack;
  stack.push_back({Bits{}, Dyadic::from_parts(root_sixteenths, 4), 0});
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    if (it.level < depth) {
      const std::int64_t k = rng.below(17);  // left share k/8 of the parent
      Dyadic left = it.val * Dyadic::from_parts(k, 3);
      Dyadic right = it.val * 2 - left;
      stack.push_back({it.node.child(0), left, it.level + 1});
      stack.push_back({it.node.child(1), std::move(right), it.level + 1});
    }
    table.emplace(std::move(it.node), std::move(it.val));
  }
  return table_martingale(std::move(table));
}

Martingale random_conditional(Rng& rng, int count, int max_len) {
  return conditional_martingale(make_clopen(random_antichain(rng, count, max_len)));
}

std::vector<Request> random_requests(Rng& rng, int count, int max_len, int max_payload_len) {
  std::vector<Request> out;
  Dyadic weight = 0;
  const Dyadic one = 1;
  for (int i = 0; i < count; ++i) {
    std::int64_t len = rng.range(1, max_len);
    while (len <= max_len + 24 && weight + Dyadic::pow2(-len) > one) ++len;
    if (weight + Dyadic::pow2(-len) > one) break;
    weight += Dyadic::pow2(-len);
    out.push_back({std::nullopt, random_bits(rng, rng.range(0, max_payload_len)), len});
  }
  return out;
}

MachineTable random_machine(Rng& rng, int entries, int max_code_len, int max_out_len,
                            std::int64_t max_halt) {
  std::vector<MachineEntry> rows;
  for (const Bits& code : random_antichain(rng, entries, max_code_len))
    rows.push_back({code, random_bits(rng, rng.range(0, max_out_len)), rng.range(1, max_halt)});
  return MachineTable(std::move(rows));
}

StagedTestFamily random_strict_family(Rng& rng, const FamilyGenOptions& opt) {
  OrderFn f = OrderFn::affine(rng.range(opt.slope_min, opt.slope_max),
                              rng.range(opt.offset_min, opt.offset_max));
  struct Pending {
    std::int64_t n, t;
    Bits x;
  };
  std::vector<Pending> all;
  std::int64_t t_needed = 1;
  for (std::int64_t n = 0; n <= opt.n_max; ++n) {
    std::vector<Bits> level;
    const int cnt = static_cast<int>(rng.range(1, opt.max_per_level));
    std::int64_t len = 2 * n + 2 + (opt.deep ? 1 : 0) + rng.range(0, 1);
    for (int j = 0; j < cnt; ++j) {
      auto x = pick_incomparable(rng, level, len);
      if (!x) break;
      level.push_back(*x);
      const std::int64_t t = rng.range(len, f(len));
      t_needed = std::max(t_needed, t);
      all.push_back({n, t, *x});
      len += 1 + rng.range(0, 1);
    }
    if (opt.deep && n <= 1) {
      for (int j = 0; j < 2; ++j) {
        const std::int64_t dl = opt.deep_len + j;
        auto x = pick_incomparable(rng, level, dl);
        if (!x) break;
        level.push_back(*x);
        const std::int64_t t = f(dl);  // latest admissible stage
        t_needed = std::max(t_needed, t);
        all.push_back({n, t, *x});
      }
    }
  }
  StagedTestFamily fam(f, opt.n_max, t_needed + rng.range(0, 2));
  for (const Pending& p : all) fam.add(p.n, p.t, p.x);
  if (!verify_family(fam, true).pass)
    fail(Err::precondition_violated, "generated family failed its own verification gate");
  return fam;
}

StagedTestFamily random_tight_family(Rng& rng, std::int64_t n_max) {
  OrderFn f = OrderFn::affine(1, rng.range(1, 3));
  struct Pending {
    std::int64_t n, t;
    Bits x;
  };
  std::vector<Pending> all;
  std::int64_t t_needed = 1;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const std::int64_t len = 2 * n;
    const std::int64_t t = rng.range(len, f(len));
    t_needed = std::max(t_needed, t);
    all.push_back({n, t, random_bits(rng, len)});
  }
  StagedTestFamily fam(f, n_max, t_needed);
  for (const Pending& p : all) fam.add(p.n, p.t, p.x);
  if (!verify_family(fam, true).pass)
    fail(Err::precondition_violated, "generated family failed its own verification gate");
  return fam;
}

Battery random_battery(Rng& rng, int size) {
  static const Dyadic kQs[] = {Dyadic::from_parts(1, 2), Dyadic::from_parts(3, 3),
                               Dyadic::from_parts(1, 1), Dyadic::from_parts(5, 3),
                               Dyadic::from_parts(3, 2)};
  std::vector<BatteryEntry> entries;
  for (int e = 0; e < size; ++e) {
    Martingale d;
    switch (rng.below(3)) {
      case 0:
        d = lln_martingale(kQs[rng.below(5)]);
        break;
      case 1:
        d = random_conditional(rng, 4, 6);
        break;
      default:
        d = random_fair_table(rng, static_cast<int>(rng.range(3, 6)),
                              static_cast<int>(rng.range(0, 16)));
        break;
    }
    OrderFn base;
    switch (rng.below(3)) {
      case 0:
        base = OrderFn::affine(rng.range(1, 3), rng.range(0, 2));
        break;
      case 1:
        base = OrderFn::power(2);
        break;
      default:
        base = OrderFn::affine(1, 0);
        break;
    }
    OrderFn tau;
    switch (rng.below(3)) {
      case 0:
        tau = default_tau(e);
        break;
      case 1:
        tau = OrderFn::affine(1, e + rng.range(0, 3));
        break;
      default:
        tau = OrderFn::constant(rng.range(0, 2));
        break;
    }
    entries.push_back({std::move(d), std::move(base), std::move(tau)});
  }
  return Battery(std::move(entries));
}

}  // namespace cantor
