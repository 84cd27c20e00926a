#include <doctest.h>

#include <set>
#include <vector>

#include "cantor/generate.hpp"
#include "cantor/kraft.hpp"

#include "test_support.hpp"

using namespace cantor;
using testutil::throws_kind;

namespace {

Bits B(const std::string& s) { return Bits::parse(s); }

std::vector<Request> plain_requests(const std::vector<int64_t>& lens) {
  std::vector<Request> out;
  for (int64_t len : lens) out.push_back({std::nullopt, Bits{}, len});
  return out;
}

std::vector<Bits> codes_of(const KCResult& kc) {
  std::vector<Bits> out;
  for (const KCStep& s : kc.steps) out.push_back(s.code);
  return out;
}

// Example used throughout: one string at index 0, one at index 1.
StagedTestFamily example_family() {
  StagedTestFamily fam(OrderFn::affine(1, 3), 1, 4);
  fam.add(0, 1, B("0"));
  fam.add(1, 4, B("00"));
  return fam;
}

}  // namespace

TEST_CASE("codeword assignment on sorted lengths") {
  KCResult kc = kc_assign(plain_requests({1, 2, 3}));
  CHECK(codes_of(kc) == std::vector<Bits>{B("0"), B("10"), B("110")});
  CHECK(kc.gamma == Dyadic::parse("7/2^3"));
  CHECK(kc.table.omega() == kc.gamma);
}

TEST_CASE("codeword assignment splits residuals out of order") {
  KCResult kc = kc_assign(plain_requests({2, 1, 3}));
  CHECK(codes_of(kc) == std::vector<Bits>{B("00"), B("1"), B("010")});
  CHECK(kc.steps[0].residual == std::vector<Bits>{B("1"), B("01")});
  CHECK(kc.steps[1].residual == std::vector<Bits>{B("01")});
  CHECK(kc.steps[2].residual == std::vector<Bits>{B("011")});
  CHECK(kc.steps[0].z == Bits());
  CHECK(kc.steps[1].z == B("1"));
  CHECK(kc.steps[2].z == B("01"));
  for (size_t i = 0; i < kc.steps.size(); ++i)
    CHECK(kc.steps[i].halt_time == static_cast<int64_t>(i) + 1);
  CHECK(kc.gamma == Dyadic::parse("7/2^3"));
}

TEST_CASE("overweight request sets are rejected before any assignment") {
  CHECK(throws_kind(Err::weight_exceeded, [] { kc_assign(plain_requests({1, 1, 1})); }));
  CHECK(throws_kind(Err::weight_exceeded, [] { kc_assign(plain_requests({0, 5})); }));
  CHECK(throws_kind(Err::malformed_input, [] { kc_assign(plain_requests({-1})); }));
}

TEST_CASE("residual sets keep distinct lengths, length-lex order and prefix-freeness") {
  Rng rng(140);
  for (int trial = 0; trial < 50; ++trial) {
    auto reqs = random_requests(rng, static_cast<int>(rng.range(1, 12)), 10, 6);
    KCResult kc = kc_assign(reqs);
    CHECK(kc.steps.size() == reqs.size());
    for (const KCStep& s : kc.steps) {
      std::set<size_t> lens;
      for (const Bits& r : s.residual) lens.insert(r.size());
      CHECK(lens.size() == s.residual.size());  // pairwise distinct lengths
      CHECK(std::is_sorted(s.residual.begin(), s.residual.end()));
      CHECK(is_prefix_free(s.residual));
    }
    // Assigned codes are prefix-free and of the exact requested lengths.
    std::vector<Bits> codes = codes_of(kc);
    CHECK(is_prefix_free(codes));
    for (size_t i = 0; i < codes.size(); ++i)
      CHECK(static_cast<int64_t>(codes[i].size()) == reqs[i].len);
  }
}

TEST_CASE("independent replay recovers each payload") {
  std::vector<Request> reqs = {{std::nullopt, B("10"), 2},
                               {std::nullopt, B("1"), 1},
                               {std::nullopt, B("011"), 3}};
  KCResult kc = kc_assign(reqs);
  for (const KCStep& s : kc.steps) {
    auto got = kc_replay(reqs, s.code);
    REQUIRE(got.has_value());
    CHECK(*got == s.req.payload);
  }
  CHECK(!kc_replay(reqs, B("111")).has_value());
  CHECK(!kc_replay(reqs, B("0")).has_value());
}

TEST_CASE("request scheduling from a staged family") {
  StagedTestFamily fam = example_family();
  auto reqs = family_requests(fam);
  REQUIRE(reqs.size() == 2);
  CHECK(reqs[0].m == 0);
  CHECK(reqs[0].payload == B("0"));
  CHECK(reqs[0].len == 2);
  CHECK(reqs[1].m == 1);
  CHECK(reqs[1].payload == B("00"));
  CHECK(reqs[1].len == 2);

  auto s2 = stratum(fam, 2);
  REQUIRE(s2.size() == 2);
  CHECK(s2[0].payload == B("0"));
  CHECK(s2[1].payload == B("00"));
  CHECK(stratum(fam, 0).empty());
  CHECK(stratum(StagedTestFamily(OrderFn::affine(1, 1), 0, 1), 3).empty());
  CHECK(throws_kind(Err::malformed_input, [&] { stratum(fam, -1); }));

  // Scheduled pairs respect the length window on both sides.
  for (int64_t r = 0; r <= 6; ++r)
    for (const Request& q : stratum(fam, r)) {
      CHECK(static_cast<int64_t>(q.payload.size()) <= 2 * r);
      CHECK(static_cast<int64_t>(q.payload.size()) >= 2 * *q.m);
    }
}

TEST_CASE("the doubled measure bound gates family scheduling") {
  StagedTestFamily fat(OrderFn::affine(1, 1), 1, 2);
  fat.add(1, 1, B("0"));  // measure 1/2 > 2^-2
  CHECK(throws_kind(Err::measure_bound_violated, [&] { family_requests(fat); }));
}

TEST_CASE("machine built from the example family") {
  StagedTestFamily fam = example_family();
  KCResult kc = build_machine_from_test(fam);
  CHECK(codes_of(kc) == std::vector<Bits>{B("00"), B("01")});
  CHECK(kc.gamma == Dyadic::parse("1/2^1"));
  CHECK(kc.table.omega() == kc.gamma);
  for (const KCStep& s : kc.steps) CHECK(s.halt_time == 2);  // both visible first at budget 1

  StagedTestFamily solo(OrderFn::affine(1, 3), 1, 4);
  solo.add(1, 2, B("00"));
  KCResult one = build_machine_from_test(solo);
  CHECK(codes_of(one) == std::vector<Bits>{B("00")});
  CHECK(one.gamma == Dyadic::parse("1/2^2"));
  CHECK(one.steps[0].halt_time == 1);
}

TEST_CASE("stratified replay matches the construction") {
  Rng rng(555);
  for (int trial = 0; trial < 10; ++trial) {
    StagedTestFamily fam = random_tight_family(rng, 3);
    KCResult kc = build_machine_from_test(fam);
    for (const KCStep& s : kc.steps) {
      auto got = kc_replay_stratified(fam, s.code);
      REQUIRE(got.has_value());
      CHECK(*got == s.req.payload);
    }
    CHECK(!kc_replay_stratified(fam, Bits::ones(12)).has_value());
  }
}

TEST_CASE("stratum census understates the schedule on shallow families") {
  // Every string is far longer than twice its index: the census order stays
  // at zero until budget 5, which breaks the staged control at i = 3, while
  // the coverage order sees the full stage set from budget 1 on.
  StagedTestFamily fam(OrderFn::table({1, 2, 10}, true, 1), 0, 10);
  for (const Bits& x : all_strings(10))
    if (x.bit(0) == 0) fam.add(0, 10, x);
  REQUIRE(fam.limit(0).size() == 512);

  KCResult kc = build_machine_from_test(fam);
  CHECK(kc.gamma == Dyadic::parse("1/2^2"));
  for (const KCStep& s : kc.steps) CHECK(s.halt_time == 512);

  OrderFn census = stratum_size_order(fam);
  CHECK(sample_order(census, 6) == std::vector<int64_t>{0, 0, 0, 0, 0, 512});
  ControlWitness broken = verify_measure_computable(kc.table, census, 5);
  CHECK(!broken.ok());
  REQUIRE(broken.violated.has_value());
  CHECK(*broken.violated == 3);

  OrderFn cover = coverage_order(fam, kc);
  CHECK(cover(0) == 0);
  CHECK(cover(1) == 512);
  CHECK(verify_measure_computable(kc.table, cover, 8).ok());
}

TEST_CASE("census and coverage coincide on tight families") {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    StagedTestFamily fam = random_tight_family(rng, 3);
    KCResult kc = build_machine_from_test(fam);
    OrderFn census = stratum_size_order(fam);
    OrderFn cover = coverage_order(fam, kc);
    for (int64_t r = 0; r <= 8; ++r) CHECK(census(r) == cover(r));
    CHECK(verify_measure_computable(kc.table, census, 8).ok());
    CHECK(verify_measure_computable(kc.table, cover, 8).ok());
  }
}

TEST_CASE("staged prefix-free hulls") {
  StagedTestFamily fam(OrderFn::affine(1, 1), 0, 3);
  fam.add(0, 1, B("0"));
  PrefixFreeStages hull = prefix_free_stages(fam, 0, 3);
  CHECK(hull.added == std::vector<std::pair<int64_t, Bits>>{{1, B("0")}});
  CHECK(hull.antichain);
  CHECK(hull.staged_inclusion_ok);
  CHECK(hull.limit_equal);
  CHECK(hull.slice_mismatch.empty());

  StagedTestFamily late(OrderFn::affine(1, 1), 0, 3);
  late.add(0, 2, B("0"));
  PrefixFreeStages split = prefix_free_stages(late, 0, 3);
  CHECK(split.added ==
        std::vector<std::pair<int64_t, Bits>>{{2, B("00")}, {2, B("01")}});
  CHECK(split.staged_inclusion_ok);
  CHECK(split.limit_equal);
  CHECK(split.slice_mismatch.empty());

  StagedTestFamily empty(OrderFn::affine(1, 1), 0, 3);
  PrefixFreeStages none = prefix_free_stages(empty, 0, 3);
  CHECK(none.added.empty());
  CHECK(none.limit_equal);

  // A string entering before its own length never becomes newly covered at
  // its length, so the hull misses it and the staged inclusion fails.
  StagedTestFamily early(OrderFn::affine(1, 1), 0, 4);
  early.add(0, 1, B("00"));
  PrefixFreeStages gap = prefix_free_stages(early, 0, 4);
  CHECK(gap.added.empty());
  CHECK(!gap.staged_inclusion_ok);
  CHECK(!gap.limit_equal);
  CHECK(gap.slice_mismatch == std::vector<int64_t>{1, 2, 3, 4});

  CHECK(throws_kind(Err::malformed_input, [&] { prefix_free_stages(fam, 0, 21); }));
}

TEST_CASE("hulls of well-staged families match every slice") {
  Rng rng(2024);
  FamilyGenOptions opt;
  opt.n_max = 2;
  for (int trial = 0; trial < 6; ++trial) {
    StagedTestFamily fam = random_strict_family(rng, opt);
    int64_t horizon = std::min<int64_t>(fam.t_max(), 12);
    for (int64_t n = 0; n <= fam.n_max(); ++n) {
      PrefixFreeStages hull = prefix_free_stages(fam, n, horizon);
      CHECK(hull.antichain);
      CHECK(hull.staged_inclusion_ok);
      CHECK(hull.slice_mismatch.empty());
    }
  }
}
