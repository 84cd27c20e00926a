#include <doctest.h>

#include <vector>

#include "cantor/clopen.hpp"
#include "cantor/family.hpp"
#include "cantor/generate.hpp"
#include "cantor/martingale.hpp"
#include "cantor/sequence.hpp"

#include "test_support.hpp"

using namespace cantor;
using testutil::throws_kind;

namespace {

Bits B(const std::string& s) { return Bits::parse(s); }

StagedTestFamily example_family() {
  StagedTestFamily fam(OrderFn::affine(1, 3), 1, 4);
  fam.add(0, 1, B("0"));
  fam.add(1, 4, B("00"));
  return fam;
}

bool has_check(const FamilyReport& rep, const std::string& name) {
  for (const auto& v : rep.violations)
    if (v.check == name) return true;
  return false;
}

}  // namespace

TEST_CASE("staged families: stage bookkeeping") {
  StagedTestFamily fam = example_family();
  CHECK(fam.n_max() == 1);
  CHECK(fam.t_max() == 4);
  CHECK(fam.at_stage(1, 3).empty());
  CHECK(fam.at_stage(1, 4) == std::vector<Bits>{B("00")});
  CHECK(fam.at_stage(1, 99) == std::vector<Bits>{B("00")});  // clamps to the limit
  CHECK(fam.at_stage(1, -2).empty());
  CHECK(fam.limit(0) == std::vector<Bits>{B("0")});
  CHECK(fam.stage_of(1, B("00")) == 4);
  CHECK(!fam.stage_of(0, B("1")).has_value());
  auto adds = fam.additions(0);
  REQUIRE(adds.size() == 1);
  CHECK(adds[0].first == 1);
  CHECK(adds[0].second == B("0"));

  CHECK(throws_kind(Err::malformed_input, [&] { fam.add(0, 2, B("0")); }));   // duplicate
  CHECK(throws_kind(Err::malformed_input, [&] { fam.add(5, 1, B("1")); }));   // index range
  CHECK(throws_kind(Err::malformed_input, [&] { fam.add(0, 9, B("1")); }));   // stage range
}

TEST_CASE("family verification: the example passes strictly") {
  FamilyReport rep = verify_family(example_family(), true);
  CHECK(rep.pass);
  CHECK(rep.strict);
  CHECK(rep.violations.empty());
}

TEST_CASE("family verification pins the failing obligation") {
  StagedTestFamily flat(OrderFn::constant(5), 0, 3);
  flat.add(0, 1, B("0"));
  FamilyReport rep = verify_family(flat, false);
  CHECK(!rep.pass);
  CHECK(has_check(rep, "order-flags"));

  OrderFlags lying;
  lying.nondecreasing = true;
  lying.strictly_increasing = true;
  StagedTestFamily liar(OrderFn::derived("liar", [](int64_t) { return int64_t{5}; }, lying), 0, 3);
  liar.add(0, 1, B("0"));
  CHECK(has_check(verify_family(liar, false), "order-flags"));  // caught by the sample scan

  StagedTestFamily early(OrderFn::affine(1, 1), 0, 3);
  early.add(0, 1, B("00"));
  CHECK(has_check(verify_family(early, false), "stage-length"));

  StagedTestFamily fat(OrderFn::affine(1, 1), 1, 3);
  fat.add(1, 1, B("0"));
  fat.add(1, 2, B("10"));
  CHECK(has_check(verify_family(fat, false), "def-ML-test"));  // 3/4 > 1/2

  StagedTestFamily overlap(OrderFn::affine(1, 1), 0, 3);
  overlap.add(0, 1, B("0"));
  overlap.add(0, 2, B("01"));
  CHECK(has_check(verify_family(overlap, false), "prefix-free"));

  StagedTestFamily half(OrderFn::affine(1, 1), 1, 3);
  half.add(1, 1, B("0"));  // 1/2 meets the plain bound, breaks the doubled one
  CHECK(verify_family(half, false).pass);
  FamilyReport strict = verify_family(half, true);
  CHECK(!strict.pass);
  CHECK(has_check(strict, "measure-2n"));
}

TEST_CASE("reindexing to the doubled bound") {
  StagedTestFamily fam(OrderFn::affine(2, 2), 2, 4);
  fam.add(1, 1, B("0"));
  fam.add(2, 2, B("00"));
  StagedTestFamily re = reindex_strict(fam);
  CHECK(re.n_max() == 1);
  CHECK(re.limit(0).empty());
  CHECK(re.limit(1) == std::vector<Bits>{B("00")});
  CHECK(re.f()(0) == 2);  // f'(j) = f(2j)
  CHECK(re.f()(1) == 6);
  CHECK(verify_family(re, true).pass);
}

TEST_CASE("betting sum of the example family") {
  ConversionBundle bundle = test_to_martingale(example_family());
  CHECK(!bundle.reindexed);
  CHECK(bundle.k_cut == 1);
  CHECK(bundle.g(0) == 3);
  CHECK(bundle.g(1) == 8);
  CHECK(bundle.B.initial() == Dyadic::parse("1/2^2"));
  CHECK(bundle.B.at(B("0")) == Dyadic::parse("1/2^1"));
  CHECK(bundle.B.at(B("00")) == Dyadic(1));
  CHECK(bundle.B.at(B("1")).is_zero());
  CHECK(check_fairness(bundle.B, 5).ok);
  CHECK(bundle.h(0) == 0);
  CHECK(bundle.h(3) == 0);
}

TEST_CASE("betting sums start below the capital cap") {
  Rng rng(321);
  FamilyGenOptions opt;
  opt.n_max = 3;
  for (int trial = 0; trial < 10; ++trial) {
    StagedTestFamily fam = random_strict_family(rng, opt);
    ConversionBundle bundle = test_to_martingale(fam);
    CHECK(!bundle.reindexed);
    CHECK(bundle.B.initial() <= Dyadic(6));
  }
}

TEST_CASE("approximation ladder brackets the betting sum") {
  Rng rng(321321);
  FamilyGenOptions opt;
  opt.n_max = 2;
  std::vector<StagedTestFamily> fams = {example_family()};
  for (int trial = 0; trial < 3; ++trial) fams.push_back(random_strict_family(rng, opt));
  for (const StagedTestFamily& fam : fams) {
    ConversionBundle bundle = test_to_martingale(fam);
    for (size_t len = 0; len <= 4; ++len)
      for (const Bits& x : all_strings(len)) {
        const Dyadic bx = bundle.B.at(x);
        for (int64_t i = 0; i <= 4; ++i) {
          const Dyadic b1 = bundle.B1(x, i);
          const Dyadic b2 = bundle.B2(x, i);
          const Dyadic fx = bundle.F(x, i);
          const Dyadic d1 = bx - b1, d2 = b1 - b2, d3 = b2 - fx, d4 = bx - fx;
          CHECK(d1.sign() >= 0);
          CHECK(d1 <= Dyadic::pow2(-i - 2));
          CHECK(d2.sign() >= 0);
          CHECK(d2 <= Dyadic::pow2(-i - 2));
          CHECK(d3.sign() >= 0);
          CHECK(d3 <= Dyadic::pow2(-i - 1));
          CHECK(d4.sign() >= 0);
          CHECK(d4 <= Dyadic::pow2(-i));
        }
      }
  }
}

TEST_CASE("hitting rows along the all-zero path") {
  ConversionBundle bundle = test_to_martingale(example_family());
  HitReport rep = hitting_witness(bundle, SequenceSource::constant(0), 16);
  CHECK(rep.g0 == 3);
  CHECK(rep.ok);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].n == 0);
  CHECK(rep.rows[0].i_n == 1);
  CHECK(rep.rows[0].h_i == 0);
  CHECK(!rep.rows[0].asserted);  // 0 <= g(0), outside the guarantee
  CHECK(!rep.rows[0].pass);      // 1/2 < 2^0
  CHECK(rep.rows[1].n == 1);
  CHECK(rep.rows[1].i_n == 2);
  CHECK(rep.rows[1].h_i == 0);
  CHECK(!rep.rows[1].asserted);
  CHECK(rep.rows[1].pass);  // capital 1 meets the bar 2^0
  CHECK(rep.rows[1].b_value == Dyadic(1));
}

TEST_CASE("only the doubled-bound violation triggers reindexing") {
  StagedTestFamily fam(OrderFn::affine(2, 2), 2, 4);
  fam.add(1, 1, B("0"));
  fam.add(2, 4, B("00"));  // enters after stage f'(0) = 2, so the term survives
  ConversionBundle bundle = test_to_martingale(fam);
  CHECK(bundle.reindexed);
  CHECK(bundle.B.initial() == Dyadic::parse("1/2^2"));
  CHECK(bundle.B.at(B("00")) == Dyadic(1));  // the surviving level is X_2 at index 1
  CHECK(bundle.source);
  CHECK(bundle.source->n_max() == 1);

  StagedTestFamily broken(OrderFn::affine(1, 1), 1, 3);
  broken.add(1, 1, B("0"));
  broken.add(1, 2, B("10"));  // 3/4 > 1/2: a plain violation, not reindexable
  CHECK(throws_kind(Err::precondition_violated, [&] { test_to_martingale(broken); }));
}

TEST_CASE("threshold family from a bettor") {
  StagedTestFamily fam = martingale_to_test(lln_martingale(Dyadic::parse("1/2^1")),
                                            OrderFn::floor_div(2), 1, 8);
  CHECK(fam.limit(0) == std::vector<Bits>{B("")});
  CHECK(fam.stage_of(0, B("")) == 0);
  CHECK(fam.limit(1) == std::vector<Bits>{B("11")});
  CHECK(fam.stage_of(1, B("11")) == 2);
  CHECK(measure(make_clopen(fam.limit(1))) <= Dyadic::parse("1/2^1"));
  CHECK(verify_family(fam, false).pass);
  for (int64_t r = 0; r <= 5; ++r) CHECK(fam.f()(r) == 3 * r + 1);

  StagedTestFamily trivial = martingale_to_test(constant_martingale(1), OrderFn(), 2, 6);
  CHECK(trivial.limit(0) == std::vector<Bits>{B("")});
  CHECK(trivial.limit(1).empty());
  CHECK(trivial.limit(2).empty());
  for (int64_t r = 0; r <= 5; ++r) CHECK(trivial.f()(r) == 2 * r + 1);
}

TEST_CASE("bettor-to-family preconditions") {
  CHECK(throws_kind(Err::malformed_input,
                    [] { martingale_to_test(constant_martingale(2), OrderFn(), 1, 4); }));
  CHECK(throws_kind(Err::precondition_violated, [] {
    martingale_to_test(lln_martingale(Dyadic::parse("1/2^1")),
                       OrderFn::table({0, 5, 1}, true, 1), 1, 4);
  }));
  CHECK(throws_kind(Err::precondition_violated, [] { martingale_to_test(Martingale(), OrderFn(), 1, 4); }));
  CHECK(throws_kind(Err::precondition_violated, [] {
    martingale_to_test(lln_martingale(Dyadic::parse("1/2^1")), OrderFn(), 1, 4,
                       OrderFn::floor_div(2));
  }));
}

TEST_CASE("first capture depth along a path") {
  Martingale lln = lln_martingale(Dyadic::parse("1/2^1"));
  auto d2 = first_capture_depth(lln, OrderFn::floor_div(2), 1, SequenceSource::constant(1), 16);
  REQUIRE(d2.has_value());
  CHECK(*d2 == 2);
  auto d0 = first_capture_depth(lln, OrderFn::floor_div(2), 0, SequenceSource::constant(1), 16);
  REQUIRE(d0.has_value());
  CHECK(*d0 == 0);
  CHECK(!first_capture_depth(lln, OrderFn::floor_div(2), 3, SequenceSource::periodic(B("01")), 20)
           .has_value());
}
