#include <doctest.h>

#include <map>
#include <vector>

#include "cantor/clopen.hpp"
#include "cantor/generate.hpp"
#include "cantor/martingale.hpp"
#include "cantor/order.hpp"
#include "cantor/sequence.hpp"

#include "test_support.hpp"

using namespace cantor;
using testutil::throws_kind;

namespace {

Bits B(const std::string& s) { return Bits::parse(s); }
Dyadic D(const std::string& s) { return Dyadic::parse(s); }

}  // namespace

TEST_CASE("law-of-large-numbers bettor") {
  Martingale f = lln_martingale(D("1/2^1"));
  CHECK(f.initial() == Dyadic(1));
  CHECK(f.at(B("11")) == D("9/2^2"));
  CHECK(f.at(B("10")) == D("3/2^2"));
  CHECK(f.at(B("0")) == D("1/2^1"));
  CHECK(f.at(B("01")) == D("3/2^2"));
  CHECK(throws_kind(Err::malformed_input, [] { lln_martingale(Dyadic(0)); }));
  CHECK(throws_kind(Err::malformed_input, [] { lln_martingale(Dyadic(1)); }));
  CHECK(throws_kind(Err::malformed_input, [] { lln_martingale(Dyadic(-1)); }));
}

TEST_CASE("conditional-measure bettor") {
  Martingale c = conditional_martingale(make_clopen({B("0")}));
  CHECK(c.initial() == D("1/2^1"));
  CHECK(c.at(B("00")) == Dyadic(1));
  CHECK(c.at(B("1")).is_zero());
  CHECK(conditional_martingale(make_clopen({})).at(B("0101")).is_zero());
  CHECK(conditional_martingale(make_clopen({B("0"), B("1")})).at(B("10")) == Dyadic(1));
  Martingale two = conditional_martingale(make_clopen({B("01"), B("10")}));
  CHECK(two.initial() == D("1/2^1"));
  CHECK(two.at(B("0")) == D("1/2^1"));
  CHECK(two.at(B("01")) == Dyadic(1));
  CHECK(two.at(B("00")).is_zero());
}

TEST_CASE("table bettor with inherited children") {
  std::map<Bits, Dyadic> t;
  t[B("")] = Dyadic(1);
  t[B("0")] = Dyadic(2);
  t[B("1")] = Dyadic(0);
  Martingale d = table_martingale(t);
  CHECK(d.at(B("00")) == Dyadic(2));  // children inherit the parent value
  CHECK(d.at(B("0110")) == Dyadic(2));
  CHECK(d.at(B("10")).is_zero());
  CHECK(constant_martingale(D("3/2^2")).at(B("0101")) == D("3/2^2"));
}

TEST_CASE("table construction validates the skeleton") {
  std::map<Bits, Dyadic> unfair;
  unfair[B("")] = Dyadic(1);
  unfair[B("0")] = Dyadic(2);
  unfair[B("1")] = Dyadic(2);
  CHECK(throws_kind(Err::malformed_input, [&] { table_martingale(unfair); }));

  std::map<Bits, Dyadic> negative;
  negative[B("")] = Dyadic(1);
  negative[B("0")] = Dyadic(-1);
  negative[B("1")] = Dyadic(3);
  CHECK(throws_kind(Err::malformed_input, [&] { table_martingale(negative); }));

  std::map<Bits, Dyadic> rootless;
  rootless[B("0")] = Dyadic(1);
  CHECK(throws_kind(Err::malformed_input, [&] { table_martingale(rootless); }));

  // Implicit-sibling unfairness is caught: "1" inherits 1 from the root,
  // so the root pays out 2 + 1 != 2 * 1.
  std::map<Bits, Dyadic> lopsided;
  lopsided[B("")] = Dyadic(1);
  lopsided[B("0")] = Dyadic(2);
  CHECK(throws_kind(Err::malformed_input, [&] { table_martingale(lopsided); }));
}

TEST_CASE("fairness scan accepts fair bettors and pins down violations") {
  CHECK(check_fairness(lln_martingale(D("3/2^2")), 6).ok);
  CHECK(check_fairness(conditional_martingale(make_clopen({B("01"), B("10")})), 6).ok);
  Rng rng(11);
  for (int t = 0; t < 10; ++t)
    CHECK(check_fairness(random_fair_table(rng, 5, static_cast<int>(rng.range(0, 32))), 5).ok);

  std::map<Bits, Dyadic> unfair;
  unfair[B("")] = Dyadic(1);
  unfair[B("0")] = Dyadic(2);
  unfair[B("1")] = Dyadic(2);
  Martingale d = table_martingale_unchecked(unfair);
  auto r = check_fairness(d, 3);
  CHECK(!r.ok);
  REQUIRE(r.witness.has_value());
  CHECK(*r.witness == B(""));

  // Fair but negative: flagged at the offending node.
  std::map<Bits, Dyadic> neg;
  neg[B("")] = Dyadic(0);
  neg[B("0")] = Dyadic(1);
  neg[B("1")] = Dyadic(-1);
  auto nr = check_fairness(table_martingale_unchecked(neg), 2);
  CHECK(!nr.ok);
  REQUIRE(nr.witness.has_value());
  CHECK(*nr.witness == B("1"));
}

TEST_CASE("weighted battery sums") {
  Martingale f = lln_martingale(D("1/2^1"));
  CHECK(weighted_sum({f}).at(B("11")) == f.at(B("11")));
  Martingale sum = weighted_sum({constant_martingale(1), constant_martingale(1)});
  CHECK(sum.initial() == D("3/2^1"));
  CHECK(weighted_sum({}).initial().is_zero());
  Martingale mixed = weighted_sum({f, conditional_martingale(make_clopen({B("0")}))});
  CHECK(mixed.initial() == Dyadic(1) + D("1/2^2"));
  CHECK(mixed.at(B("0")) == Dyadic(1));  // 1/2 from the bettor + (1/2) * 1 conditional
  CHECK(throws_kind(Err::malformed_input, [] { weighted_sum({constant_martingale(2)}); }));
}

TEST_CASE("linear combinations with nonnegative weights") {
  Martingale f = lln_martingale(D("1/2^1"));
  Martingale g = conditional_martingale(make_clopen({B("1")}));
  Martingale lc = lin_comb({{D("3/2^1"), f}, {Dyadic(2), g}});
  CHECK(lc.initial() == D("3/2^1") + Dyadic(1));
  CHECK(lc.at(B("1")) == D("3/2^1") * D("3/2^1") + Dyadic(2));
  CHECK(throws_kind(Err::malformed_input, [&] { lin_comb({{Dyadic(-1), f}}); }));
}

TEST_CASE("savings rebetting: pinned values and fairness") {
  SavingsMartingale sav = savings_transform(lln_martingale(D("1/2^1")), OrderFn::affine(2, 0), 0);
  CHECK(sav.at(B("")) == Rational(1));
  CHECK(sav.at(B("1")) == Rational::parse("5/4"));
  CHECK(sav.at(B("10")) == Rational::parse("7/8"));
  CHECK(sav.at(B("11")) == Rational::parse("13/8"));
  CHECK(sav.at(B("10")) + sav.at(B("11")) == Rational(2) * sav.at(B("1")));
  CHECK(check_fairness(sav, 6).ok);

  // A constant bettor never moves, so banking changes nothing.
  SavingsMartingale flat =
      savings_transform(constant_martingale(D("3/2^2")), OrderFn::affine(1, 0), 0);
  for (int m = 0; m <= 5; ++m) CHECK(flat.at(Bits::ones(m)) == Rational::parse("3/4"));

  CHECK(throws_kind(Err::precondition_violated,
                    [] { savings_transform(lln_martingale(D("1/2^1")), OrderFn::constant(3), 0); }));
}

TEST_CASE("savings rebetting divides by the base capital") {
  SavingsMartingale sav =
      savings_transform(conditional_martingale(make_clopen({B("1")})), OrderFn::affine(2, 0), 0);
  CHECK(sav.at(B("0")) == Rational::parse("1/4"));  // still defined one step in
  CHECK(throws_kind(Err::division_by_zero, [&] { sav.at(B("00")); }));
}

TEST_CASE("savings keeps banked capital: doubling base on the all-zero ray") {
  // Base doubles its stake along 0^m and is flat elsewhere.
  std::map<Bits, Dyadic> t;
  t[B("")] = Dyadic(1);
  for (int m = 1; m <= 13; ++m) {
    t[Bits::zeros(m)] = Dyadic::pow2(m);
    t[Bits::zeros(m - 1).child(1)] = Dyadic(0);
  }
  Martingale base = table_martingale(t);
  OrderFn f = OrderFn::affine(2, 1);
  for (int n = 0; n <= 6; ++n)  // the base meets every checkpoint target
    CHECK(base.at(Bits::zeros(2 * n + 1)).geq_pow2(n));
  SavingsMartingale sav = savings_transform(base, f, 0);
  auto cur = sav.cursor();
  for (int m = 1; m <= 13; ++m) {
    cur->push(0);
    if (m <= 1) continue;
    const int64_t h = m / 2 - 1 > 0 ? m / 2 - 1 : 0;
    CHECK(cur->value() >= Rational(Dyadic::pow2(h)));
  }
  // Checkpoint capitals follow cp_n = 2 * (5/2)^n exactly.
  CHECK(sav.at(Bits::zeros(3)) == Rational(5));
  CHECK(sav.at(Bits::zeros(5)) == Rational::parse("25/2"));
  CHECK(sav.at(Bits::zeros(7)) == Rational::parse("125/4"));
}

TEST_CASE("savings success transfers to a declared order along a witnessed ray") {
  SavingsMartingale sav =
      savings_transform(lln_martingale(D("3/2^2")), OrderFn::affine(4, 0), 1);
  auto cur = sav.cursor();
  for (int m = 1; m <= 64; ++m) {
    cur->push(1);
    if (m <= 4) continue;
    const int64_t h = (m + 3) / 4 - 1;
    CHECK(cur->value() >= Rational(Dyadic::pow2(h)));
  }
}

TEST_CASE("rounding an exact approximation adds a constant quarter") {
  Martingale v = lln_martingale(D("1/2^1"));
  Martingale d = round_to_dyadic(approx_exact(v));
  for (size_t len = 0; len <= 6; ++len)
    for (const Bits& x : all_strings(len)) CHECK(d.at(x) == v.at(x) + D("1/2^2"));
  Martingale zero = round_to_dyadic(approx_exact(conditional_martingale(make_clopen({}))));
  CHECK(zero.at(B("0110")) == D("1/2^2"));
  CHECK(check_fairness(d, 5).ok);
}

TEST_CASE("rounding the truncation ladder stays within the slack window") {
  Rng rng(909);
  std::vector<Martingale> bases = {lln_martingale(D("1/2^1")), lln_martingale(D("3/2^2")),
                                   random_fair_table(rng, 6, 12),
                                   conditional_martingale(make_clopen({B("01"), B("10")}))};
  for (const Martingale& v : bases) {
    Martingale d = round_truncated(v);
    CHECK(check_fairness(d, 5).ok);
    for (size_t len = 0; len <= 6; ++len)
      for (const Bits& x : all_strings(len)) {
        const Dyadic slack = d.at(x) - v.at(x);
        CHECK(slack > D("1/2^4"));
        CHECK(slack < D("1/2^1"));
      }
  }
}

TEST_CASE("rounding a savings bettor brackets the rational value") {
  SavingsMartingale sav = savings_transform(lln_martingale(D("1/2^1")), OrderFn::affine(2, 0), 0);
  Martingale d = round_to_dyadic(sav);
  CHECK(check_fairness(d, 6).ok);
  for (int bit = 0; bit <= 1; ++bit) {
    Bits x;
    for (int m = 0; m <= 8; ++m) {
      const Rational rounded(d.at(x));
      const Rational truth = sav.at(x);
      CHECK(rounded >= truth);
      CHECK(rounded <= truth + Rational(2));
      x.push_back(bit);
    }
  }
  for (size_t len = 0; len <= 4; ++len)
    for (const Bits& x : all_strings(len)) {
      const Rational gap = Rational(d.at(x)) - sav.at(x);
      CHECK(gap.sign() >= 0);
      CHECK(gap <= Rational(2));
    }
}

TEST_CASE("rounding rejects approximations that bankrupt a child") {
  Approximable bad;
  bad.approx = [](const Bits& x, int64_t) {
    if (x == B("0")) return Dyadic(4);
    return Dyadic(0);
  };
  Martingale d = round_to_dyadic(bad);
  CHECK(throws_kind(Err::precondition_violated, [&] { d.at(B("1")); }));
}

TEST_CASE("threshold hitting sets are minimal antichains") {
  ClopenSet hs = threshold_hitting_set(conditional_martingale(make_clopen({B("11")})), 0, 4);
  CHECK(hs.generators == std::vector<Bits>{B("11")});
  CHECK(hs.prefix_free);

  ClopenSet lln_hs = threshold_hitting_set(lln_martingale(D("1/2^1")), 1, 4);
  CHECK(lln_hs.generators == std::vector<Bits>{B("11")});

  ClopenSet none = threshold_hitting_set(constant_martingale(D("1/2^1")), 1, 5);
  CHECK(none.generators.empty());
}

TEST_CASE("capital bound caps the measure of threshold hitters") {
  Rng rng(5150);
  for (int trial = 0; trial < 40; ++trial) {
    Martingale d = random_fair_table(rng, 6, static_cast<int>(rng.range(0, 16)));
    REQUIRE(d.initial() <= Dyadic(1));
    for (int64_t k = 0; k <= 5; ++k) {
      ClopenSet hs = threshold_hitting_set(d, k, 6);
      CHECK(is_prefix_free(hs.generators));
      CHECK(measure(hs) * Dyadic::pow2(k) <= d.initial());
    }
  }
}

TEST_CASE("success reports along explicit sequences") {
  SuccessReport flat =
      success_report(constant_martingale(1), OrderFn::affine(1, 0), SequenceSource::constant(0), 16);
  CHECK(flat.hits == std::vector<int64_t>{0});
  CHECK(flat.verdict_io);
  CHECK(!flat.ae_tail.has_value());

  SuccessReport ones = success_report(lln_martingale(D("1/2^1")), OrderFn::floor_div(2),
                                      SequenceSource::constant(1), 64);
  CHECK(ones.hits.size() == 65);  // every index hits
  CHECK(ones.verdict_io);
  REQUIRE(ones.ae_tail.has_value());
  CHECK(*ones.ae_tail == 0);

  SuccessReport alt = success_report(lln_martingale(D("1/2^1")), OrderFn::floor_div(2),
                                     SequenceSource::periodic(B("01")), 64);
  CHECK(alt.hits == std::vector<int64_t>{0});
  CHECK(!alt.ae_tail.has_value());
}
