#include <doctest.h>

#include <vector>

#include "cantor/order.hpp"

#include "test_support.hpp"

using namespace cantor;
using testutil::throws_kind;

TEST_CASE("closed forms evaluate and carry monotonicity flags") {
  CHECK(OrderFn()(7) == 7);  // default order is the identity
  CHECK(OrderFn().flags().strictly_increasing);
  CHECK(OrderFn::affine(2, 1)(5) == 11);
  CHECK(OrderFn::affine(0, 5).flags().nondecreasing);
  CHECK(!OrderFn::affine(0, 5).flags().strictly_increasing);
  CHECK(OrderFn::affine(1, 0).flags().strictly_increasing);
  CHECK(OrderFn::constant(4)(123) == 4);
  CHECK(!OrderFn::constant(4).flags().strictly_increasing);
  CHECK(OrderFn::floor_div(2)(7) == 3);
  CHECK(OrderFn::ceil_div(2)(7) == 4);
  CHECK(OrderFn::power(2)(9) == 81);
  CHECK(OrderFn::power(2).flags().strictly_increasing);
  CHECK(sample_order(OrderFn::affine(2, 1), 4) == std::vector<int64_t>{1, 3, 5, 7});
  CHECK(throws_kind(Err::malformed_input, [] { OrderFn::affine(-1, 0); }));
  CHECK(throws_kind(Err::malformed_input, [] { OrderFn::power(0); }));
  CHECK(throws_kind(Err::malformed_input, [] { OrderFn::floor_div(0); }));
  CHECK(throws_kind(Err::malformed_input, [] { OrderFn::affine(1, 0)(-3); }));
}

TEST_CASE("table orders: extension modes and inferred flags") {
  OrderFn strict = OrderFn::table({1, 2, 3}, true, 1);
  CHECK(strict.flags().strictly_increasing);
  CHECK(strict(2) == 3);
  CHECK(strict(5) == 6);

  OrderFn flat = OrderFn::table({1, 2, 3}, false, 0);
  CHECK(flat.flags().nondecreasing);
  CHECK(!flat.flags().strictly_increasing);  // constant extension caps growth
  CHECK(flat(50) == 3);

  OrderFn wobble = OrderFn::table({0, 5, 1}, true, 1);
  CHECK(!wobble.flags().nondecreasing);
  CHECK(wobble(1) == 5);
  CHECK(wobble(2) == 1);
  CHECK(wobble(4) == 3);

  CHECK(throws_kind(Err::malformed_input, [] { OrderFn::table({}, true, 1); }));
  CHECK(throws_kind(Err::malformed_input, [] { OrderFn::table({1, -2}, true, 1); }));
  CHECK(throws_kind(Err::malformed_input, [] { OrderFn::table({1}, true, -1); }));
}

TEST_CASE("value cap raises overflow instead of wrapping") {
  CHECK(throws_kind(Err::overflow, [] { OrderFn::affine(4, 0)(int64_t{1} << 61); }));
  CHECK(throws_kind(Err::overflow, [] { OrderFn::power(2)(int64_t{1} << 32); }));
}

TEST_CASE("inverse: least witness index") {
  CHECK(inverse_at(OrderFn::affine(2, 0), 5) == 3);
  CHECK(inverse_at(OrderFn(), 7) == 7);
  CHECK(inverse_at(OrderFn::constant(9), 0) == 0);
  CHECK(inverse_at(OrderFn::affine(0, 9), 4) == 0);  // f(0) already covers
  CHECK(throws_kind(Err::horizon_exhausted, [] { inverse_at(OrderFn::constant(3), 5); }));
  CHECK(throws_kind(Err::malformed_input, [] { inverse_at(OrderFn(), -1); }));
}

TEST_CASE("inverse order is nondecreasing and below the identity for strict bases") {
  std::vector<OrderFn> bases = {OrderFn::affine(1, 0), OrderFn::affine(2, 0),
                                OrderFn::affine(1, 3), OrderFn::power(2),
                                OrderFn::table({0, 2, 5}, true, 2)};
  for (const OrderFn& f : bases) {
    OrderFn inv = inverse_order(f);
    CHECK(inv.flags().nondecreasing);
    int64_t prev = 0;
    for (int64_t n = 0; n <= 256; ++n) {
      int64_t v = inv(n);
      CHECK(v >= prev);
      prev = v;
      if (f.flags().strictly_increasing) {
        CHECK(f(n) >= n);        // strictly increasing orders majorize the identity
        CHECK(inverse_at(f, n) <= n);
      }
    }
    CHECK(inv(256) >= 1);  // unbounded bases have unbounded witnesses
  }
}

TEST_CASE("inverse scanner matches pointwise inversion on nondecreasing queries") {
  OrderFn f = OrderFn::affine(3, 1);
  InverseScanner scan(f);
  for (int64_t n = 0; n <= 100; n += (n < 10 ? 1 : 7)) CHECK(scan.at(n) == inverse_at(f, n));
  InverseScanner bad(f);
  bad.at(10);
  CHECK(throws_kind(Err::precondition_violated, [&] { bad.at(9); }));
  InverseScanner capped(OrderFn::constant(3).with_horizon(100));
  CHECK(throws_kind(Err::horizon_exhausted, [&] { capped.at(5); }));
}

TEST_CASE("double inverse identity for strictly increasing orders") {
  auto p = double_inverse_pair(OrderFn::affine(2, 0), 3);
  CHECK(p.first == 5);
  CHECK(p.second == 5);
  p = double_inverse_pair(OrderFn(), 4);
  CHECK(p.first == 4);
  CHECK(p.second == 4);
  p = double_inverse_pair(OrderFn::power(2), 2);
  CHECK(p.first == 2);
  CHECK(p.second == 2);
  std::vector<OrderFn> bases = {OrderFn::affine(1, 0), OrderFn::affine(2, 0), OrderFn::affine(3, 2),
                                OrderFn::power(2), OrderFn::table({0, 2, 5}, true, 2)};
  for (const OrderFn& f : bases)
    for (int64_t i = 1; i <= 64; ++i) {
      auto q = double_inverse_pair(f, i);
      CHECK(q.first == q.second);
    }
  CHECK(throws_kind(Err::precondition_violated, [] { double_inverse_pair(OrderFn::floor_div(2), 3); }));
  CHECK(throws_kind(Err::malformed_input, [] { double_inverse_pair(OrderFn(), 0); }));
}

TEST_CASE("strictification") {
  OrderFn s = strictify(OrderFn::constant(3));
  CHECK(sample_order(s, 4) == std::vector<int64_t>{3, 4, 5, 6});
  CHECK(s.flags().strictly_increasing);

  OrderFn id_again = strictify(OrderFn());
  for (int64_t n = 0; n <= 40; ++n) CHECK(id_again(n) == n);

  OrderFn w = strictify(OrderFn::table({0, 5, 1}, true, 1));
  CHECK(sample_order(w, 4) == std::vector<int64_t>{0, 5, 6, 7});

  OrderFn already = OrderFn::affine(2, 1);
  OrderFn twice = strictify(strictify(already));
  for (int64_t n = 0; n <= 40; ++n) CHECK(twice(n) == already(n));
}

TEST_CASE("positive lower bound with a strict inverse") {
  auto idlb = true_order_lower(OrderFn());
  CHECK(idlb.i0 == 1);
  for (int64_t n = 0; n <= 40; ++n) CHECK(idlb.g(n) == n);

  auto half = true_order_lower(OrderFn::ceil_div(2));
  CHECK(half.i0 == 1);
  for (int64_t i = 0; i <= 64; ++i)
    CHECK(inverse_at(half.g, i) == OrderFn::ceil_div(2)(i));  // recovers the order exactly

  auto dbl = true_order_lower(OrderFn::affine(2, 0));
  CHECK(dbl.i0 == 1);
  int64_t prev = -1;
  for (int64_t n = 0; n <= 64; ++n) {
    CHECK(dbl.g(n) > prev);  // strictly increasing
    prev = dbl.g(n);
  }
  for (int64_t i = dbl.i0; i <= 64; ++i) CHECK(inverse_at(dbl.g, i) <= OrderFn::affine(2, 0)(i));

  CHECK(throws_kind(Err::precondition_violated,
                    [] { true_order_lower(OrderFn::table({0, 5, 1}, true, 1)); }));
  CHECK(throws_kind(Err::horizon_exhausted,
                    [] { true_order_lower(OrderFn::constant(0).with_horizon(50)); }));
}

TEST_CASE("derived-order helpers") {
  OrderFn h = minus_const_trunc(OrderFn::affine(1, 0), 3);
  CHECK(sample_order(h, 6) == std::vector<int64_t>{0, 0, 0, 0, 1, 2});
  CHECK(throws_kind(Err::malformed_input, [] { minus_const_trunc(OrderFn(), -1); }));

  OrderFn c = compose_affine_arg(OrderFn::affine(2, 1), 3, 4);
  for (int64_t n = 0; n <= 20; ++n) CHECK(c(n) == 6 * n + 9);
  CHECK(c.flags().strictly_increasing);
  CHECK(!compose_affine_arg(OrderFn::affine(2, 1), 0, 4).flags().strictly_increasing);

  CHECK(reaches(OrderFn::constant(3), 3));
  CHECK(!reaches(OrderFn::constant(3), 4));
  CHECK(reaches(OrderFn::affine(1, 0), 1000));

  CHECK(throws_kind(Err::malformed_input, [] { OrderFn().with_horizon(0); }));
  OrderFn capped = OrderFn::affine(1, 0).with_horizon(10);
  CHECK(throws_kind(Err::horizon_exhausted, [&] { inverse_at(capped, 20); }));
}

TEST_CASE("recurrence orders memoize their prefix") {
  OrderFlags fl;
  fl.nondecreasing = true;
  OrderFn g = OrderFn::recurrence(
      "triangle", [] { return int64_t{1}; },
      [](int64_t prev, int64_t n) { return prev + n; }, fl);
  CHECK(sample_order(g, 5) == std::vector<int64_t>{1, 2, 4, 7, 11});
  CHECK(g(3) == 7);  // repeated evaluation hits the cache
  CHECK(g(0) == 1);
}
