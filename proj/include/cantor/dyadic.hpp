#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <string>

#include "cantor/error.hpp"

namespace cantor {

// Exact dyadic rational m * 2^-n backed by mpq. The backing value always has
// a power-of-two denominator; canonical form has n == 0 or m odd (mpq keeps
// fractions reduced, which for power-of-two denominators is exactly that).
class Dyadic {
public:
  Dyadic() : q_(0) {}
  Dyadic(long v) : q_(v) {}  // NOLINT: implicit for literals
  explicit Dyadic(const mpz_class& v) : q_(v) {}

  static Dyadic from_parts(const mpz_class& numerator, uint64_t exponent);
  static Dyadic pow2(int64_t k);  // 2^k, k may be negative
  static Dyadic parse(const std::string& text);

  // Canonical parts: value == numerator() * 2^-exponent().
  mpz_class numerator() const { return q_.get_num(); }
  uint64_t exponent() const;

  const mpq_class& rep() const { return q_; }
  static Dyadic from_rep(const mpq_class& q);  // rejects non-dyadic denominators

  std::string str() const;  // "m/2^n"
  int sign() const { return sgn(q_); }
  bool is_zero() const { return sgn(q_) == 0; }
  bool geq_pow2(int64_t k) const;  // value >= 2^k, without materializing 2^k

  Dyadic scaled_pow2(int64_t k) const;  // value * 2^k
  Dyadic floor_to(int64_t bits) const;  // largest multiple of 2^-bits that is <= value
  Dyadic round_nearest(int64_t bits) const;  // nearest multiple of 2^-bits, ties up

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b) { return wrap(mpq_class(a.q_ + b.q_)); }
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return wrap(mpq_class(a.q_ - b.q_)); }
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b) { return wrap(mpq_class(a.q_ * b.q_)); }
  friend Dyadic operator-(const Dyadic& a) { return wrap(mpq_class(-a.q_)); }
  Dyadic& operator+=(const Dyadic& o) { q_ += o.q_; return *this; }
  Dyadic& operator-=(const Dyadic& o) { q_ -= o.q_; return *this; }
  Dyadic& operator*=(const Dyadic& o) { q_ *= o.q_; return *this; }

  friend bool operator==(const Dyadic& a, const Dyadic& b) { return cmp(a.q_, b.q_) == 0; }
  friend bool operator!=(const Dyadic& a, const Dyadic& b) { return cmp(a.q_, b.q_) != 0; }
  friend bool operator<(const Dyadic& a, const Dyadic& b) { return cmp(a.q_, b.q_) < 0; }
  friend bool operator<=(const Dyadic& a, const Dyadic& b) { return cmp(a.q_, b.q_) <= 0; }
  friend bool operator>(const Dyadic& a, const Dyadic& b) { return cmp(a.q_, b.q_) > 0; }
  friend bool operator>=(const Dyadic& a, const Dyadic& b) { return cmp(a.q_, b.q_) >= 0; }

private:
  static Dyadic wrap(mpq_class q) {
    Dyadic d;
    d.q_ = std::move(q);
    return d;
  }
  mpq_class q_;
};

// Exact rational p/q, reduced, q > 0. Used where division leaves the dyadics
// (the savings transform); everything else stays in Dyadic.
class Rational {
public:
  Rational() : q_(0) {}
  Rational(long v) : q_(v) {}  // NOLINT: implicit for literals
  explicit Rational(const mpz_class& v) : q_(v) {}
  Rational(const Dyadic& d) : q_(d.rep()) {}  // NOLINT: dyadics embed
  Rational(const mpz_class& num, const mpz_class& den);

  static Rational parse(const std::string& text);  // "p/q" or "p"

  mpz_class num() const { return q_.get_num(); }
  mpz_class den() const { return q_.get_den(); }
  const mpq_class& rep() const { return q_; }

  std::string str() const;  // "p/q"
  int sign() const { return sgn(q_); }
  bool is_zero() const { return sgn(q_) == 0; }
  bool is_dyadic() const;
  Dyadic to_dyadic() const;                        // rejects non-dyadic values
  Dyadic round_nearest_dyadic(int64_t bits) const;  // nearest multiple of 2^-bits, ties up

  friend Rational operator+(const Rational& a, const Rational& b) { return wrap(mpq_class(a.q_ + b.q_)); }
  friend Rational operator-(const Rational& a, const Rational& b) { return wrap(mpq_class(a.q_ - b.q_)); }
  friend Rational operator*(const Rational& a, const Rational& b) { return wrap(mpq_class(a.q_ * b.q_)); }
  friend Rational operator/(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a) { return wrap(mpq_class(-a.q_)); }
  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) == 0; }
  friend bool operator!=(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) != 0; }
  friend bool operator<(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) < 0; }
  friend bool operator<=(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) <= 0; }
  friend bool operator>(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) > 0; }
  friend bool operator>=(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) >= 0; }

private:
  static Rational wrap(mpq_class q) {
    Rational r;
    r.q_ = std::move(q);
    return r;
  }
  mpq_class q_;
};

}  // namespace cantor
