#include "cantor/dyadic.hpp"

#include <cctype>

namespace cantor {

namespace {

bool is_pow2(const mpz_class& v) {
  if (sgn(v) <= 0) return false;
  size_t top = mpz_sizeinbase(v.get_mpz_t(), 2) - 1;
  return mpz_scan1(v.get_mpz_t(), 0) == top;
}

mpz_class pow2z(uint64_t n) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, n);
  return r;
}

bool parse_int(const std::string& s, size_t& pos, mpz_class& out) {
  size_t start = pos;
  if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
  size_t digits = pos;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos == digits) return false;
  out = mpz_class(s.substr(start, pos - start));
  return true;
}

// Nearest multiple of 2^-bits (ties rounded up): floor((num*2^bits)/den + 1/2).
Dyadic round_nearest_frac(const mpz_class& num, const mpz_class& den, int64_t bits) {
  if (bits < 0) fail(Err::malformed_input, "rounding precision must be nonnegative");
  mpz_class scaled = num * pow2z(static_cast<uint64_t>(bits));
  mpz_class t = 2 * scaled + den;
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), t.get_mpz_t(), mpz_class(2 * den).get_mpz_t());
  return Dyadic::from_parts(q, static_cast<uint64_t>(bits));
}

}  // namespace

Dyadic Dyadic::from_parts(const mpz_class& numerator, uint64_t exponent) {
  Dyadic d;
  mpq_class q(numerator, pow2z(exponent));
  q.canonicalize();
  d.q_ = q;
  return d;
}

Dyadic Dyadic::pow2(int64_t k) {
  return k >= 0 ? Dyadic(pow2z(static_cast<uint64_t>(k)))
                : from_parts(1, static_cast<uint64_t>(-k));
}

uint64_t Dyadic::exponent() const {
  const mpz_class den = q_.get_den();
  return mpz_sizeinbase(den.get_mpz_t(), 2) - 1;
}

Dyadic Dyadic::from_rep(const mpq_class& q) {
  mpq_class c = q;
  c.canonicalize();
  mpz_class den = c.get_den();
  if (!is_pow2(den)) fail(Err::malformed_input, "denominator is not a power of two");
  Dyadic d;
  d.q_ = c;
  return d;
}

Dyadic Dyadic::parse(const std::string& text) {
  size_t pos = 0;
  mpz_class m;
  if (!parse_int(text, pos, m)) fail(Err::malformed_input, "bad dyadic: " + text);
  if (pos == text.size()) return Dyadic(m);  // plain integer accepted
  if (text.compare(pos, 3, "/2^") != 0) fail(Err::malformed_input, "bad dyadic: " + text);
  pos += 3;
  mpz_class n;
  if (!parse_int(text, pos, n) || pos != text.size() || sgn(n) < 0 || !n.fits_ulong_p())
    fail(Err::malformed_input, "bad dyadic exponent: " + text);
  return from_parts(m, n.get_ui());
}

std::string Dyadic::str() const {
  return q_.get_num().get_str() + "/2^" + std::to_string(exponent());
}

Dyadic Dyadic::scaled_pow2(int64_t k) const { return *this * pow2(k); }

bool Dyadic::geq_pow2(int64_t k) const {
  if (sgn(q_) <= 0) return false;
  // value = num * 2^-exp >= 2^k  iff  num >= 2^(k+exp)  iff  bitlen(num) >= k+exp+1
  // (a positive integer with bit length L lies in [2^(L-1), 2^L)).
  const mpz_class num = q_.get_num();
  int64_t bitlen = static_cast<int64_t>(mpz_sizeinbase(num.get_mpz_t(), 2));
  return bitlen >= k + static_cast<int64_t>(exponent()) + 1;
}

Dyadic Dyadic::floor_to(int64_t bits) const {
  if (bits < 0) fail(Err::malformed_input, "rounding precision must be nonnegative");
  mpz_class scaled = q_.get_num() * pow2z(static_cast<uint64_t>(bits));
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), q_.get_den().get_mpz_t());
  return from_parts(q, static_cast<uint64_t>(bits));
}

Dyadic Dyadic::round_nearest(int64_t bits) const {
  return round_nearest_frac(q_.get_num(), q_.get_den(), bits);
}

Rational::Rational(const mpz_class& num, const mpz_class& den) {
  if (sgn(den) == 0) fail(Err::division_by_zero, "rational with zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

Rational Rational::parse(const std::string& text) {
  size_t pos = 0;
  mpz_class p;
  if (!parse_int(text, pos, p)) fail(Err::malformed_input, "bad rational: " + text);
  if (pos == text.size()) return Rational(p);
  if (text[pos] != '/') fail(Err::malformed_input, "bad rational: " + text);
  ++pos;
  mpz_class q;
  if (!parse_int(text, pos, q) || pos != text.size() || sgn(q) <= 0)
    fail(Err::malformed_input, "bad rational denominator: " + text);
  return Rational(p, q);
}

std::string Rational::str() const {
  return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

bool Rational::is_dyadic() const { return is_pow2(q_.get_den()) || q_.get_den() == 1; }

Dyadic Rational::to_dyadic() const { return Dyadic::from_rep(q_); }

Dyadic Rational::round_nearest_dyadic(int64_t bits) const {
  return round_nearest_frac(q_.get_num(), q_.get_den(), bits);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.is_zero()) fail(Err::division_by_zero, "rational division by zero");
  return Rational::wrap(mpq_class(a.q_ / b.q_));
}

}  // namespace cantor
