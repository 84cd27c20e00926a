#include "cantor/sequence.hpp"

namespace cantor {

struct SequenceSource::Impl {
  Kind kind;
  int c = 0;         // constant
  Bits word;         // periodic / explicit
  mpz_class p, q;    // rational
  std::string label;
};

SequenceSource SequenceSource::constant(int bit) {
  if (bit != 0 && bit != 1) fail(Err::malformed_input, "constant sequence bit must be 0 or 1");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::constant;
  impl->c = bit;
  impl->label = "constant(" + std::to_string(bit) + ")";
  return SequenceSource(std::move(impl));
}

SequenceSource SequenceSource::periodic(const Bits& word) {
  if (word.empty()) fail(Err::malformed_input, "periodic sequence needs a nonempty word");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::periodic;
  impl->word = word;
  impl->label = "periodic(" + word.str() + ")";
  return SequenceSource(std::move(impl));
}

SequenceSource SequenceSource::concat_llex() {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::concat_llex;
  impl->label = "concat_llex";
  return SequenceSource(std::move(impl));
}

SequenceSource SequenceSource::rational(const mpz_class& p, const mpz_class& q) {
  if (sgn(q) <= 0) fail(Err::malformed_input, "rational sequence needs q > 0");
  if (sgn(p) < 0 || p >= q) fail(Err::malformed_input, "rational sequence needs 0 <= p < q");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::rational;
  impl->p = p;
  impl->q = q;
  impl->label = "rational(" + p.get_str() + "/" + q.get_str() + ")";
  return SequenceSource(std::move(impl));
}

SequenceSource SequenceSource::explicit_bits(const Bits& bits) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::explicit_bits;
  impl->word = bits;
  impl->label = "bits(" + std::to_string(bits.size()) + ")";
  return SequenceSource(std::move(impl));
}

SequenceSource SequenceSource::from_ascii(const std::string& text) {
  Bits b;
  for (char c : text) {
    if (c == '0' || c == '1')
      b.push_back(c - '0');
    else if (c != ' ' && c != '\n' && c != '\r' && c != '\t')
      fail(Err::malformed_input, "sequence text has character '" + std::string(1, c) + "'");
  }
  return explicit_bits(b);
}

namespace {

// Bit i of the infinite concatenation of all strings in llex order.
int concat_llex_bit(int64_t i) {
  // Lengths contribute len * 2^len bits each.
  int64_t offset = 0;
  for (int64_t len = 1;; ++len) {
    if (len > 40) fail(Err::overflow, "concatenation index out of range");
    int64_t block = len << len;
    if (i < offset + block) {
      int64_t within = i - offset;
      uint64_t index = static_cast<uint64_t>(within / len);
      int64_t pos = within % len;
      return static_cast<int>(index >> (len - 1 - pos) & 1);
    }
    offset += block;
  }
}

}  // namespace

int SequenceSource::bit(int64_t i) const {
  if (i < 0) fail(Err::malformed_input, "sequence position must be nonnegative");
  switch (p_->kind) {
    case Kind::constant:
      return p_->c;
    case Kind::periodic:
      return p_->word.bit(static_cast<size_t>(i % static_cast<int64_t>(p_->word.size())));
    case Kind::concat_llex:
      return concat_llex_bit(i);
    case Kind::rational: {
      // Coefficient of 2^-(i+1): floor(p * 2^(i+1) / q) mod 2.
      mpz_class scaled;
      mpz_mul_2exp(scaled.get_mpz_t(), p_->p.get_mpz_t(), static_cast<mp_bitcnt_t>(i + 1));
      mpz_class quot = scaled / p_->q;
      return mpz_tstbit(quot.get_mpz_t(), 0) ? 1 : 0;
    }
    case Kind::explicit_bits:
      if (i >= static_cast<int64_t>(p_->word.size()))
        fail(Err::horizon_exhausted, "explicit sequence has only " + std::to_string(p_->word.size()) + " bits");
      return p_->word.bit(static_cast<size_t>(i));
  }
  fail(Err::precondition_violated, "unreachable sequence kind");
}

Bits SequenceSource::prefix(int64_t n) const {
  Bits out;
  for (int64_t i = 0; i < n; ++i) out.push_back(bit(i));
  return out;
}

SequenceSource::Kind SequenceSource::kind() const { return p_->kind; }
std::string SequenceSource::describe() const { return p_->label; }

Rational lln_statistic(const SequenceSource& xi, int64_t n) {
  if (n <= 0) fail(Err::malformed_input, "statistic needs n >= 1");
  int64_t ones = 0;
  for (int64_t i = 0; i < n; ++i) ones += xi.bit(i);
  return Rational(mpz_class(ones), mpz_class(n));
}

}  // namespace cantor
