#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "cantor/bits.hpp"
#include "cantor/dyadic.hpp"

namespace cantor {

// Deterministic infinite binary sequence, evaluable bit by bit. Sources built
// from finite material (explicit bits, files) are total only up to their
// length and refuse positions beyond it.
class SequenceSource {
public:
  enum class Kind { constant, periodic, concat_llex, rational, explicit_bits };

  static SequenceSource constant(int bit);
  static SequenceSource periodic(const Bits& word);
  // Concatenation of all binary strings in length-lexicographic order.
  static SequenceSource concat_llex();
  // Binary expansion of p/q in [0,1); position i holds the coefficient of 2^-(i+1).
  static SequenceSource rational(const mpz_class& p, const mpz_class& q);
  static SequenceSource explicit_bits(const Bits& bits);
  static SequenceSource from_ascii(const std::string& text);  // 0/1, whitespace ignored

  int bit(int64_t i) const;
  Bits prefix(int64_t n) const;

  Kind kind() const;
  std::string describe() const;  // echo string for reports

private:
  struct Impl;
  explicit SequenceSource(std::shared_ptr<const Impl> p) : p_(std::move(p)) {}
  std::shared_ptr<const Impl> p_;
};

// Fraction of ones among the first n bits, exact.
Rational lln_statistic(const SequenceSource& xi, int64_t n);

}  // namespace cantor
