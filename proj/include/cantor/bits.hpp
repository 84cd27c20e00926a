#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cantor/error.hpp"

namespace cantor {

// Finite binary string. The empty string is the root of Cantor space; every
// container of Bits in this library iterates in length-lexicographic order.
class Bits {
public:
  Bits() = default;
  static Bits parse(const std::string& s);  // alphabet {0,1} only
  static Bits zeros(size_t n) { return Bits(std::string(n, '0')); }
  static Bits ones(size_t n) { return Bits(std::string(n, '1')); }
  static Bits of_value(uint64_t value, size_t width);  // big-endian, zero padded

  size_t size() const { return s_.size(); }
  bool empty() const { return s_.empty(); }
  int bit(size_t i) const { return s_[i] - '0'; }
  int last() const { return s_.back() - '0'; }

  void push_back(int b) { s_.push_back(b ? '1' : '0'); }
  void pop_back() { s_.pop_back(); }
  Bits child(int b) const {
    Bits c(*this);
    c.push_back(b);
    return c;
  }
  Bits prefix(size_t n) const { return Bits(s_.substr(0, n)); }
  Bits operator+(const Bits& o) const { return Bits(s_ + o.s_); }

  bool is_prefix_of(const Bits& o) const {
    return s_.size() <= o.s_.size() && o.s_.compare(0, s_.size(), s_) == 0;
  }
  bool is_proper_prefix_of(const Bits& o) const {
    return s_.size() < o.s_.size() && o.s_.compare(0, s_.size(), s_) == 0;
  }

  const std::string& str() const { return s_; }

  friend bool operator==(const Bits& a, const Bits& b) { return a.s_ == b.s_; }
  friend bool operator!=(const Bits& a, const Bits& b) { return a.s_ != b.s_; }
  // Ordering for containers: length-lexicographic.
  friend bool operator<(const Bits& a, const Bits& b) {
    if (a.s_.size() != b.s_.size()) return a.s_.size() < b.s_.size();
    return a.s_ < b.s_;
  }

private:
  explicit Bits(std::string s) : s_(std::move(s)) {}
  std::string s_;
};

// Length-lexicographic comparison: shorter strings first, then lexicographic.
int llex_cmp(const Bits& a, const Bits& b);

// Index-string pair ordered by the well-ordering used for request scheduling:
// x before x' length-lexicographically, then m <= m'.
struct Indexed {
  int64_t m = 0;
  Bits x;
};
int indexed_cmp(const Indexed& a, const Indexed& b);

inline bool operator<(const Indexed& a, const Indexed& b) { return indexed_cmp(a, b) < 0; }
inline bool operator==(const Indexed& a, const Indexed& b) { return a.m == b.m && a.x == b.x; }

// All strings of the given length in lexicographic order.
std::vector<Bits> all_strings(size_t len);

}  // namespace cantor
