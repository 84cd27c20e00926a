#include "cantor/bits.hpp"

namespace cantor {

Bits Bits::parse(const std::string& s) {
  for (char c : s)
    if (c != '0' && c != '1') fail(Err::malformed_input, "bit string has character '" + std::string(1, c) + "'");
  return Bits(s);
}

Bits Bits::of_value(uint64_t value, size_t width) {
  std::string s(width, '0');
  for (size_t i = 0; i < width; ++i)
    if (value >> (width - 1 - i) & 1) s[i] = '1';
  return Bits(s);
}

int llex_cmp(const Bits& a, const Bits& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  int c = a.str().compare(b.str());
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

int indexed_cmp(const Indexed& a, const Indexed& b) {
  int c = llex_cmp(a.x, b.x);
  if (c != 0) return c;
  if (a.m != b.m) return a.m < b.m ? -1 : 1;
  return 0;
}

std::vector<Bits> all_strings(size_t len) {
  if (len > 24) fail(Err::precondition_violated, "refusing to enumerate strings longer than 24");
  std::vector<Bits> out;
  out.reserve(size_t{1} << len);
  for (uint64_t v = 0; v < (uint64_t{1} << len); ++v) out.push_back(Bits::of_value(v, len));
  return out;
}

}  // namespace cantor
