#pragma once

#include <functional>
#include <optional>

#include "cantor/error.hpp"

namespace testutil {

// Runs fn and reports the failure category it raised, if any.
template <typename Fn>
std::optional<cantor::Err> thrown_kind(Fn&& fn) {
  try {
    fn();
  } catch (const cantor::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

template <typename Fn>
bool throws_kind(cantor::Err want, Fn&& fn) {
  auto got = thrown_kind(std::forward<Fn>(fn));
  return got.has_value() && *got == want;
}

}  // namespace testutil
