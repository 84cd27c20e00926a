#pragma once

#include <stdexcept>
#include <string>

namespace cantor {

// Failure categories surfaced by the library. The CLI maps malformed_input
// to exit code 2 and everything else to exit code 1.
enum class Err {
  malformed_input,
  weight_exceeded,
  infeasible_step,
  horizon_exhausted,
  control_violated,
  measure_bound_violated,
  precondition_violated,
  division_by_zero,
  overflow,
};

class Error : public std::runtime_error {
public:
  Error(Err kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Err kind() const { return kind_; }

private:
  Err kind_;
};

[[noreturn]] inline void fail(Err kind, const std::string& msg) { throw Error(kind, msg); }

inline const char* err_name(Err e) {
  switch (e) {
    case Err::malformed_input: return "malformed-input";
    case Err::weight_exceeded: return "weight-exceeded";
    case Err::infeasible_step: return "infeasible-step";
    case Err::horizon_exhausted: return "horizon-exhausted";
    case Err::control_violated: return "control-violated";
    case Err::measure_bound_violated: return "measure-bound-violated";
    case Err::precondition_violated: return "precondition-violated";
    case Err::division_by_zero: return "division-by-zero";
    case Err::overflow: return "overflow";
  }
  return "unknown";
}

}  // namespace cantor
