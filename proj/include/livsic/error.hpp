#pragma once

#include <stdexcept>
#include <string>

namespace livsic {

enum class ErrorKind {
  precondition,
  not_hyperbolic,
  reducible,
  enumeration_cap,
  poo_failure,
  grid_mismatch,
  ill_conditioned,
  monotonicity,
  return_claim,
  sparse_atlas,
  non_convergence,
  config,
  io,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so the harness can map
/// it to an exit status and a structured error record.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace livsic
