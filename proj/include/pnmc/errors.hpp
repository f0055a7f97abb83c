#pragma once

#include <stdexcept>
#include <string>

namespace pnmc {

enum class ErrorKind {
  degenerate_span,
  lightlike_step,
  out_of_domain,
  not_spacelike,
  degenerate_metric,
  not_normal,
  minimal_point,
  frame_degenerate,
  frame_flip,
  not_orthogonal,
  not_separable,
  quadrature_failure,
  non_monotone,
  domain_violation,
  grid_too_small,
  grid_mismatch,
  mu_vanishes,
  drift_exceeded,
  io_error,
  config_error,
};

const char* to_string(ErrorKind kind);

/// Failure raised by the geometry kernels. Carries a machine-readable kind
/// so callers (and the CLI error report) can dispatch without string parsing.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace pnmc
