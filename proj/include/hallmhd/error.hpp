#pragma once

#include <stdexcept>
#include <string>

namespace hallmhd {

// Error taxonomy. Every throw carries enough context (sizes, names, values)
// to reproduce the failing call.

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UnsupportedElement : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct MissingCoefficient : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SolverFailure : std::runtime_error {
  double final_residual;
  int iterations;
  SolverFailure(const std::string& msg, double res, int iters)
      : std::runtime_error(msg + " (residual " + std::to_string(res) +
                           " after " + std::to_string(iters) + " iterations)"),
        final_residual(res), iterations(iters) {}
};

struct SingularMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonlinearDivergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FixedPointDivergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InconsistentField : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hallmhd
