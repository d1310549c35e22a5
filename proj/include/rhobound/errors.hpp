#pragma once

#include <stdexcept>
#include <string>

namespace rhobound {

// Bad user input: malformed config, out-of-domain argument, invalid data file.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A requested certificate does not exist for the given instance
// (e.g. contraction factor >= 1, empty admissible exponent interval).
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical breakdown: non-convergence, overflow, loss of positivity.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularMatrixError : NumericError {
  SingularMatrixError(const std::string& what, double lambda_min_)
      : NumericError(what), lambda_min(lambda_min_) {}
  double lambda_min;
};

}  // namespace rhobound
