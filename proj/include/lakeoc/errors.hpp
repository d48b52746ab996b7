#pragma once

#include <stdexcept>
#include <string>

namespace lakeoc {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A costate component is zero: the maximizing control is undefined there.
struct SingularControlError : NumericalError {
  int node;
  explicit SingularControlError(int node_index)
      : NumericalError("singular control: costate vanishes at node " +
                       std::to_string(node_index)),
        node(node_index) {}
};

// Point violates P > 0 or lambda < 0.
struct AdmissibilityError : NumericalError {
  using NumericalError::NumericalError;
};

struct NonConvergenceError : NumericalError {
  double last_residual;
  NonConvergenceError(const std::string& what, double residual)
      : NumericalError(what), last_residual(residual) {}
};

struct SpecificationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace lakeoc
