#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace brw {

using Real = double;
using Vector = Eigen::VectorXd;
using Array = Eigen::ArrayXd;

/// Malformed or out-of-range input (config documents, law parameters).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A standing hypothesis of the model does not hold for the requested run.
class HypothesisError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerically degenerate input (zero variance window, empty set, ...).
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Every replicate of an experiment hit the particle cap.
class AllCappedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace brw
