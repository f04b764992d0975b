#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace robustagg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Invalid user input: malformed config, out-of-domain argument, bad data file.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure at runtime: diverged solve, non-finite loss, LP that
/// cannot be certified to tolerance.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally valid input that the requested method cannot handle
/// (e.g. a non-separable cost handed to the LP reformulation).
class unsupported_instance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw config_error(msg);
}

}  // namespace robustagg
