#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace soco {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when an iterative routine exhausts its iteration budget. Carries the
/// last residual seen so callers can report how close the solve got.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace soco
