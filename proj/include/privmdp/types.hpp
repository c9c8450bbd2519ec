#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace privmdp {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Eigen::VectorXd;
using MatrixXd = Eigen::MatrixXd;

namespace tol {
/// Absolute tolerance on probability-vector sums.
inline constexpr double kSimplex = 1e-9;
inline constexpr double kLpFeasibility = 1e-8;
inline constexpr double kLpOptimality = 1e-8;
inline constexpr double kLpPivot = 1e-11;
}  // namespace tol

/// True when a sum of `n` probabilities misses 1 by more than summation
/// roundoff. Rows already divided by their sum stay put, so renormalizing
/// is idempotent and JSON round trips keep every bit.
inline bool beyond_roundoff(double sum, Index n) {
  return std::abs(sum - 1.0) > static_cast<double>(n + 1) * std::numeric_limits<double>::epsilon();
}

/// Raised when an input violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Direction { Min, Max };

}  // namespace privmdp
