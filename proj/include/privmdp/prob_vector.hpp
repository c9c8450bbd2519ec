#pragma once

#include "privmdp/types.hpp"

#include <optional>
#include <string>

namespace privmdp {

/// A point on the unit simplex.
///
/// Construction accepts vectors whose sum is within tol::kSimplex of one and
/// divides them by their sum; whether that happened is kept in
/// `renormalized()`.
class ProbVector {
 public:
  ProbVector() = default;

  /// Throws InvalidInput with the reason from `violation()` on failure.
  static ProbVector from(VectorXd entries);
  /// Validates like `from` but keeps the entries exactly as given.
  static ProbVector exact(VectorXd entries);
  static ProbVector uniform(Index n);
  static ProbVector point_mass(Index n, Index i);

  /// Describes why `entries` is not a probability vector, if it is not.
  static std::optional<std::string> violation(const Eigen::Ref<const VectorXd>& entries);

  const VectorXd& vec() const { return p_; }
  Index size() const { return p_.size(); }
  double operator[](Index i) const { return p_[i]; }

  bool is_interior() const { return p_.size() > 0 && p_.minCoeff() > 0.0; }
  bool renormalized() const { return renormalized_; }

  friend bool operator==(const ProbVector& a, const ProbVector& b) { return a.p_ == b.p_; }

 private:
  explicit ProbVector(VectorXd p, bool renormalized) : p_(std::move(p)), renormalized_(renormalized) {}

  VectorXd p_;
  bool renormalized_ = false;
};

/// (1 - floor) * p + floor * uniform. Never applied implicitly.
ProbVector smooth(const ProbVector& p, double floor);

}  // namespace privmdp
