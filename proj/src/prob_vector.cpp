#include "privmdp/prob_vector.hpp"

#include <cmath>
#include <sstream>

namespace privmdp {

std::optional<std::string> ProbVector::violation(const Eigen::Ref<const VectorXd>& entries) {
  if (entries.size() == 0) return "empty probability vector";
  for (Index i = 0; i < entries.size(); ++i) {
    if (!std::isfinite(entries[i])) {
      std::ostringstream os;
      os << "non-finite entry at index " << i;
      return os.str();
    }
    if (entries[i] < 0.0) {
      std::ostringstream os;
      os << "negative entry " << entries[i] << " at index " << i;
      return os.str();
    }
  }
  const double sum = entries.sum();
  if (std::abs(sum - 1.0) > tol::kSimplex) {
    std::ostringstream os;
    os << "row sum " << sum << " ≠ 1";
    return os.str();
  }
  return std::nullopt;
}

ProbVector ProbVector::from(VectorXd entries) {
  if (auto why = violation(entries)) throw InvalidInput("invalid probability vector: " + *why);
  const double sum = entries.sum();
  const bool renorm = beyond_roundoff(sum, entries.size());
  if (renorm) entries /= sum;
  return ProbVector(std::move(entries), renorm);
}

ProbVector ProbVector::exact(VectorXd entries) {
  if (auto why = violation(entries)) throw InvalidInput("invalid probability vector: " + *why);
  return ProbVector(std::move(entries), false);
}

ProbVector ProbVector::uniform(Index n) {
  if (n <= 0) throw InvalidInput("uniform: dimension must be positive");
  return ProbVector(VectorXd::Constant(n, 1.0 / static_cast<double>(n)), false);
}

ProbVector ProbVector::point_mass(Index n, Index i) {
  if (i < 0 || i >= n) throw InvalidInput("point_mass: index out of range");
  VectorXd p = VectorXd::Zero(n);
  p[i] = 1.0;
  return ProbVector(std::move(p), false);
}

ProbVector smooth(const ProbVector& p, double floor) {
  if (!(floor >= 0.0 && floor <= 1.0)) throw InvalidInput("smooth: floor must lie in [0, 1]");
  const auto n = static_cast<double>(p.size());
  VectorXd out = (1.0 - floor) * p.vec() + VectorXd::Constant(p.size(), floor / n);
  return ProbVector::from(std::move(out));
}

}  // namespace privmdp
