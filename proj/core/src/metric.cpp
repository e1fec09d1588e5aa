#include "funcdoe/metric.hpp"

#include <algorithm>
#include <cmath>

#include "funcdoe/error.hpp"

namespace funcdoe {

namespace {

void check_same_basis(const FunctionalCurve& f, const FunctionalCurve& g) {
  if (!(f.basis() == g.basis())) {
    throw ParameterError("curves are defined on different bases");
  }
}

}  // namespace

WeightMatrix::WeightMatrix(Eigen::VectorXd diagonal) : diagonal_(std::move(diagonal)) {
  if (diagonal_.size() == 0) throw ParameterError("empty weight matrix");
  if ((diagonal_.array() < 0.0).any() || !diagonal_.allFinite()) {
    throw ParameterError("weights must be finite and nonnegative");
  }
  if (std::abs(diagonal_.sum() - 1.0) > 1e-12) {
    throw ParameterError("weights must sum to one");
  }
}

WeightMatrix WeightMatrix::uniform(int size) {
  if (size < 1) throw ParameterError("weight matrix size must be positive");
  return WeightMatrix(Eigen::VectorXd::Constant(size, 1.0 / size));
}

double gram_norm_sq(const Eigen::MatrixXd& gram, const Eigen::Ref<const Eigen::VectorXd>& delta) {
  // Guard against tiny negative round-off from the quadratic form.
  return std::max(0.0, delta.dot(gram * delta));
}

double weighted_gram_norm_sq(const Eigen::MatrixXd& gram, const Eigen::VectorXd& weights,
                             const Eigen::Ref<const Eigen::VectorXd>& delta) {
  const Eigen::VectorXd scaled = weights.cwiseProduct(delta);
  return std::max(0.0, scaled.dot(gram * scaled));
}

double functional_dist(const FunctionalCurve& f, const FunctionalCurve& g) {
  check_same_basis(f, g);
  return std::sqrt(gram_norm_sq(f.basis().gram(), f.coefficients() - g.coefficients()));
}

double weighted_functional_dist(const FunctionalCurve& f, const FunctionalCurve& g,
                                const WeightMatrix& weights) {
  check_same_basis(f, g);
  if (weights.size() != f.basis().size()) {
    throw ParameterError("weight matrix size does not match basis size");
  }
  return std::sqrt(weighted_gram_norm_sq(f.basis().gram(), weights.diagonal(),
                                         f.coefficients() - g.coefficients()));
}

double combined_dist(const RunPoint& a, const RunPoint& b) {
  if (a.scalars.size() != b.scalars.size() || a.functions.size() != b.functions.size()) {
    throw ParameterError("run points have different input dimensions");
  }
  double sq = (a.scalars - b.scalars).squaredNorm();
  for (std::size_t k = 0; k < a.functions.size(); ++k) {
    const double d = functional_dist(a.functions[k], b.functions[k]);
    sq += d * d;
  }
  return std::sqrt(sq);
}

double beta_density(double t, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw ParameterError("beta parameters must be positive");
  }
  const double log_norm = std::lgamma(alpha + beta) - std::lgamma(alpha) - std::lgamma(beta);
  return std::exp(log_norm + (alpha - 1.0) * std::log(t) + (beta - 1.0) * std::log1p(-t));
}

WeightMatrix beta_weight_matrix(double alpha, double beta, const BSplineBasis& basis) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw ParameterError("beta parameters must be positive");
  }
  const int size = basis.size();
  // Log-densities, shifted by their maximum before exponentiation; the
  // normalizing constant cancels in the trace normalization.
  Eigen::VectorXd log_density(size);
  for (int i = 0; i < size; ++i) {
    const double t = std::clamp(basis.peak(i), kBetaPeakClip, 1.0 - kBetaPeakClip);
    log_density[i] = (alpha - 1.0) * std::log(t) + (beta - 1.0) * std::log1p(-t);
  }
  Eigen::VectorXd diagonal = (log_density.array() - log_density.maxCoeff()).exp().matrix();
  diagonal /= diagonal.sum();
  return WeightMatrix(std::move(diagonal));
}

}  // namespace funcdoe
