#pragma once

#include <vector>

#include <Eigen/Dense>

#include "funcdoe/bspline.hpp"

namespace funcdoe {

/// One run of an experiment: d_s scalar inputs in [0,1] and d_f functional
/// inputs.
struct RunPoint {
  Eigen::VectorXd scalars;
  std::vector<FunctionalCurve> functions;
};

/// Diagonal of W(omega): nonnegative entries with unit sum.
class WeightMatrix {
 public:
  explicit WeightMatrix(Eigen::VectorXd diagonal);

  static WeightMatrix uniform(int size);

  const Eigen::VectorXd& diagonal() const noexcept { return diagonal_; }
  Eigen::Index size() const noexcept { return diagonal_.size(); }

 private:
  Eigen::VectorXd diagonal_;
};

/// Squared L2 distance delta' J delta for a coefficient difference.
double gram_norm_sq(const Eigen::MatrixXd& gram, const Eigen::Ref<const Eigen::VectorXd>& delta);

/// Weighted squared distance (W delta)' J (W delta).
double weighted_gram_norm_sq(const Eigen::MatrixXd& gram, const Eigen::VectorXd& weights,
                             const Eigen::Ref<const Eigen::VectorXd>& delta);

double functional_dist(const FunctionalCurve& f, const FunctionalCurve& g);
double weighted_functional_dist(const FunctionalCurve& f, const FunctionalCurve& g,
                                const WeightMatrix& weights);

/// sqrt(|x_a - x_b|^2 + sum_k D_f(f_ak, f_bk)^2).
double combined_dist(const RunPoint& a, const RunPoint& b);

/// Beta(alpha, beta) density at each basis peak, normalized to unit trace.
/// Peaks are clipped to [1e-6, 1 - 1e-6] so the density stays finite.
WeightMatrix beta_weight_matrix(double alpha, double beta, const BSplineBasis& basis);

/// Unnormalized beta density; exposed for tests.
double beta_density(double t, double alpha, double beta);

inline constexpr double kBetaPeakClip = 1e-6;

}  // namespace funcdoe
