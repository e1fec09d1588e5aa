#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "funcdoe/bspline.hpp"
#include "funcdoe/design.hpp"
#include "funcdoe/metric.hpp"

namespace funcdoe {

enum class KernelFamily { kGaussian, kMatern52 };

std::string_view kernel_name(KernelFamily family) noexcept;
/// Accepts "gauss", "gaussian" and "matern52".
KernelFamily parse_kernel(std::string_view name);

/// Stationary correlation g(h; theta), with g(0) = 1.
///   gaussian: exp(-h^2 / (2 theta^2))
///   matern52: (1 + sqrt5 h/theta + 5 h^2 / (3 theta^2)) exp(-sqrt5 h/theta)
double kernel_eval(KernelFamily family, double h, double theta);

struct BetaShape {
  double alpha = 1.0;
  double beta = 1.0;
};

inline constexpr double kDefaultNugget = 1e-8;
inline constexpr double kMaxNugget = 1e-4;

struct GpParams {
  double mu = 0.0;
  double sigma2 = 1.0;
  Eigen::VectorXd theta_s;
  Eigen::VectorXd theta_f;
  // One beta shape per functional input; present iff weighting is enabled.
  std::optional<std::vector<BetaShape>> omega;
  double nugget = kDefaultNugget;

  bool weighted() const noexcept { return omega.has_value(); }
};

/// Training inputs stored column-wise: scalars (n x d_s), one n x K
/// coefficient matrix per functional input, and outputs y.
struct TrainingData {
  Eigen::MatrixXd scalars;
  std::vector<Eigen::MatrixXd> functionals;
  std::vector<BasisPtr> bases;
  Eigen::VectorXd y;

  static TrainingData from_design(const Design& design, Eigen::VectorXd y);
  static TrainingData from_points(std::span<const RunPoint> points, Eigen::VectorXd y);

  int runs() const noexcept { return static_cast<int>(y.size()); }
  int scalar_inputs() const noexcept { return static_cast<int>(scalars.cols()); }
  int functional_inputs() const noexcept { return static_cast<int>(functionals.size()); }
  RunPoint point(int i) const;

  void validate() const;
};

/// Weight matrix used for functional input k, or nullopt when unweighted.
std::optional<WeightMatrix> functional_weights(const GpParams& params, const BSplineBasis& basis,
                                               int input);

/// Tensor-product correlation of two runs, without the nugget.
double correlation(const RunPoint& a, const RunPoint& b, const GpParams& params,
                   KernelFamily kernel);

/// n x n correlation matrix of the training inputs, without the nugget.
Eigen::MatrixXd correlation_matrix(const TrainingData& data, const GpParams& params,
                                   KernelFamily kernel);

/// log N(y; mu 1, sigma2 (R + nugget I)) at fixed parameters. Throws
/// IllConditionedError if R + nugget I is not positive definite.
double log_likelihood(const GpParams& params, const TrainingData& data, KernelFamily kernel);

/// Likelihood with mu and sigma2 replaced by their closed-form maximizers
/// for the ranges (and beta shapes) in `params`.
struct ProfileLikelihood {
  double log_likelihood = 0.0;
  double mu = 0.0;
  double sigma2 = 0.0;
  double nugget = 0.0;  // after jitter escalation
};
ProfileLikelihood profile_likelihood(const GpParams& params, const TrainingData& data,
                                     KernelFamily kernel);

struct ParameterBounds {
  double theta_lower = 1e-3;
  double theta_upper_factor = 10.0;  // times the largest pairwise distance per input
  double omega_lower = 0.05;
  double omega_upper = 50.0;
};

struct FitOptions {
  bool weighting = false;
  int multistart = 50;
  std::uint64_t seed = 0;
  int max_evaluations = 500;
  double tolerance = 1e-8;
  double nugget = kDefaultNugget;
  ParameterBounds bounds;
};

struct FitDiagnostics {
  double log_likelihood = 0.0;
  int starts = 0;
  int failed_starts = 0;
  int evaluations = 0;
  int iterations = 0;
};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

struct WeightProfile {
  BetaShape omega;
  Eigen::VectorXd weights;  // normalized W diagonal
  std::vector<double> grid;
  std::vector<double> values;
  /// \int t p(t) dt / \int p(t) dt for the profile p.
  double mean_location = 0.0;
};

/// Constant-trend Gaussian-process surrogate over scalar and functional
/// inputs. Immutable once constructed.
class GpModel {
 public:
  /// Builds a model at given parameters; refactorizes the correlation matrix,
  /// escalating the nugget when needed.
  GpModel(TrainingData data, KernelFamily kernel, GpParams params);

  static GpModel fit(TrainingData data, KernelFamily kernel, const FitOptions& options);

  const TrainingData& data() const noexcept { return data_; }
  const GpParams& params() const noexcept { return params_; }
  KernelFamily kernel() const noexcept { return kernel_; }
  bool weighted() const noexcept { return params_.weighted(); }
  const FitDiagnostics& diagnostics() const noexcept { return diagnostics_; }

  /// Lower Cholesky factor of R + nugget I.
  Eigen::MatrixXd factor() const { return llt_.matrixL(); }

  double log_likelihood() const;

  std::vector<Prediction> predict(std::span<const RunPoint> points) const;

  /// Hold-one-out predictions with all parameters frozen.
  std::vector<Prediction> loo() const;

  /// 1 - g(u_k; theta_k) for the scalar inputs followed by the functional
  /// inputs, where u_k is the distance between the two extremes of input k:
  /// 1 for scalars and unweighted curves, sqrt(w' J w) for weighted curves
  /// (the weighted distance between f = 1 and f = 0).
  Eigen::VectorXd sensitivity() const;

  WeightProfile weight_profile(int input, int grid) const;

 private:
  double cross_correlation(const RunPoint& point, int train, const std::vector<WeightMatrix>& w) const;

  TrainingData data_;
  KernelFamily kernel_;
  GpParams params_;
  FitDiagnostics diagnostics_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;  // (R + nugget I)^-1 (y - mu 1)
};

}  // namespace funcdoe
