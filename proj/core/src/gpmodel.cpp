#include "funcdoe/gpmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "funcdoe/annealing.hpp"
#include "funcdoe/error.hpp"

namespace funcdoe {

namespace {

constexpr std::uint64_t kFitStream = 0x5000;
constexpr double kFailedObjective = 1e100;
constexpr double kBoundPenalty = 1e3;

// Factorization of R + nugget I with jitter escalation by factors of ten.
struct Factorization {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double nugget = 0.0;
};

std::optional<Factorization> factorize(const Eigen::MatrixXd& correlation, double nugget) {
  const Eigen::Index n = correlation.rows();
  double current = nugget;
  while (true) {
    Factorization f;
    Eigen::MatrixXd jittered = correlation;
    jittered.diagonal().array() += current;
    f.llt.compute(jittered);
    if (f.llt.info() == Eigen::Success) {
      const auto diag = f.llt.matrixLLT().diagonal();
      bool ok = true;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!(diag[i] > 0.0) || !std::isfinite(diag[i])) {
          ok = false;
          break;
        }
      }
      if (ok) {
        f.nugget = current;
        return f;
      }
    }
    if (current >= kMaxNugget) return std::nullopt;
    current = current > 0.0 ? std::min(current * 10.0, kMaxNugget) : kDefaultNugget;
  }
}

double log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

// D_ij = ||g_i - g_j||_J for the rows g of coefficients * diag(weights).
Eigen::MatrixXd functional_distance_matrix(const Eigen::MatrixXd& coefficients,
                                           const Eigen::MatrixXd& gram,
                                           const Eigen::VectorXd* weights) {
  Eigen::MatrixXd scaled = coefficients;
  if (weights) scaled = coefficients * weights->asDiagonal();
  const Eigen::MatrixXd inner = scaled * gram * scaled.transpose();
  const Eigen::Index n = coefficients.rows();
  Eigen::MatrixXd dist(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double sq = inner(i, i) + inner(j, j) - 2.0 * inner(i, j);
      dist(i, j) = dist(j, i) = std::sqrt(std::max(0.0, sq));
    }
  }
  return dist;
}

Eigen::MatrixXd scalar_distance_matrix(const Eigen::VectorXd& column) {
  const Eigen::Index n = column.size();
  Eigen::MatrixXd dist(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) dist(i, j) = std::abs(column[i] - column[j]);
  }
  return dist;
}

void apply_kernel(Eigen::MatrixXd& correlation, const Eigen::MatrixXd& distance,
                  KernelFamily kernel, double theta) {
  for (Eigen::Index i = 0; i < correlation.rows(); ++i) {
    for (Eigen::Index j = 0; j < correlation.cols(); ++j) {
      correlation(i, j) *= kernel_eval(kernel, distance(i, j), theta);
    }
  }
}

void check_params(const GpParams& params, const TrainingData& data) {
  if (params.theta_s.size() != data.scalar_inputs() ||
      params.theta_f.size() != data.functional_inputs()) {
    throw ParameterError("range parameter count does not match the data");
  }
  if ((params.theta_s.array() <= 0.0).any() || (params.theta_f.array() <= 0.0).any()) {
    throw ParameterError("range parameters must be positive");
  }
  if (params.omega && static_cast<int>(params.omega->size()) != data.functional_inputs()) {
    throw ParameterError("one beta shape per functional input is required");
  }
  if (!(params.nugget >= 0.0)) throw ParameterError("nugget must be nonnegative");
}

// Distances that do not depend on the fitted parameters, cached for the
// likelihood search.
class DistanceCache {
 public:
  DistanceCache(const TrainingData& data, bool weighted) : data_(data), weighted_(weighted) {
    for (int k = 0; k < data.scalar_inputs(); ++k) {
      scalar_.push_back(scalar_distance_matrix(data.scalars.col(k)));
    }
    for (int k = 0; k < data.functional_inputs(); ++k) {
      functional_.push_back(
          functional_distance_matrix(data.functionals[k], data.bases[k]->gram(), nullptr));
    }
  }

  double max_scalar(int k) const { return scalar_[k].maxCoeff(); }
  double max_functional(int k) const { return functional_[k].maxCoeff(); }

  Eigen::MatrixXd correlation(const GpParams& params, KernelFamily kernel) const {
    const int n = data_.runs();
    Eigen::MatrixXd corr = Eigen::MatrixXd::Ones(n, n);
    for (std::size_t k = 0; k < scalar_.size(); ++k) {
      apply_kernel(corr, scalar_[k], kernel, params.theta_s[k]);
    }
    for (std::size_t k = 0; k < functional_.size(); ++k) {
      if (weighted_ && params.omega) {
        const auto& shape = (*params.omega)[k];
        const WeightMatrix w = beta_weight_matrix(shape.alpha, shape.beta, *data_.bases[k]);
        const Eigen::MatrixXd dist = functional_distance_matrix(
            data_.functionals[k], data_.bases[k]->gram(), &w.diagonal());
        apply_kernel(corr, dist, kernel, params.theta_f[k]);
      } else {
        apply_kernel(corr, functional_[k], kernel, params.theta_f[k]);
      }
    }
    return corr;
  }

 private:
  const TrainingData& data_;
  bool weighted_;
  std::vector<Eigen::MatrixXd> scalar_;
  std::vector<Eigen::MatrixXd> functional_;
};

std::optional<ProfileLikelihood> profile_from_correlation(const Eigen::MatrixXd& correlation,
                                                          const Eigen::VectorXd& y,
                                                          double nugget) {
  auto f = factorize(correlation, nugget);
  if (!f) return std::nullopt;
  const Eigen::Index n = y.size();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd r_ones = f->llt.solve(ones);
  const Eigen::VectorXd r_y = f->llt.solve(y);
  ProfileLikelihood out;
  out.mu = ones.dot(r_y) / ones.dot(r_ones);
  const Eigen::VectorXd resid = y - out.mu * ones;
  out.sigma2 = resid.dot(r_y - out.mu * r_ones) / static_cast<double>(n);
  out.nugget = f->nugget;
  if (!(out.sigma2 > 0.0) || !std::isfinite(out.sigma2)) return std::nullopt;
  out.log_likelihood = -0.5 * n * std::log(2.0 * std::numbers::pi * out.sigma2) -
                       0.5 * log_det(f->llt) - 0.5 * static_cast<double>(n);
  if (!std::isfinite(out.log_likelihood)) return std::nullopt;
  return out;
}

// Log-space parameter vector layout: theta_s, theta_f, then (alpha, beta)
// per functional input when weighted.
struct ParameterSpace {
  int scalar_inputs = 0;
  int functional_inputs = 0;
  bool weighted = false;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dims() const { return static_cast<int>(lower.size()); }

  GpParams decode(const Eigen::VectorXd& z, double nugget) const {
    GpParams p;
    p.nugget = nugget;
    p.theta_s = z.head(scalar_inputs).array().exp();
    p.theta_f = z.segment(scalar_inputs, functional_inputs).array().exp();
    if (weighted) {
      std::vector<BetaShape> shapes(functional_inputs);
      const int base = scalar_inputs + functional_inputs;
      for (int k = 0; k < functional_inputs; ++k) {
        shapes[k] = {std::exp(z[base + 2 * k]), std::exp(z[base + 2 * k + 1])};
      }
      p.omega = std::move(shapes);
    }
    return p;
  }
};

struct Objective {
  const DistanceCache* cache;
  const ParameterSpace* space;
  const TrainingData* data;
  KernelFamily kernel;
  double nugget;
  int evaluations = 0;
  int failures = 0;
  double best_value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_z;

  // Negative profile log-likelihood plus a quadratic penalty outside bounds.
  double operator()(const Eigen::VectorXd& z) {
    ++evaluations;
    const Eigen::VectorXd clamped = z.cwiseMax(space->lower).cwiseMin(space->upper);
    const double penalty = kBoundPenalty * (z - clamped).squaredNorm();
    const GpParams params = space->decode(clamped, nugget);
    const auto profile =
        profile_from_correlation(cache->correlation(params, kernel), data->y, nugget);
    if (!profile) {
      ++failures;
      return kFailedObjective + penalty;
    }
    const double value = -profile->log_likelihood + penalty;
    if (value < best_value) {
      best_value = value;
      best_z = clamped;
    }
    return value;
  }
};

double gsl_objective(const gsl_vector* x, void* context) {
  auto* objective = static_cast<Objective*>(context);
  Eigen::VectorXd z(static_cast<Eigen::Index>(x->size));
  for (std::size_t i = 0; i < x->size; ++i) z[static_cast<Eigen::Index>(i)] = gsl_vector_get(x, i);
  return (*objective)(z);
}

struct GslVectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct GslMinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
using GslVector = std::unique_ptr<gsl_vector, GslVectorDeleter>;
using GslMinimizer = std::unique_ptr<gsl_multimin_fminimizer, GslMinimizerDeleter>;

// Nelder-Mead simplex search (GSL nmsimplex2) from `start`; returns the
// iteration count. Best point is tracked by the objective itself.
int simplex_search(Objective& objective, const Eigen::VectorXd& start, const Eigen::VectorXd& step,
                   int max_evaluations, double tolerance) {
  gsl_set_error_handler_off();
  const std::size_t dims = static_cast<std::size_t>(start.size());
  GslVector x(gsl_vector_alloc(dims));
  GslVector steps(gsl_vector_alloc(dims));
  for (std::size_t i = 0; i < dims; ++i) {
    gsl_vector_set(x.get(), i, start[static_cast<Eigen::Index>(i)]);
    gsl_vector_set(steps.get(), i, step[static_cast<Eigen::Index>(i)]);
  }
  gsl_multimin_function function{&gsl_objective, dims, &objective};
  GslMinimizer minimizer(gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dims));
  if (gsl_multimin_fminimizer_set(minimizer.get(), &function, x.get(), steps.get()) != GSL_SUCCESS) {
    return 0;
  }
  int iterations = 0;
  const int budget_start = objective.evaluations;
  while (objective.evaluations - budget_start < max_evaluations) {
    ++iterations;
    if (gsl_multimin_fminimizer_iterate(minimizer.get()) != GSL_SUCCESS) break;
    const double size = gsl_multimin_fminimizer_size(minimizer.get());
    if (gsl_multimin_test_size(size, tolerance) == GSL_SUCCESS) break;
  }
  return iterations;
}

}  // namespace

std::string_view kernel_name(KernelFamily family) noexcept {
  switch (family) {
    case KernelFamily::kGaussian:
      return "gauss";
    case KernelFamily::kMatern52:
      return "matern52";
  }
  return "unknown";
}

KernelFamily parse_kernel(std::string_view name) {
  if (name == "gauss" || name == "gaussian") return KernelFamily::kGaussian;
  if (name == "matern52") return KernelFamily::kMatern52;
  throw ParameterError("unknown kernel '" + std::string(name) + "'");
}

double kernel_eval(KernelFamily family, double h, double theta) {
  if (!(theta > 0.0)) throw ParameterError("kernel range must be positive");
  const double a = std::abs(h) / theta;
  switch (family) {
    case KernelFamily::kGaussian:
      return std::exp(-0.5 * a * a);
    case KernelFamily::kMatern52: {
      const double s = std::sqrt(5.0) * a;
      return (1.0 + s + s * s / 3.0) * std::exp(-s);
    }
  }
  throw ParameterError("unknown kernel family");
}

TrainingData TrainingData::from_design(const Design& design, Eigen::VectorXd y) {
  design.validate();
  TrainingData data;
  data.scalars = design.scalars;
  if (data.scalars.cols() == 0) data.scalars.resize(design.runs(), 0);
  data.functionals = design.functionals;
  data.bases.assign(design.functionals.size(), design.basis);
  data.y = std::move(y);
  data.validate();
  return data;
}

TrainingData TrainingData::from_points(std::span<const RunPoint> points, Eigen::VectorXd y) {
  if (points.empty()) throw ParameterError("no training points");
  const int n = static_cast<int>(points.size());
  const auto d_s = points.front().scalars.size();
  const auto d_f = points.front().functions.size();
  TrainingData data;
  data.scalars.resize(n, d_s);
  for (std::size_t k = 0; k < d_f; ++k) {
    data.bases.push_back(points.front().functions[k].basis_ptr());
    data.functionals.emplace_back(n, data.bases.back()->size());
  }
  for (int i = 0; i < n; ++i) {
    const RunPoint& p = points[i];
    if (p.scalars.size() != d_s || p.functions.size() != d_f) {
      throw ParameterError("training points have inconsistent dimensions");
    }
    if (d_s > 0) data.scalars.row(i) = p.scalars.transpose();
    for (std::size_t k = 0; k < d_f; ++k) {
      if (!(p.functions[k].basis() == *data.bases[k])) {
        throw ParameterError("functional input uses inconsistent bases");
      }
      data.functionals[k].row(i) = p.functions[k].coefficients().transpose();
    }
  }
  data.y = std::move(y);
  data.validate();
  return data;
}

RunPoint TrainingData::point(int i) const {
  RunPoint p;
  p.scalars = scalars.row(i).transpose();
  for (std::size_t k = 0; k < functionals.size(); ++k) {
    p.functions.emplace_back(bases[k], functionals[k].row(i).transpose());
  }
  return p;
}

void TrainingData::validate() const {
  const int n = runs();
  if (n < 2) throw ParameterError("at least two training runs are required");
  if (!y.allFinite()) throw ParameterError("outputs must be finite");
  if (scalars.rows() != n) throw ParameterError("scalar input row count differs from outputs");
  if (bases.size() != functionals.size()) throw ParameterError("one basis per functional input");
  for (std::size_t k = 0; k < functionals.size(); ++k) {
    if (!bases[k]) throw ParameterError("missing basis");
    if (functionals[k].rows() != n || functionals[k].cols() != bases[k]->size()) {
      throw ParameterError("functional input matrix has the wrong shape");
    }
  }
}

std::optional<WeightMatrix> functional_weights(const GpParams& params, const BSplineBasis& basis,
                                               int input) {
  if (!params.omega) return std::nullopt;
  const auto& shape = params.omega->at(input);
  return beta_weight_matrix(shape.alpha, shape.beta, basis);
}

double correlation(const RunPoint& a, const RunPoint& b, const GpParams& params,
                   KernelFamily kernel) {
  if (a.scalars.size() != b.scalars.size() || a.functions.size() != b.functions.size()) {
    throw ParameterError("run points have different input dimensions");
  }
  if (params.theta_s.size() != a.scalars.size() ||
      params.theta_f.size() != static_cast<Eigen::Index>(a.functions.size())) {
    throw ParameterError("range parameter count does not match the inputs");
  }
  double value = 1.0;
  for (Eigen::Index k = 0; k < a.scalars.size(); ++k) {
    value *= kernel_eval(kernel, a.scalars[k] - b.scalars[k], params.theta_s[k]);
  }
  for (std::size_t k = 0; k < a.functions.size(); ++k) {
    const auto w = functional_weights(params, a.functions[k].basis(), static_cast<int>(k));
    const double d = w ? weighted_functional_dist(a.functions[k], b.functions[k], *w)
                       : functional_dist(a.functions[k], b.functions[k]);
    value *= kernel_eval(kernel, d, params.theta_f[static_cast<Eigen::Index>(k)]);
  }
  return value;
}

Eigen::MatrixXd correlation_matrix(const TrainingData& data, const GpParams& params,
                                   KernelFamily kernel) {
  data.validate();
  check_params(params, data);
  return DistanceCache(data, params.weighted()).correlation(params, kernel);
}

double log_likelihood(const GpParams& params, const TrainingData& data, KernelFamily kernel) {
  if (!(params.sigma2 > 0.0)) throw ParameterError("process variance must be positive");
  const auto f = factorize(correlation_matrix(data, params, kernel), params.nugget);
  if (!f) throw IllConditionedError("correlation matrix is not positive definite");
  const Eigen::Index n = data.y.size();
  const Eigen::VectorXd resid = data.y.array() - params.mu;
  const double quad = resid.dot(f->llt.solve(resid));
  return -0.5 * n * std::log(2.0 * std::numbers::pi * params.sigma2) - 0.5 * log_det(f->llt) -
         0.5 * quad / params.sigma2;
}

ProfileLikelihood profile_likelihood(const GpParams& params, const TrainingData& data,
                                     KernelFamily kernel) {
  const auto profile =
      profile_from_correlation(correlation_matrix(data, params, kernel), data.y, params.nugget);
  if (!profile) throw IllConditionedError("correlation matrix is not positive definite");
  return *profile;
}

GpModel::GpModel(TrainingData data, KernelFamily kernel, GpParams params)
    : data_(std::move(data)), kernel_(kernel), params_(std::move(params)) {
  data_.validate();
  check_params(params_, data_);
  if (!(params_.sigma2 > 0.0)) throw ParameterError("process variance must be positive");
  auto f = factorize(DistanceCache(data_, params_.weighted()).correlation(params_, kernel_),
                     params_.nugget);
  if (!f) throw IllConditionedError("correlation matrix is not positive definite");
  llt_ = std::move(f->llt);
  params_.nugget = f->nugget;
  alpha_ = llt_.solve((data_.y.array() - params_.mu).matrix());
}

GpModel GpModel::fit(TrainingData data, KernelFamily kernel, const FitOptions& options) {
  data.validate();
  if (options.multistart < 1) throw ParameterError("multistart count must be positive");
  if (options.max_evaluations < 1) throw ParameterError("evaluation budget must be positive");
  const auto& bounds = options.bounds;
  if (!(bounds.theta_lower > 0.0) || !(bounds.omega_lower > 0.0) ||
      !(bounds.omega_upper > bounds.omega_lower)) {
    throw ParameterError("invalid parameter bounds");
  }

  const bool weighted = options.weighting && data.functional_inputs() > 0;
  const DistanceCache cache(data, weighted);

  ParameterSpace space;
  space.scalar_inputs = data.scalar_inputs();
  space.functional_inputs = data.functional_inputs();
  space.weighted = weighted;
  const int dims = space.scalar_inputs + space.functional_inputs * (weighted ? 3 : 1);
  space.lower.resize(dims);
  space.upper.resize(dims);
  const double log_lower = std::log(bounds.theta_lower);
  auto theta_upper = [&](double max_distance) {
    return std::log(std::max(bounds.theta_upper_factor * max_distance, 10.0 * bounds.theta_lower));
  };
  for (int k = 0; k < space.scalar_inputs; ++k) {
    space.lower[k] = log_lower;
    space.upper[k] = theta_upper(cache.max_scalar(k));
  }
  for (int k = 0; k < space.functional_inputs; ++k) {
    space.lower[space.scalar_inputs + k] = log_lower;
    space.upper[space.scalar_inputs + k] = theta_upper(cache.max_functional(k));
  }
  for (int k = space.scalar_inputs + space.functional_inputs; k < dims; ++k) {
    space.lower[k] = std::log(bounds.omega_lower);
    space.upper[k] = std::log(bounds.omega_upper);
  }

  Objective objective{&cache, &space, &data, kernel, options.nugget, 0, 0,
                      std::numeric_limits<double>::infinity(), Eigen::VectorXd()};

  // Random starts, uniform in log-space; the best one seeds the simplex.
  Rng rng = make_rng(options.seed, kFitStream);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Eigen::VectorXd> starts;
  for (int s = 0; s < options.multistart; ++s) {
    Eigen::VectorXd z(dims);
    for (int d = 0; d < dims; ++d) z[d] = space.lower[d] + unit(rng) * (space.upper[d] - space.lower[d]);
    starts.push_back(std::move(z));
  }
  if (weighted) {
    // The unweighted optimum embedded at omega = (1,1), where uniform weights
    // shrink every functional distance by 1/K.
    FitOptions plain = options;
    plain.weighting = false;
    const GpModel nested = fit(data, kernel, plain);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(dims);
    z.head(space.scalar_inputs) = nested.params().theta_s.array().log();
    for (int k = 0; k < space.functional_inputs; ++k) {
      z[space.scalar_inputs + k] = std::log(nested.params().theta_f[k] / data.bases[k]->size());
    }
    starts.push_back(z.cwiseMax(space.lower).cwiseMin(space.upper));
  }

  Eigen::VectorXd best_start;
  double best_start_value = std::numeric_limits<double>::infinity();
  int failed = 0;
  for (const Eigen::VectorXd& z : starts) {
    const int failures_before = objective.failures;
    const double value = objective(z);
    if (objective.failures != failures_before) {
      ++failed;
      continue;
    }
    if (value < best_start_value) {
      best_start_value = value;
      best_start = z;
    }
  }
  if (best_start.size() == 0) {
    throw IllConditionedError("likelihood could not be evaluated at any starting point");
  }

  const int start_evaluations = objective.evaluations;
  const Eigen::VectorXd step = 0.1 * (space.upper - space.lower);
  const int iterations =
      simplex_search(objective, best_start, step, options.max_evaluations, options.tolerance);

  GpParams params = space.decode(objective.best_z, options.nugget);
  const auto profile =
      profile_from_correlation(cache.correlation(params, kernel), data.y, options.nugget);
  if (!profile) throw IllConditionedError("correlation matrix is not positive definite");
  params.mu = profile->mu;
  params.sigma2 = profile->sigma2;
  params.nugget = profile->nugget;

  GpModel model(std::move(data), kernel, std::move(params));
  model.diagnostics_.log_likelihood = profile->log_likelihood;
  model.diagnostics_.starts = options.multistart;
  model.diagnostics_.failed_starts = failed;
  model.diagnostics_.evaluations = objective.evaluations - start_evaluations;
  model.diagnostics_.iterations = iterations;
  return model;
}

double GpModel::log_likelihood() const {
  const Eigen::Index n = data_.y.size();
  const Eigen::VectorXd resid = data_.y.array() - params_.mu;
  return -0.5 * n * std::log(2.0 * std::numbers::pi * params_.sigma2) - 0.5 * log_det(llt_) -
         0.5 * resid.dot(alpha_) / params_.sigma2;
}

double GpModel::cross_correlation(const RunPoint& point, int train,
                                  const std::vector<WeightMatrix>& weights) const {
  double value = 1.0;
  bool identical = true;
  for (int k = 0; k < data_.scalar_inputs(); ++k) {
    const double h = point.scalars[k] - data_.scalars(train, k);
    identical = identical && h == 0.0;
    value *= kernel_eval(kernel_, h, params_.theta_s[k]);
  }
  for (int k = 0; k < data_.functional_inputs(); ++k) {
    const Eigen::VectorXd delta =
        point.functions[k].coefficients() - data_.functionals[k].row(train).transpose();
    identical = identical && (delta.array() == 0.0).all();
    const Eigen::MatrixXd& gram = data_.bases[k]->gram();
    const double sq = weights.empty() ? gram_norm_sq(gram, delta)
                                      : weighted_gram_norm_sq(gram, weights[k].diagonal(), delta);
    value *= kernel_eval(kernel_, std::sqrt(sq), params_.theta_f[k]);
  }
  // The nugget acts on coinciding inputs, so training points are reproduced.
  if (identical) value += params_.nugget;
  return value;
}

std::vector<Prediction> GpModel::predict(std::span<const RunPoint> points) const {
  std::vector<WeightMatrix> weights;
  if (params_.omega) {
    for (int k = 0; k < data_.functional_inputs(); ++k) {
      weights.push_back(*functional_weights(params_, *data_.bases[k], k));
    }
  }
  const int n = data_.runs();
  std::vector<Prediction> out;
  out.reserve(points.size());
  Eigen::VectorXd r(n);
  for (const RunPoint& point : points) {
    if (point.scalars.size() != data_.scalar_inputs() ||
        static_cast<int>(point.functions.size()) != data_.functional_inputs()) {
      throw ParameterError("prediction point has the wrong input dimensions");
    }
    for (int k = 0; k < data_.functional_inputs(); ++k) {
      if (!(point.functions[k].basis() == *data_.bases[k])) {
        throw ParameterError("prediction point uses a different basis");
      }
    }
    for (int i = 0; i < n; ++i) r[i] = cross_correlation(point, i, weights);
    Prediction p;
    p.mean = params_.mu + r.dot(alpha_);
    const double reduction = r.dot(llt_.solve(r));
    p.variance = params_.sigma2 * std::max(0.0, 1.0 + params_.nugget - reduction);
    out.push_back(p);
  }
  return out;
}

std::vector<Prediction> GpModel::loo() const {
  const int n = data_.runs();
  if (n < 3) throw ParameterError("leave-one-out needs at least three runs");
  const Eigen::MatrixXd inverse = llt_.solve(Eigen::MatrixXd::Identity(n, n));
  std::vector<Prediction> out(n);
  for (int i = 0; i < n; ++i) {
    const double precision = inverse(i, i);
    out[i].mean = data_.y[i] - alpha_[i] / precision;
    out[i].variance = params_.sigma2 / precision;
  }
  return out;
}

Eigen::VectorXd GpModel::sensitivity() const {
  const int d_s = data_.scalar_inputs();
  const int d_f = data_.functional_inputs();
  Eigen::VectorXd out(d_s + d_f);
  for (int k = 0; k < d_s; ++k) out[k] = 1.0 - kernel_eval(kernel_, 1.0, params_.theta_s[k]);
  for (int k = 0; k < d_f; ++k) {
    // Distance between the constant curves 1 and 0: one when unweighted,
    // sqrt(w' J w) under weights w.
    double unit = 1.0;
    if (const auto w = functional_weights(params_, *data_.bases[k], k)) {
      unit = std::sqrt(gram_norm_sq(data_.bases[k]->gram(), w->diagonal()));
    }
    out[d_s + k] = 1.0 - kernel_eval(kernel_, unit, params_.theta_f[k]);
  }
  return out;
}

WeightProfile GpModel::weight_profile(int input, int grid) const {
  if (!params_.omega) throw ParameterError("model was fitted without weighting");
  if (input < 0 || input >= data_.functional_inputs()) {
    throw ParameterError("functional input index out of range");
  }
  if (grid < 2) throw ParameterError("profile grid needs at least two points");
  const BSplineBasis& basis = *data_.bases[input];
  WeightProfile profile;
  profile.omega = (*params_.omega)[input];
  profile.weights = functional_weights(params_, basis, input)->diagonal();
  profile.grid.resize(grid);
  profile.values.resize(grid);
  for (int g = 0; g < grid; ++g) {
    const double t = static_cast<double>(g) / (grid - 1);
    profile.grid[g] = t;
    profile.values[g] = profile.weights.dot(basis.eval_all(t));
  }
  profile.mean_location = profile.weights.dot(basis.moments(1)) / profile.weights.dot(basis.moments(0));
  return profile;
}

}  // namespace funcdoe
