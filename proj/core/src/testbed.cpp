#include "funcdoe/testbed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "funcdoe/error.hpp"

namespace funcdoe {

namespace {

constexpr std::uint64_t kTestPointStream = 0x6000;
constexpr std::uint64_t kWeightingStream = 0x7000;
constexpr std::uint64_t kOrderStream = 0x8000;
constexpr std::uint64_t kExample1Stream = 0x9000;

constexpr double kPi = std::numbers::pi;

void check_test_point(const RunPoint& point) {
  if (point.scalars.size() != kTestScalarInputs ||
      point.functions.size() != static_cast<std::size_t>(kTestFunctionalInputs)) {
    throw ParameterError("test functions take 3 scalar and 3 functional inputs");
  }
}

// \int t^p f(t) dt for a B-spline curve, exact via the basis moments.
double curve_moment(const FunctionalCurve& f, int power) {
  return f.coefficients().dot(f.basis().moments(power));
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng rng = make_rng(seed, stream);
  return rng();
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

}  // namespace

std::string_view test_function_name(TestFunctionId id) noexcept {
  return id == TestFunctionId::kG1 ? "g1" : "g2";
}

TestFunctionId parse_test_function(std::string_view name) {
  if (name == "g1") return TestFunctionId::kG1;
  if (name == "g2") return TestFunctionId::kG2;
  throw ParameterError("unknown test function '" + std::string(name) + "'");
}

double g1(const RunPoint& point) {
  check_test_point(point);
  return point.scalars[0] + 2.0 * point.scalars[1] + 4.0 * curve_moment(point.functions[0], 1) +
         curve_moment(point.functions[1], 0);
}

double branin(double x1, double x2) {
  const double a = x2 - 5.1 / (4.0 * kPi * kPi) * x1 * x1 + 5.0 / kPi * x1 - 6.0;
  return a * a + 10.0 * (1.0 - 1.0 / (8.0 * kPi)) * std::cos(x1) + 10.0;
}

double g2(const RunPoint& point) {
  check_test_point(point);
  const double x1 = -5.0 + 15.0 * point.scalars[0];
  const double x2 = 15.0 * point.scalars[1];
  const FunctionalCurve& f1 = point.functions[0];
  const FunctionalCurve& f2 = point.functions[1];
  const double f1_term = 42.0 * (curve_moment(f1, 0) - curve_moment(f1, 1));
  const double f2_term = kPi * ((x1 + 5.0) / 5.0 + 15.0) * curve_moment(f2, 1);
  return branin(x1, x2) + 4.0 / 3.0 * kPi * (f1_term + f2_term);
}

double evaluate(TestFunctionId id, const RunPoint& point) {
  return id == TestFunctionId::kG1 ? g1(point) : g2(point);
}

Eigen::VectorXd evaluate(TestFunctionId id, std::span<const RunPoint> points) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    y[static_cast<Eigen::Index>(i)] = evaluate(id, points[i]);
  }
  return y;
}

std::vector<RunPoint> random_test_points(int count, int scalar_inputs, int functional_inputs,
                                         BasisPtr basis, std::uint64_t seed) {
  if (count < 1) throw ParameterError("test set size must be positive");
  if (scalar_inputs < 0 || functional_inputs < 0) throw ParameterError("negative input count");
  if (functional_inputs > 0 && !basis) throw ParameterError("functional inputs need a basis");
  Rng rng = make_rng(seed, kTestPointStream);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<RunPoint> points(count);
  for (auto& point : points) {
    point.scalars.resize(scalar_inputs);
    for (int k = 0; k < scalar_inputs; ++k) point.scalars[k] = unit(rng);
    for (int k = 0; k < functional_inputs; ++k) {
      Eigen::VectorXd beta(basis->size());
      for (int i = 0; i < basis->size(); ++i) beta[i] = unit(rng);
      point.functions.emplace_back(basis, std::move(beta));
    }
  }
  return points;
}

double rmse(std::span<const double> predicted, std::span<const double> truth) {
  if (predicted.size() != truth.size()) throw ParameterError("rmse inputs differ in length");
  if (predicted.empty()) throw ParameterError("rmse of an empty set");
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double r = predicted[i] - truth[i];
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(predicted.size()));
}

EvalReport evaluate_model(const GpModel& model, std::span<const RunPoint> test_points,
                          const Eigen::VectorXd& truth) {
  if (static_cast<Eigen::Index>(test_points.size()) != truth.size()) {
    throw ParameterError("test outputs do not match test points");
  }
  const auto predictions = model.predict(test_points);
  std::vector<double> predicted(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) predicted[i] = predictions[i].mean;
  const std::vector<double> expected(truth.data(), truth.data() + truth.size());

  EvalReport report;
  report.rmse = rmse(predicted, expected);
  const double range = truth.maxCoeff() - truth.minCoeff();
  report.normalized_rmse = range > 0.0 ? report.rmse / range : report.rmse;
  report.residuals.resize(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) report.residuals[i] = predicted[i] - expected[i];
  report.runs = model.data().runs();
  if (!model.data().bases.empty()) {
    report.basis_size = model.data().bases.front()->size();
    report.basis_order = model.data().bases.front()->order();
  }
  report.sensitivity = model.sensitivity();
  return report;
}

WeightingSummary experiment_weighting(const ExperimentSettings& settings) {
  if (settings.replications < 1) throw ParameterError("replication count must be positive");
  WeightingSummary summary;
  summary.replications.resize(settings.replications);
  for (int r = 0; r < settings.replications; ++r) {
    WeightingReplication& rep = summary.replications[r];
    rep.index = r;
    const std::uint64_t seed = derived_seed(settings.seed, kWeightingStream + r);
    try {
      DesignRequest request;
      request.runs = settings.runs;
      request.scalar_inputs = kTestScalarInputs;
      request.functional_inputs = kTestFunctionalInputs;
      request.basis_size = settings.basis_size;
      request.basis_order = settings.basis_order;
      request.sa = settings.sa;
      request.seed = seed;
      const Design design = generate_design(request);
      const auto train = design.run_points();
      const Eigen::VectorXd y = evaluate(TestFunctionId::kG2, train);
      const auto test = random_test_points(settings.test_size, kTestScalarInputs,
                                           kTestFunctionalInputs, design.basis, seed);
      const Eigen::VectorXd truth = evaluate(TestFunctionId::kG2, test);

      FitOptions options = settings.fit;
      options.seed = seed;
      options.weighting = false;
      const GpModel plain = GpModel::fit(TrainingData::from_design(design, y), settings.kernel, options);
      options.weighting = true;
      const GpModel weighted =
          GpModel::fit(TrainingData::from_design(design, y), settings.kernel, options);

      rep.unweighted = evaluate_model(plain, test, truth);
      rep.weighted = evaluate_model(weighted, test, truth);
      for (EvalReport* report : {&rep.unweighted, &rep.weighted}) {
        report->seed = seed;
        report->basis_order = settings.basis_order;
      }
      rep.ok = true;
    } catch (const Error& e) {
      rep.error = e.what();
    }
  }

  std::vector<double> w, u, wn, un;
  int wins = 0;
  for (const auto& rep : summary.replications) {
    if (!rep.ok) continue;
    ++summary.succeeded;
    w.push_back(rep.weighted.rmse);
    u.push_back(rep.unweighted.rmse);
    wn.push_back(rep.weighted.normalized_rmse);
    un.push_back(rep.unweighted.normalized_rmse);
    if (rep.weighted.normalized_rmse < rep.unweighted.normalized_rmse) ++wins;
  }
  summary.mean_weighted_rmse = mean_of(w);
  summary.mean_unweighted_rmse = mean_of(u);
  summary.mean_weighted_normalized = mean_of(wn);
  summary.mean_unweighted_normalized = mean_of(un);
  summary.weighted_win_fraction =
      summary.succeeded > 0 ? static_cast<double>(wins) / summary.succeeded : 0.0;
  return summary;
}

OrderSummary experiment_order(std::span<const int> orders, const ExperimentSettings& settings) {
  if (settings.replications < 1) throw ParameterError("replication count must be positive");
  if (orders.empty()) throw ParameterError("no spline orders given");
  OrderSummary summary;
  for (const int order : orders) {
    if (order < 1 || order > settings.basis_size) {
      throw ParameterError("spline order must lie in [1, K]");
    }
    const BasisPtr basis = make_basis(settings.basis_size, order);
    // Common random numbers: every order sees the same seeds, so the
    // scalar parts of designs and test sets coincide across orders.
    const std::uint64_t order_seed = derived_seed(settings.seed, kOrderStream);
    const auto test = random_test_points(settings.test_size, kTestScalarInputs,
                                         kTestFunctionalInputs, basis, order_seed);
    const Eigen::VectorXd truth = evaluate(TestFunctionId::kG2, test);

    OrderRow row;
    row.order = order;
    std::vector<double> values;
    for (int r = 0; r < settings.replications; ++r) {
      OrderReplication rep;
      rep.order = order;
      rep.index = r;
      const std::uint64_t seed = derived_seed(order_seed, r + 1);
      try {
        DesignRequest request;
        request.runs = settings.runs;
        request.scalar_inputs = kTestScalarInputs;
        request.functional_inputs = kTestFunctionalInputs;
        request.basis_size = settings.basis_size;
        request.basis_order = order;
        request.sa = settings.sa;
        request.seed = seed;
        const Design design = generate_design(request);
        const Eigen::VectorXd y = evaluate(TestFunctionId::kG2, design.run_points());
        FitOptions options = settings.fit;
        options.seed = seed;
        options.weighting = false;
        const GpModel model =
            GpModel::fit(TrainingData::from_design(design, y), settings.kernel, options);
        rep.report = evaluate_model(model, test, truth);
        rep.report.seed = seed;
        rep.ok = true;
        values.push_back(rep.report.rmse);
        ++row.succeeded;
      } catch (const Error& e) {
        rep.error = e.what();
        ++row.failed;
      }
      summary.replications.push_back(std::move(rep));
    }
    row.mean_rmse = mean_of(values);
    double ss = 0.0;
    for (double v : values) ss += (v - row.mean_rmse) * (v - row.mean_rmse);
    row.sd_rmse = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
    summary.rows.push_back(row);
  }
  return summary;
}

Example1Result experiment_example1(const ExperimentSettings& settings) {
  const std::uint64_t seed = derived_seed(settings.seed, kExample1Stream);
  DesignRequest request;
  request.runs = settings.runs;
  request.scalar_inputs = kTestScalarInputs;
  request.functional_inputs = kTestFunctionalInputs;
  request.basis_size = settings.basis_size;
  request.basis_order = settings.basis_order;
  request.sa = settings.sa;
  request.seed = seed;
  const Design design = generate_design(request);
  const Eigen::VectorXd y = evaluate(TestFunctionId::kG1, design.run_points());

  FitOptions options = settings.fit;
  options.seed = seed;
  options.weighting = true;
  const GpModel model = GpModel::fit(TrainingData::from_design(design, y), settings.kernel, options);

  Example1Result result;
  result.sensitivity = model.sensitivity();
  result.f1_profile = model.weight_profile(0, 101);
  result.f2_profile = model.weight_profile(1, 101);
  const auto& s = result.sensitivity;
  // Order: x1, x2, x3, f1, f2, f3.
  const double strong = std::min(s[1], s[3]);
  const double medium_hi = std::max(s[0], s[4]);
  const double medium_lo = std::min(s[0], s[4]);
  const double inactive = std::max(s[2], s[5]);
  result.ranking_ok = strong > medium_hi && medium_lo > inactive;
  result.location_ok = result.f1_profile.mean_location > 0.5;
  return result;
}

}  // namespace funcdoe
