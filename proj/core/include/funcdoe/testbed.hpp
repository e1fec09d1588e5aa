#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "funcdoe/design.hpp"
#include "funcdoe/gpmodel.hpp"
#include "funcdoe/metric.hpp"

namespace funcdoe {

enum class TestFunctionId { kG1, kG2 };

std::string_view test_function_name(TestFunctionId id) noexcept;
TestFunctionId parse_test_function(std::string_view name);

inline constexpr int kTestScalarInputs = 3;
inline constexpr int kTestFunctionalInputs = 3;

/// x1 + 2 x2 + 4 \int t f1(t) dt + \int f2(t) dt. x3 and f3 are inactive.
double g1(const RunPoint& point);

/// Branin on (x1, x2) mapped from [0,1]^2 to [-5,10] x [0,15], plus
/// (4 pi / 3) (42 \int f1(t)(1-t) dt + pi ((x1 + 5)/5 + 15) \int t f2(t) dt)
/// with x1 in Branin coordinates. x3 and f3 are inactive.
double g2(const RunPoint& point);

/// The Branin part of g2 in natural coordinates.
double branin(double x1, double x2);

double evaluate(TestFunctionId id, const RunPoint& point);
Eigen::VectorXd evaluate(TestFunctionId id, std::span<const RunPoint> points);

/// Scalars i.i.d. U[0,1] and curve coefficients i.i.d. U[0,1].
std::vector<RunPoint> random_test_points(int count, int scalar_inputs, int functional_inputs,
                                         BasisPtr basis, std::uint64_t seed);

double rmse(std::span<const double> predicted, std::span<const double> truth);

struct EvalReport {
  double rmse = 0.0;
  double normalized_rmse = 0.0;  // rmse / (max - min) of the true test outputs
  std::vector<double> residuals;
  std::uint64_t seed = 0;
  int runs = 0;
  int basis_size = 0;
  int basis_order = 0;
  Eigen::VectorXd sensitivity;
};

/// Builds an EvalReport from a fitted model on a test set.
EvalReport evaluate_model(const GpModel& model, std::span<const RunPoint> test_points,
                          const Eigen::VectorXd& truth);

struct ExperimentSettings {
  int runs = 40;
  int basis_size = 7;
  int basis_order = 4;
  int test_size = 300;
  int replications = 20;
  std::uint64_t seed = 1;
  KernelFamily kernel = KernelFamily::kMatern52;
  FitOptions fit;  // weighting and seed are set per model
  SaConfig sa;
};

struct WeightingReplication {
  int index = 0;
  bool ok = false;
  std::string error;
  EvalReport weighted;
  EvalReport unweighted;
};

struct WeightingSummary {
  std::vector<WeightingReplication> replications;
  int succeeded = 0;
  double mean_weighted_rmse = 0.0;
  double mean_unweighted_rmse = 0.0;
  double mean_weighted_normalized = 0.0;
  double mean_unweighted_normalized = 0.0;
  double weighted_win_fraction = 0.0;  // share of successful replications
};

/// Per replication: generalized LHD, g2 outputs, weighted and unweighted
/// fits, RMSE on a fresh random test set.
WeightingSummary experiment_weighting(const ExperimentSettings& settings);

struct OrderReplication {
  int order = 0;
  int index = 0;
  bool ok = false;
  std::string error;
  EvalReport report;
};

struct OrderRow {
  int order = 0;
  int succeeded = 0;
  int failed = 0;
  double mean_rmse = 0.0;
  double sd_rmse = 0.0;
};

struct OrderSummary {
  std::vector<OrderRow> rows;
  std::vector<OrderReplication> replications;
};

/// For each order: one test set, then `replications` designs and
/// unweighted fits on g2, all with the same number of basis functions.
OrderSummary experiment_order(std::span<const int> orders, const ExperimentSettings& settings);

struct Example1Result {
  Eigen::VectorXd sensitivity;  // x1, x2, x3, f1, f2, f3
  WeightProfile f1_profile;
  WeightProfile f2_profile;
  bool ranking_ok = false;
  bool location_ok = false;
};

/// Weighted fit of g1 on one generalized LHD.
Example1Result experiment_example1(const ExperimentSettings& settings);

}  // namespace funcdoe
