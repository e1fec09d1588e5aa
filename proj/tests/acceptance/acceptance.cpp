// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "funcdoe/cli/app.hpp"
#include "funcdoe/design.hpp"
#include "funcdoe/error.hpp"
#include "funcdoe/gpmodel.hpp"
#include "funcdoe/testbed.hpp"
#include "oracles.hpp"

using namespace funcdoe;
namespace fs = std::filesystem;

namespace {

// Collects failed checks of one criterion; the first few are reported.
struct Checks {
  int total = 0;
  int failed = 0;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    ++total;
    if (ok) return;
    ++failed;
    if (notes.size() < 5) notes.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    expect(std::abs(got - want) <= tol,
           fmt::format("{}: got {:.17g} want {:.17g} tol {:.1e}", what, got, want, tol));
  }
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome from_checks(const Checks& c) {
  std::string detail = fmt::format("{} checks, {} failed", c.total, c.failed);
  for (const auto& n : c.notes) detail += "; " + n;
  return {c.failed == 0, detail};
}

// Composite Simpson rule on each interval between breakpoints, with end
// nodes nudged inside the interval so jumps at breakpoints do not leak in.
struct SimpsonGrid {
  std::vector<double> nodes;
  std::vector<double> weights;

  SimpsonGrid(const std::vector<double>& breaks, int panels_per_span) {
    const int p = panels_per_span + panels_per_span % 2;
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
      const double a = breaks[s], b = breaks[s + 1];
      const double h = (b - a) / p;
      for (int k = 0; k <= p; ++k) {
        double t = a + k * h;
        if (k == 0) t = std::nextafter(a, b);
        if (k == p) t = std::nextafter(b, a);
        nodes.push_back(t);
        weights.push_back(h / 3.0 * (k == 0 || k == p ? 1.0 : (k % 2 ? 4.0 : 2.0)));
      }
    }
  }

  // Rows: nodes, columns: basis functions, via the literal recursion.
  Eigen::MatrixXd basis_values(int size, int order) const {
    const auto knots = oracle::clamped_knots(size, order);
    Eigen::MatrixXd v(static_cast<Eigen::Index>(nodes.size()), size);
    for (std::size_t r = 0; r < nodes.size(); ++r) {
      for (int i = 0; i < size; ++i) v(static_cast<Eigen::Index>(r), i) = oracle::bspline(knots, i, order, nodes[r]);
    }
    return v;
  }

  Eigen::Map<const Eigen::VectorXd> w() const {
    return {weights.data(), static_cast<Eigen::Index>(weights.size())};
  }
};

std::vector<RunPoint> random_points(int n, int d_s, int d_f, const BasisPtr& basis,
                                    std::mt19937_64& rng) {
  std::vector<RunPoint> points(n);
  for (auto& p : points) {
    p.scalars = oracle::uniform_vector(d_s, rng);
    for (int k = 0; k < d_f; ++k) p.functions.emplace_back(basis, oracle::uniform_vector(basis->size(), rng));
  }
  return points;
}

Eigen::VectorXd smooth_outputs(std::span<const RunPoint> points) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    double v = 0.0;
    for (Eigen::Index k = 0; k < points[i].scalars.size(); ++k) v += std::sin(3.0 * points[i].scalars[k] + k);
    for (const auto& f : points[i].functions) v += 2.0 * f(0.7) - f(0.2);
    y[static_cast<Eigen::Index>(i)] = v;
  }
  return y;
}

GpParams make_params(int d_s, int d_f, double theta, double mu, double sigma2) {
  GpParams p;
  p.mu = mu;
  p.sigma2 = sigma2;
  p.theta_s = Eigen::VectorXd::Constant(d_s, theta);
  p.theta_f = Eigen::VectorXd::Constant(d_f, theta);
  return p;
}

// Correlation as an explicit product of per-input kernels.
double product_correlation(const RunPoint& a, const RunPoint& b, const GpParams& p,
                           KernelFamily kernel) {
  double out = 1.0;
  for (Eigen::Index k = 0; k < a.scalars.size(); ++k) {
    out *= kernel_eval(kernel, std::abs(a.scalars[k] - b.scalars[k]), p.theta_s[k]);
  }
  for (std::size_t k = 0; k < a.functions.size(); ++k) {
    double h = functional_dist(a.functions[k], b.functions[k]);
    if (p.omega) {
      const auto w = beta_weight_matrix((*p.omega)[k].alpha, (*p.omega)[k].beta, a.functions[k].basis());
      h = weighted_functional_dist(a.functions[k], b.functions[k], w);
    }
    out *= kernel_eval(kernel, h, p.theta_f[k]);
  }
  return out;
}

Eigen::MatrixXd correlation_oracle(std::span<const RunPoint> points, const GpParams& p,
                                   KernelFamily kernel) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd r(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) r(i, j) = product_correlation(points[i], points[j], p, kernel);
  }
  return r;
}

bool is_level_column(Eigen::VectorXd column) {
  std::sort(column.data(), column.data() + column.size());
  const auto n = column.size();
  const Eigen::VectorXd levels = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
  return (column - levels).cwiseAbs().maxCoeff() < 1e-15;
}

Eigen::MatrixXd run_distances(const Design& design) {
  const auto runs = design.run_points();
  const auto n = static_cast<Eigen::Index>(runs.size());
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = combined_dist(runs[i], runs[j]);
  }
  return d;
}

// ---------------------------------------------------------------------------

Outcome bspline_suite() {
  Checks c;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int m = 1; m <= 5; ++m) {
    for (int k = m; k <= 12; ++k) {
      const BSplineBasis basis(k, m);
      const auto knots = oracle::clamped_knots(k, m);
      const std::string tag = fmt::format("K={} m={}", k, m);

      for (int s = 0; s < 200; ++s) {
        const double t = s == 0 ? 0.0 : s == 1 ? 1.0 : unit(rng);
        double sum = 0.0;
        for (int i = 0; i < k; ++i) {
          const double v = basis.eval(i, t);
          c.expect(v >= 0.0, tag + " negative value");
          if (t < knots[i] || t > knots[i + m]) c.expect(v == 0.0, tag + " support leak");
          c.near(v, oracle::bspline(knots, i, m, t), 1e-12, tag + " recursion");
          sum += v;
        }
        c.near(sum, 1.0, 1e-12, tag + " partition of unity");
      }

      const Eigen::MatrixXd& j = basis.gram();
      c.expect((j - j.transpose()).cwiseAbs().maxCoeff() <= 1e-14, tag + " gram symmetry");
      c.near(j.sum(), 1.0, 1e-12, tag + " gram grand sum");
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(j);
      c.expect(eig.eigenvalues().minCoeff() >= -1e-12, tag + " gram PSD");

      const SimpsonGrid grid(oracle::breakpoints(knots), 4000);
      const Eigen::MatrixXd v = grid.basis_values(k, m);
      const Eigen::MatrixXd expected = v.transpose() * grid.w().asDiagonal() * v;
      c.expect((j - expected).cwiseAbs().maxCoeff() <= 1e-10,
               fmt::format("{} gram vs quadrature {:.3e}", tag, (j - expected).cwiseAbs().maxCoeff()));
    }
  }
  return from_checks(c);
}

Outcome distance_suite() {
  Checks c;
  std::mt19937_64 rng(202);
  const int k = 8;
  for (int m = 1; m <= 5; ++m) {
    const auto basis = make_basis(k, m);
    const auto knots = oracle::clamped_knots(k, m);
    const SimpsonGrid grid(oracle::breakpoints(knots), 100000 / (k - m + 1));
    const Eigen::MatrixXd v = grid.basis_values(k, m);
    const WeightMatrix uniform = WeightMatrix::uniform(k);
    for (int pair = 0; pair < 200; ++pair) {
      const Eigen::VectorXd a = oracle::uniform_vector(k, rng);
      const Eigen::VectorXd b = oracle::uniform_vector(k, rng);
      const FunctionalCurve f(basis, a), g(basis, b);
      const Eigen::VectorXd diff = v * (a - b);
      const double expected = std::sqrt(grid.w().dot(diff.cwiseAbs2()));
      const double got = functional_dist(f, g);
      c.near(got, expected, 1e-6, fmt::format("m={} pair {}", m, pair));
      c.near(weighted_functional_dist(f, g, uniform), got / k, 1e-12,
             fmt::format("m={} uniform weights", m));
    }
  }

  const auto pc = make_basis(5, 1);
  auto constant = [&](double value) { return FunctionalCurve(pc, Eigen::VectorXd::Constant(5, value)); };
  const RunPoint a{Eigen::VectorXd::Constant(1, 0.1), {constant(0.0)}};
  const RunPoint b{Eigen::VectorXd::Constant(1, 0.4), {constant(0.4)}};
  c.near(combined_dist(a, b), 0.5, 1e-15, "3-4-5 mixed");
  const RunPoint x{Eigen::Vector3d(0.0, 0.1, 0.2), {}};
  const RunPoint y{Eigen::Vector3d(0.3, 0.5, 0.2), {}};
  c.near(combined_dist(x, y), 0.5, 1e-15, "scalar-only reduction");
  const RunPoint f{Eigen::VectorXd(0), {constant(1.0)}};
  const RunPoint g{Eigen::VectorXd(0), {constant(0.0)}};
  c.near(combined_dist(f, g), 1.0, 1e-15, "functional-only reduction");
  c.expect(combined_dist(a, a) == 0.0, "identical runs");
  return from_checks(c);
}

Outcome design_suite() {
  Checks c;
  SaConfig sa;
  sa.max_temperatures = 80;

  struct Shape {
    int n, d_s, d_f, k, m;
  };
  for (const Shape s : {Shape{10, 2, 1, 5, 2}, Shape{15, 3, 2, 7, 4}, Shape{20, 3, 3, 7, 4},
                        Shape{12, 0, 2, 6, 1}, Shape{8, 2, 2, 9, 5}}) {
    const std::string tag = fmt::format("n={} K={} m={}", s.n, s.k, s.m);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto basis = make_basis(s.k, s.m);
      AnnealStats stage1;
      const CandidateSet set = candidate_set(s.n, basis, kDefaultQ, sa, seed, &stage1);
      c.expect(stage1.best_value <= stage1.initial_value, tag + " stage one worse than start");
      for (int col = 0; col < s.k; ++col) c.expect(is_level_column(set.coefficients.col(col)), tag + " candidate levels");

      const Eigen::MatrixXd scalars = lhd(s.n, s.d_s, seed);
      const std::vector<CandidateSet> sets(static_cast<std::size_t>(s.d_f), set);
      AnnealStats stage2;
      const Design design = assemble_design(scalars, sets, kDefaultQ, sa, seed, &stage2);
      c.expect(stage2.best_value <= stage2.initial_value, tag + " stage two worse than start");
      c.expect(design.criterion <= stage2.initial_value, tag + " design criterion above start");
      for (int col = 0; col < s.d_s; ++col) c.expect(is_level_column(design.scalars.col(col)), tag + " scalar levels");
      for (const auto& coef : design.functionals) {
        for (int col = 0; col < s.k; ++col) c.expect(is_level_column(coef.col(col)), tag + " functional levels");
      }

      const double phi = oracle::phi_double_loop(run_distances(design), kDefaultQ);
      c.near(phi_qc(design, kDefaultQ), phi, 1e-12 * phi, tag + " phi_qc");
      c.near(design.criterion, phi, 1e-12 * phi, tag + " stored criterion");
      const auto curves = set.curves();
      Eigen::MatrixXd d(s.n, s.n);
      for (int i = 0; i < s.n; ++i) {
        for (int j = 0; j < s.n; ++j) d(i, j) = functional_dist(curves[i], curves[j]);
      }
      const double phi_f = oracle::phi_double_loop(d, kDefaultQ);
      c.near(phi_q(curves, kDefaultQ), phi_f, 1e-12 * phi_f, tag + " phi_q");
    }
  }

  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    AnnealStats stats;
    const Design free = free_maximin_demo(10, 2, 2, make_basis(6, 3), kDefaultQ, sa, seed, &stats);
    c.expect(stats.best_value <= stats.initial_value, "free demo worse than start");
    for (int col = 0; col < 2; ++col) c.expect(is_level_column(free.scalars.col(col)), "free demo scalar levels");
  }

  // n = 6: annealed alignment vs 10^4 random alignments.
  const int n = 6;
  const auto basis = make_basis(4, 3);
  const CandidateSet set = candidate_set(n, basis, kDefaultQ, sa, 8);
  const Eigen::MatrixXd scalars = lhd(n, 1, 8);
  const std::vector<CandidateSet> sets{set};
  const Design design = assemble_design(scalars, sets, kDefaultQ, SaConfig{}, 8);
  std::mt19937_64 rng(303);
  std::vector<int> perm(n);
  std::vector<double> values;
  Design random;
  random.basis = basis;
  random.scalars = scalars;
  random.functionals = {set.coefficients};
  for (int s = 0; s < 10000; ++s) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < n; ++i) random.functionals[0].row(i) = set.coefficients.row(perm[i]);
    values.push_back(oracle::phi_double_loop(run_distances(random), kDefaultQ));
  }
  std::nth_element(values.begin(), values.begin() + values.size() / 2, values.end());
  const double median = values[values.size() / 2];
  c.expect(design.criterion <= median,
           fmt::format("n=6 annealed {:.6g} above random median {:.6g}", design.criterion, median));
  return from_checks(c);
}

Outcome gp_suite() {
  Checks c;
  constexpr KernelFamily kernels[] = {KernelFamily::kGaussian, KernelFamily::kMatern52};

  {
    std::mt19937_64 rng(401);
    const auto basis = make_basis(7, 4);
    const auto points = random_points(25, 2, 2, basis, rng);
    const TrainingData data = TrainingData::from_points(points, smooth_outputs(points));
    for (bool weighted : {false, true}) {
      for (auto kernel : kernels) {
        FitOptions options;
        options.seed = 3;
        options.weighting = weighted;
        const GpModel model = GpModel::fit(data, kernel, options);
        const auto pred = model.predict(points);
        for (int i = 0; i < 25; ++i) {
          c.near(pred[i].mean, data.y[i], 1e-6 * std::max(1.0, std::abs(data.y[i])),
                 fmt::format("interpolation weighted={} run {}", weighted, i));
        }
      }
    }
  }

  {
    std::mt19937_64 rng(402);
    std::uniform_int_distribution<int> size(5, 60);
    std::uniform_real_distribution<double> log_theta(std::log(0.05), std::log(3.0));
    const auto basis = make_basis(7, 4);
    for (int s = 0; s < 50; ++s) {
      const int n = size(rng);
      const auto points = random_points(n, 2, 2, basis, rng);
      GpParams p = make_params(2, 2, 1.0, 0.0, 1.0);
      for (int k = 0; k < 2; ++k) {
        p.theta_s[k] = std::exp(log_theta(rng));
        p.theta_f[k] = std::exp(log_theta(rng));
      }
      if (s % 3 == 0) p.omega = std::vector<BetaShape>{{2.0, 0.8}, {0.6, 1.5}};
      const TrainingData data = TrainingData::from_points(points, smooth_outputs(points));
      const Eigen::MatrixXd r = correlation_matrix(data, p, kernels[s % 2]);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r);
      c.expect(eig.eigenvalues().minCoeff() >= -1e-8 * eig.eigenvalues().maxCoeff(),
               fmt::format("design {} not PSD", s));
    }
  }

  {
    std::mt19937_64 rng(403);
    const auto basis = make_basis(7, 4);
    for (int n : {3, 5, 8, 10}) {
      for (bool weighted : {false, true}) {
        const auto points = random_points(n, 2, 1, basis, rng);
        const TrainingData data = TrainingData::from_points(points, smooth_outputs(points));
        GpParams p = make_params(2, 1, 0.5, 0.4, 1.2);
        if (weighted) p.omega = std::vector<BetaShape>{{2.0, 1.2}};
        p.theta_f[0] = weighted ? 0.05 : 0.3;
        p.nugget = 1e-6;
        const GpModel model(data, KernelFamily::kMatern52, p);
        const auto loo = model.loo();
        for (int i = 0; i < n; ++i) {
          std::vector<RunPoint> rest;
          Eigen::VectorXd y_rest(n - 1), cross(n - 1);
          for (int j = 0, r = 0; j < n; ++j) {
            if (j == i) continue;
            rest.push_back(points[j]);
            cross[r] = product_correlation(points[i], points[j], p, KernelFamily::kMatern52);
            y_rest[r++] = data.y[j];
          }
          const auto expected = oracle::dense_kriging(correlation_oracle(rest, p, KernelFamily::kMatern52),
                                                      cross, y_rest, p.mu, p.sigma2, p.nugget);
          const std::string tag = fmt::format("loo n={} weighted={} i={}", n, weighted, i);
          c.near(loo[i].mean, expected.mean, 1e-8, tag + " mean");
          c.near(loo[i].variance, expected.variance, 1e-8, tag + " variance");
        }
      }
    }
  }

  {
    std::mt19937_64 rng(404);
    for (int m = 1; m <= 5; ++m) {
      const int k = 8;
      const auto basis = make_basis(k, m);
      const auto points = random_points(15, 1, 3, basis, rng);
      const TrainingData data = TrainingData::from_points(points, smooth_outputs(points));
      GpParams plain = make_params(1, 3, 0.6, 0.0, 1.0);
      plain.theta_f << 0.2, 0.5, 1.1;
      GpParams weighted = plain;
      weighted.theta_f /= k;
      weighted.omega = std::vector<BetaShape>(3, BetaShape{1.0, 1.0});
      for (auto kernel : kernels) {
        const double gap =
            (correlation_matrix(data, plain, kernel) - correlation_matrix(data, weighted, kernel))
                .cwiseAbs()
                .maxCoeff();
        c.near(gap, 0.0, 1e-12, fmt::format("identifiability m={}", m));
      }
    }
  }

  {
    std::mt19937_64 rng(405);
    const auto basis = make_basis(6, 3);
    for (int s = 0; s < 20; ++s) {
      const int n = 3 + s % 18;
      const auto points = random_points(n, 2, 1, basis, rng);
      const TrainingData data = TrainingData::from_points(points, smooth_outputs(points));
      GpParams p = make_params(2, 1, 0.3 + 0.05 * s, 0.1 * s, 0.5 + 0.1 * s);
      if (s % 3 == 0) p.omega = std::vector<BetaShape>{{1.5, 0.7}};
      p.nugget = 1e-6;
      const auto kernel = kernels[s % 2];
      const double expected = oracle::dense_log_likelihood(correlation_oracle(points, p, kernel),
                                                           data.y, p.mu, p.sigma2, p.nugget);
      c.near(log_likelihood(p, data, kernel), expected, 1e-8 * std::max(1.0, std::abs(expected)),
             fmt::format("likelihood case {}", s));
    }
  }
  return from_checks(c);
}

Outcome example1() {
  ExperimentSettings settings;
  settings.runs = 20;
  settings.basis_size = 7;
  settings.basis_order = 4;
  settings.kernel = KernelFamily::kMatern52;
  int passes = 0;
  std::string marks;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    settings.seed = seed;
    bool ok = false;
    try {
      const auto result = experiment_example1(settings);
      ok = result.ranking_ok && result.location_ok;
    } catch (const Error&) {
    }
    passes += ok;
    marks += ok ? '+' : '-';
  }
  return {passes >= 7, fmt::format("{}/10 replications reproduce the ordering [{}]", passes, marks)};
}

Outcome weighting() {
  ExperimentSettings settings;
  settings.runs = 40;
  settings.basis_size = 7;
  settings.basis_order = 4;
  settings.test_size = 300;
  settings.replications = 20;
  const auto summary = experiment_weighting(settings);
  const bool pass = summary.succeeded == settings.replications &&
                    summary.mean_weighted_normalized <= summary.mean_unweighted_normalized &&
                    summary.weighted_win_fraction >= 0.6;
  return {pass, fmt::format("normalized RMSE weighted {:.4f} unweighted {:.4f}, weighting better "
                            "in {:.0f}% of {} replications",
                            summary.mean_weighted_normalized, summary.mean_unweighted_normalized,
                            100.0 * summary.weighted_win_fraction, summary.succeeded)};
}

Outcome order_comparison() {
  ExperimentSettings settings;
  settings.runs = 20;
  settings.basis_size = 7;
  settings.test_size = 600;
  settings.replications = 20;
  const std::vector<int> orders{1, 2, 3, 4, 5};
  const double reference[] = {56.29, 53.10, 44.81, 37.07, 40.065};
  const auto summary = experiment_order(orders, settings);
  std::vector<double> mean;
  bool complete = true;
  for (const auto& row : summary.rows) {
    mean.push_back(row.mean_rmse);
    complete = complete && row.failed == 0;
  }
  const double low_orders = std::min(mean[0], mean[1]);
  const bool split = std::max({mean[2], mean[3], mean[4]}) < low_orders;
  const int rank4 = 1 + static_cast<int>(std::count_if(mean.begin(), mean.end(),
                                                       [&](double v) { return v < mean[3]; }));
  bool magnitudes = true;
  for (int i = 0; i < 5; ++i) magnitudes = magnitudes && std::abs(mean[i] - reference[i]) <= 0.5 * reference[i];
  const bool pass = complete && split && rank4 <= 2 && magnitudes;
  return {pass, fmt::format("mean RMSE m=1..5: {:.2f} {:.2f} {:.2f} {:.2f} {:.2f}; "
                            "orders 3-5 below 1-2: {}; m=4 rank {}; within 50% of reference: {}",
                            mean[0], mean[1], mean[2], mean[3], mean[4], split ? "yes" : "no",
                            rank4, magnitudes ? "yes" : "no")};
}

Outcome remark1() {
  const int n = 15, d_s = 2, d_f = 2, k = 8;
  const auto basis = make_basis(k, 4);
  const SaConfig sa;
  const Design free = free_maximin_demo(n, d_s, d_f, basis, kDefaultQ, sa, 1);
  DesignRequest request;
  request.runs = n;
  request.scalar_inputs = d_s;
  request.functional_inputs = d_f;
  request.basis_size = k;
  request.basis_order = 4;
  request.sa = sa;
  request.seed = 1;
  const Design constrained = generate_design(request);
  bool levels = true;
  for (const auto& coef : constrained.functionals) {
    for (int col = 0; col < k; ++col) levels = levels && is_level_column(coef.col(col));
  }
  const double free_fraction = extreme_fraction(free, 0.05);
  const double lhd_fraction = extreme_fraction(constrained, 0.05);
  const bool pass = free_fraction >= 0.6 && levels && lhd_fraction < free_fraction;
  return {pass, fmt::format("coefficients within 0.05 of 0 or 1: free {:.3f}, LHD {:.3f} "
                            "(equispaced levels: {})",
                            free_fraction, lhd_fraction, levels ? "yes" : "no")};
}

// Runs the same command sequence in two directories and compares stdout,
// exit codes and every output file byte for byte.
Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "funcdoe_acceptance_determinism";
  fs::remove_all(root);
  auto commands = [](const fs::path& dir) {
    auto p = [&](const char* name) { return (dir / name).string(); };
    const std::string exp_dir = (dir / "exp").string();
    return std::vector<std::vector<std::string>>{
        {"design", "--n", "15", "--scalars", "3", "--functionals", "3", "--K", "7", "--order", "4",
         "--seed", "3", "--out", p("design.json")},
        {"sample", "--n", "25", "--scalars", "3", "--functionals", "3", "--K", "7", "--order", "4",
         "--seed", "4", "--out", p("sample.json")},
        {"eval", "--design", p("design.json"), "--function", "g2", "--out", p("data.csv")},
        {"fit", "--data", p("data.csv"), "--design", p("design.json"), "--weighting", "on",
         "--starts", "10", "--seed", "5", "--out", p("model.json")},
        {"predict", "--model", p("model.json"), "--points", p("sample.json"), "--out",
         p("predictions.csv")},
        {"loo", "--model", p("model.json"), "--out", p("loo.csv")},
        {"sensitivity", "--model", p("model.json"), "--out", p("sensitivity.csv")},
        {"weights", "--model", p("model.json"), "--grid", "21", "--out", p("weights.csv")},
        {"experiment", "weighting", "--reps", "2", "--runs", "15", "--test-size", "50",
         "--starts", "5", "--seed", "6", "--out-dir", exp_dir},
        {"experiment", "order-comparison", "--reps", "2", "--runs", "12", "--test-size", "50",
         "--starts", "5", "--seed", "7", "--out-dir", exp_dir},
        {"experiment", "remark1", "--reps", "2", "--seed", "8", "--out-dir", exp_dir},
    };
  };

  Checks c;
  std::vector<std::string> stdout_runs[2];
  for (int pass = 0; pass < 2; ++pass) {
    const fs::path dir = root / (pass == 0 ? "a" : "b");
    fs::create_directories(dir);
    for (const auto& args : commands(dir)) {
      std::ostringstream out, err;
      const int code = cli::run(args, out, err);
      c.expect(code == cli::kExitOk, fmt::format("{} exited {}: {}", args[0], code, err.str()));
      // Output paths differ between the two directories.
      std::string text = out.str();
      for (std::size_t at; (at = text.find(dir.string())) != std::string::npos;) {
        text.replace(at, dir.string().size(), "<dir>");
      }
      stdout_runs[pass].push_back(text);
    }
  }
  for (std::size_t i = 0; i < stdout_runs[0].size(); ++i) {
    c.expect(stdout_runs[0][i] == stdout_runs[1][i], fmt::format("stdout of command {} differs", i));
  }
  int files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    const fs::path other = root / "b" / fs::relative(entry.path(), root / "a");
    auto bytes = [](const fs::path& path) {
      std::ifstream in(path, std::ios::binary);
      return std::string(std::istreambuf_iterator<char>(in), {});
    };
    c.expect(fs::exists(other) && bytes(entry.path()) == bytes(other),
             entry.path().filename().string() + " differs");
    ++files;
  }
  c.expect(files == 17, fmt::format("only {} output files", files));
  fs::remove_all(root);
  Outcome o = from_checks(c);
  o.detail = fmt::format("{} commands, {} files compared; ", stdout_runs[0].size(), files) + o.detail;
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"bspline-suite", 10.0, bspline_suite},
      {"distance-suite", 30.0, distance_suite},
      {"design-suite", 120.0, design_suite},
      {"gp-suite", 120.0, gp_suite},
      {"example1-ordering", 600.0, example1},
      {"weighting-experiment", 1800.0, weighting},
      {"order-comparison", 3600.0, order_comparison},
      {"remark1-extremes", 300.0, remark1},
      {"cli-determinism", 0.0, determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& criterion = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criterion.limit_seconds > 0.0 && seconds > criterion.limit_seconds) {
      outcome.pass = false;
      outcome.detail += fmt::format("; over the {:.0f} s limit", criterion.limit_seconds);
    }
    failed += !outcome.pass;
    fmt::print("{} {} {} ({:.1f} s): {}\n", outcome.pass ? "PASS" : "FAIL", i + 1, criterion.name,
               seconds, outcome.detail);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
