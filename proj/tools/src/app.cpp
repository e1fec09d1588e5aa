#include "funcdoe/cli/app.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "funcdoe/cli/formats.hpp"
#include "funcdoe/design.hpp"
#include "funcdoe/error.hpp"
#include "funcdoe/gpmodel.hpp"
#include "funcdoe/testbed.hpp"

namespace funcdoe::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kMinSuccessRate = 0.8;

fs::path output_dir() {
  const char* dir = std::getenv(kOutputDirEnv);
  return dir != nullptr && *dir != '\0' ? fs::path(dir) : fs::path(".");
}

fs::path output_path(const std::string& flag, const char* default_name) {
  return flag.empty() ? output_dir() / default_name : fs::path(flag);
}

// Buffers a CSV in memory and writes it in one go, so a failing command
// never leaves a truncated table behind.
class CsvFile {
 public:
  CsvFile(fs::path path, std::vector<std::string> header)
      : path_(std::move(path)), writer_(buffer_, std::move(header)) {}
  void row(const std::vector<CsvCell>& cells) { writer_.row(cells); }
  void save() const { write_text(path_, buffer_.str()); }

 private:
  fs::path path_;
  std::ostringstream buffer_;
  CsvWriter writer_;
};

struct SaFlags {
  SaConfig config;

  void add(CLI::App* app) {
    app->add_option("--sa-t0", config.initial_temperature,
                    "Initial temperature (<= 0 calibrates from random moves)");
    app->add_option("--sa-cooling", config.cooling, "Cooling factor per level")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--sa-inner", config.inner_moves, "Moves per temperature level")
        ->check(CLI::PositiveNumber);
    app->add_option("--sa-levels", config.max_temperatures, "Maximum temperature levels")
        ->check(CLI::PositiveNumber);
    app->add_option("--sa-stale", config.max_stale_temperatures,
                    "Stop after this many levels without improvement")
        ->check(CLI::PositiveNumber);
    app->add_option("--sa-restarts", config.restarts, "Independent annealing restarts")
        ->check(CLI::PositiveNumber);
  }
};

const std::map<std::string, std::string> kKernelNames = {
    {"gauss", "gauss"}, {"gaussian", "gauss"}, {"matern52", "matern52"}};

std::string input_name(int index, int scalar_inputs) {
  return index < scalar_inputs ? fmt::format("x{}", index + 1)
                               : fmt::format("f{}", index - scalar_inputs + 1);
}

Design design_from_points(const std::vector<RunPoint>& points, BasisPtr basis, int scalar_inputs,
                          int functional_inputs, std::uint64_t seed) {
  const int n = static_cast<int>(points.size());
  Design design;
  design.basis = std::move(basis);
  design.meta.seed = seed;
  design.scalars.resize(n, scalar_inputs);
  design.functionals.assign(functional_inputs, Eigen::MatrixXd(n, design.basis->size()));
  for (int i = 0; i < n; ++i) {
    design.scalars.row(i) = points[i].scalars.transpose();
    for (int k = 0; k < functional_inputs; ++k) {
      design.functionals[k].row(i) = points[i].functions[k].coefficients().transpose();
    }
  }
  return design;
}

// Outputs of a data CSV, checked row by row against the design's run hashes.
Eigen::VectorXd read_outputs(const fs::path& path, const Design& design) {
  const DataTable table = read_csv(path);
  auto column = [&](const char* name) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (table.header[c] == name) return c;
    }
    throw IoError(fmt::format("{}: missing column '{}'", path.string(), name));
  };
  const std::size_t hash_col = column("hash");
  const std::size_t y_col = column("y");
  if (static_cast<int>(table.rows.size()) != design.runs()) {
    throw ParameterError(fmt::format("data has {} rows but the design has {} runs",
                                     table.rows.size(), design.runs()));
  }
  Eigen::VectorXd y(design.runs());
  for (int i = 0; i < design.runs(); ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    if (row[hash_col] != run_hash(design.run(i))) {
      throw ParameterError(fmt::format("data row {} does not belong to this design", i));
    }
    y[i] = parse_double(row[y_col]);
  }
  return y;
}

struct ExperimentFlags {
  int reps = 20;
  std::uint64_t seed = 1;
  std::string out_dir;
  int starts = 50;
  std::string kernel = "matern52";
  int runs = 0;
  int basis_size = 0;
  int basis_order = 4;
  int test_size = 0;
  SaFlags sa;

  void add(CLI::App* app, int default_runs, int default_size, int default_test) {
    runs = default_runs;
    basis_size = default_size;
    test_size = default_test;
    app->add_option("--reps", reps, "Replications")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "Base seed");
    app->add_option("--out-dir", out_dir, "Directory for the report CSVs");
    app->add_option("--runs", runs, "Design runs per replication")->check(CLI::Range(2, 100000));
    app->add_option("--K", basis_size, "Basis functions per functional input")
        ->check(CLI::Range(1, 1000));
    sa.add(app);
  }

  void add_model(CLI::App* app) {
    app->add_option("--starts", starts, "Likelihood multistart points")
        ->check(CLI::PositiveNumber);
    app->add_option("--kernel", kernel, "gauss or matern52")
        ->transform(CLI::CheckedTransformer(kKernelNames));
    app->add_option("--test-size", test_size, "Random test points")->check(CLI::PositiveNumber);
  }

  fs::path dir() const { return out_dir.empty() ? output_dir() : fs::path(out_dir); }

  ExperimentSettings settings() const {
    ExperimentSettings s;
    s.runs = runs;
    s.basis_size = basis_size;
    s.basis_order = basis_order;
    s.test_size = test_size;
    s.replications = reps;
    s.seed = seed;
    s.kernel = parse_kernel(kernel);
    s.fit.multistart = starts;
    s.sa = sa.config;
    return s;
  }
};

int finish_experiment(std::ostream& out, std::ostream& err, int succeeded, int total) {
  out << fmt::format("succeeded {}/{}\n", succeeded, total);
  if (static_cast<double>(succeeded) < kMinSuccessRate * total) {
    err << fmt::format("error: only {} of {} replications succeeded\n", succeeded, total);
    return kExitNumeric;
  }
  return kExitOk;
}

int experiment_weighting_cmd(const ExperimentFlags& flags, std::ostream& out, std::ostream& err) {
  const WeightingSummary summary = experiment_weighting(flags.settings());
  CsvFile reps(flags.dir() / "weighting_replications.csv",
               {"replication", "seed", "ok", "rmse_weighted", "rmse_unweighted",
                "nrmse_weighted", "nrmse_unweighted", "error"});
  for (const auto& rep : summary.replications) {
    if (!rep.ok) err << fmt::format("replication {} failed: {}\n", rep.index, rep.error);
    reps.row({static_cast<long long>(rep.index), fmt::format("{}", rep.weighted.seed),
              static_cast<long long>(rep.ok), rep.weighted.rmse, rep.unweighted.rmse,
              rep.weighted.normalized_rmse, rep.unweighted.normalized_rmse, rep.error});
  }
  CsvFile total(flags.dir() / "weighting_summary.csv",
                {"replications", "succeeded", "mean_rmse_weighted", "mean_rmse_unweighted",
                 "mean_nrmse_weighted", "mean_nrmse_unweighted", "weighted_win_fraction"});
  total.row({static_cast<long long>(flags.reps), static_cast<long long>(summary.succeeded),
             summary.mean_weighted_rmse, summary.mean_unweighted_rmse,
             summary.mean_weighted_normalized, summary.mean_unweighted_normalized,
             summary.weighted_win_fraction});
  reps.save();
  total.save();
  out << fmt::format("normalized rmse weighted {} unweighted {} win fraction {}\n",
                     format_double(summary.mean_weighted_normalized),
                     format_double(summary.mean_unweighted_normalized),
                     format_double(summary.weighted_win_fraction));
  return finish_experiment(out, err, summary.succeeded, flags.reps);
}

int experiment_order_cmd(const ExperimentFlags& flags, const std::vector<int>& orders,
                         std::ostream& out, std::ostream& err) {
  const OrderSummary summary = experiment_order(orders, flags.settings());
  CsvFile reps(flags.dir() / "order_replications.csv",
               {"order", "replication", "seed", "ok", "rmse", "nrmse", "error"});
  CsvFile sens(flags.dir() / "order_sensitivity.csv",
               {"order", "replication", "input", "sensitivity"});
  int succeeded = 0;
  for (const auto& rep : summary.replications) {
    if (rep.ok) {
      ++succeeded;
    } else {
      err << fmt::format("order {} replication {} failed: {}\n", rep.order, rep.index, rep.error);
    }
    reps.row({static_cast<long long>(rep.order), static_cast<long long>(rep.index),
              fmt::format("{}", rep.report.seed), static_cast<long long>(rep.ok),
              rep.report.rmse, rep.report.normalized_rmse, rep.error});
    const auto& s = rep.report.sensitivity;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      sens.row({static_cast<long long>(rep.order), static_cast<long long>(rep.index),
                input_name(static_cast<int>(k), kTestScalarInputs), s[k]});
    }
  }
  CsvFile rows(flags.dir() / "order_summary.csv",
               {"order", "succeeded", "failed", "mean_rmse", "sd_rmse"});
  std::vector<std::string> table_header;
  std::vector<CsvCell> table_row;
  for (const auto& row : summary.rows) {
    rows.row({static_cast<long long>(row.order), static_cast<long long>(row.succeeded),
              static_cast<long long>(row.failed), row.mean_rmse, row.sd_rmse});
    table_header.push_back(fmt::format("m={}", row.order));
    table_row.emplace_back(row.mean_rmse);
    out << fmt::format("order {} mean rmse {}\n", row.order, format_double(row.mean_rmse));
  }
  CsvFile table(flags.dir() / "order_table.csv", table_header);
  table.row(table_row);
  reps.save();
  sens.save();
  rows.save();
  table.save();
  return finish_experiment(out, err, succeeded, static_cast<int>(summary.replications.size()));
}

struct Remark1Flags {
  int scalar_inputs = 2;
  int functional_inputs = 2;
  double tolerance = 0.05;
  int grid = 51;
  double q = kDefaultQ;
};

int experiment_remark1_cmd(const ExperimentFlags& flags, const Remark1Flags& r1,
                           std::ostream& out, std::ostream& err) {
  const BasisPtr basis = make_basis(flags.basis_size, flags.basis_order);
  CsvFile reps(flags.dir() / "remark1_replications.csv",
               {"replication", "seed", "ok", "free_extreme_fraction", "lhd_extreme_fraction",
                "free_criterion", "lhd_criterion", "error"});
  CsvFile curves(flags.dir() / "remark1_curves.csv", {"design", "run", "input", "t", "value"});
  double free_sum = 0.0;
  double lhd_sum = 0.0;
  int succeeded = 0;
  for (int r = 0; r < flags.reps; ++r) {
    const std::uint64_t seed = flags.seed + static_cast<std::uint64_t>(r);
    try {
      const Design free = free_maximin_demo(flags.runs, r1.scalar_inputs, r1.functional_inputs,
                                            basis, r1.q, flags.sa.config, seed);
      DesignRequest request;
      request.runs = flags.runs;
      request.scalar_inputs = r1.scalar_inputs;
      request.functional_inputs = r1.functional_inputs;
      request.basis_size = flags.basis_size;
      request.basis_order = flags.basis_order;
      request.q = r1.q;
      request.sa = flags.sa.config;
      request.seed = seed;
      const Design lhd_design = generate_design(request);
      const double free_fraction = extreme_fraction(free, r1.tolerance);
      const double lhd_fraction = extreme_fraction(lhd_design, r1.tolerance);
      reps.row({static_cast<long long>(r), fmt::format("{}", seed), 1LL, free_fraction,
                lhd_fraction, free.criterion, lhd_design.criterion, std::string()});
      free_sum += free_fraction;
      lhd_sum += lhd_fraction;
      ++succeeded;
      if (r == 0) {
        for (const auto& [label, design] :
             {std::pair<const char*, const Design*>{"free", &free}, {"lhd", &lhd_design}}) {
          for (int i = 0; i < design->runs(); ++i) {
            const RunPoint point = design->run(i);
            for (std::size_t k = 0; k < point.functions.size(); ++k) {
              for (int g = 0; g < r1.grid; ++g) {
                const double t = static_cast<double>(g) / (r1.grid - 1);
                curves.row({std::string(label), static_cast<long long>(i),
                            fmt::format("f{}", k + 1), t, point.functions[k](t)});
              }
            }
          }
        }
      }
    } catch (const Error& e) {
      err << fmt::format("replication {} failed: {}\n", r, e.what());
      const double nan = std::numeric_limits<double>::quiet_NaN();
      reps.row({static_cast<long long>(r), fmt::format("{}", seed), 0LL, nan, nan, nan, nan,
                std::string(e.what())});
    }
  }
  const double free_mean = succeeded > 0 ? free_sum / succeeded : 0.0;
  const double lhd_mean = succeeded > 0 ? lhd_sum / succeeded : 0.0;
  CsvFile summary(flags.dir() / "remark1_summary.csv",
                  {"replications", "succeeded", "tolerance", "mean_free_extreme_fraction",
                   "mean_lhd_extreme_fraction"});
  summary.row({static_cast<long long>(flags.reps), static_cast<long long>(succeeded),
               r1.tolerance, free_mean, lhd_mean});
  reps.save();
  curves.save();
  summary.save();
  out << fmt::format("extreme fraction free {} lhd {}\n", format_double(free_mean),
                     format_double(lhd_mean));
  return finish_experiment(out, err, succeeded, flags.reps);
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const ParameterError*>(&e) != nullptr) return kExitUsage;
  if (dynamic_cast<const IoError*>(&e) != nullptr) return kExitIo;
  return kExitNumeric;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Space-filling designs and Gaussian-process surrogates for scalar and "
               "functional inputs",
               "funcdoe");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  // design
  DesignRequest design_request;
  SaFlags design_sa;
  std::string design_out;
  auto* design_cmd = app.add_subcommand("design", "Build a generalized Latin hypercube design");
  design_cmd->add_option("--n", design_request.runs, "Number of runs")
      ->required()
      ->check(CLI::Range(2, 100000));
  design_cmd->add_option("--scalars", design_request.scalar_inputs, "Scalar inputs")
      ->check(CLI::NonNegativeNumber);
  design_cmd->add_option("--functionals", design_request.functional_inputs, "Functional inputs")
      ->check(CLI::NonNegativeNumber);
  design_cmd->add_option("--K", design_request.basis_size, "Basis functions per curve")
      ->check(CLI::Range(1, 1000));
  design_cmd->add_option("--order", design_request.basis_order, "B-spline order")
      ->check(CLI::Range(1, 1000));
  design_cmd->add_option("--q", design_request.q, "Phi_q exponent")->check(CLI::PositiveNumber);
  design_cmd->add_option("--seed", design_request.seed, "Random seed");
  design_cmd->add_option("--out", design_out, "Output design file");
  design_sa.add(design_cmd);

  // sample
  DesignRequest sample_request;
  std::string sample_out;
  auto* sample_cmd = app.add_subcommand("sample", "Draw uniform random inputs as a design file");
  sample_cmd->add_option("--n", sample_request.runs, "Number of points")
      ->required()
      ->check(CLI::Range(1, 10000000));
  sample_cmd->add_option("--scalars", sample_request.scalar_inputs, "Scalar inputs")
      ->check(CLI::NonNegativeNumber);
  sample_cmd->add_option("--functionals", sample_request.functional_inputs, "Functional inputs")
      ->check(CLI::NonNegativeNumber);
  sample_cmd->add_option("--K", sample_request.basis_size, "Basis functions per curve")
      ->check(CLI::Range(1, 1000));
  sample_cmd->add_option("--order", sample_request.basis_order, "B-spline order")
      ->check(CLI::Range(1, 1000));
  sample_cmd->add_option("--seed", sample_request.seed, "Random seed");
  sample_cmd->add_option("--out", sample_out, "Output design file");

  // eval
  std::string eval_design, eval_function, eval_out;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a test function on a design");
  eval_cmd->add_option("--design", eval_design, "Design file")->required();
  eval_cmd->add_option("--function", eval_function, "g1 or g2")->required();
  eval_cmd->add_option("--out", eval_out, "Output data CSV");

  // fit
  std::string fit_data, fit_design, fit_kernel = "matern52", fit_weighting = "off", fit_out;
  FitOptions fit_options;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a Gaussian-process model by maximum likelihood");
  fit_cmd->add_option("--data", fit_data, "Data CSV with hash and y columns")->required();
  fit_cmd->add_option("--design", fit_design, "Design file of the data")->required();
  fit_cmd->add_option("--kernel", fit_kernel, "gauss or matern52")
      ->transform(CLI::CheckedTransformer(kKernelNames));
  fit_cmd->add_option("--weighting", fit_weighting, "on or off")
      ->check(CLI::IsMember({"on", "off"}));
  fit_cmd->add_option("--starts", fit_options.multistart, "Multistart points")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--seed", fit_options.seed, "Random seed");
  fit_cmd->add_option("--max-evals", fit_options.max_evaluations, "Local search budget")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--out", fit_out, "Output model file");

  // model consumers
  std::string model_path, points_path, report_out;
  int grid = 101;
  auto add_model = [&](CLI::App* cmd) {
    cmd->add_option("--model", model_path, "Model file")->required();
    cmd->add_option("--out", report_out, "Output CSV");
  };
  auto* predict_cmd = app.add_subcommand("predict", "Predictive mean and variance");
  add_model(predict_cmd);
  predict_cmd->add_option("--points", points_path,
                          "Design file of prediction inputs (default: training inputs)");
  auto* loo_cmd = app.add_subcommand("loo", "Leave-one-out predictions");
  add_model(loo_cmd);
  auto* sens_cmd = app.add_subcommand("sensitivity", "Per-input sensitivity values");
  add_model(sens_cmd);
  auto* weights_cmd = app.add_subcommand("weights", "Fitted weight profiles of functional inputs");
  add_model(weights_cmd);
  weights_cmd->add_option("--grid", grid, "Profile grid points")->check(CLI::Range(2, 1000000));

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "Replicated simulation studies");
  exp_cmd->require_subcommand(1);
  ExperimentFlags weighting_flags;
  auto* exp_weighting = exp_cmd->add_subcommand("weighting", "Weighted vs unweighted models");
  weighting_flags.add(exp_weighting, 40, 7, 300);
  weighting_flags.add_model(exp_weighting);
  exp_weighting->add_option("--order", weighting_flags.basis_order, "B-spline order")
      ->check(CLI::Range(1, 1000));

  ExperimentFlags order_flags;
  std::vector<int> orders = {1, 2, 3, 4, 5};
  auto* exp_order = exp_cmd->add_subcommand("order-comparison", "Prediction error by spline order");
  order_flags.add(exp_order, 20, 7, 600);
  order_flags.add_model(exp_order);
  exp_order->add_option("--orders", orders, "Spline orders to compare")->delimiter(',');

  ExperimentFlags r1_flags;
  Remark1Flags r1;
  auto* exp_r1 = exp_cmd->add_subcommand("remark1", "Unconstrained maximin curves vs LHD levels");
  r1_flags.add(exp_r1, 15, 8, 0);
  r1_flags.reps = 5;
  exp_r1->add_option("--order", r1_flags.basis_order, "B-spline order")
      ->check(CLI::Range(1, 1000));
  exp_r1->add_option("--scalars", r1.scalar_inputs, "Scalar inputs")
      ->check(CLI::NonNegativeNumber);
  exp_r1->add_option("--functionals", r1.functional_inputs, "Functional inputs")
      ->check(CLI::PositiveNumber);
  exp_r1->add_option("--tol", r1.tolerance, "Distance to 0 or 1 counted as extreme")
      ->check(CLI::Range(0.0, 0.5));
  exp_r1->add_option("--grid", r1.grid, "Curve sample points")->check(CLI::Range(2, 100000));

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*design_cmd) {
      design_request.sa = design_sa.config;
      const Design design = generate_design(design_request);
      const fs::path path = output_path(design_out, "design.json");
      write_design(path, design);
      out << fmt::format("criterion {}\n", format_double(design.criterion));
      return kExitOk;
    }
    if (*sample_cmd) {
      const auto& r = sample_request;
      if (r.scalar_inputs + r.functional_inputs == 0) {
        throw ParameterError("sample needs at least one input");
      }
      const BasisPtr basis = make_basis(r.basis_size, r.basis_order);
      const auto points =
          random_test_points(r.runs, r.scalar_inputs, r.functional_inputs, basis, r.seed);
      write_design(output_path(sample_out, "sample.json"),
                   design_from_points(points, basis, r.scalar_inputs, r.functional_inputs,
                                      r.seed));
      return kExitOk;
    }
    if (*eval_cmd) {
      const TestFunctionId id = parse_test_function(eval_function);
      const Design design = read_design(eval_design);
      CsvFile csv(output_path(eval_out, "data.csv"), {"run", "hash", "y"});
      for (int i = 0; i < design.runs(); ++i) {
        const RunPoint point = design.run(i);
        csv.row({static_cast<long long>(i), run_hash(point), evaluate(id, point)});
      }
      csv.save();
      return kExitOk;
    }
    if (*fit_cmd) {
      const Design design = read_design(fit_design);
      const Eigen::VectorXd y = read_outputs(fit_data, design);
      fit_options.weighting = fit_weighting == "on";
      if (fit_options.weighting && design.functional_inputs() == 0) {
        throw ParameterError("--weighting on requires functional inputs");
      }
      const GpModel model =
          GpModel::fit(TrainingData::from_design(design, y), parse_kernel(fit_kernel), fit_options);
      write_model(output_path(fit_out, "model.json"), ModelFile::from_model(model, design));
      out << fmt::format("log_likelihood {}\n", format_double(model.diagnostics().log_likelihood));
      return kExitOk;
    }
    if (*predict_cmd || *loo_cmd || *sens_cmd || *weights_cmd) {
      const ModelFile file = read_model(model_path);
      const GpModel model = file.build();
      if (*predict_cmd) {
        const Design points = points_path.empty() ? file.design : read_design(points_path);
        const auto runs = points.run_points();
        const auto predictions = model.predict(runs);
        CsvFile csv(output_path(report_out, "predictions.csv"), {"point", "mean", "variance"});
        for (std::size_t i = 0; i < predictions.size(); ++i) {
          csv.row({static_cast<long long>(i), predictions[i].mean, predictions[i].variance});
        }
        csv.save();
      } else if (*loo_cmd) {
        const auto predictions = model.loo();
        CsvFile csv(output_path(report_out, "loo.csv"), {"run", "y", "mean", "variance"});
        for (std::size_t i = 0; i < predictions.size(); ++i) {
          csv.row({static_cast<long long>(i), file.y[static_cast<Eigen::Index>(i)],
                   predictions[i].mean, predictions[i].variance});
        }
        csv.save();
      } else if (*sens_cmd) {
        const Eigen::VectorXd s = model.sensitivity();
        CsvFile csv(output_path(report_out, "sensitivity.csv"), {"input", "sensitivity"});
        for (Eigen::Index k = 0; k < s.size(); ++k) {
          csv.row({input_name(static_cast<int>(k), file.design.scalar_inputs()), s[k]});
        }
        csv.save();
      } else {
        if (!model.weighted()) throw ParameterError("model was fitted without weighting");
        CsvFile csv(output_path(report_out, "weights.csv"), {"input", "t", "weight"});
        for (int k = 0; k < file.design.functional_inputs(); ++k) {
          const WeightProfile profile = model.weight_profile(k, grid);
          for (int g = 0; g < grid; ++g) {
            csv.row({fmt::format("f{}", k + 1), profile.grid[g], profile.values[g]});
          }
        }
        csv.save();
      }
      return kExitOk;
    }
    if (*exp_weighting) return experiment_weighting_cmd(weighting_flags, out, err);
    if (*exp_order) return experiment_order_cmd(order_flags, orders, out, err);
    if (*exp_r1) return experiment_remark1_cmd(r1_flags, r1, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace funcdoe::cli
