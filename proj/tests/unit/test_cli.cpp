#include <cstdlib>
#include <filesystem>
#include <locale>
#include <sstream>

#include <gtest/gtest.h>

#include "funcdoe/cli/app.hpp"
#include "funcdoe/cli/formats.hpp"
#include "funcdoe/error.hpp"
#include "funcdoe/testbed.hpp"

using namespace funcdoe;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("funcdoe_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string text(const std::string& name) const { return cli::read_text(dir_ / name); }

  // Small fitted model on g1 over a quick design.
  void make_model(const std::string& weighting) {
    ASSERT_EQ(run({"design", "--n", "12", "--scalars", "3", "--functionals", "3", "--K", "5",
                   "--order", "3", "--seed", "4", "--sa-levels", "20", "--out", path("d.json")}),
              0);
    ASSERT_EQ(run({"eval", "--design", path("d.json"), "--function", "g1", "--out", path("y.csv")}),
              0);
    ASSERT_EQ(run({"fit", "--data", path("y.csv"), "--design", path("d.json"), "--weighting",
                   weighting, "--starts", "10", "--seed", "2", "--out", path("m.json")}),
              0)
        << err_.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

std::vector<std::vector<std::string>> rows_of(const fs::path& p) { return cli::read_csv(p).rows; }

struct CommaDecimal : std::numpunct<char> {
  char do_decimal_point() const override { return ','; }
};

}  // namespace

TEST_F(CliTest, DesignExampleTwoShape) {
  ASSERT_EQ(run({"design", "--n", "40", "--scalars", "3", "--functionals", "3", "--K", "7",
                 "--order", "4", "--seed", "1", "--sa-levels", "30", "--out", path("a.json")}),
            0);
  EXPECT_NE(out_.str().find("criterion "), std::string::npos);
  const Design d = cli::read_design(dir_ / "a.json");
  EXPECT_EQ(d.runs(), 40);
  EXPECT_EQ(d.scalar_inputs(), 3);
  EXPECT_EQ(d.functional_inputs(), 3);
  EXPECT_EQ(d.basis->size(), 7);
  EXPECT_EQ(d.basis->order(), 4);
  EXPECT_EQ(d.meta.seed, 1u);
}

TEST_F(CliTest, DesignIsDeterministic) {
  const std::vector<std::string> base{"design", "--n", "10", "--scalars", "2", "--functionals",
                                      "1", "--K", "5", "--seed", "7", "--out"};
  auto a = base;
  a.push_back(path("a.json"));
  auto b = base;
  b.push_back(path("b.json"));
  ASSERT_EQ(run(a), 0);
  const std::string first_out = out_.str();
  ASSERT_EQ(run(b), 0);
  EXPECT_EQ(out_.str(), first_out);
  EXPECT_EQ(text("a.json"), text("b.json"));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({"design", "--n", "1", "--scalars", "2"}), cli::kExitUsage);
  EXPECT_EQ(run({"design", "--scalars", "2"}), cli::kExitUsage);
  EXPECT_EQ(run({"design", "--n", "5", "--scalars", "2", "--order", "9", "--K", "4"}),
            cli::kExitUsage);
  EXPECT_EQ(run({"bogus"}), cli::kExitUsage);
  EXPECT_EQ(run({}), cli::kExitUsage);
  EXPECT_EQ(run({"--help"}), cli::kExitOk);
  EXPECT_NE(out_.str().find("design"), std::string::npos);
}

TEST_F(CliTest, OutputDirectoryFromEnvironment) {
  ::setenv(cli::kOutputDirEnv, dir_.c_str(), 1);
  const int code = run({"design", "--n", "6", "--scalars", "2", "--sa-levels", "10"});
  ::unsetenv(cli::kOutputDirEnv);
  ASSERT_EQ(code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "design.json"));
}

TEST_F(CliTest, DesignFileRoundTrip) {
  ASSERT_EQ(run({"design", "--n", "9", "--scalars", "2", "--functionals", "2", "--K", "6",
                 "--seed", "3", "--out", path("a.json")}),
            0);
  const std::string first = text("a.json");
  const Design d = cli::design_from_json(first);
  EXPECT_EQ(cli::design_to_json(d), first);
  const Design again = cli::design_from_json(cli::design_to_json(d));
  EXPECT_EQ(again.scalars, d.scalars);
  EXPECT_EQ(again.functionals, d.functionals);
  EXPECT_EQ(again.criterion, d.criterion);
}

TEST_F(CliTest, DesignFileRequiresSchemaVersion) {
  ASSERT_EQ(run({"sample", "--n", "3", "--scalars", "1", "--out", path("s.json")}), 0);
  std::string doc = text("s.json");
  const auto pos = doc.find("\"schema_version\"");
  ASSERT_NE(pos, std::string::npos);
  doc.replace(pos, 16, "\"schema_versionX\"");
  EXPECT_THROW(cli::design_from_json(doc), IoError);
  EXPECT_THROW(cli::design_from_json("{not json"), IoError);
}

TEST_F(CliTest, EvalAllZeroDesign) {
  Design d;
  d.basis = make_basis(4, 2);
  d.scalars = Eigen::MatrixXd::Zero(3, 3);
  d.functionals.assign(3, Eigen::MatrixXd::Zero(3, 4));
  cli::write_design(dir_ / "zero.json", d);
  ASSERT_EQ(run({"eval", "--design", path("zero.json"), "--function", "g1", "--out",
                 path("y.csv")}),
            0);
  const auto table = cli::read_csv(dir_ / "y.csv");
  EXPECT_EQ(table.header, (std::vector<std::string>{"run", "hash", "y"}));
  ASSERT_EQ(table.rows.size(), 3u);
  for (const auto& row : table.rows) EXPECT_EQ(cli::parse_double(row[2]), 0.0);
}

TEST_F(CliTest, EvalMatchesLibrary) {
  ASSERT_EQ(run({"design", "--n", "8", "--scalars", "3", "--functionals", "3", "--seed", "6",
                 "--out", path("d.json")}),
            0);
  ASSERT_EQ(run({"eval", "--design", path("d.json"), "--function", "g2", "--out", path("y.csv")}),
            0);
  const Design d = cli::read_design(dir_ / "d.json");
  const auto rows = rows_of(dir_ / "y.csv");
  ASSERT_EQ(rows.size(), 8u);
  for (int i = 0; i < 8; ++i) {
    EXPECT_EQ(rows[i][0], std::to_string(i));
    EXPECT_EQ(rows[i][1], cli::run_hash(d.run(i)));
    EXPECT_EQ(cli::parse_double(rows[i][2]), g2(d.run(i)));
  }
}

TEST_F(CliTest, EvalErrors) {
  EXPECT_EQ(run({"eval", "--design", path("missing.json"), "--function", "g1"}), cli::kExitIo);
  ASSERT_EQ(run({"sample", "--n", "3", "--scalars", "3", "--functionals", "3", "--out",
                 path("s.json")}),
            0);
  EXPECT_EQ(run({"eval", "--design", path("s.json"), "--function", "g9"}), cli::kExitUsage);
  EXPECT_NE(err_.str().find("g9"), std::string::npos);
  cli::write_text(dir_ / "bad.json", "{\"schema\": \"funcdoe.design\"}");
  EXPECT_EQ(run({"eval", "--design", path("bad.json"), "--function", "g1"}), cli::kExitIo);
}

TEST_F(CliTest, FitPredictInterpolates) {
  make_model("off");
  EXPECT_NE(out_.str().find("log_likelihood"), std::string::npos);
  ASSERT_EQ(run({"predict", "--model", path("m.json"), "--out", path("p.csv")}), 0);
  const auto y = rows_of(dir_ / "y.csv");
  const auto p = cli::read_csv(dir_ / "p.csv");
  EXPECT_EQ(p.header, (std::vector<std::string>{"point", "mean", "variance"}));
  ASSERT_EQ(p.rows.size(), y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double truth = cli::parse_double(y[i][2]);
    EXPECT_NEAR(cli::parse_double(p.rows[i][1]), truth, 1e-6 * std::max(1.0, std::abs(truth)));
  }

  ASSERT_EQ(run({"sample", "--n", "20", "--scalars", "3", "--functionals", "3", "--K", "5",
                 "--order", "3", "--seed", "1", "--out", path("t.json")}),
            0);
  ASSERT_EQ(run({"predict", "--model", path("m.json"), "--points", path("t.json"), "--out",
                 path("pt.csv")}),
            0);
  EXPECT_EQ(rows_of(dir_ / "pt.csv").size(), 20u);
}

TEST_F(CliTest, LooAndSensitivityShapes) {
  make_model("on");
  ASSERT_EQ(run({"loo", "--model", path("m.json"), "--out", path("l.csv")}), 0);
  const auto loo = cli::read_csv(dir_ / "l.csv");
  EXPECT_EQ(loo.header, (std::vector<std::string>{"run", "y", "mean", "variance"}));
  EXPECT_EQ(loo.rows.size(), 12u);
  for (const auto& row : loo.rows) EXPECT_TRUE(std::isfinite(cli::parse_double(row[2])));

  ASSERT_EQ(run({"sensitivity", "--model", path("m.json"), "--out", path("s.csv")}), 0);
  const auto sens = cli::read_csv(dir_ / "s.csv");
  ASSERT_EQ(sens.rows.size(), 6u);
  const std::vector<std::string> ids{"x1", "x2", "x3", "f1", "f2", "f3"};
  for (int k = 0; k < 6; ++k) EXPECT_EQ(sens.rows[k][0], ids[k]);

  ASSERT_EQ(run({"weights", "--model", path("m.json"), "--grid", "11", "--out", path("w.csv")}), 0);
  EXPECT_EQ(rows_of(dir_ / "w.csv").size(), 33u);
}

TEST_F(CliTest, WeightsOfUniformShapeAreFlat) {
  make_model("off");
  cli::ModelFile file = cli::read_model(dir_ / "m.json");
  const int k = file.design.basis->size();
  file.params.theta_f /= k;
  file.params.omega = std::vector<BetaShape>(3, BetaShape{1.0, 1.0});
  file.diagnostics.log_likelihood = file.build().log_likelihood();
  cli::write_model(dir_ / "u.json", file);
  ASSERT_EQ(run({"weights", "--model", path("u.json"), "--grid", "21", "--out", path("w.csv")}), 0);
  const auto rows = rows_of(dir_ / "w.csv");
  ASSERT_EQ(rows.size(), 63u);
  for (const auto& row : rows) EXPECT_NEAR(cli::parse_double(row[2]), 1.0 / k, 1e-14);
}

TEST_F(CliTest, ModelFileRoundTripAndLikelihood) {
  make_model("on");
  const std::string first = text("m.json");
  const cli::ModelFile file = cli::model_from_json(first);
  EXPECT_EQ(cli::model_to_json(file), first);
  const double rebuilt = file.build().log_likelihood();
  EXPECT_NEAR(rebuilt, file.diagnostics.log_likelihood,
              1e-6 * std::max(1.0, std::abs(file.diagnostics.log_likelihood)));

  cli::ModelFile tampered = file;
  tampered.diagnostics.log_likelihood += 1.0;
  cli::write_model(dir_ / "bad.json", tampered);
  EXPECT_THROW(cli::read_model(dir_ / "bad.json"), IoError);
  EXPECT_EQ(run({"loo", "--model", path("bad.json")}), cli::kExitIo);
}

TEST_F(CliTest, FlagMismatchesRejected) {
  make_model("off");
  EXPECT_EQ(run({"weights", "--model", path("m.json")}), cli::kExitUsage);
  EXPECT_EQ(run({"fit", "--data", path("y.csv"), "--design", path("d.json"), "--kernel", "rbf"}),
            cli::kExitUsage);
  EXPECT_EQ(run({"fit", "--data", path("y.csv"), "--design", path("d.json"), "--weighting",
                 "maybe"}),
            cli::kExitUsage);

  ASSERT_EQ(run({"design", "--n", "6", "--scalars", "2", "--seed", "1", "--out", path("s.json")}),
            0);
  ASSERT_EQ(run({"eval", "--design", path("s.json"), "--function", "g1", "--out", path("sy.csv")}),
            cli::kExitUsage);
  // Data from a different design is refused.
  EXPECT_EQ(run({"fit", "--data", path("y.csv"), "--design", path("s.json")}), cli::kExitUsage);
}

TEST_F(CliTest, CsvIsLocaleIndependent) {
  make_model("off");
  const std::locale previous = std::locale::global(std::locale(std::locale::classic(), new CommaDecimal));
  const int code = run({"predict", "--model", path("m.json"), "--out", path("p.csv")});
  std::locale::global(previous);
  ASSERT_EQ(code, 0);
  const auto table = cli::read_csv(dir_ / "p.csv");
  for (const auto& row : table.rows) {
    ASSERT_EQ(row.size(), 3u);
    EXPECT_NO_THROW(cli::parse_double(row[1]));
  }
}

TEST_F(CliTest, CsvWriterFormatsAndQuotes) {
  std::ostringstream out;
  cli::CsvWriter w(out, {"a", "b", "c"});
  w.row({0.1, 42LL, std::string("x,y")});
  EXPECT_EQ(out.str(), "a,b,c\n0.10000000000000001,42,\"x,y\"\n");
  EXPECT_THROW(w.row({1.0}), ParameterError);
}

TEST_F(CliTest, OrderComparisonIsDeterministic) {
  const std::vector<std::string> base{"experiment", "order-comparison", "--reps", "5", "--seed",
                                      "1", "--starts", "10", "--test-size", "100", "--out-dir"};
  auto a = base;
  a.push_back(path("a"));
  auto b = base;
  b.push_back(path("b"));
  ASSERT_EQ(run(a), 0) << err_.str();
  ASSERT_EQ(run(b), 0);
  for (const char* name :
       {"order_table.csv", "order_summary.csv", "order_replications.csv", "order_sensitivity.csv"}) {
    EXPECT_EQ(cli::read_text(dir_ / "a" / name), cli::read_text(dir_ / "b" / name)) << name;
  }
  const auto table = cli::read_csv(dir_ / "a" / "order_table.csv");
  EXPECT_EQ(table.header, (std::vector<std::string>{"m=1", "m=2", "m=3", "m=4", "m=5"}));
  EXPECT_EQ(table.rows.size(), 1u);
  EXPECT_EQ(rows_of(dir_ / "a" / "order_replications.csv").size(), 25u);
  EXPECT_EQ(rows_of(dir_ / "a" / "order_sensitivity.csv").size(), 150u);
}

TEST_F(CliTest, Remark1EmitsCurves) {
  ASSERT_EQ(run({"experiment", "remark1", "--reps", "2", "--grid", "11", "--out-dir", path("r")}),
            0);
  const auto summary = cli::read_csv(dir_ / "r" / "remark1_summary.csv");
  ASSERT_EQ(summary.rows.size(), 1u);
  EXPECT_GT(cli::parse_double(summary.rows[0][3]), 0.6);
  EXPECT_LE(cli::parse_double(summary.rows[0][4]), 2.0 / 15 + 1e-12);
  // Two designs x 15 runs x 2 inputs x 11 samples.
  EXPECT_EQ(rows_of(dir_ / "r" / "remark1_curves.csv").size(), 660u);
}

TEST_F(CliTest, WeightingExperimentWritesReports) {
  ASSERT_EQ(run({"experiment", "weighting", "--reps", "2", "--runs", "12", "--test-size", "30",
                 "--starts", "5", "--sa-levels", "20", "--out-dir", path("w")}),
            0)
      << err_.str();
  EXPECT_EQ(rows_of(dir_ / "w" / "weighting_replications.csv").size(), 2u);
  EXPECT_EQ(rows_of(dir_ / "w" / "weighting_summary.csv").size(), 1u);
}
