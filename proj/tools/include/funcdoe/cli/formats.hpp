#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "funcdoe/design.hpp"
#include "funcdoe/gpmodel.hpp"

namespace funcdoe::cli {

inline constexpr int kSchemaVersion = 1;

std::string design_to_json(const Design& design);
Design design_from_json(std::string_view text);

void write_design(const std::filesystem::path& path, const Design& design);
Design read_design(const std::filesystem::path& path);

/// A fitted model together with its training design and outputs.
struct ModelFile {
  Design design;
  Eigen::VectorXd y;
  KernelFamily kernel = KernelFamily::kMatern52;
  GpParams params;
  FitDiagnostics diagnostics;

  static ModelFile from_model(const GpModel& model, Design design);
  /// Rebuilds the factorization from the stored parameters.
  GpModel build() const;
};

std::string model_to_json(const ModelFile& model);
ModelFile model_from_json(std::string_view text);

void write_model(const std::filesystem::path& path, const ModelFile& model);
/// Throws IoError if the refactorized log-likelihood differs from the stored
/// one by more than 1e-6 relative.
ModelFile read_model(const std::filesystem::path& path);

/// FNV-1a (64 bit) over the little-endian bytes of a run's scalars followed
/// by its coefficients, as 16 hex digits.
std::string run_hash(const RunPoint& point);

using CsvCell = std::variant<std::string, double, long long>;

/// Comma-separated output with a header row. Doubles use 17 significant
/// digits and '.' regardless of locale.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);
  void row(const std::vector<CsvCell>& cells);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

std::string format_double(double value);

struct DataTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

DataTable read_csv(const std::filesystem::path& path);
double parse_double(std::string_view text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace funcdoe::cli
