#include "funcdoe/cli/formats.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "funcdoe/error.hpp"

namespace funcdoe::cli {

namespace {

using nlohmann::json;

constexpr const char* kDesignSchema = "funcdoe.design";
constexpr const char* kModelSchema = "funcdoe.model";
constexpr double kLikelihoodTolerance = 1e-6;

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
  return out;
}

// NaN has no JSON literal; an unset criterion is stored as null.
json number_or_null(double value) { return std::isfinite(value) ? json(value) : json(nullptr); }

double number_from(const json& value) {
  return value.is_null() ? std::numeric_limits<double>::quiet_NaN() : value.get<double>();
}

Eigen::VectorXd vector_from(const json& value) {
  if (!value.is_array()) throw IoError("expected an array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(value.size()));
  for (std::size_t i = 0; i < value.size(); ++i) out[static_cast<Eigen::Index>(i)] = value[i].get<double>();
  return out;
}

Eigen::MatrixXd matrix_from(const json& value, int rows, int cols) {
  if (!value.is_array() || static_cast<int>(value.size()) != rows) {
    throw IoError("matrix has the wrong number of rows");
  }
  Eigen::MatrixXd out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const json& row = value[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw IoError("matrix row has the wrong number of columns");
    }
    for (int j = 0; j < cols; ++j) out(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return out;
}

void check_schema(const json& doc, const char* schema) {
  if (!doc.is_object() || !doc.contains("schema_version")) {
    throw IoError("missing schema_version field");
  }
  if (doc.value("schema", std::string()) != schema) {
    throw IoError(fmt::format("expected a {} document", schema));
  }
  const int version = doc.at("schema_version").get<int>();
  if (version != kSchemaVersion) {
    throw IoError(fmt::format("unsupported schema version {}", version));
  }
}

json design_json(const Design& design) {
  json doc;
  doc["schema"] = kDesignSchema;
  doc["schema_version"] = kSchemaVersion;
  doc["n"] = design.runs();
  doc["d_s"] = design.scalar_inputs();
  doc["d_f"] = design.functional_inputs();
  doc["K"] = design.basis ? design.basis->size() : 0;
  doc["m"] = design.basis ? design.basis->order() : 0;
  doc["q"] = design.meta.q;
  doc["seed"] = design.meta.seed;
  doc["scalars"] = matrix_json(design.scalars);
  json functionals = json::array();
  for (const auto& coef : design.functionals) functionals.push_back(matrix_json(coef));
  doc["functionals"] = std::move(functionals);
  doc["criterion"] = number_or_null(design.criterion);
  return doc;
}

Design design_from(const json& doc) {
  check_schema(doc, kDesignSchema);
  const int n = doc.at("n").get<int>();
  const int d_s = doc.at("d_s").get<int>();
  const int d_f = doc.at("d_f").get<int>();
  const int size = doc.at("K").get<int>();
  const int order = doc.at("m").get<int>();
  if (n < 1 || d_s < 0 || d_f < 0) throw IoError("invalid design dimensions");

  Design design;
  if (size > 0) design.basis = make_basis(size, order);
  design.meta.q = doc.at("q").get<double>();
  design.meta.seed = doc.at("seed").get<std::uint64_t>();
  design.scalars = matrix_from(doc.at("scalars"), n, d_s);
  const json& functionals = doc.at("functionals");
  if (!functionals.is_array() || static_cast<int>(functionals.size()) != d_f) {
    throw IoError("functional input count does not match d_f");
  }
  for (const auto& coef : functionals) design.functionals.push_back(matrix_from(coef, n, size));
  design.criterion = number_from(doc.at("criterion"));
  design.validate();
  return design;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed JSON: ") + e.what());
  }
}

template <typename F>
auto with_json_errors(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw IoError(std::string("invalid file contents: ") + e.what());
  } catch (const ParameterError& e) {
    throw IoError(std::string("invalid file contents: ") + e.what());
  }
}

void put_le(std::uint64_t& hash, double value) {
  constexpr std::uint64_t kPrime = 0x100000001b3ULL;
  std::uint64_t bits = 0;
  static_assert(sizeof bits == sizeof value);
  std::memcpy(&bits, &value, sizeof bits);
  for (int b = 0; b < 8; ++b) {
    hash ^= (bits >> (8 * b)) & 0xffU;
    hash *= kPrime;
  }
}

std::string quote_csv(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

}  // namespace

std::string design_to_json(const Design& design) { return design_json(design).dump(2) + "\n"; }

Design design_from_json(std::string_view text) {
  const json doc = parse_json(text);
  return with_json_errors([&] { return design_from(doc); });
}

void write_design(const std::filesystem::path& path, const Design& design) {
  write_text(path, design_to_json(design));
}

Design read_design(const std::filesystem::path& path) { return design_from_json(read_text(path)); }

ModelFile ModelFile::from_model(const GpModel& model, Design design) {
  ModelFile file;
  file.design = std::move(design);
  file.y = model.data().y;
  file.kernel = model.kernel();
  file.params = model.params();
  file.diagnostics = model.diagnostics();
  return file;
}

GpModel ModelFile::build() const {
  return GpModel(TrainingData::from_design(design, y), kernel, params);
}

std::string model_to_json(const ModelFile& model) {
  json doc;
  doc["schema"] = kModelSchema;
  doc["schema_version"] = kSchemaVersion;
  doc["kernel"] = std::string(kernel_name(model.kernel));
  doc["weighting"] = model.params.weighted();
  json params;
  params["mu"] = model.params.mu;
  params["sigma2"] = model.params.sigma2;
  params["theta_s"] = vector_json(model.params.theta_s);
  params["theta_f"] = vector_json(model.params.theta_f);
  if (model.params.omega) {
    json omega = json::array();
    for (const auto& shape : *model.params.omega) omega.push_back({shape.alpha, shape.beta});
    params["omega"] = std::move(omega);
  } else {
    params["omega"] = nullptr;
  }
  params["nugget"] = model.params.nugget;
  doc["params"] = std::move(params);
  doc["design"] = design_json(model.design);
  doc["y"] = vector_json(model.y);
  doc["diagnostics"] = {
      {"log_likelihood", model.diagnostics.log_likelihood},
      {"starts", model.diagnostics.starts},
      {"failed_starts", model.diagnostics.failed_starts},
      {"evaluations", model.diagnostics.evaluations},
      {"iterations", model.diagnostics.iterations},
  };
  return doc.dump(2) + "\n";
}

ModelFile model_from_json(std::string_view text) {
  const json doc = parse_json(text);
  return with_json_errors([&] {
    check_schema(doc, kModelSchema);
    ModelFile model;
    model.kernel = parse_kernel(doc.at("kernel").get<std::string>());
    const json& params = doc.at("params");
    model.params.mu = params.at("mu").get<double>();
    model.params.sigma2 = params.at("sigma2").get<double>();
    model.params.theta_s = vector_from(params.at("theta_s"));
    model.params.theta_f = vector_from(params.at("theta_f"));
    const json& omega = params.at("omega");
    if (!omega.is_null()) {
      std::vector<BetaShape> shapes;
      for (const auto& pair : omega) {
        if (!pair.is_array() || pair.size() != 2) throw IoError("omega entries are [alpha, beta]");
        shapes.push_back({pair[0].get<double>(), pair[1].get<double>()});
      }
      model.params.omega = std::move(shapes);
    }
    if (doc.at("weighting").get<bool>() != model.params.weighted()) {
      throw IoError("weighting flag disagrees with the stored beta shapes");
    }
    model.params.nugget = params.at("nugget").get<double>();
    model.design = design_from(doc.at("design"));
    model.y = vector_from(doc.at("y"));
    const json& diag = doc.at("diagnostics");
    model.diagnostics.log_likelihood = diag.at("log_likelihood").get<double>();
    model.diagnostics.starts = diag.at("starts").get<int>();
    model.diagnostics.failed_starts = diag.at("failed_starts").get<int>();
    model.diagnostics.evaluations = diag.at("evaluations").get<int>();
    model.diagnostics.iterations = diag.at("iterations").get<int>();
    return model;
  });
}

void write_model(const std::filesystem::path& path, const ModelFile& model) {
  write_text(path, model_to_json(model));
}

ModelFile read_model(const std::filesystem::path& path) {
  ModelFile model = model_from_json(read_text(path));
  const double stored = model.diagnostics.log_likelihood;
  const double rebuilt = with_json_errors([&] { return model.build().log_likelihood(); });
  if (!(std::abs(rebuilt - stored) <= kLikelihoodTolerance * std::max(1.0, std::abs(stored)))) {
    throw IoError(fmt::format("model file {}: stored log-likelihood {} but refactorized {}",
                              path.string(), format_double(stored), format_double(rebuilt)));
  }
  return model;
}

std::string run_hash(const RunPoint& point) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (Eigen::Index i = 0; i < point.scalars.size(); ++i) put_le(hash, point.scalars[i]);
  for (const auto& curve : point.functions) {
    const auto& coef = curve.coefficients();
    for (Eigen::Index i = 0; i < coef.size(); ++i) put_le(hash, coef[i]);
  }
  return fmt::format("{:016x}", hash);
}

std::string format_double(double value) { return fmt::format("{:.17g}", value); }

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header)
    : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << quote_csv(header[i]);
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
  if (cells.size() != columns_) throw ParameterError("CSV row width differs from header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out_ << ',';
    std::visit(
        [this](const auto& cell) {
          using T = std::decay_t<decltype(cell)>;
          if constexpr (std::is_same_v<T, double>) {
            out_ << format_double(cell);
          } else if constexpr (std::is_same_v<T, long long>) {
            out_ << fmt::format("{}", cell);
          } else {
            out_ << quote_csv(cell);
          }
        },
        cells[i]);
  }
  out_ << '\n';
}

DataTable read_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  DataTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (first) {
      table.header = std::move(cells);
      first = false;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw IoError(fmt::format("{}: row width differs from header", path.string()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (first) throw IoError(fmt::format("{}: empty CSV file", path.string()));
  return table;
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw IoError(fmt::format("not a number: '{}'", text));
  }
  return value;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(fmt::format("cannot read {}", path.string()));
  return text;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
}

}  // namespace funcdoe::cli
