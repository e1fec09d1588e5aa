#include "funcdoe/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "funcdoe/error.hpp"

namespace funcdoe {

namespace {

// Stream offsets keep the stages of one seed on unrelated random sequences.
constexpr std::uint64_t kLhdStream = 0x1000;
constexpr std::uint64_t kCandidateStream = 0x2000;
constexpr std::uint64_t kAssembleStream = 0x3000;
constexpr std::uint64_t kFreeStream = 0x4000;

constexpr int kRefreshInterval = 512;
constexpr double kFreeStep = 0.25;

void check_q(double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw ParameterError("q must be a finite value >= 1");
}

// Pairwise squared distances together with the running sum of d^-q, with an
// undo log for rejected annealing moves.
class PairCriterion {
 public:
  PairCriterion(Eigen::MatrixXd squared, double q) : squared_(std::move(squared)), q_(q) {
    refresh();
  }

  int size() const noexcept { return static_cast<int>(squared_.rows()); }
  double squared(int i, int j) const { return squared_(i, j); }

  double value() const {
    if (zeros_ > 0) return std::numeric_limits<double>::infinity();
    return std::pow(sum_, 1.0 / q_);
  }

  void update(int i, int j, double sq) {
    log_.push_back({i, j, squared_(i, j)});
    remove_term(squared_(i, j));
    squared_(i, j) = sq;
    squared_(j, i) = sq;
    add_term(sq);
  }

  void commit() {
    log_.clear();
    if (++commits_ % kRefreshInterval == 0) refresh();
  }

  void rollback() {
    for (auto it = log_.rbegin(); it != log_.rend(); ++it) {
      remove_term(squared_(it->i, it->j));
      squared_(it->i, it->j) = it->old_sq;
      squared_(it->j, it->i) = it->old_sq;
      add_term(it->old_sq);
    }
    log_.clear();
  }

  void reset(Eigen::MatrixXd squared) {
    squared_ = std::move(squared);
    log_.clear();
    refresh();
  }

  void refresh() {
    sum_ = 0.0;
    zeros_ = 0;
    for (int i = 0; i < size(); ++i) {
      for (int j = 0; j < i; ++j) add_term(squared_(i, j));
    }
  }

 private:
  struct Change {
    int i;
    int j;
    double old_sq;
  };

  double term(double sq) const { return std::pow(sq, -0.5 * q_); }

  void add_term(double sq) {
    if (sq <= 0.0) {
      ++zeros_;
    } else {
      sum_ += term(sq);
    }
  }

  void remove_term(double sq) {
    if (sq <= 0.0) {
      --zeros_;
    } else {
      sum_ -= term(sq);
    }
  }

  Eigen::MatrixXd squared_;
  double q_;
  double sum_ = 0.0;
  int zeros_ = 0;
  long commits_ = 0;
  std::vector<Change> log_;
};

Eigen::MatrixXd coefficient_sq_distances(const Eigen::MatrixXd& coefficients,
                                         const Eigen::MatrixXd& gram) {
  const int n = static_cast<int>(coefficients.rows());
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      const Eigen::VectorXd delta = (coefficients.row(i) - coefficients.row(j)).transpose();
      sq(i, j) = sq(j, i) = gram_norm_sq(gram, delta);
    }
  }
  return sq;
}

Eigen::MatrixXd scalar_sq_distances(const Eigen::VectorXd& column) {
  const int n = static_cast<int>(column.size());
  Eigen::MatrixXd sq(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) sq(i, j) = (column[i] - column[j]) * (column[i] - column[j]);
  }
  return sq;
}

std::pair<int, int> distinct_pair(int n, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, n - 1);
  const int a = pick(rng);
  int b = pick(rng);
  while (b == a) b = pick(rng);
  return {a, b};
}

// Stage one: swaps two levels inside one coefficient column.
class CandidateProblem {
 public:
  CandidateProblem(Eigen::MatrixXd coefficients, const Eigen::MatrixXd& gram, double q)
      : coefficients_(std::move(coefficients)),
        gram_(gram),
        criterion_(coefficient_sq_distances(coefficients_, gram), q),
        best_(coefficients_) {}

  double value() const { return criterion_.value(); }

  double propose(Rng& rng) {
    criterion_.commit();
    const int n = static_cast<int>(coefficients_.rows());
    std::uniform_int_distribution<int> column(0, static_cast<int>(coefficients_.cols()) - 1);
    column_ = column(rng);
    std::tie(a_, b_) = distinct_pair(n, rng);
    std::swap(coefficients_(a_, column_), coefficients_(b_, column_));
    for (int l = 0; l < n; ++l) {
      if (l != a_) criterion_.update(a_, l, pair_sq(a_, l));
      if (l != b_ && l != a_) criterion_.update(b_, l, pair_sq(b_, l));
    }
    return criterion_.value();
  }

  void reject() {
    std::swap(coefficients_(a_, column_), coefficients_(b_, column_));
    criterion_.rollback();
  }

  void save_best() { best_ = coefficients_; }

  void restore_best() {
    coefficients_ = best_;
    criterion_.reset(coefficient_sq_distances(coefficients_, gram_));
  }

  const Eigen::MatrixXd& coefficients() const { return coefficients_; }

 private:
  double pair_sq(int i, int j) const {
    const Eigen::VectorXd delta = (coefficients_.row(i) - coefficients_.row(j)).transpose();
    return gram_norm_sq(gram_, delta);
  }

  Eigen::MatrixXd coefficients_;
  const Eigen::MatrixXd& gram_;
  PairCriterion criterion_;
  Eigen::MatrixXd best_;
  int column_ = 0;
  int a_ = 0;
  int b_ = 0;
};

// Stage two: every column keeps its contents; only the run-to-row mapping of
// one column changes per move.
class AlignmentProblem {
 public:
  AlignmentProblem(std::vector<Eigen::MatrixXd> column_sq, double q)
      : column_sq_(std::move(column_sq)),
        runs_(static_cast<int>(column_sq_.front().rows())),
        permutations_(column_sq_.size(), identity(runs_)),
        criterion_(combined(), q),
        best_(permutations_) {}

  double value() const { return criterion_.value(); }

  double propose(Rng& rng) {
    criterion_.commit();
    std::uniform_int_distribution<int> column(0, static_cast<int>(column_sq_.size()) - 1);
    column_ = column(rng);
    std::tie(a_, b_) = distinct_pair(runs_, rng);
    auto& perm = permutations_[column_];
    const Eigen::MatrixXd& base = column_sq_[column_];
    const int old_a = perm[a_];
    const int old_b = perm[b_];
    std::swap(perm[a_], perm[b_]);
    for (int l = 0; l < runs_; ++l) {
      if (l == a_ || l == b_) continue;
      const int pl = perm[l];
      criterion_.update(a_, l, criterion_.squared(a_, l) - base(old_a, pl) + base(old_b, pl));
      criterion_.update(b_, l, criterion_.squared(b_, l) - base(old_b, pl) + base(old_a, pl));
    }
    return criterion_.value();
  }

  void reject() {
    std::swap(permutations_[column_][a_], permutations_[column_][b_]);
    criterion_.rollback();
  }

  void save_best() { best_ = permutations_; }

  void restore_best() {
    permutations_ = best_;
    criterion_.reset(combined());
  }

  const std::vector<std::vector<int>>& permutations() const { return permutations_; }

 private:
  static std::vector<int> identity(int n) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    return perm;
  }

  Eigen::MatrixXd combined() const {
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(runs_, runs_);
    for (std::size_t c = 0; c < column_sq_.size(); ++c) {
      const auto& perm = permutations_[c];
      for (int i = 0; i < runs_; ++i) {
        for (int j = 0; j < runs_; ++j) sq(i, j) += column_sq_[c](perm[i], perm[j]);
      }
    }
    return sq;
  }

  std::vector<Eigen::MatrixXd> column_sq_;
  int runs_;
  std::vector<std::vector<int>> permutations_;
  PairCriterion criterion_;
  std::vector<std::vector<int>> best_;
  int column_ = 0;
  int a_ = 0;
  int b_ = 0;
};

// Free coefficients in [0,1] (clipped Gaussian steps) plus scalar swaps.
class FreeProblem {
 public:
  FreeProblem(Eigen::MatrixXd scalars, std::vector<Eigen::MatrixXd> coefficients,
              const Eigen::MatrixXd& gram, double q)
      : scalars_(std::move(scalars)),
        coefficients_(std::move(coefficients)),
        gram_(gram),
        runs_(static_cast<int>(scalars_.rows())),
        criterion_(Eigen::MatrixXd::Zero(runs_, runs_), q) {
    rebuild();
    best_scalars_ = scalars_;
    best_coefficients_ = coefficients_;
  }

  double value() const { return criterion_.value(); }

  double propose(Rng& rng) {
    criterion_.commit();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const bool scalar_move = scalars_.cols() > 0 && unit(rng) < 0.5;
    if (scalar_move) {
      std::uniform_int_distribution<int> column(0, static_cast<int>(scalars_.cols()) - 1);
      kind_ = Kind::kScalar;
      column_ = column(rng);
      std::tie(a_, b_) = distinct_pair(runs_, rng);
      const double xa = scalars_(a_, column_);
      const double xb = scalars_(b_, column_);
      std::swap(scalars_(a_, column_), scalars_(b_, column_));
      for (int l = 0; l < runs_; ++l) {
        if (l == a_ || l == b_) continue;
        const double xl = scalars_(l, column_);
        const double da_old = (xa - xl) * (xa - xl);
        const double db_old = (xb - xl) * (xb - xl);
        criterion_.update(a_, l, criterion_.squared(a_, l) - da_old + db_old);
        criterion_.update(b_, l, criterion_.squared(b_, l) - db_old + da_old);
      }
      return criterion_.value();
    }

    kind_ = Kind::kCoefficient;
    std::uniform_int_distribution<int> input(0, static_cast<int>(coefficients_.size()) - 1);
    std::uniform_int_distribution<int> run(0, runs_ - 1);
    std::uniform_int_distribution<int> coef(0, static_cast<int>(gram_.rows()) - 1);
    std::normal_distribution<double> step(0.0, kFreeStep);
    column_ = input(rng);
    a_ = run(rng);
    b_ = coef(rng);
    Eigen::MatrixXd& c = coefficients_[column_];
    old_value_ = c(a_, b_);
    c(a_, b_) = std::clamp(old_value_ + step(rng), 0.0, 1.0);
    old_row_ = functional_sq_[column_].row(a_);
    for (int l = 0; l < runs_; ++l) {
      if (l == a_) continue;
      const Eigen::VectorXd delta = (c.row(a_) - c.row(l)).transpose();
      const double fresh = gram_norm_sq(gram_, delta);
      const double total = criterion_.squared(a_, l) - functional_sq_[column_](a_, l) + fresh;
      functional_sq_[column_](a_, l) = functional_sq_[column_](l, a_) = fresh;
      criterion_.update(a_, l, total);
    }
    return criterion_.value();
  }

  void reject() {
    if (kind_ == Kind::kScalar) {
      std::swap(scalars_(a_, column_), scalars_(b_, column_));
    } else {
      coefficients_[column_](a_, b_) = old_value_;
      functional_sq_[column_].row(a_) = old_row_;
      functional_sq_[column_].col(a_) = old_row_.transpose();
    }
    criterion_.rollback();
  }

  void save_best() {
    best_scalars_ = scalars_;
    best_coefficients_ = coefficients_;
  }

  void restore_best() {
    scalars_ = best_scalars_;
    coefficients_ = best_coefficients_;
    rebuild();
  }

  const Eigen::MatrixXd& scalars() const { return scalars_; }
  const std::vector<Eigen::MatrixXd>& coefficients() const { return coefficients_; }

 private:
  enum class Kind { kScalar, kCoefficient };

  void rebuild() {
    functional_sq_.clear();
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(runs_, runs_);
    for (Eigen::Index c = 0; c < scalars_.cols(); ++c) total += scalar_sq_distances(scalars_.col(c));
    for (const auto& coef : coefficients_) {
      functional_sq_.push_back(coefficient_sq_distances(coef, gram_));
      total += functional_sq_.back();
    }
    criterion_.reset(std::move(total));
  }

  Eigen::MatrixXd scalars_;
  std::vector<Eigen::MatrixXd> coefficients_;
  const Eigen::MatrixXd& gram_;
  int runs_;
  std::vector<Eigen::MatrixXd> functional_sq_;
  PairCriterion criterion_;
  Eigen::MatrixXd best_scalars_;
  std::vector<Eigen::MatrixXd> best_coefficients_;
  Kind kind_ = Kind::kScalar;
  int column_ = 0;
  int a_ = 0;
  int b_ = 0;
  double old_value_ = 0.0;
  Eigen::RowVectorXd old_row_;
};

void check_runs(int runs) {
  if (runs < 2) throw ParameterError("a design needs at least 2 runs");
}

}  // namespace

int Design::runs() const noexcept {
  if (scalars.cols() > 0 || functionals.empty()) return static_cast<int>(scalars.rows());
  return static_cast<int>(functionals.front().rows());
}

void Design::validate() const {
  const int n = runs();
  if (scalars.rows() != n && scalars.cols() > 0) throw ParameterError("scalar row count mismatch");
  if ((scalars.array() < 0.0).any() || (scalars.array() > 1.0).any()) {
    throw ParameterError("scalar inputs must lie in [0,1]");
  }
  if (!functionals.empty() && !basis) throw ParameterError("functional inputs need a basis");
  for (const auto& coef : functionals) {
    if (coef.rows() != n) throw ParameterError("functional row count mismatch");
    if (coef.cols() != basis->size()) throw ParameterError("coefficient count mismatch");
    if ((coef.array() < 0.0).any() || (coef.array() > 1.0).any()) {
      throw ParameterError("coefficients must lie in [0,1]");
    }
  }
}

RunPoint Design::run(int i) const {
  if (i < 0 || i >= runs()) throw ParameterError("run index out of range");
  RunPoint point;
  point.scalars = scalars.cols() > 0 ? Eigen::VectorXd(scalars.row(i).transpose())
                                     : Eigen::VectorXd(0);
  point.functions.reserve(functionals.size());
  for (const auto& coef : functionals) {
    point.functions.emplace_back(basis, coef.row(i).transpose());
  }
  return point;
}

std::vector<RunPoint> Design::run_points() const {
  std::vector<RunPoint> points;
  points.reserve(runs());
  for (int i = 0; i < runs(); ++i) points.push_back(run(i));
  return points;
}

std::vector<FunctionalCurve> CandidateSet::curves() const {
  std::vector<FunctionalCurve> out;
  out.reserve(coefficients.rows());
  for (Eigen::Index i = 0; i < coefficients.rows(); ++i) {
    out.emplace_back(basis, coefficients.row(i).transpose());
  }
  return out;
}

Eigen::MatrixXd lhd(int runs, int dims, std::uint64_t seed) {
  check_runs(runs);
  if (dims < 0) throw ParameterError("dimension must be nonnegative");
  Rng rng = make_rng(seed, kLhdStream);
  Eigen::MatrixXd design(runs, dims);
  std::vector<int> levels(runs);
  for (int d = 0; d < dims; ++d) {
    std::iota(levels.begin(), levels.end(), 0);
    std::shuffle(levels.begin(), levels.end(), rng);
    for (int i = 0; i < runs; ++i) design(i, d) = static_cast<double>(levels[i]) / (runs - 1);
  }
  return design;
}

double phi_from_squared(std::span<const double> squared_distances, double q) {
  check_q(q);
  if (squared_distances.empty()) throw ParameterError("criterion needs at least one pair");
  double min_sq = std::numeric_limits<double>::infinity();
  for (double sq : squared_distances) {
    if (!(sq > 0.0)) throw DegenerateDesignError("design contains coinciding runs");
    min_sq = std::min(min_sq, sq);
  }
  // Scale by the smallest distance so large q cannot overflow.
  double sum = 0.0;
  for (double sq : squared_distances) sum += std::pow(min_sq / sq, 0.5 * q);
  return std::pow(sum, 1.0 / q) / std::sqrt(min_sq);
}

double phi_q(std::span<const FunctionalCurve> curves, double q) {
  if (curves.size() < 2) throw ParameterError("criterion needs at least two curves");
  std::vector<double> sq;
  sq.reserve(curves.size() * (curves.size() - 1) / 2);
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double d = functional_dist(curves[i], curves[j]);
      sq.push_back(d * d);
    }
  }
  return phi_from_squared(sq, q);
}

double phi_qc(const Design& design, double q) {
  const auto points = design.run_points();
  if (points.size() < 2) throw ParameterError("criterion needs at least two runs");
  std::vector<double> sq;
  sq.reserve(points.size() * (points.size() - 1) / 2);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double d = combined_dist(points[i], points[j]);
      sq.push_back(d * d);
    }
  }
  return phi_from_squared(sq, q);
}

CandidateSet candidate_set(int runs, BasisPtr basis, double q, const SaConfig& sa,
                           std::uint64_t seed, AnnealStats* stats) {
  check_runs(runs);
  check_q(q);
  if (!basis) throw ParameterError("candidate set needs a basis");
  sa.validate();

  CandidateSet best;
  best.basis = basis;
  double best_value = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < sa.restarts; ++restart) {
    Rng rng = make_rng(seed, kCandidateStream + restart);
    Eigen::MatrixXd start(runs, basis->size());
    std::vector<int> levels(runs);
    for (int k = 0; k < basis->size(); ++k) {
      std::iota(levels.begin(), levels.end(), 0);
      std::shuffle(levels.begin(), levels.end(), rng);
      for (int i = 0; i < runs; ++i) start(i, k) = static_cast<double>(levels[i]) / (runs - 1);
    }
    CandidateProblem problem(std::move(start), basis->gram(), q);
    const AnnealStats run = anneal(problem, sa, rng);
    CandidateSet trial{basis, problem.coefficients(), 0.0};
    const auto curves = trial.curves();
    trial.criterion = phi_q(curves, q);
    // Strict comparison keeps the earliest restart on ties.
    if (trial.criterion < best_value) {
      best_value = trial.criterion;
      best = std::move(trial);
      if (stats) *stats = run;
    }
  }
  return best;
}

Design assemble_design(const Eigen::MatrixXd& scalar_lhd, std::span<const CandidateSet> sets,
                       double q, const SaConfig& sa, std::uint64_t seed, AnnealStats* stats) {
  check_q(q);
  sa.validate();
  const int runs = static_cast<int>(sets.empty() ? scalar_lhd.rows() : sets.front().coefficients.rows());
  check_runs(runs);
  if (scalar_lhd.cols() > 0 && scalar_lhd.rows() != runs) {
    throw ParameterError("scalar design and candidate sets differ in run count");
  }
  BasisPtr basis;
  for (const auto& set : sets) {
    if (set.coefficients.rows() != runs) {
      throw ParameterError("candidate sets differ in run count");
    }
    if (!set.basis) throw ParameterError("candidate set without basis");
    if (basis && !(*basis == *set.basis)) throw ParameterError("candidate sets use different bases");
    basis = set.basis;
  }
  if (scalar_lhd.cols() + static_cast<Eigen::Index>(sets.size()) == 0) {
    throw ParameterError("design has no inputs");
  }

  std::vector<Eigen::MatrixXd> column_sq;
  for (Eigen::Index c = 0; c < scalar_lhd.cols(); ++c) {
    column_sq.push_back(scalar_sq_distances(scalar_lhd.col(c)));
  }
  for (const auto& set : sets) {
    column_sq.push_back(coefficient_sq_distances(set.coefficients, set.basis->gram()));
  }

  Design best;
  double best_value = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < sa.restarts; ++restart) {
    Rng rng = make_rng(seed, kAssembleStream + restart);
    AlignmentProblem problem(column_sq, q);
    const AnnealStats run = anneal(problem, sa, rng);
    const auto& perms = problem.permutations();

    Design trial;
    trial.basis = basis;
    trial.scalars.resize(runs, scalar_lhd.cols());
    for (Eigen::Index c = 0; c < scalar_lhd.cols(); ++c) {
      for (int i = 0; i < runs; ++i) trial.scalars(i, c) = scalar_lhd(perms[c][i], c);
    }
    for (std::size_t k = 0; k < sets.size(); ++k) {
      const auto& perm = perms[scalar_lhd.cols() + k];
      Eigen::MatrixXd coef(runs, sets[k].coefficients.cols());
      for (int i = 0; i < runs; ++i) coef.row(i) = sets[k].coefficients.row(perm[i]);
      trial.functionals.push_back(std::move(coef));
    }
    trial.meta = {q, seed};
    trial.criterion = phi_qc(trial, q);
    if (trial.criterion < best_value) {
      best_value = trial.criterion;
      best = std::move(trial);
      if (stats) *stats = run;
    }
  }
  return best;
}

Design free_maximin_demo(int runs, int scalar_inputs, int functional_inputs, BasisPtr basis,
                         double q, const SaConfig& sa, std::uint64_t seed, AnnealStats* stats) {
  check_runs(runs);
  check_q(q);
  sa.validate();
  if (!basis) throw ParameterError("demo needs a basis");
  if (functional_inputs < 1 || scalar_inputs < 0) {
    throw ParameterError("demo needs at least one functional input");
  }

  Design best;
  double best_value = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < sa.restarts; ++restart) {
    Rng rng = make_rng(seed, kFreeStream + restart);
    Eigen::MatrixXd scalars = lhd(runs, scalar_inputs, seed + restart);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Eigen::MatrixXd> coefficients;
    for (int k = 0; k < functional_inputs; ++k) {
      Eigen::MatrixXd coef(runs, basis->size());
      for (Eigen::Index i = 0; i < coef.size(); ++i) coef.data()[i] = unit(rng);
      coefficients.push_back(std::move(coef));
    }
    FreeProblem problem(std::move(scalars), std::move(coefficients), basis->gram(), q);
    const AnnealStats run = anneal(problem, sa, rng);

    Design trial;
    trial.basis = basis;
    trial.scalars = problem.scalars();
    trial.functionals = problem.coefficients();
    trial.meta = {q, seed};
    trial.criterion = phi_qc(trial, q);
    if (trial.criterion < best_value) {
      best_value = trial.criterion;
      best = std::move(trial);
      if (stats) *stats = run;
    }
  }
  return best;
}

double extreme_fraction(const Design& design, double tolerance) {
  long total = 0;
  long extreme = 0;
  for (const auto& coef : design.functionals) {
    for (Eigen::Index i = 0; i < coef.size(); ++i) {
      const double v = coef.data()[i];
      ++total;
      if (v <= tolerance || v >= 1.0 - tolerance) ++extreme;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(extreme) / total;
}

Design generate_design(const DesignRequest& request) {
  check_runs(request.runs);
  if (request.scalar_inputs < 0 || request.functional_inputs < 0 ||
      request.scalar_inputs + request.functional_inputs == 0) {
    throw ParameterError("design needs at least one input");
  }
  BasisPtr basis = make_basis(request.basis_size, request.basis_order);
  std::vector<CandidateSet> sets;
  if (request.functional_inputs > 0) {
    CandidateSet set = candidate_set(request.runs, basis, request.q, request.sa, request.seed);
    sets.assign(request.functional_inputs, set);
  }
  const Eigen::MatrixXd scalars = lhd(request.runs, request.scalar_inputs, request.seed);
  Design design = assemble_design(scalars, sets, request.q, request.sa, request.seed);
  design.basis = basis;
  return design;
}

}  // namespace funcdoe
