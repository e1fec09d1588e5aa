#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "funcdoe/annealing.hpp"
#include "funcdoe/bspline.hpp"
#include "funcdoe/metric.hpp"

namespace funcdoe {

inline constexpr double kDefaultQ = 5.0;

struct DesignMeta {
  double q = kDefaultQ;
  std::uint64_t seed = 0;
};

/// n runs of d_s scalar columns and d_f functional columns. All functional
/// inputs share one basis; each is stored as an n x K coefficient matrix.
struct Design {
  BasisPtr basis;
  Eigen::MatrixXd scalars;                   // n x d_s
  std::vector<Eigen::MatrixXd> functionals;  // d_f matrices, n x K
  double criterion = std::numeric_limits<double>::quiet_NaN();
  DesignMeta meta;

  int runs() const noexcept;
  int scalar_inputs() const noexcept { return static_cast<int>(scalars.cols()); }
  int functional_inputs() const noexcept { return static_cast<int>(functionals.size()); }

  RunPoint run(int i) const;
  std::vector<RunPoint> run_points() const;

  /// Throws ParameterError if shapes are inconsistent or values leave [0,1].
  void validate() const;
};

/// A candidate set of n curves: an n x K coefficient matrix whose columns
/// are permutations of the LHD levels.
struct CandidateSet {
  BasisPtr basis;
  Eigen::MatrixXd coefficients;
  double criterion = std::numeric_limits<double>::quiet_NaN();

  std::vector<FunctionalCurve> curves() const;
};

/// Random Latin hypercube: every column is a permutation of
/// {0, 1/(n-1), ..., 1}.
Eigen::MatrixXd lhd(int runs, int dims, std::uint64_t seed);

/// Morris-Mitchell criterion (sum_{i<j} d_ij^-q)^(1/q) from squared pairwise
/// distances. Throws DegenerateDesignError if a distance is zero.
double phi_from_squared(std::span<const double> squared_distances, double q);

/// Phi_q over pairwise functional L2 distances of a curve set.
double phi_q(std::span<const FunctionalCurve> curves, double q);

/// Phi_q over pairwise combined distances of the runs of a design.
double phi_qc(const Design& design, double q);

/// Stage one: Phi_q-optimal LHD-structured coefficients by within-column
/// level swaps. `stats`, if given, receives the winning restart's statistics.
CandidateSet candidate_set(int runs, BasisPtr basis, double q, const SaConfig& sa,
                           std::uint64_t seed, AnnealStats* stats = nullptr);

/// Stage two: aligns the scalar LHD columns and the functional candidate
/// sets by swapping rows inside single columns, minimizing Phi_q^c. The
/// annealing starts from the alignment given.
Design assemble_design(const Eigen::MatrixXd& scalar_lhd, std::span<const CandidateSet> sets,
                       double q, const SaConfig& sa, std::uint64_t seed,
                       AnnealStats* stats = nullptr);

/// Unconstrained annealing over coefficients in [0,1]^(n x K) plus scalar
/// LHD permutations, for inspecting where maximin-optimal curves end up.
Design free_maximin_demo(int runs, int scalar_inputs, int functional_inputs, BasisPtr basis,
                         double q, const SaConfig& sa, std::uint64_t seed,
                         AnnealStats* stats = nullptr);

/// Fraction of functional coefficients within `tolerance` of 0 or 1.
double extreme_fraction(const Design& design, double tolerance);

struct DesignRequest {
  int runs = 0;
  int scalar_inputs = 0;
  int functional_inputs = 0;
  int basis_size = 7;
  int basis_order = 4;
  double q = kDefaultQ;
  SaConfig sa;
  std::uint64_t seed = 0;
};

/// Full two-stage construction: one candidate set reused for every
/// functional input, a random scalar LHD, then assembly.
Design generate_design(const DesignRequest& request);

}  // namespace funcdoe
