#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace funcdoe {

/// Clamped uniform B-spline basis on [0,1].
///
/// The knot vector has K + m entries: m zeros, K - m uniformly spaced
/// interior knots and m ones, i.e. K - m + 2 distinct knots. The Gram matrix
/// J_ij = \int_0^1 B_i B_j dt, the moment vectors \int_0^1 t^p B_i dt (p = 0, 1)
/// and the location of each basis function's maximum are computed once at
/// construction with span-wise Gauss-Legendre quadrature, which is exact for
/// these piecewise polynomials.
///
/// Basis indices are zero-based throughout: i in [0, K).
class BSplineBasis {
 public:
  /// Throws ParameterError unless size >= order >= 1.
  BSplineBasis(int size, int order);

  int size() const noexcept { return size_; }
  int order() const noexcept { return order_; }

  std::span<const double> knots() const noexcept { return knots_; }
  std::vector<double> distinct_knots() const;

  /// Value of B_i at t. t = 1 is assigned to the last non-empty span so the
  /// basis sums to one on the closed interval.
  double eval(int i, double t) const;

  /// All K basis values at t.
  Eigen::VectorXd eval_all(double t) const;

  const Eigen::MatrixXd& gram() const noexcept { return gram_; }

  /// \int_0^1 t^power B_i(t) dt for power in {0, 1}.
  const Eigen::VectorXd& moments(int power) const;

  /// Location where B_i attains its maximum. Order-1 plateaus report the
  /// midpoint of their span.
  double peak(int i) const;
  std::span<const double> peaks() const noexcept { return peaks_; }

  friend bool operator==(const BSplineBasis& a, const BSplineBasis& b) noexcept {
    return a.size_ == b.size_ && a.order_ == b.order_;
  }

 private:
  int find_span(double t) const;
  // Nonzero basis values on span s, written to out[0..order).
  void eval_span(int span, double t, std::span<double> out) const;
  double locate_peak(int i) const;

  int size_;
  int order_;
  std::vector<double> knots_;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd moment0_;
  Eigen::VectorXd moment1_;
  std::vector<double> peaks_;
};

using BasisPtr = std::shared_ptr<const BSplineBasis>;

BasisPtr make_basis(int size, int order);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int points);

/// A function f(t) = sum_i beta_i B_i(t) with all beta_i in [0, 1], hence
/// 0 <= f <= 1 on [0, 1].
class FunctionalCurve {
 public:
  FunctionalCurve(BasisPtr basis, Eigen::VectorXd coefficients);

  const BSplineBasis& basis() const noexcept { return *basis_; }
  const BasisPtr& basis_ptr() const noexcept { return basis_; }
  const Eigen::VectorXd& coefficients() const noexcept { return coefficients_; }

  double operator()(double t) const;

 private:
  BasisPtr basis_;
  Eigen::VectorXd coefficients_;
};

}  // namespace funcdoe
