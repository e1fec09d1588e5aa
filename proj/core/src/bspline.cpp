#include "funcdoe/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "funcdoe/error.hpp"

namespace funcdoe {

namespace {

constexpr int kPeakGridPoints = 1001;
constexpr double kPeakTolerance = 1e-8;

void check_unit_interval(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw ParameterError("evaluation point " + std::to_string(t) + " outside [0,1]");
  }
}

}  // namespace

GaussRule gauss_legendre(int points) {
  if (points < 1) throw ParameterError("Gauss-Legendre rule needs at least one node");
  if (points == 1) return {{0.0}, {2.0}};
  GaussRule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  const int half = (points + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Three-term recurrence for P_n(x) and P_{n-1}(x).
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= points; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      derivative = points * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / derivative;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[points - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    rule.weights[i] = w;
    rule.weights[points - 1 - i] = w;
  }
  return rule;
}

BSplineBasis::BSplineBasis(int size, int order) : size_(size), order_(order) {
  if (order < 1) throw ParameterError("B-spline order must be >= 1");
  if (size < order) throw ParameterError("number of basis functions must be >= order");

  const int interior = size - order;
  knots_.assign(size + order, 0.0);
  for (int j = 0; j < interior; ++j) {
    knots_[order + j] = static_cast<double>(j + 1) / (interior + 1);
  }
  std::fill(knots_.begin() + size, knots_.end(), 1.0);

  gram_ = Eigen::MatrixXd::Zero(size, size);
  moment0_ = Eigen::VectorXd::Zero(size);
  moment1_ = Eigen::VectorXd::Zero(size);

  // order nodes integrate degree 2*order - 1 exactly; B_i B_j has degree 2*(order-1).
  const GaussRule rule = gauss_legendre(order);
  std::vector<double> local(order);
  for (int span = order - 1; span < size; ++span) {
    const double a = knots_[span];
    const double b = knots_[span + 1];
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const int first = span - order + 1;
    for (int q = 0; q < order; ++q) {
      const double t = mid + half * rule.nodes[q];
      const double w = half * rule.weights[q];
      eval_span(span, t, local);
      for (int r = 0; r < order; ++r) {
        moment0_[first + r] += w * local[r];
        moment1_[first + r] += w * t * local[r];
        for (int c = 0; c < order; ++c) {
          gram_(first + r, first + c) += w * local[r] * local[c];
        }
      }
    }
  }
  gram_ = 0.5 * (gram_ + gram_.transpose()).eval();

  peaks_.resize(size);
  // Uniform clamped bases mirror about 1/2: B_i(t) = B_{K-1-i}(1 - t).
  for (int i = 0; i < (size + 1) / 2; ++i) {
    peaks_[i] = 2 * i + 1 == size ? 0.5 : locate_peak(i);
    peaks_[size - 1 - i] = 1.0 - peaks_[i];
  }
}

std::vector<double> BSplineBasis::distinct_knots() const {
  std::vector<double> out(knots_.begin() + order_ - 1, knots_.begin() + size_ + 1);
  return out;
}

int BSplineBasis::find_span(double t) const {
  if (t >= 1.0) return size_ - 1;
  // Last span index s in [order-1, size-1] with knots[s] <= t.
  const auto it = std::upper_bound(knots_.begin() + order_, knots_.begin() + size_, t);
  return static_cast<int>(it - knots_.begin()) - 1;
}

void BSplineBasis::eval_span(int span, double t, std::span<double> out) const {
  const int degree = order_ - 1;
  std::vector<double> left(order_), right(order_);
  out[0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    left[j] = t - knots_[span + 1 - j];
    right[j] = knots_[span + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = out[r] / (right[r + 1] + left[j - r]);
      out[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    out[j] = saved;
  }
}

Eigen::VectorXd BSplineBasis::eval_all(double t) const {
  check_unit_interval(t);
  Eigen::VectorXd values = Eigen::VectorXd::Zero(size_);
  const int span = find_span(t);
  std::vector<double> local(order_);
  eval_span(span, t, local);
  const int first = span - order_ + 1;
  for (int r = 0; r < order_; ++r) values[first + r] = local[r];
  return values;
}

double BSplineBasis::eval(int i, double t) const {
  if (i < 0 || i >= size_) throw ParameterError("basis index out of range");
  check_unit_interval(t);
  const int span = find_span(t);
  const int first = span - order_ + 1;
  if (i < first || i > span) return 0.0;
  std::vector<double> local(order_);
  eval_span(span, t, local);
  return local[i - first];
}

const Eigen::VectorXd& BSplineBasis::moments(int power) const {
  switch (power) {
    case 0:
      return moment0_;
    case 1:
      return moment1_;
    default:
      throw ParameterError("moment power must be 0 or 1");
  }
}

double BSplineBasis::peak(int i) const {
  if (i < 0 || i >= size_) throw ParameterError("basis index out of range");
  return peaks_[i];
}

double BSplineBasis::locate_peak(int i) const {
  if (order_ == 1) return 0.5 * (knots_[i] + knots_[i + 1]);

  const int last = kPeakGridPoints - 1;
  int best = 0;
  double best_value = -1.0;
  for (int g = 0; g <= last; ++g) {
    const double value = eval(i, static_cast<double>(g) / last);
    if (value > best_value) {
      best_value = value;
      best = g;
    }
  }
  if (best == 0) return 0.0;
  if (best == last) return 1.0;

  // Golden-section refinement inside the bracketing grid cells.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = static_cast<double>(best - 1) / last;
  double hi = static_cast<double>(best + 1) / last;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = eval(i, x1);
  double f2 = eval(i, x2);
  while (hi - lo > kPeakTolerance) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = eval(i, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = eval(i, x1);
    }
  }
  return 0.5 * (lo + hi);
}

BasisPtr make_basis(int size, int order) {
  return std::make_shared<const BSplineBasis>(size, order);
}

FunctionalCurve::FunctionalCurve(BasisPtr basis, Eigen::VectorXd coefficients)
    : basis_(std::move(basis)), coefficients_(std::move(coefficients)) {
  if (!basis_) throw ParameterError("curve needs a basis");
  if (coefficients_.size() != basis_->size()) {
    throw ParameterError("coefficient count does not match basis size");
  }
  for (Eigen::Index i = 0; i < coefficients_.size(); ++i) {
    if (!(coefficients_[i] >= 0.0 && coefficients_[i] <= 1.0)) {
      throw ParameterError("curve coefficients must lie in [0,1]");
    }
  }
}

double FunctionalCurve::operator()(double t) const {
  return coefficients_.dot(basis_->eval_all(t));
}

}  // namespace funcdoe
