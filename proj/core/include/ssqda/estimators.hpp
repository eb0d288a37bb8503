#pragma once

#include <Eigen/Core>

#include "ssqda/errors.hpp"

namespace ssqda {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Robust location/scatter estimate for one class: spatial median, spatial-sign
/// covariance at that median, a U-statistic estimate of tr(Sigma), and their
/// product scatter = trace_est * sign_cov.
struct ScatterEstimate {
  Vector median;
  Matrix sign_cov;
  double trace_est = 0.0;
  Matrix scatter;
  /// Set when the raw trace estimate was negative and clamped to the floor.
  bool trace_clamped = false;
};

/// x / ||x||_2 for x != 0, the zero vector otherwise.
Vector spatial_sign(const Vector& x);

/// Geometric median of the rows of `samples` (modified Weiszfeld iteration,
/// coordinate-wise median start). `tol` is on the relative iterate change.
Vector spatial_median(const Matrix& samples, double tol = 1e-8,
                      int max_iter = 500);

/// (1/n) sum_i U(X_i - center) U(X_i - center)^T. Symmetric PSD; rows equal to
/// `center` contribute a zero outer product.
Matrix sign_covariance(const Matrix& samples, const Vector& center);

/// Triple-sum U-statistic estimate of tr(Sigma), evaluated through its O(n p)
/// algebraic expansion. Requires n >= 3.
double trace_estimator(const Matrix& samples);

/// Runs the full per-class pipeline: median, sign covariance, trace estimate,
/// assembled scatter. Negative trace estimates are clamped to 1e-8 * p and
/// flagged.
ScatterEstimate assemble_scatter(const Matrix& samples, double tol = 1e-8,
                                 int max_iter = 500);

}  // namespace ssqda
