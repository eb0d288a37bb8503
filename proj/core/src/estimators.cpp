#include "ssqda/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ssqda {

namespace {

void check_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw InvalidInputError(std::string(what) + ": non-finite entries");
  }
}

Vector coordinatewise_median(const Matrix& samples) {
  const Eigen::Index n = samples.rows();
  const Eigen::Index p = samples.cols();
  Vector out(p);
  std::vector<double> col(static_cast<size_t>(n));
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) col[static_cast<size_t>(i)] = samples(i, j);
    auto mid = col.begin() + n / 2;
    std::nth_element(col.begin(), mid, col.end());
    if (n % 2 == 1) {
      out[j] = *mid;
    } else {
      double hi = *mid;
      double lo = *std::max_element(col.begin(), mid);
      out[j] = 0.5 * (lo + hi);
    }
  }
  return out;
}

}  // namespace

Vector spatial_sign(const Vector& x) {
  if (!x.allFinite()) {
    throw InvalidInputError("spatial_sign: non-finite input");
  }
  double norm = x.norm();
  if (norm == 0.0) return Vector::Zero(x.size());
  return x / norm;
}

Vector spatial_median(const Matrix& samples, double tol, int max_iter) {
  check_finite(samples, "spatial_median");
  const Eigen::Index n = samples.rows();
  if (n < 1) throw InvalidInputError("spatial_median: empty sample");
  if (n == 1) return samples.row(0).transpose();

  Vector mu = coordinatewise_median(samples);
  double residual = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector weighted = Vector::Zero(samples.cols());
    Vector grad = Vector::Zero(samples.cols());
    double wsum = 0.0;
    double tie_weight = 0.0;  // number of samples coinciding with mu
    for (Eigen::Index i = 0; i < n; ++i) {
      Vector diff = samples.row(i).transpose() - mu;
      double d = diff.norm();
      if (d < 1e-14 * (1.0 + mu.norm())) {
        tie_weight += 1.0;
        continue;
      }
      double w = 1.0 / d;
      weighted += w * samples.row(i).transpose();
      grad += diff * w;
      wsum += w;
    }
    if (wsum == 0.0) return mu;  // all samples coincide with the iterate

    Vector next;
    if (tie_weight > 0.0) {
      // Vardi-Zhang step: move only if the pull of the other samples exceeds
      // the weight of the coincident ones.
      double gnorm = grad.norm();
      if (gnorm <= tie_weight) return mu;
      Vector t = weighted / wsum;
      double gamma = std::min(1.0, tie_weight / gnorm);
      next = (1.0 - gamma) * t + gamma * mu;
    } else {
      next = weighted / wsum;
    }
    residual = (next - mu).norm() / std::max(1.0, mu.norm());
    mu = next;
    if (residual <= tol) return mu;
  }
  throw ConvergenceError("spatial_median: max_iter exceeded", mu, residual);
}

Matrix sign_covariance(const Matrix& samples, const Vector& center) {
  check_finite(samples, "sign_covariance");
  const Eigen::Index n = samples.rows();
  const Eigen::Index p = samples.cols();
  if (n < 1) throw InvalidInputError("sign_covariance: empty sample");
  if (center.size() != p) {
    throw InvalidInputError("sign_covariance: center dimension mismatch");
  }
  Matrix s = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector diff = samples.row(i).transpose() - center;
    double norm = diff.norm();
    if (norm == 0.0) continue;
    diff /= norm;
    s.selfadjointView<Eigen::Lower>().rankUpdate(diff, 1.0 / static_cast<double>(n));
  }
  s = s.selfadjointView<Eigen::Lower>();
  return s;
}

double trace_estimator(const Matrix& samples) {
  check_finite(samples, "trace_estimator");
  const Eigen::Index n = samples.rows();
  if (n < 3) {
    throw InsufficientSamplesError("trace_estimator: needs n >= 3");
  }
  // The triple sum over distinct (i, j, k) collapses to
  // (n-2) * (n * sum_i ||X_i||^2 - ||sum_i X_i||^2), so the estimator is
  // (n * T - ||S||^2) / (n (n-1)) with T and S single-pass sums.
  const double nn = static_cast<double>(n);
  double sq_sum = samples.squaredNorm();
  Vector col_sum = samples.colwise().sum().transpose();
  return (nn * sq_sum - col_sum.squaredNorm()) / (nn * (nn - 1.0));
}

ScatterEstimate assemble_scatter(const Matrix& samples, double tol,
                                 int max_iter) {
  const Eigen::Index n = samples.rows();
  if (n < 3) {
    throw InsufficientSamplesError("assemble_scatter: needs n >= 3");
  }
  ScatterEstimate est;
  est.median = spatial_median(samples, tol, max_iter);
  est.sign_cov = sign_covariance(samples, est.median);
  est.trace_est = trace_estimator(samples);
  const double floor = 1e-8 * static_cast<double>(samples.cols());
  if (est.trace_est < floor) {
    est.trace_est = floor;
    est.trace_clamped = true;
  }
  est.scatter = est.trace_est * est.sign_cov;
  return est;
}

}  // namespace ssqda
