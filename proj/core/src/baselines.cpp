#include "ssqda/baselines.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace ssqda {

namespace {

double ridge_amount(int p, int n) {
  return std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

double log_det_spd(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

Vector sample_mean(const Matrix& samples) {
  if (samples.rows() < 1) throw InvalidInputError("sample_mean: empty sample");
  return samples.colwise().mean().transpose();
}

Matrix sample_covariance(const Matrix& samples) {
  const Eigen::Index n = samples.rows();
  if (n < 2) throw InvalidInputError("sample_covariance: needs n >= 2");
  Matrix centered = samples.rowwise() - samples.colwise().mean();
  return (centered.transpose() * centered) / static_cast<double>(n - 1);
}

BaselineModel fit_sdar(const Matrix& class1, const Matrix& class2,
                       double lambda1, double lambda2,
                       const SolverOptions& opts) {
  if (class1.cols() != class2.cols()) {
    throw InvalidInputError("fit_sdar: class dimension mismatch");
  }
  Matrix cov1 = sample_covariance(class1);
  Matrix cov2 = sample_covariance(class2);
  Vector mean1 = sample_mean(class1);
  Vector mean2 = sample_mean(class2);

  DiscriminantModel model;
  MatrixSolverReport dm = solve_differential({cov1, cov2, lambda1}, opts);
  // Vector solves cost a factor p less per iteration than the matrix problem,
  // so the direction program gets a correspondingly larger budget.
  SolverOptions dir_opts = opts;
  dir_opts.max_iter = std::max(opts.max_iter, 20000);
  VectorSolverReport bm =
      solve_direction({cov2, mean2 - mean1, lambda2}, dir_opts);
  model.d_matrix = std::move(dm.solution);
  model.beta = std::move(bm.solution);
  model.median1 = std::move(mean1);
  model.median2 = std::move(mean2);
  model.logdet_term = log_det_term(model.d_matrix, cov1);
  model.prior_logratio = std::log(static_cast<double>(class1.rows()) /
                                  static_cast<double>(class2.rows()));
  return {BaselineKind::Sdar, std::move(model)};
}

BaselineModel fit_slda(const Matrix& class1, const Matrix& class2,
                       double lambda, const SolverOptions& opts) {
  if (class1.cols() != class2.cols()) {
    throw InvalidInputError("fit_slda: class dimension mismatch");
  }
  const double n1 = static_cast<double>(class1.rows());
  const double n2 = static_cast<double>(class2.rows());
  Matrix pooled = ((n1 - 1.0) * sample_covariance(class1) +
                   (n2 - 1.0) * sample_covariance(class2)) /
                  (n1 + n2 - 2.0);
  LinearModel model;
  model.mean1 = sample_mean(class1);
  model.mean2 = sample_mean(class2);
  SolverOptions dir_opts = opts;
  dir_opts.max_iter = std::max(opts.max_iter, 20000);
  VectorSolverReport bm =
      solve_direction({pooled, model.mean2 - model.mean1, lambda}, dir_opts);
  model.beta = std::move(bm.solution);
  model.prior_logratio = std::log(n1 / n2);
  return {BaselineKind::Slda, std::move(model)};
}

BaselineModel fit_ridge_lda(const Matrix& class1, const Matrix& class2) {
  if (class1.cols() != class2.cols()) {
    throw InvalidInputError("fit_ridge_lda: class dimension mismatch");
  }
  const double n1 = static_cast<double>(class1.rows());
  const double n2 = static_cast<double>(class2.rows());
  const int p = static_cast<int>(class1.cols());
  Matrix pooled = ((n1 - 1.0) * sample_covariance(class1) +
                   (n2 - 1.0) * sample_covariance(class2)) /
                  (n1 + n2 - 2.0);
  pooled.diagonal().array() +=
      ridge_amount(p, static_cast<int>(n1 + n2));
  Eigen::LLT<Matrix> llt(pooled);
  if (llt.info() != Eigen::Success) {
    throw DegenerateModelError("fit_ridge_lda: regularized covariance singular");
  }
  LinearModel model;
  model.mean1 = sample_mean(class1);
  model.mean2 = sample_mean(class2);
  model.beta = llt.solve(model.mean2 - model.mean1);
  model.prior_logratio = std::log(n1 / n2);
  return {BaselineKind::RidgeLda, std::move(model)};
}

BaselineModel fit_ridge_qda(const Matrix& class1, const Matrix& class2) {
  if (class1.cols() != class2.cols()) {
    throw InvalidInputError("fit_ridge_qda: class dimension mismatch");
  }
  const int p = static_cast<int>(class1.cols());
  QdaPluginModel model;
  model.mean1 = sample_mean(class1);
  model.mean2 = sample_mean(class2);
  Matrix cov1 = sample_covariance(class1);
  Matrix cov2 = sample_covariance(class2);
  cov1.diagonal().array() += ridge_amount(p, static_cast<int>(class1.rows()));
  cov2.diagonal().array() += ridge_amount(p, static_cast<int>(class2.rows()));
  Eigen::LLT<Matrix> llt1(cov1), llt2(cov2);
  if (llt1.info() != Eigen::Success || llt2.info() != Eigen::Success) {
    throw DegenerateModelError("fit_ridge_qda: regularized covariance singular");
  }
  model.logdet1 = log_det_spd(llt1);
  model.logdet2 = log_det_spd(llt2);
  model.omega1 = llt1.solve(Matrix::Identity(p, p));
  model.omega2 = llt2.solve(Matrix::Identity(p, p));
  model.prior_logratio = std::log(static_cast<double>(class1.rows()) /
                                  static_cast<double>(class2.rows()));
  return {BaselineKind::RidgeQda, std::move(model)};
}

int classify_baseline(const BaselineModel& model, const Vector& z) {
  switch (model.kind) {
    case BaselineKind::Sdar:
      return classify(std::get<DiscriminantModel>(model.params), z);
    case BaselineKind::Slda:
    case BaselineKind::RidgeLda: {
      const auto& m = std::get<LinearModel>(model.params);
      double score = m.beta.dot(z - 0.5 * (m.mean1 + m.mean2)) +
                     m.prior_logratio;
      return score < 0.0 ? 1 : 2;
    }
    case BaselineKind::RidgeQda: {
      const auto& m = std::get<QdaPluginModel>(model.params);
      Vector c1 = z - m.mean1;
      Vector c2 = z - m.mean2;
      double q = -0.5 * c1.dot(m.omega1 * c1) - 0.5 * m.logdet1 +
                 0.5 * c2.dot(m.omega2 * c2) + 0.5 * m.logdet2 +
                 m.prior_logratio;
      return q > 0.0 ? 1 : 2;
    }
  }
  throw InvalidInputError("classify_baseline: unknown kind");
}

}  // namespace ssqda
