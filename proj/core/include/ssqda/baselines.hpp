#pragma once

#include <variant>

#include "ssqda/classifier.hpp"

namespace ssqda {

enum class BaselineKind { Sdar, Slda, RidgeLda, RidgeQda };

/// Linear rule with direction beta and midpoint threshold; class 1 when
/// beta^T (z - (m1+m2)/2) + prior_logratio < 0.
struct LinearModel {
  Vector beta;
  Vector mean1;
  Vector mean2;
  double prior_logratio = 0.0;
};

/// Plug-in QDA with ridge-regularized per-class covariances.
struct QdaPluginModel {
  Matrix omega1;
  Matrix omega2;
  Vector mean1;
  Vector mean2;
  double logdet1 = 0.0;
  double logdet2 = 0.0;
  double prior_logratio = 0.0;
};

struct BaselineModel {
  BaselineKind kind;
  std::variant<DiscriminantModel, LinearModel, QdaPluginModel> params;
};

/// Sample mean and (n-1)-denominator sample covariance of the rows.
Vector sample_mean(const Matrix& samples);
Matrix sample_covariance(const Matrix& samples);

/// SSQDA pipeline with sample means/covariances in place of the robust
/// estimators (shares the Dantzig-type solvers).
BaselineModel fit_sdar(const Matrix& class1, const Matrix& class2,
                       double lambda1, double lambda2,
                       const SolverOptions& opts = {});

/// Direct sparse LDA: min ||beta||_1 s.t. ||S_pool beta - (m2 - m1)||_inf <= lambda.
BaselineModel fit_slda(const Matrix& class1, const Matrix& class2,
                       double lambda, const SolverOptions& opts = {});

/// Plug-in LDA/QDA with covariance + sqrt(log(p)/n) * I regularization.
BaselineModel fit_ridge_lda(const Matrix& class1, const Matrix& class2);
BaselineModel fit_ridge_qda(const Matrix& class1, const Matrix& class2);

int classify_baseline(const BaselineModel& model, const Vector& z);

}  // namespace ssqda
