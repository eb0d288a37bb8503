#pragma once

#include <vector>

#include "ssqda/dantzig.hpp"
#include "ssqda/estimators.hpp"

namespace ssqda {

struct FitOptions {
  double median_tol = 1e-8;
  int median_max_iter = 500;
  SolverOptions solver;
};

/// Fitted two-class quadratic rule:
///   Q(z) = (z - m1)^T D (z - m1) - 2 beta^T (z - (m1+m2)/2)
///          - log|D S1 + I| + log(pi1/pi2),
/// classify to 1 when Q(z) > 0, else 2.
struct DiscriminantModel {
  Matrix d_matrix;
  Vector beta;
  Vector median1;
  Vector median2;
  double logdet_term = 0.0;
  double prior_logratio = 0.0;
};

/// Per-class pieces of the multigroup rule Q_k relative to class 1.
struct MultigroupClassTerm {
  Matrix d_matrix;
  Vector beta;
  Vector median;  // class-k location
  double logdet_term = 0.0;
  double prior_logratio = 0.0;  // log(pi_1 / pi_k)
};

struct MultigroupModel {
  Vector median1;
  Matrix scatter1;
  /// Entry k-2 holds the terms for class k, k = 2..K. Q_1 is identically 0.
  std::vector<MultigroupClassTerm> terms;
};

/// log|D S1 + I|, via a pivoted LU of the (generally non-symmetric) product.
/// Throws DegenerateModelError when the determinant is not strictly positive.
double log_det_term(const Matrix& d_matrix, const Matrix& scatter1);

DiscriminantModel fit(const Matrix& class1, const Matrix& class2,
                      double lambda1, double lambda2,
                      const FitOptions& opts = {});

/// Convenience overload when per-class scatter estimates are already at hand
/// (cross-validation reuses them across a lambda grid).
DiscriminantModel fit_from_scatters(const ScatterEstimate& est1,
                                    const ScatterEstimate& est2, int n1, int n2,
                                    double lambda1, double lambda2,
                                    const SolverOptions& solver = {});

double discriminant(const DiscriminantModel& model, const Vector& z);

/// 1 if discriminant > 0, else 2.
int classify(const DiscriminantModel& model, const Vector& z);

MultigroupModel fit_multigroup(const std::vector<Matrix>& classes,
                               double lambda1, double lambda2,
                               const FitOptions& opts = {});

/// Q_k(z) for k = 1..K (index 0 is Q_1, identically 0 up to the prior).
std::vector<double> multigroup_scores(const MultigroupModel& model,
                                      const Vector& z);

/// argmin_k Q_k(z), ties toward the smallest class index. Labels are 1-based.
int classify_multigroup(const MultigroupModel& model, const Vector& z);

}  // namespace ssqda
