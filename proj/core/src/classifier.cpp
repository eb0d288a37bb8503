#include "ssqda/classifier.hpp"

#include <Eigen/LU>
#include <cmath>

namespace ssqda {

double log_det_term(const Matrix& d_matrix, const Matrix& scatter1) {
  const Eigen::Index p = scatter1.rows();
  if (d_matrix.rows() != p || d_matrix.cols() != p || scatter1.cols() != p) {
    throw InvalidInputError("log_det_term: dimension mismatch");
  }
  Matrix m = d_matrix * scatter1;
  m.diagonal().array() += 1.0;
  Eigen::PartialPivLU<Matrix> lu(m);
  const auto& diag = lu.matrixLU().diagonal();
  double log_abs = 0.0;
  double sign = lu.permutationP().determinant();
  for (Eigen::Index i = 0; i < p; ++i) {
    double d = diag[i];
    if (d == 0.0 || !std::isfinite(d)) {
      throw DegenerateModelError("log_det_term: singular D*S1 + I");
    }
    if (d < 0.0) sign = -sign;
    log_abs += std::log(std::abs(d));
  }
  if (sign <= 0.0) {
    throw DegenerateModelError(
        "log_det_term: |D*S1 + I| <= 0, estimate outside admissible region");
  }
  return log_abs;
}

DiscriminantModel fit_from_scatters(const ScatterEstimate& est1,
                                    const ScatterEstimate& est2, int n1, int n2,
                                    double lambda1, double lambda2,
                                    const SolverOptions& solver) {
  DiscriminantModel model;
  MatrixSolverReport dm =
      solve_differential({est1.scatter, est2.scatter, lambda1}, solver);
  // Vector solves cost a factor p less per iteration than the matrix problem,
  // so the direction program gets a correspondingly larger budget.
  SolverOptions dir_opts = solver;
  dir_opts.max_iter = std::max(solver.max_iter, 20000);
  VectorSolverReport bm = solve_direction(
      {est2.scatter, est2.median - est1.median, lambda2}, dir_opts);
  model.d_matrix = std::move(dm.solution);
  model.beta = std::move(bm.solution);
  model.median1 = est1.median;
  model.median2 = est2.median;
  model.logdet_term = log_det_term(model.d_matrix, est1.scatter);
  model.prior_logratio =
      std::log(static_cast<double>(n1) / static_cast<double>(n2));
  return model;
}

DiscriminantModel fit(const Matrix& class1, const Matrix& class2,
                      double lambda1, double lambda2, const FitOptions& opts) {
  if (class1.cols() != class2.cols()) {
    throw InvalidInputError("fit: class dimension mismatch");
  }
  ScatterEstimate est1 =
      assemble_scatter(class1, opts.median_tol, opts.median_max_iter);
  ScatterEstimate est2 =
      assemble_scatter(class2, opts.median_tol, opts.median_max_iter);
  return fit_from_scatters(est1, est2, static_cast<int>(class1.rows()),
                           static_cast<int>(class2.rows()), lambda1, lambda2,
                           opts.solver);
}

double discriminant(const DiscriminantModel& model, const Vector& z) {
  if (z.size() != model.median1.size()) {
    throw InvalidInputError("discriminant: dimension mismatch");
  }
  Vector c1 = z - model.median1;
  Vector mid = z - 0.5 * (model.median1 + model.median2);
  return c1.dot(model.d_matrix * c1) - 2.0 * model.beta.dot(mid) -
         model.logdet_term + model.prior_logratio;
}

int classify(const DiscriminantModel& model, const Vector& z) {
  return discriminant(model, z) > 0.0 ? 1 : 2;
}

MultigroupModel fit_multigroup(const std::vector<Matrix>& classes,
                               double lambda1, double lambda2,
                               const FitOptions& opts) {
  const size_t k_count = classes.size();
  if (k_count < 2) {
    throw InvalidInputError("fit_multigroup: needs at least two classes");
  }
  double total = 0.0;
  for (const Matrix& c : classes) total += static_cast<double>(c.rows());

  MultigroupModel model;
  ScatterEstimate est1 =
      assemble_scatter(classes[0], opts.median_tol, opts.median_max_iter);
  model.median1 = est1.median;
  model.scatter1 = est1.scatter;
  const double n1 = static_cast<double>(classes[0].rows());

  for (size_t k = 1; k < k_count; ++k) {
    if (classes[k].cols() != classes[0].cols()) {
      throw InvalidInputError("fit_multigroup: class dimension mismatch");
    }
    ScatterEstimate estk =
        assemble_scatter(classes[k], opts.median_tol, opts.median_max_iter);
    MultigroupClassTerm term;
    MatrixSolverReport dm =
        solve_differential({est1.scatter, estk.scatter, lambda1}, opts.solver);
    // The multigroup direction problem is posed against the class-1 scatter.
    SolverOptions dir_opts = opts.solver;
    dir_opts.max_iter = std::max(opts.solver.max_iter, 20000);
    VectorSolverReport bm = solve_direction(
        {est1.scatter, estk.median - est1.median, lambda2}, dir_opts);
    term.d_matrix = std::move(dm.solution);
    term.beta = std::move(bm.solution);
    term.median = estk.median;
    term.logdet_term = log_det_term(term.d_matrix, est1.scatter);
    term.prior_logratio =
        std::log(n1 / static_cast<double>(classes[k].rows()));
    model.terms.push_back(std::move(term));
  }
  return model;
}

std::vector<double> multigroup_scores(const MultigroupModel& model,
                                      const Vector& z) {
  std::vector<double> scores;
  scores.reserve(model.terms.size() + 1);
  scores.push_back(0.0);  // Q_1: own differential terms vanish
  for (const MultigroupClassTerm& term : model.terms) {
    Vector ck = z - term.median;
    Vector mid = z - 0.5 * (model.median1 + term.median);
    scores.push_back(0.5 * ck.dot(term.d_matrix * ck) - term.beta.dot(mid) -
                     0.5 * term.logdet_term + term.prior_logratio);
  }
  return scores;
}

int classify_multigroup(const MultigroupModel& model, const Vector& z) {
  std::vector<double> scores = multigroup_scores(model, z);
  int best = 1;
  for (size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] < scores[static_cast<size_t>(best - 1)]) {
      best = static_cast<int>(k) + 1;
    }
  }
  return best;
}

}  // namespace ssqda
