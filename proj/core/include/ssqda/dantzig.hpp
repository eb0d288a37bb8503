#pragma once

#include <Eigen/Core>

#include "ssqda/errors.hpp"
#include "ssqda/estimators.hpp"

namespace ssqda {

/// min ||Vec(D)||_1  s.t.  ||(1/2) S1 D S2 + (1/2) S2 D S1 - S1 + S2||_max <= lambda
struct DifferentialProblem {
  Matrix scatter1;
  Matrix scatter2;
  double lambda = 0.0;
};

/// min ||beta||_1  s.t.  ||S2 beta - delta||_inf <= lambda
struct DirectionProblem {
  Matrix scatter2;
  Vector delta;
  double lambda = 0.0;
};

struct SolverOptions {
  double rho = 1.0;
  double eps_abs = 1e-6;
  double eps_rel = 1e-6;
  double feas_tol = 1e-6;
  int max_iter = 5000;
  /// Residual balancing of the penalty parameter. Deterministic; speeds up
  /// badly scaled instances considerably.
  bool adaptive_rho = true;
  /// 1.0 disables over-relaxation; values around 1.8 roughly halve the
  /// iteration count on large instances.
  double over_relaxation = 1.0;
};

struct MatrixSolverReport {
  Matrix solution;
  double objective = 0.0;
  double feasibility_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  /// max-norm asymmetry of the raw iterate before symmetrization
  double asymmetry = 0.0;
};

struct VectorSolverReport {
  Vector solution;
  double objective = 0.0;
  double feasibility_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

MatrixSolverReport solve_differential(const DifferentialProblem& problem,
                                      const SolverOptions& opts = {});

VectorSolverReport solve_direction(const DirectionProblem& problem,
                                   const SolverOptions& opts = {});

/// base * sqrt(hint) * (sqrt(1/p) + sqrt(log(p)/n))
double lambda_schedule(double base_constant, double sparsity_hint, int n, int p);

/// sqrt(1/p) + sqrt(log(p)/n), the scale factor of the tuning parameters.
double rate_factor(int n, int p);

}  // namespace ssqda
