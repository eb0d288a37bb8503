#include "ssqda/dantzig.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

namespace ssqda {

namespace {

struct AdmmResult {
  double objective = 0.0;
  double feasibility_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Consensus ADMM for  min ||x||_1  s.t.  x in K,  ||P_K(N(x) - b)||_inf <= lambda
// with a self-adjoint linear map N and a subspace K (symmetric matrices for the
// differential problem, everything for the direction problem) whose orthogonal
// projector is `canon`. Splitting: w = x carries the l1 term plus the subspace
// constraint, z = N(x) - b the box constraint on its K-part (the complement is
// free and dies out at consensus). Both constraint blocks share one penalty, so
// the x-update solves the fixed, rho-independent system
// (I + N^2) x = (w - uw) + N(b + z - uz); `xsolve` applies that inverse
// exactly in the scatter eigenbases.
template <typename T>
struct AdmmProblem {
  std::function<T(const T&)> apply;   // N
  std::function<T(const T&)> xsolve;  // (I + N^2)^-1
  std::function<T(const T&)> canon;   // projector onto K
};

template <typename T>
AdmmResult admm_l1_linf(const AdmmProblem<T>& prob, const T& b, double lambda,
                        const SolverOptions& opts, T& x) {
  AdmmResult res;
  const double n_dim = static_cast<double>(x.size());
  const double m_dim = static_cast<double>(b.size());
  const double b_norm = b.norm();
  const double alpha = opts.over_relaxation;
  const double feas_limit = lambda + opts.feas_tol;

  auto project = [&](const T& v) {
    T s = prob.canon(v);
    return T(v - s + s.cwiseMin(lambda).cwiseMax(-lambda));
  };
  auto residual = [&](const T& nv) {  // nv = N(candidate)
    return prob.canon(T(nv - b)).template lpNorm<Eigen::Infinity>();
  };

  double rho = opts.rho;
  T w = prob.canon(x);
  T ax = prob.apply(x);
  T z = project(T(ax - b));
  T uw = T::Zero(x.rows(), x.cols());
  T uz = T::Zero(b.rows(), b.cols());

  // On instances whose solution sits on the constraint boundary the iterates
  // hover around feasibility instead of settling, so the best feasible sparse
  // iterate seen so far is tracked and returned if the loop times out.
  T best = w;
  double best_obj = -1.0;
  double best_res = residual(prob.apply(w));
  if (best_res <= feas_limit) best_obj = w.template lpNorm<1>();
  int stall = 0;

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    T rhs = (w - uw) + prob.apply(T(b + z - uz));
    x = prob.xsolve(rhs);
    ax = prob.apply(x);

    T xh = alpha * x + (1.0 - alpha) * w;
    T axh = alpha * ax + (1.0 - alpha) * (b + z);
    T w_prev = std::move(w);
    w = prob.canon(T(xh + uw)).unaryExpr([&](double v) {
      double t = 1.0 / rho;
      return v > t ? v - t : (v < -t ? v + t : 0.0);
    });
    T z_prev = std::move(z);
    z = project(T(axh - b + uz));
    uw += xh - w;
    uz += axh - b - z;

    double res_w = residual(prob.apply(w));
    if (res_w <= feas_limit) {
      double obj_w = w.template lpNorm<1>();
      if (best_obj < 0.0 || obj_w < best_obj - 1e-6 * (1.0 + best_obj)) {
        best_obj = obj_w;
        best = w;
        best_res = res_w;
        stall = 0;
      } else {
        ++stall;
      }
    } else if (best_obj >= 0.0) {
      ++stall;
    }

    double pri_norm =
        std::sqrt((x - w).squaredNorm() + (ax - b - z).squaredNorm());
    double dual_norm = rho * ((w - w_prev) + prob.apply(T(z - z_prev))).norm();
    double ax_side = std::sqrt(x.squaredNorm() + ax.squaredNorm());
    double bz_side = std::sqrt(w.squaredNorm() + z.squaredNorm());
    double eps_pri = std::sqrt(n_dim + m_dim) * opts.eps_abs +
                     opts.eps_rel * std::max({ax_side, bz_side, b_norm});
    double eps_dual = std::sqrt(n_dim) * opts.eps_abs +
                      opts.eps_rel * rho * (uw + prob.apply(uz)).norm();
    if (pri_norm <= eps_pri && dual_norm <= eps_dual) {
      res.converged = true;
      ++it;
      break;
    }
    if (best_obj >= 0.0 && stall >= 150) {
      ++it;
      break;
    }
    if (opts.adaptive_rho && it % 10 == 9) {
      if (pri_norm > 10.0 * dual_norm && rho < 1e6) {
        rho *= 2.0;
        uw *= 0.5;
        uz *= 0.5;
      } else if (dual_norm > 10.0 * pri_norm && rho > 1e-6) {
        rho *= 0.5;
        uw *= 2.0;
        uz *= 2.0;
      }
    }
  }

  // Pick among the final iterates and the tracked best: feasible with the
  // smallest objective wins, otherwise the smallest residual. Ties within
  // rounding go to the later candidates (the thresholded, sparse ones).
  x = prob.canon(x);
  double res_x = residual(prob.apply(x));
  double res_w = residual(prob.apply(w));
  double obj_w = w.template lpNorm<1>();
  double obj_x = x.template lpNorm<1>();
  bool have_best = best_obj >= 0.0;
  double pick_obj = obj_x;
  double pick_res = res_x;
  const T* pick = &x;
  auto consider = [&](const T& cand, double obj, double rres) {
    bool pick_feas = pick_res <= feas_limit;
    bool cand_feas = rres <= feas_limit;
    if ((cand_feas && !pick_feas) ||
        (cand_feas && obj <= pick_obj * (1.0 + 1e-9)) ||
        (!cand_feas && !pick_feas && rres < pick_res)) {
      pick = &cand;
      pick_obj = obj;
      pick_res = rres;
    }
  };
  consider(w, obj_w, res_w);
  if (have_best) consider(best, best_obj, best_res);
  if (pick != &x) x = *pick;
  res.feasibility_residual = pick_res;
  res.iterations = it;
  res.objective = pick_obj;
  if (res.converged && res.feasibility_residual > feas_limit) {
    res.converged = false;
  }
  return res;
}

// The constraint systems have closed-form solutions in terms of inverse
// scatters (D = S2^-1 - S1^-1, beta = S2^-1 delta). When the iterative solver
// stalls on an ill-conditioned instance, a ridge-regularized version of that
// closed form provides a feasible fallback start; the ridge is bisected to the
// largest value that still meets the constraint, which keeps the entries small.
Vector clamped_inverse_spectrum(const Vector& eigenvalues, double ridge) {
  return (eigenvalues.array().max(0.0) + ridge).inverse().matrix();
}

template <typename T, typename MakeStart, typename Residual>
std::optional<T> bisect_ridge_start(const MakeStart& start_for,
                                    const Residual& residual_of, double lambda,
                                    double feas_tol, double scale) {
  const double target = 0.95 * lambda + 0.5 * feas_tol;
  double lo = 1e-12 * scale;
  T best = start_for(lo);
  if (residual_of(best) > target) return std::nullopt;
  double hi = scale;
  T cand = start_for(hi);
  if (residual_of(cand) <= target) return cand;
  for (int it = 0; it < 30; ++it) {
    double mid = std::sqrt(lo * hi);
    cand = start_for(mid);
    if (residual_of(cand) <= target) {
      lo = mid;
      best = std::move(cand);
    } else {
      hi = mid;
    }
  }
  return best;
}

}  // namespace

MatrixSolverReport solve_differential(const DifferentialProblem& problem,
                                      const SolverOptions& opts) {
  const Eigen::Index p = problem.scatter1.rows();
  if (problem.scatter1.cols() != p || problem.scatter2.rows() != p ||
      problem.scatter2.cols() != p) {
    throw InvalidInputError("solve_differential: dimension mismatch");
  }
  if (problem.lambda < 0.0) {
    throw InvalidInputError("solve_differential: negative lambda");
  }
  const Matrix& s1 = problem.scatter1;
  const Matrix& s2 = problem.scatter2;
  Matrix b = s1 - s2;

  Eigen::SelfAdjointEigenSolver<Matrix> es1(s1), es2(s2);
  if (es1.info() != Eigen::Success || es2.info() != Eigen::Success) {
    throw InvalidInputError("solve_differential: eigendecomposition failed");
  }
  const double op_norm = es1.eigenvalues().cwiseAbs().maxCoeff() *
                         es2.eigenvalues().cwiseAbs().maxCoeff();
  if (op_norm < 1e-12) {
    double b_inf = b.lpNorm<Eigen::Infinity>();
    if (b_inf > problem.lambda + opts.feas_tol) {
      throw InfeasibleError("dantzig: zero operator with ||b||_max > lambda");
    }
    MatrixSolverReport zero;
    zero.solution = Matrix::Zero(p, p);
    zero.feasibility_residual = b_inf;
    zero.converged = true;
    return zero;
  }

  // The box constraint applies to the symmetric part of S1 X S2 - b, which for
  // a symmetric X equals (S1 X S2 + S2 X S1) / 2 - b. The map X -> S1 X S2 is
  // self-adjoint (its vec form is the Kronecker product of two symmetric
  // matrices), and I + N^2 diagonalizes in the two scatter eigenbases:
  // entrywise gain 1 / (1 + (l1_i * l2_j)^2). The whole system is scaled by
  // the operator norm first so the identity and N constraint blocks are
  // balanced.
  const double scale = op_norm;
  const Matrix& u1 = es1.eigenvectors();
  const Matrix& u2 = es2.eigenvectors();
  Matrix gain(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      double q = es1.eigenvalues()[i] * es2.eigenvalues()[j] / scale;
      gain(i, j) = 1.0 / (1.0 + q * q);
    }
  }
  AdmmProblem<Matrix> prob;
  prob.apply = [&](const Matrix& d) { return Matrix((s1 * d * s2) / scale); };
  prob.xsolve = [&](const Matrix& r) {
    Matrix f = u1.transpose() * r * u2;
    f.array() *= gain.array();
    return Matrix(u1 * f * u2.transpose());
  };
  prob.canon = [](const Matrix& v) {
    return Matrix(0.5 * (v + v.transpose()));
  };

  Matrix b_scaled = b / scale;
  const double lambda_scaled = problem.lambda / scale;
  SolverOptions scaled_opts = opts;
  scaled_opts.feas_tol = opts.feas_tol / scale;

  auto residual_true = [&](const Matrix& cand) {
    Matrix m = s1 * cand * s2;
    return (0.5 * (m + m.transpose()) - b).lpNorm<Eigen::Infinity>();
  };

  Matrix x = Matrix::Zero(p, p);
  AdmmResult res = admm_l1_linf<Matrix>(prob, b_scaled, lambda_scaled,
                                        scaled_opts, x);
  double residual = res.feasibility_residual * scale;

  if (residual > problem.lambda + opts.feas_tol) {
    auto start_for = [&](double ridge) {
      auto inv = [&](const Eigen::SelfAdjointEigenSolver<Matrix>& es) {
        Vector w = clamped_inverse_spectrum(es.eigenvalues(), ridge);
        return Matrix(es.eigenvectors() * w.asDiagonal() *
                      es.eigenvectors().transpose());
      };
      return Matrix(inv(es2) - inv(es1));
    };
    double ridge_scale = std::max({1.0, s1.trace(), s2.trace()});
    std::optional<Matrix> start = bisect_ridge_start<Matrix>(
        start_for, residual_true, problem.lambda, opts.feas_tol, ridge_scale);
    if (!start) {
      throw InfeasibleError(
          "dantzig: no feasible point found (residual " +
          std::to_string(residual) + " vs lambda " +
          std::to_string(problem.lambda) + ")");
    }
    Matrix x2 = *start;
    AdmmResult res2 = admm_l1_linf<Matrix>(prob, b_scaled, lambda_scaled,
                                           scaled_opts, x2);
    if (res2.feasibility_residual * scale <= problem.lambda + opts.feas_tol) {
      x = std::move(x2);
      residual = res2.feasibility_residual * scale;
      res2.iterations += res.iterations;
      res = res2;
    } else {
      // The polished iterate drifted out of the constraint; fall back to the
      // feasible start itself.
      x = std::move(*start);
      residual = residual_true(x);
      res.iterations += res2.iterations;
      res.converged = false;
    }
  }

  MatrixSolverReport report;
  report.asymmetry = (x - x.transpose()).lpNorm<Eigen::Infinity>();
  report.solution = 0.5 * (x + x.transpose());
  report.objective = report.solution.lpNorm<1>();
  report.feasibility_residual = residual;
  report.iterations = res.iterations;
  report.converged = res.converged;
  return report;
}

VectorSolverReport solve_direction(const DirectionProblem& problem,
                                   const SolverOptions& opts) {
  const Eigen::Index p = problem.scatter2.rows();
  if (problem.scatter2.cols() != p || problem.delta.size() != p) {
    throw InvalidInputError("solve_direction: dimension mismatch");
  }
  if (problem.lambda < 0.0) {
    throw InvalidInputError("solve_direction: negative lambda");
  }
  const Matrix& s2 = problem.scatter2;

  Eigen::SelfAdjointEigenSolver<Matrix> es(s2);
  if (es.info() != Eigen::Success) {
    throw InvalidInputError("solve_direction: eigendecomposition failed");
  }
  const double op_norm = es.eigenvalues().cwiseAbs().maxCoeff();
  if (op_norm < 1e-12) {
    double b_inf = problem.delta.lpNorm<Eigen::Infinity>();
    if (b_inf > problem.lambda + opts.feas_tol) {
      throw InfeasibleError("dantzig: zero operator with ||b||_max > lambda");
    }
    VectorSolverReport zero;
    zero.solution = Vector::Zero(p);
    zero.feasibility_residual = b_inf;
    zero.converged = true;
    return zero;
  }

  const double scale = op_norm;
  Vector gain =
      (1.0 + (es.eigenvalues().array() / scale).square()).inverse().matrix();
  AdmmProblem<Vector> prob;
  prob.apply = [&](const Vector& v) {
    return Vector((s2.selfadjointView<Eigen::Lower>() * v) / scale);
  };
  prob.xsolve = [&](const Vector& r) {
    return Vector(es.eigenvectors() *
                  (gain.asDiagonal() * (es.eigenvectors().transpose() * r)));
  };
  prob.canon = [](const Vector& v) { return v; };

  Vector b_scaled = problem.delta / scale;
  const double lambda_scaled = problem.lambda / scale;
  SolverOptions scaled_opts = opts;
  scaled_opts.feas_tol = opts.feas_tol / scale;

  auto residual_true = [&](const Vector& cand) {
    return (s2 * cand - problem.delta).lpNorm<Eigen::Infinity>();
  };

  Vector x = Vector::Zero(p);
  AdmmResult res = admm_l1_linf<Vector>(prob, b_scaled, lambda_scaled,
                                        scaled_opts, x);
  double residual = res.feasibility_residual * scale;

  if (residual > problem.lambda + opts.feas_tol) {
    auto start_for = [&](double ridge) {
      Vector w = clamped_inverse_spectrum(es.eigenvalues(), ridge);
      return Vector(es.eigenvectors() *
                    (w.asDiagonal() *
                     (es.eigenvectors().transpose() * problem.delta)));
    };
    double ridge_scale = std::max(1.0, s2.trace());
    std::optional<Vector> start = bisect_ridge_start<Vector>(
        start_for, residual_true, problem.lambda, opts.feas_tol, ridge_scale);
    if (!start) {
      throw InfeasibleError(
          "dantzig: no feasible point found (residual " +
          std::to_string(residual) + " vs lambda " +
          std::to_string(problem.lambda) + ")");
    }
    Vector x2 = *start;
    AdmmResult res2 = admm_l1_linf<Vector>(prob, b_scaled, lambda_scaled,
                                           scaled_opts, x2);
    if (res2.feasibility_residual * scale <= problem.lambda + opts.feas_tol) {
      x = std::move(x2);
      residual = res2.feasibility_residual * scale;
      res2.iterations += res.iterations;
      res = res2;
    } else {
      x = std::move(*start);
      residual = residual_true(x);
      res.iterations += res2.iterations;
      res.converged = false;
    }
  }

  VectorSolverReport report;
  report.solution = std::move(x);
  report.objective = report.solution.lpNorm<1>();
  report.feasibility_residual = residual;
  report.iterations = res.iterations;
  report.converged = res.converged;
  return report;
}

double rate_factor(int n, int p) {
  if (n < 2 || p < 2) throw InvalidInputError("rate_factor: needs n, p >= 2");
  return std::sqrt(1.0 / static_cast<double>(p)) +
         std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

double lambda_schedule(double base_constant, double sparsity_hint, int n,
                       int p) {
  return base_constant * std::sqrt(sparsity_hint) * rate_factor(n, p);
}

}  // namespace ssqda
