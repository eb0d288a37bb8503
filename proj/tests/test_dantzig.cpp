#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ssqda/dantzig.hpp"

using namespace ssqda;
namespace oracle = ssqda::testing;

namespace {

// Tight options for oracle comparisons on tiny instances.
SolverOptions tight() {
  SolverOptions opts;
  opts.eps_abs = 1e-9;
  opts.eps_rel = 1e-9;
  opts.feas_tol = 1e-9;
  opts.max_iter = 50000;
  return opts;
}

}  // namespace

TEST_CASE("solve_differential returns zero when the scatters agree") {
  Matrix s = oracle::random_spd(4, 0.5, 2.0, 3);
  MatrixSolverReport rep = solve_differential({s, s, 0.1});
  CHECK(rep.objective == 0.0);
  CHECK(rep.solution.cwiseAbs().maxCoeff() == 0.0);
  CHECK(rep.converged);
}

TEST_CASE("solve_differential one-dimensional closed form") {
  Matrix s1(1, 1), s2(1, 1);
  s1 << 2.0;
  s2 << 1.0;
  MatrixSolverReport rep = solve_differential({s1, s2, 0.5}, tight());
  // d = sign(s1 - s2) * max(0, |s1 - s2| - lambda) / (s1 * s2)
  CHECK(std::abs(rep.solution(0, 0) - 0.25) <= 1e-10);
}

TEST_CASE("solve_differential matches the LP oracle at p = 3") {
  for (unsigned seed = 0; seed < 8; ++seed) {
    Matrix s1 = oracle::random_spd(3, 0.5, 2.0, 100 + seed);
    Matrix s2 = oracle::random_spd(3, 0.5, 2.0, 200 + seed);
    MatrixSolverReport rep = solve_differential({s1, s2, 0.1}, tight());
    oracle::LpResult lp = oracle::lp_differential(s1, s2, 0.1);
    REQUIRE(lp.feasible);
    CHECK(std::abs(rep.objective - lp.objective) <= 1e-6);
  }
}

TEST_CASE("solve_differential output is exactly symmetric") {
  Matrix s1 = oracle::random_spd(6, 0.5, 3.0, 17);
  Matrix s2 = oracle::random_spd(6, 0.5, 3.0, 18);
  MatrixSolverReport rep = solve_differential({s1, s2, 0.05}, tight());
  CHECK((rep.solution - rep.solution.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("solve_differential feasibility on converged runs") {
  for (unsigned seed = 0; seed < 6; ++seed) {
    Matrix s1 = oracle::random_spd(5, 0.5, 2.0, 300 + seed);
    Matrix s2 = oracle::random_spd(5, 0.5, 2.0, 400 + seed);
    double lambda = 0.2;
    MatrixSolverReport rep = solve_differential({s1, s2, lambda}, tight());
    if (rep.converged) {
      CHECK(rep.feasibility_residual <= lambda + 1e-6);
      Matrix m = s1 * rep.solution * s2;
      Matrix res = 0.5 * (m + m.transpose()) - (s1 - s2);
      CHECK(res.cwiseAbs().maxCoeff() <= lambda + 1e-6);
    }
  }
}

TEST_CASE("solve_differential objective is monotone in lambda") {
  Matrix s1 = oracle::random_spd(4, 0.5, 2.0, 21);
  Matrix s2 = oracle::random_spd(4, 0.5, 2.0, 22);
  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : {0.02, 0.05, 0.1, 0.2, 0.5, 1.0}) {
    MatrixSolverReport rep = solve_differential({s1, s2, lambda}, tight());
    CHECK(rep.objective <= prev + 1e-8);
    prev = rep.objective;
  }
}

TEST_CASE("solve_differential objective never exceeds a feasible truth") {
  std::mt19937_64 rng(33);
  for (int rep_i = 0; rep_i < 5; ++rep_i) {
    int p = 4;
    Matrix omega1 = oracle::random_spd(p, 0.8, 2.0, 500 + static_cast<unsigned>(rep_i));
    Matrix d = Matrix::Zero(p, p);
    d(0, 0) = 0.5;
    d(1, 2) = d(2, 1) = 0.3;
    Matrix omega2 = omega1 + d;
    Matrix s1 = omega1.inverse();
    Matrix s2 = omega2.inverse();
    // True D has residual 0, feasible at any lambda.
    MatrixSolverReport rep = solve_differential({s1, s2, 0.05}, tight());
    CHECK(rep.objective <= d.lpNorm<1>() + 1e-8);
  }
}

TEST_CASE("solve_direction returns zero for zero delta") {
  Matrix s = oracle::random_spd(5, 0.5, 2.0, 9);
  VectorSolverReport rep = solve_direction({s, Vector::Zero(5), 0.1});
  CHECK(rep.objective == 0.0);
  CHECK(rep.solution.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("solve_direction identity scatter soft-threshold") {
  Vector delta(3);
  delta << 0.9, -0.3, 0.05;
  VectorSolverReport rep =
      solve_direction({Matrix::Identity(3, 3), delta, 0.2}, tight());
  Vector expect(3);
  expect << 0.7, -0.1, 0.0;
  CHECK((rep.solution - expect).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("solve_direction matches the LP oracle at p = 4") {
  std::mt19937_64 rng(44);
  std::normal_distribution<double> nd;
  for (unsigned seed = 0; seed < 8; ++seed) {
    Matrix s = oracle::random_spd(4, 0.5, 2.0, 600 + seed);
    Vector delta(4);
    for (int j = 0; j < 4; ++j) delta[j] = nd(rng);
    VectorSolverReport rep = solve_direction({s, delta, 0.1}, tight());
    oracle::LpResult lp = oracle::lp_direction(s, delta, 0.1);
    REQUIRE(lp.feasible);
    CHECK(std::abs(rep.objective - lp.objective) <= 1e-6);
  }
}

TEST_CASE("solve_direction objective is monotone in lambda") {
  Matrix s = oracle::random_spd(5, 0.5, 2.0, 55);
  Vector delta(5);
  delta << 1.0, -0.4, 0.2, 0.0, 0.7;
  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : {0.02, 0.05, 0.1, 0.3, 0.8}) {
    VectorSolverReport rep = solve_direction({s, delta, lambda}, tight());
    CHECK(rep.objective <= prev + 1e-8);
    prev = rep.objective;
  }
}

TEST_CASE("lambda_schedule arithmetic") {
  // base 2, hint 4, n = p = 100: 4 * (0.1 + sqrt(log(100)/100))
  double expect = 4.0 * (0.1 + std::sqrt(std::log(100.0) / 100.0));
  CHECK(lambda_schedule(2.0, 4.0, 100, 100) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(lambda_schedule(2.0, 1.0, 50, 20) ==
        doctest::Approx(2.0 * lambda_schedule(1.0, 1.0, 50, 20)).epsilon(1e-12));
  CHECK(rate_factor(100, 100) == doctest::Approx(0.1 + std::sqrt(std::log(100.0) / 100.0)).epsilon(1e-12));
}
