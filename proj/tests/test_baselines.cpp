#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ssqda/baselines.hpp"

using namespace ssqda;
namespace oracle = ssqda::testing;

namespace {

Matrix gaussian_rows(int n, const Vector& mu, const Matrix& sigma, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::LLT<Matrix> llt(sigma);
  Matrix l = llt.matrixL();
  Matrix out(n, mu.size());
  for (int i = 0; i < n; ++i) {
    Vector z(mu.size());
    for (int j = 0; j < mu.size(); ++j) z[j] = nd(rng);
    out.row(i) = (mu + l * z).transpose();
  }
  return out;
}

}  // namespace

TEST_CASE("sample moments") {
  Matrix samples(3, 2);
  samples << 1, 0, 3, 2, 5, 4;
  Vector mean = sample_mean(samples);
  CHECK(mean[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(mean[1] == doctest::Approx(2.0).epsilon(1e-14));
  Matrix cov = sample_covariance(samples);
  CHECK(cov(0, 0) == doctest::Approx(4.0).epsilon(1e-14));  // (4+0+4)/2
  CHECK(cov(0, 1) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("fit_sdar identical classes at large lambda gives a null rule") {
  Matrix sigma = oracle::random_spd(3, 0.8, 1.5, 1);
  Matrix c1 = gaussian_rows(25, Vector::Zero(3), sigma, 2);
  Matrix c2 = gaussian_rows(25, Vector::Zero(3), sigma, 3);
  BaselineModel model = fit_sdar(c1, c2, 10.0, 10.0);
  const auto& params = std::get<DiscriminantModel>(model.params);
  CHECK(params.d_matrix.cwiseAbs().maxCoeff() == 0.0);
  CHECK(params.logdet_term == 0.0);
}

TEST_CASE("fit_sdar shares the solver path with the moment inputs") {
  Matrix sigma1 = oracle::random_spd(3, 0.5, 2.0, 11);
  Matrix sigma2 = oracle::random_spd(3, 0.5, 2.0, 12);
  Vector mu2(3);
  mu2 << 1.0, -0.5, 0.2;
  Matrix c1 = gaussian_rows(40, Vector::Zero(3), sigma1, 13);
  Matrix c2 = gaussian_rows(40, mu2, sigma2, 14);
  SolverOptions opts;
  BaselineModel model = fit_sdar(c1, c2, 0.2, 0.2, opts);
  const auto& params = std::get<DiscriminantModel>(model.params);

  Matrix cov1 = sample_covariance(c1);
  Matrix cov2 = sample_covariance(c2);
  Vector delta = sample_mean(c2) - sample_mean(c1);
  MatrixSolverReport dm = solve_differential({cov1, cov2, 0.2}, opts);
  VectorSolverReport bm = solve_direction({cov2, delta, 0.2}, opts);
  CHECK((params.d_matrix - dm.solution).cwiseAbs().maxCoeff() == 0.0);
  CHECK((params.beta - bm.solution).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fit_sdar matches the LP oracle at p = 3") {
  Matrix sigma1 = oracle::random_spd(3, 0.5, 2.0, 21);
  Matrix sigma2 = oracle::random_spd(3, 0.5, 2.0, 22);
  Matrix c1 = gaussian_rows(50, Vector::Zero(3), sigma1, 23);
  Matrix c2 = gaussian_rows(50, Vector::Zero(3), sigma2, 24);
  SolverOptions opts;
  opts.eps_abs = opts.eps_rel = 1e-9;
  opts.feas_tol = 1e-9;
  opts.max_iter = 50000;
  BaselineModel model = fit_sdar(c1, c2, 0.15, 0.15, opts);
  const auto& params = std::get<DiscriminantModel>(model.params);
  oracle::LpResult lp =
      oracle::lp_differential(sample_covariance(c1), sample_covariance(c2), 0.15);
  REQUIRE(lp.feasible);
  CHECK(std::abs(params.d_matrix.lpNorm<1>() - lp.objective) <= 1e-6);
}

TEST_CASE("fit_slda equal means predicts one class") {
  Matrix c1(4, 2), c2(4, 2);
  c1 << 1, 0, -1, 0, 0, 1, 0, -1;
  c2 = c1;  // identical means, zero delta
  BaselineModel model = fit_slda(c1, c2, 0.1);
  const auto& params = std::get<LinearModel>(model.params);
  CHECK(params.beta.cwiseAbs().maxCoeff() == 0.0);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 20; ++rep) {
    Vector z(2);
    z << nd(rng), nd(rng);
    CHECK(classify_baseline(model, z) == 2);  // score 0 ties to class 2
  }
}

TEST_CASE("fit_slda identity pooled covariance soft-thresholds the mean gap") {
  // Cross-shaped classes scaled so the pooled covariance is the identity.
  double s = std::sqrt(1.5);
  Matrix c1(4, 2);
  c1 << s, 0, -s, 0, 0, s, 0, -s;
  Vector mu(2);
  mu << 0.9, 0.05;
  Matrix c2 = c1.rowwise() + mu.transpose();
  SolverOptions opts;
  opts.eps_abs = opts.eps_rel = 1e-10;
  opts.feas_tol = 1e-10;
  opts.max_iter = 50000;
  BaselineModel model = fit_slda(c1, c2, 0.2, opts);
  const auto& params = std::get<LinearModel>(model.params);
  CHECK(params.beta[0] == doctest::Approx(0.7).epsilon(1e-7));
  CHECK(std::abs(params.beta[1]) <= 1e-8);
}

TEST_CASE("ridge regularization floors the covariance spectrum") {
  const int p = 8, n = 10;  // p close to n, raw covariance near-singular
  Matrix c1 = gaussian_rows(n, Vector::Zero(p), Matrix::Identity(p, p), 41);
  Matrix c2 = gaussian_rows(n, Vector::Zero(p), Matrix::Identity(p, p), 42);
  BaselineModel model = fit_ridge_qda(c1, c2);
  const auto& params = std::get<QdaPluginModel>(model.params);
  double floor = std::sqrt(std::log(double(p)) / double(n));
  // omega = (cov + floor I)^-1, so its top eigenvalue is at most 1/floor.
  Eigen::SelfAdjointEigenSolver<Matrix> es1(params.omega1);
  Eigen::SelfAdjointEigenSolver<Matrix> es2(params.omega2);
  CHECK(es1.eigenvalues().maxCoeff() <= 1.0 / floor + 1e-8);
  CHECK(es2.eigenvalues().maxCoeff() <= 1.0 / floor + 1e-8);
}

TEST_CASE("ridge rules on constant data are mean-driven") {
  const int p = 3;
  Matrix c1 = Matrix::Zero(6, p);
  Matrix c2 = Matrix::Ones(6, p);
  BaselineModel lda = fit_ridge_lda(c1, c2);
  BaselineModel qda = fit_ridge_qda(c1, c2);
  Vector near1 = Vector::Constant(p, 0.1);
  Vector near2 = Vector::Constant(p, 0.9);
  CHECK(classify_baseline(lda, near1) == 1);
  CHECK(classify_baseline(lda, near2) == 2);
  CHECK(classify_baseline(qda, near1) == 1);
  CHECK(classify_baseline(qda, near2) == 2);
}

TEST_CASE("ridge classifiers separate well-spread Gaussians") {
  const int p = 2;
  Vector mu2(2);
  mu2 << 4.0, 0.0;
  Matrix c1 = gaussian_rows(100, Vector::Zero(p), Matrix::Identity(p, p), 51);
  Matrix c2 = gaussian_rows(100, mu2, Matrix::Identity(p, p), 52);
  BaselineModel lda = fit_ridge_lda(c1, c2);
  BaselineModel qda = fit_ridge_qda(c1, c2);
  Matrix t1 = gaussian_rows(200, Vector::Zero(p), Matrix::Identity(p, p), 53);
  Matrix t2 = gaussian_rows(200, mu2, Matrix::Identity(p, p), 54);
  int wrong_lda = 0, wrong_qda = 0;
  for (int i = 0; i < 200; ++i) {
    if (classify_baseline(lda, t1.row(i).transpose()) != 1) ++wrong_lda;
    if (classify_baseline(lda, t2.row(i).transpose()) != 2) ++wrong_lda;
    if (classify_baseline(qda, t1.row(i).transpose()) != 1) ++wrong_qda;
    if (classify_baseline(qda, t2.row(i).transpose()) != 2) ++wrong_qda;
  }
  CHECK(wrong_lda / 400.0 <= 0.05);
  CHECK(wrong_qda / 400.0 <= 0.05);
}
