#include "ssqda/datagen.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <set>
#include <vector>

namespace ssqda {

namespace {

constexpr int kRejectionBudget = 1000;

Matrix spd_inverse(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw GenerationError(std::string(what) + ": matrix not positive definite");
  }
  return llt.solve(Matrix::Identity(m.rows(), m.cols()));
}

void verify_spd(const Matrix& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 1e-10) {
    throw GenerationError(std::string(what) + ": min eigenvalue <= 1e-10");
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 applied to the (seed, index) pair
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Matrix make_precision(const PrecisionModel& model) {
  const int p = model.p;
  if (p < 1) throw InvalidInputError("make_precision: p < 1");
  Matrix omega = Matrix::Zero(p, p);
  switch (model.kind) {
    case PrecisionKind::Ar1:
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
          omega(i, j) = std::pow(model.rho, std::abs(i - j));
      break;
    case PrecisionKind::Banded: {
      if (p < 5) throw InvalidInputError("make_precision: banded needs p >= 5");
      const double band[5] = {2.0, 0.8, 0.4, 0.4, 0.2};
      for (int i = 0; i < p; ++i)
        for (int off = 0; off < 5 && i + off < p; ++off) {
          omega(i, i + off) = band[off];
          omega(i + off, i) = band[off];
        }
      break;
    }
    case PrecisionKind::ErdosRenyi: {
      std::mt19937_64 rng(model.seed);
      std::bernoulli_distribution edge(model.edge_prob);
      std::uniform_real_distribution<double> mag(0.5, 1.0);
      std::bernoulli_distribution coin(0.5);
      Matrix raw = Matrix::Zero(p, p);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
          if (edge(rng)) raw(i, j) = (coin(rng) ? 1.0 : -1.0) * mag(rng);
      omega = 0.5 * (raw + raw.transpose());
      Eigen::SelfAdjointEigenSolver<Matrix> es(omega, Eigen::EigenvaluesOnly);
      double min_eig = es.eigenvalues().minCoeff();
      omega.diagonal().array() += std::max(-min_eig, 0.0);
      // The shift only guarantees PSD; nudge to strict PD if needed.
      Eigen::SelfAdjointEigenSolver<Matrix> es2(omega, Eigen::EigenvaluesOnly);
      if (es2.eigenvalues().minCoeff() <= 0.0) {
        omega.diagonal().array() += 1e-3;
      }
      break;
    }
  }
  verify_spd(omega, "make_precision");
  return omega;
}

PopulationPair make_population(const Matrix& omega1, int s1, int s2,
                               std::pair<double, double> d_magnitude_range,
                               std::uint64_t seed) {
  const int p = static_cast<int>(omega1.rows());
  if (omega1.cols() != p) throw InvalidInputError("make_population: omega1 not square");
  if (s1 < 0 || s2 < 0 || s2 > p) {
    throw InvalidInputError("make_population: bad sparsity levels");
  }
  verify_spd(omega1, "make_population: omega1");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> idx(0, p - 1);
  std::uniform_real_distribution<double> mag(d_magnitude_range.first,
                                             d_magnitude_range.second);
  std::bernoulli_distribution coin(0.5);

  // Accepting any PD draw lets lambda_min(Omega2) land arbitrarily close to
  // zero, which blows up the top eigenvalues of Sigma2 and breaks the
  // comparable-eigenvalue regime the scatter estimator relies on. Keep the
  // perturbed precision conditioned comparably to Omega1.
  const double min_eig_omega1 =
      Eigen::SelfAdjointEigenSolver<Matrix>(omega1, Eigen::EigenvaluesOnly)
          .eigenvalues()
          .minCoeff();
  const double accept_floor = 0.25 * min_eig_omega1;

  PopulationPair pop;
  pop.s1 = s1;
  pop.s2 = s2;
  pop.omega1 = omega1;
  pop.sigma1 = spd_inverse(omega1, "make_population: omega1");

  Matrix omega2;
  Matrix d;
  bool accepted = false;
  for (int attempt = 0; attempt < kRejectionBudget && !accepted; ++attempt) {
    d = Matrix::Zero(p, p);
    std::set<std::pair<int, int>> used;
    int placed = 0;
    int guard = 0;
    while (placed < s1 && ++guard < 100000) {
      int i = idx(rng);
      int j = idx(rng);
      if (i > j) std::swap(i, j);
      int slots = (i == j) ? 1 : 2;
      if (placed + slots > s1) continue;
      if (used.count({i, j})) continue;
      used.insert({i, j});
      double value = (coin(rng) ? 1.0 : -1.0) * mag(rng);
      d(i, j) = value;
      d(j, i) = value;
      placed += slots;
    }
    if (placed != s1) {
      throw GenerationError("make_population: could not place support pattern");
    }
    omega2 = omega1 + d;
    Eigen::SelfAdjointEigenSolver<Matrix> es(omega2, Eigen::EigenvaluesOnly);
    accepted = es.eigenvalues().minCoeff() >= accept_floor;
  }
  if (!accepted) {
    throw GenerationError(
        "make_population: rejection budget exhausted, Omega1 + D never PD");
  }

  pop.d_true = std::move(d);
  pop.omega2 = std::move(omega2);
  pop.sigma2 = spd_inverse(pop.omega2, "make_population: omega2");
  pop.mu1 = Vector::Zero(p);
  pop.beta_true = Vector::Zero(p);
  pop.beta_true.head(s2).setOnes();
  pop.mu2 = pop.sigma2 * pop.beta_true;
  return pop;
}

Matrix sample(const PopulationPair& pop, int class_id, int n, Family family,
              std::uint64_t seed) {
  if (n < 1) throw InvalidInputError("sample: n < 1");
  if (class_id != 1 && class_id != 2) {
    throw InvalidInputError("sample: class_id must be 1 or 2");
  }
  const Vector& mu = (class_id == 1) ? pop.mu1 : pop.mu2;
  const Matrix& sigma = (class_id == 1) ? pop.sigma1 : pop.sigma2;
  const int p = static_cast<int>(sigma.rows());

  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw GenerationError("sample: covariance not positive definite");
  }
  Matrix l = llt.matrixL();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::chi_squared_distribution<double> chi2(5.0);
  std::bernoulli_distribution wide(0.2);

  Matrix out(n, p);
  Vector z(p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) z[j] = normal(rng);
    Vector row = l * z;
    switch (family) {
      case Family::Normal:
        break;
      case Family::T5: {
        // Shape scaled by (nu-2)/nu so the covariance equals Sigma.
        double w = chi2(rng) / 5.0;
        row *= std::sqrt(3.0 / 5.0) / std::sqrt(w);
        break;
      }
      case Family::MixtureNormal:
        if (wide(rng)) row *= 3.0;  // the 9*Sigma component
        break;
    }
    out.row(i) = (mu + row).transpose();
  }
  return out;
}

}  // namespace ssqda
