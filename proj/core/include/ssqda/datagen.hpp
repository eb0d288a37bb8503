#pragma once

#include <cstdint>
#include <utility>

#include "ssqda/estimators.hpp"

namespace ssqda {

enum class PrecisionKind { Ar1, Banded, ErdosRenyi };

struct PrecisionModel {
  PrecisionKind kind = PrecisionKind::Ar1;
  int p = 100;
  double rho = 0.5;         // AR(1) only
  double edge_prob = 0.05;  // Erdos-Renyi only
  std::uint64_t seed = 0;   // Erdos-Renyi only
};

/// Two-class population with known parameters: Omega2 = Omega1 + D for a
/// sparse symmetric D, mu1 = 0, mu2 = Sigma2 * beta with beta = (1..1,0..0).
struct PopulationPair {
  Vector mu1;
  Vector mu2;
  Matrix sigma1;
  Matrix sigma2;
  Matrix omega1;
  Matrix omega2;
  Matrix d_true;
  Vector beta_true;
  int s1 = 0;
  int s2 = 0;
};

enum class Family { Normal, T5, MixtureNormal };

Matrix make_precision(const PrecisionModel& model);

/// Draws D with exactly s1 nonzeros of Vec(D) (an off-diagonal pair counts
/// twice), magnitudes uniform over `d_magnitude_range` with random signs,
/// rejection-resampled until Omega1 + D is positive definite.
PopulationPair make_population(
    const Matrix& omega1, int s1, int s2,
    std::pair<double, double> d_magnitude_range = {0.3, 0.7},
    std::uint64_t seed = 0);

/// n draws from the chosen elliptical family with the population mean and
/// covariance of class `class_id` (1 or 2). The t5 and mixture samplers are
/// scaled so the population covariance equals Sigma and 2.6 * Sigma.
Matrix sample(const PopulationPair& pop, int class_id, int n, Family family,
              std::uint64_t seed);

/// Deterministic per-replication seed stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace ssqda
