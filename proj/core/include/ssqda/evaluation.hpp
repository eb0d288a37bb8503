#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ssqda/baselines.hpp"
#include "ssqda/datagen.hpp"

namespace ssqda {

/// Positive class is label 2, negative class is label 1.
struct ConfusionCounts {
  long tp = 0;
  long tn = 0;
  long fp = 0;
  long fn = 0;
};

struct MetricsReport {
  double error_rate = 0.0;
  double specificity = 0.0;
  double sensitivity = 0.0;
  double mcc = 0.0;
  /// A division-by-zero denominator was hit (constant predictions etc.); the
  /// affected metric is reported as 0.
  bool degenerate = false;
};

ConfusionCounts confusion(const std::vector<int>& truth,
                          const std::vector<int>& predicted);
MetricsReport metrics(const std::vector<int>& truth,
                      const std::vector<int>& predicted);

using ClassifyFn = std::function<int(const Vector&)>;

/// Fits one classifier per (lambda1, lambda2) pair on the given training data,
/// indexed [i * lambda2s.size() + j]. An empty function marks a failed fit.
using GridFitter = std::function<std::vector<ClassifyFn>(
    const Matrix& class1, const Matrix& class2,
    const std::vector<double>& lambda1s, const std::vector<double>& lambda2s)>;

struct CvResult {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  int index1 = 0;
  int index2 = 0;
  /// Mean validation error per grid pair, lambda1 rows by lambda2 columns.
  Matrix error_surface;
};

/// Stratified K-fold selection of the (lambda1, lambda2) pair with the lowest
/// mean validation error; ties go to the smallest pair in grid order.
CvResult cross_validate(const Matrix& train1, const Matrix& train2,
                        const std::vector<double>& lambda1s,
                        const std::vector<double>& lambda2s, int folds,
                        const GridFitter& fitter);

enum class Method { Ssqda, Sdar, Slda, RidgeLda, RidgeQda };
std::string method_name(Method m);
std::string family_name(Family f);
std::string precision_name(PrecisionKind k);

/// Loose/tight solver settings used by the harness.
SolverOptions default_cv_solver();
SolverOptions default_fit_solver();

struct ExperimentSpec {
  Family family = Family::Normal;
  PrecisionKind model = PrecisionKind::Ar1;
  int p = 100;
  int n1 = 200;
  int n2 = 200;
  int s1 = 10;
  int s2 = 10;
  std::pair<double, double> d_magnitude_range{0.3, 0.7};
  int replications = 20;
  /// Multipliers c; candidate lambda = c * (sqrt(1/p) + sqrt(log(p)/n)).
  std::vector<double> tuning_grid;
  int folds = 5;
  std::uint64_t seed = 0;
  int threads = 1;
  SolverOptions cv_solver = default_cv_solver();    // loose, inside fold fits
  SolverOptions fit_solver = default_fit_solver();  // tight, final fit
};

/// 8 logarithmically spaced multipliers over [0.05, 5].
std::vector<double> default_tuning_grid();

struct ReplicationSummary {
  double mean = 0.0;
  double sd = 0.0;
};

struct MethodSummary {
  std::string method;
  ReplicationSummary error_rate, specificity, sensitivity, mcc;
  int replications = 0;
  int failures = 0;
  /// Per-replication test error, ordered by replication index.
  std::vector<double> per_replication_error;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<MethodSummary> methods;
};

/// Per replication: generate a population and train/test split, tune by CV,
/// fit every requested method and score it on the fresh test set. Throws if
/// more than 10% of replications fail for any method.
ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::vector<Method>& methods);

std::string result_to_json(const ExperimentResult& result);
std::string format_table(const ExperimentResult& result);

}  // namespace ssqda
