#include "ssqda/evaluation.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

namespace ssqda {

namespace {

struct TwoClassSummary {
  Vector center1, center2;
  Matrix scat1, scat2;
  int n1 = 0, n2 = 0;
};

TwoClassSummary summarize(const Matrix& x1, const Matrix& x2, bool robust) {
  TwoClassSummary s;
  s.n1 = static_cast<int>(x1.rows());
  s.n2 = static_cast<int>(x2.rows());
  if (robust) {
    ScatterEstimate e1 = assemble_scatter(x1);
    ScatterEstimate e2 = assemble_scatter(x2);
    s.center1 = std::move(e1.median);
    s.center2 = std::move(e2.median);
    s.scat1 = std::move(e1.scatter);
    s.scat2 = std::move(e2.scatter);
  } else {
    s.center1 = sample_mean(x1);
    s.center2 = sample_mean(x2);
    s.scat1 = sample_covariance(x1);
    s.scat2 = sample_covariance(x2);
  }
  return s;
}

// Shared grid fitter for SSQDA (robust summaries) and SDAR (moment
// summaries): one scatter pass per fold, one differential solve per lambda1,
// one direction solve per lambda2.
GridFitter make_quadratic_grid_fitter(bool robust, SolverOptions solver) {
  return [robust, solver](const Matrix& x1, const Matrix& x2,
                          const std::vector<double>& l1s,
                          const std::vector<double>& l2s) {
    std::vector<ClassifyFn> out(l1s.size() * l2s.size());
    TwoClassSummary s = summarize(x1, x2, robust);
    double prior = std::log(static_cast<double>(s.n1) / s.n2);

    // Vector solves cost a factor p less per iteration than the matrix
    // problem, so the direction program gets a correspondingly larger budget.
    SolverOptions dir_opts = solver;
    dir_opts.max_iter = std::max(solver.max_iter, 20000);
    std::vector<std::optional<Vector>> betas(l2s.size());
    for (size_t j = 0; j < l2s.size(); ++j) {
      try {
        betas[j] = solve_direction({s.scat2, s.center2 - s.center1, l2s[j]},
                                   dir_opts)
                       .solution;
      } catch (const Error&) {
      }
    }
    for (size_t i = 0; i < l1s.size(); ++i) {
      Matrix d;
      double logdet = 0.0;
      try {
        d = solve_differential({s.scat1, s.scat2, l1s[i]}, solver).solution;
        logdet = log_det_term(d, s.scat1);
      } catch (const Error&) {
        continue;
      }
      for (size_t j = 0; j < l2s.size(); ++j) {
        if (!betas[j]) continue;
        auto model = std::make_shared<DiscriminantModel>();
        model->d_matrix = d;
        model->beta = *betas[j];
        model->median1 = s.center1;
        model->median2 = s.center2;
        model->logdet_term = logdet;
        model->prior_logratio = prior;
        out[i * l2s.size() + j] = [model](const Vector& z) {
          return classify(*model, z);
        };
      }
    }
    return out;
  };
}

GridFitter make_slda_grid_fitter(SolverOptions solver) {
  return [solver](const Matrix& x1, const Matrix& x2,
                  const std::vector<double>& l1s,
                  const std::vector<double>& l2s) {
    std::vector<ClassifyFn> out(l1s.size() * l2s.size());
    for (size_t j = 0; j < l2s.size(); ++j) {
      try {
        auto model =
            std::make_shared<BaselineModel>(fit_slda(x1, x2, l2s[j], solver));
        for (size_t i = 0; i < l1s.size(); ++i) {
          out[i * l2s.size() + j] = [model](const Vector& z) {
            return classify_baseline(*model, z);
          };
        }
      } catch (const Error&) {
      }
    }
    return out;
  };
}

Matrix select_rows(const Matrix& m, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

double stddev(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace

ConfusionCounts confusion(const std::vector<int>& truth,
                          const std::vector<int>& predicted) {
  if (truth.size() != predicted.size() || truth.empty()) {
    throw InvalidInputError("confusion: label vectors mismatched or empty");
  }
  ConfusionCounts c;
  for (size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 2) {
      (predicted[i] == 2 ? c.tp : c.fn)++;
    } else {
      (predicted[i] == 1 ? c.tn : c.fp)++;
    }
  }
  return c;
}

MetricsReport metrics(const std::vector<int>& truth,
                      const std::vector<int>& predicted) {
  ConfusionCounts c = confusion(truth, predicted);
  MetricsReport r;
  const double total = static_cast<double>(c.tp + c.tn + c.fp + c.fn);
  r.error_rate = static_cast<double>(c.fp + c.fn) / total;
  if (c.tn + c.fp > 0) {
    r.specificity = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
  } else {
    r.degenerate = true;
  }
  if (c.tp + c.fn > 0) {
    r.sensitivity = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  } else {
    r.degenerate = true;
  }
  double den = static_cast<double>(c.tp + c.fp) * static_cast<double>(c.tp + c.fn) *
               static_cast<double>(c.tn + c.fp) * static_cast<double>(c.tn + c.fn);
  if (den > 0.0) {
    r.mcc = (static_cast<double>(c.tp) * static_cast<double>(c.tn) -
             static_cast<double>(c.fp) * static_cast<double>(c.fn)) /
            std::sqrt(den);
  } else {
    r.degenerate = true;
  }
  return r;
}

CvResult cross_validate(const Matrix& train1, const Matrix& train2,
                        const std::vector<double>& lambda1s,
                        const std::vector<double>& lambda2s, int folds,
                        const GridFitter& fitter) {
  if (folds < 2) throw InvalidInputError("cross_validate: folds < 2");
  if (lambda1s.empty() || lambda2s.empty()) {
    throw InvalidInputError("cross_validate: empty tuning grid");
  }
  const int n1 = static_cast<int>(train1.rows());
  const int n2 = static_cast<int>(train2.rows());
  const size_t cells = lambda1s.size() * lambda2s.size();
  Matrix surface = Matrix::Zero(static_cast<Eigen::Index>(lambda1s.size()),
                                static_cast<Eigen::Index>(lambda2s.size()));

  for (int f = 0; f < folds; ++f) {
    std::vector<int> tr1, va1, tr2, va2;
    for (int i = 0; i < n1; ++i) (i % folds == f ? va1 : tr1).push_back(i);
    for (int i = 0; i < n2; ++i) (i % folds == f ? va2 : tr2).push_back(i);
    if (tr1.size() < 3 || tr2.size() < 3 || va1.empty() || va2.empty()) {
      throw InvalidInputError("cross_validate: degenerate folds");
    }
    std::vector<ClassifyFn> models;
    try {
      models = fitter(select_rows(train1, tr1), select_rows(train2, tr2),
                      lambda1s, lambda2s);
    } catch (const Error&) {
      models.assign(cells, ClassifyFn());
    }
    if (models.size() != cells) {
      throw InvalidInputError("cross_validate: fitter grid size mismatch");
    }
    Matrix va1m = select_rows(train1, va1);
    Matrix va2m = select_rows(train2, va2);
    const double total = static_cast<double>(va1.size() + va2.size());
    for (size_t i = 0; i < lambda1s.size(); ++i) {
      for (size_t j = 0; j < lambda2s.size(); ++j) {
        const ClassifyFn& fn = models[i * lambda2s.size() + j];
        double err;
        if (!fn) {
          err = 1.0;
        } else {
          int wrong = 0;
          for (Eigen::Index r = 0; r < va1m.rows(); ++r) {
            if (fn(va1m.row(r).transpose()) != 1) ++wrong;
          }
          for (Eigen::Index r = 0; r < va2m.rows(); ++r) {
            if (fn(va2m.row(r).transpose()) != 2) ++wrong;
          }
          err = wrong / total;
        }
        surface(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
            err / folds;
      }
    }
  }

  CvResult result;
  result.error_surface = surface;
  double best = surface(0, 0);
  for (size_t i = 0; i < lambda1s.size(); ++i) {
    for (size_t j = 0; j < lambda2s.size(); ++j) {
      double v = surface(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v < best) {
        best = v;
        result.index1 = static_cast<int>(i);
        result.index2 = static_cast<int>(j);
      }
    }
  }
  result.lambda1 = lambda1s[static_cast<size_t>(result.index1)];
  result.lambda2 = lambda2s[static_cast<size_t>(result.index2)];
  return result;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Ssqda: return "SSQDA";
    case Method::Sdar: return "SDAR";
    case Method::Slda: return "SLDA";
    case Method::RidgeLda: return "LDA";
    case Method::RidgeQda: return "QDA";
  }
  return "?";
}

std::string family_name(Family f) {
  switch (f) {
    case Family::Normal: return "normal";
    case Family::T5: return "t5";
    case Family::MixtureNormal: return "mixture";
  }
  return "?";
}

std::string precision_name(PrecisionKind k) {
  switch (k) {
    case PrecisionKind::Ar1: return "ar1";
    case PrecisionKind::Banded: return "banded";
    case PrecisionKind::ErdosRenyi: return "er";
  }
  return "?";
}

std::vector<double> default_tuning_grid() {
  std::vector<double> grid;
  const double lo = std::log(0.05), hi = std::log(5.0);
  for (int i = 0; i < 8; ++i) {
    grid.push_back(std::exp(lo + (hi - lo) * i / 7.0));
  }
  return grid;
}

SolverOptions default_cv_solver() {
  SolverOptions o;
  o.eps_abs = 1e-4;
  o.eps_rel = 1e-4;
  o.feas_tol = 1e-3;
  o.max_iter = 250;
  o.over_relaxation = 1.8;
  return o;
}

SolverOptions default_fit_solver() {
  SolverOptions o;
  o.eps_abs = 1e-5;
  o.eps_rel = 1e-5;
  o.feas_tol = 1e-4;
  o.max_iter = 1500;
  o.over_relaxation = 1.8;
  return o;
}

namespace {

struct ReplicationOutcome {
  std::vector<std::optional<MetricsReport>> per_method;
};

ReplicationOutcome run_replication(const ExperimentSpec& spec,
                                   const std::vector<Method>& methods,
                                   const std::vector<double>& lambda1s,
                                   const std::vector<double>& lambda2s,
                                   int rep) {
  std::uint64_t rep_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(rep));
  PrecisionModel pm{spec.model, spec.p, 0.5, 0.05, derive_seed(rep_seed, 0)};
  Matrix omega1 = make_precision(pm);
  PopulationPair pop = make_population(omega1, spec.s1, spec.s2,
                                       spec.d_magnitude_range,
                                       derive_seed(rep_seed, 1));
  Matrix train1 = sample(pop, 1, spec.n1, spec.family, derive_seed(rep_seed, 2));
  Matrix train2 = sample(pop, 2, spec.n2, spec.family, derive_seed(rep_seed, 3));
  Matrix test1 = sample(pop, 1, spec.n1, spec.family, derive_seed(rep_seed, 4));
  Matrix test2 = sample(pop, 2, spec.n2, spec.family, derive_seed(rep_seed, 5));

  std::vector<int> truth;
  truth.insert(truth.end(), static_cast<size_t>(test1.rows()), 1);
  truth.insert(truth.end(), static_cast<size_t>(test2.rows()), 2);

  auto score = [&](const ClassifyFn& fn) {
    std::vector<int> pred;
    pred.reserve(truth.size());
    for (Eigen::Index r = 0; r < test1.rows(); ++r) {
      pred.push_back(fn(test1.row(r).transpose()));
    }
    for (Eigen::Index r = 0; r < test2.rows(); ++r) {
      pred.push_back(fn(test2.row(r).transpose()));
    }
    return metrics(truth, pred);
  };

  ReplicationOutcome outcome;
  outcome.per_method.resize(methods.size());
  const std::vector<double> single{0.0};
  for (size_t m = 0; m < methods.size(); ++m) {
    try {
      switch (methods[m]) {
        case Method::Ssqda: {
          CvResult cv = cross_validate(train1, train2, lambda1s, lambda2s,
                                       spec.folds,
                                       make_quadratic_grid_fitter(true, spec.cv_solver));
          FitOptions fo;
          fo.solver = spec.fit_solver;
          DiscriminantModel model =
              fit(train1, train2, cv.lambda1, cv.lambda2, fo);
          outcome.per_method[m] = score(
              [&model](const Vector& z) { return classify(model, z); });
          break;
        }
        case Method::Sdar: {
          CvResult cv = cross_validate(train1, train2, lambda1s, lambda2s,
                                       spec.folds,
                                       make_quadratic_grid_fitter(false, spec.cv_solver));
          BaselineModel model = fit_sdar(train1, train2, cv.lambda1, cv.lambda2,
                                         spec.fit_solver);
          outcome.per_method[m] = score([&model](const Vector& z) {
            return classify_baseline(model, z);
          });
          break;
        }
        case Method::Slda: {
          CvResult cv = cross_validate(train1, train2, single, lambda2s,
                                       spec.folds,
                                       make_slda_grid_fitter(spec.cv_solver));
          BaselineModel model =
              fit_slda(train1, train2, cv.lambda2, spec.fit_solver);
          outcome.per_method[m] = score([&model](const Vector& z) {
            return classify_baseline(model, z);
          });
          break;
        }
        case Method::RidgeLda: {
          BaselineModel model = fit_ridge_lda(train1, train2);
          outcome.per_method[m] = score([&model](const Vector& z) {
            return classify_baseline(model, z);
          });
          break;
        }
        case Method::RidgeQda: {
          BaselineModel model = fit_ridge_qda(train1, train2);
          outcome.per_method[m] = score([&model](const Vector& z) {
            return classify_baseline(model, z);
          });
          break;
        }
      }
    } catch (const Error&) {
      // failure recorded as nullopt; aggregated below
    }
  }
  return outcome;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::vector<Method>& methods) {
  if (spec.replications < 1) {
    throw InvalidInputError("run_experiment: replications < 1");
  }
  if (methods.empty()) {
    throw InvalidInputError("run_experiment: no methods requested");
  }
  ExperimentSpec effective = spec;
  if (effective.tuning_grid.empty()) {
    effective.tuning_grid = default_tuning_grid();
  }
  const double rate = rate_factor(std::min(spec.n1, spec.n2), spec.p);
  std::vector<double> lambda1s, lambda2s;
  for (double c : effective.tuning_grid) {
    lambda1s.push_back(c * rate);
    lambda2s.push_back(c * rate);
  }

  std::vector<ReplicationOutcome> outcomes(
      static_cast<size_t>(spec.replications));
  const int threads = std::max(1, spec.threads);
  if (threads == 1) {
    for (int r = 0; r < spec.replications; ++r) {
      outcomes[static_cast<size_t>(r)] =
          run_replication(effective, methods, lambda1s, lambda2s, r);
    }
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (int r = next.fetch_add(1); r < spec.replications;
           r = next.fetch_add(1)) {
        outcomes[static_cast<size_t>(r)] =
            run_replication(effective, methods, lambda1s, lambda2s, r);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  ExperimentResult result;
  result.spec = effective;
  for (size_t m = 0; m < methods.size(); ++m) {
    MethodSummary summary;
    summary.method = method_name(methods[m]);
    summary.replications = spec.replications;
    std::vector<double> err, sp, se, mc;
    for (const ReplicationOutcome& o : outcomes) {
      const auto& rep = o.per_method[m];
      if (!rep) {
        ++summary.failures;
        continue;
      }
      err.push_back(rep->error_rate);
      sp.push_back(rep->specificity);
      se.push_back(rep->sensitivity);
      mc.push_back(rep->mcc);
    }
    if (summary.failures * 10 > spec.replications) {
      throw Error("run_experiment: method " + summary.method +
                  " failed in more than 10% of replications");
    }
    auto mean = [](const std::vector<double>& v) {
      double acc = 0.0;
      for (double x : v) acc += x;
      return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
    };
    summary.error_rate = {mean(err), stddev(err, mean(err))};
    summary.specificity = {mean(sp), stddev(sp, mean(sp))};
    summary.sensitivity = {mean(se), stddev(se, mean(se))};
    summary.mcc = {mean(mc), stddev(mc, mean(mc))};
    summary.per_replication_error = std::move(err);
    result.methods.push_back(std::move(summary));
  }
  return result;
}

std::string result_to_json(const ExperimentResult& result) {
  nlohmann::json j;
  j["experiment"] = {
      {"family", family_name(result.spec.family)},
      {"model", precision_name(result.spec.model)},
      {"p", result.spec.p},
      {"n1", result.spec.n1},
      {"n2", result.spec.n2},
      {"s1", result.spec.s1},
      {"s2", result.spec.s2},
      {"replications", result.spec.replications},
      {"folds", result.spec.folds},
      {"seed", result.spec.seed},
      {"tuning_grid", result.spec.tuning_grid},
  };
  nlohmann::json rows = nlohmann::json::array();
  for (const MethodSummary& m : result.methods) {
    rows.push_back({
        {"method", m.method},
        {"error_rate", {{"mean", m.error_rate.mean}, {"sd", m.error_rate.sd}}},
        {"specificity", {{"mean", m.specificity.mean}, {"sd", m.specificity.sd}}},
        {"sensitivity", {{"mean", m.sensitivity.mean}, {"sd", m.sensitivity.sd}}},
        {"mcc", {{"mean", m.mcc.mean}, {"sd", m.mcc.sd}}},
        {"failures", m.failures},
        {"per_replication_error", m.per_replication_error},
    });
  }
  j["methods"] = rows;
  return j.dump(2) + "\n";
}

std::string format_table(const ExperimentResult& result) {
  std::ostringstream os;
  auto cell = [](const ReplicationSummary& s) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f(%.3f)", s.mean, s.sd);
    return std::string(buf);
  };
  os << family_name(result.spec.family) << " distribution, model "
     << precision_name(result.spec.model) << ", p = " << result.spec.p << "\n";
  os << "Method   Error rate    Specificity   Sensitivity   Mcc\n";
  for (const MethodSummary& m : result.methods) {
    os << m.method << std::string(9 - std::min<size_t>(8, m.method.size()), ' ')
       << cell(m.error_rate) << "  " << cell(m.specificity) << "  "
       << cell(m.sensitivity) << "  " << cell(m.mcc) << "\n";
  }
  return os.str();
}

}  // namespace ssqda
