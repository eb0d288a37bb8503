// Command-line front end: simulation harness, model fitting/prediction on CSV
// datasets, and raw-tensor grayscale preprocessing.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ssqda/evaluation.hpp"
#include "ssqda/io.hpp"

namespace {

using namespace ssqda;

int env_threads() {
  const char* v = std::getenv("SSQDA_THREADS");
  if (!v) return 1;
  int t = std::atoi(v);
  return t > 0 ? t : 1;
}

std::vector<Method> parse_methods(const std::string& csv) {
  static const std::map<std::string, Method> lookup = {
      {"ssqda", Method::Ssqda}, {"sdar", Method::Sdar},
      {"slda", Method::Slda},   {"lda", Method::RidgeLda},
      {"qda", Method::RidgeQda}};
  std::vector<Method> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto it = lookup.find(item);
    if (it == lookup.end()) {
      throw CLI::ValidationError("--methods", "unknown method '" + item + "'");
    }
    out.push_back(it->second);
  }
  if (out.empty()) throw CLI::ValidationError("--methods", "empty method list");
  return out;
}

struct SimulateArgs {
  std::string model = "ar1";
  std::string dist = "normal";
  int p = 100;
  int n = 200;
  int reps = 20;
  int s1 = 10;
  int s2 = 10;
  int folds = 5;
  std::uint64_t seed = 0;
  int threads = env_threads();
  std::vector<double> d_range = {0.3, 0.7};
  std::string methods = "ssqda,sdar,slda,lda,qda";
  std::string out_json = "simulate.json";
  std::string out_table = "simulate.txt";
};

int cmd_simulate(const SimulateArgs& args) {
  static const std::map<std::string, PrecisionKind> models = {
      {"ar1", PrecisionKind::Ar1},
      {"banded", PrecisionKind::Banded},
      {"er", PrecisionKind::ErdosRenyi}};
  static const std::map<std::string, Family> dists = {
      {"normal", Family::Normal},
      {"t5", Family::T5},
      {"mixture", Family::MixtureNormal}};

  ExperimentSpec spec;
  spec.model = models.at(args.model);
  spec.family = dists.at(args.dist);
  spec.p = args.p;
  spec.n1 = spec.n2 = args.n;
  spec.s1 = args.s1;
  spec.s2 = args.s2;
  spec.replications = args.reps;
  spec.folds = args.folds;
  spec.seed = args.seed;
  spec.threads = args.threads;
  spec.d_magnitude_range = {args.d_range[0], args.d_range[1]};
  spec.cv_solver = default_cv_solver();
  spec.fit_solver = default_fit_solver();

  ExperimentResult result = run_experiment(spec, parse_methods(args.methods));
  std::string table = format_table(result);
  std::cout << table;
  std::ofstream(args.out_table) << table;
  std::ofstream(args.out_json) << result_to_json(result);
  return 0;
}

Matrix rows_for_label(const Dataset& ds, int label) {
  std::vector<Eigen::Index> idx;
  for (size_t i = 0; i < ds.labels.size(); ++i) {
    if (ds.labels[i] == label) idx.push_back(static_cast<Eigen::Index>(i));
  }
  Matrix out(static_cast<Eigen::Index>(idx.size()), ds.x.cols());
  for (size_t i = 0; i < idx.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = ds.x.row(idx[i]);
  }
  return out;
}

int cmd_fit(const std::string& train_path, const std::string& model_path,
            std::optional<double> lambda1, std::optional<double> lambda2,
            int folds) {
  Dataset train = read_csv_dataset(train_path);
  for (int lab : train.labels) {
    if (lab != 1 && lab != 2) {
      throw InvalidInputError("fit: labels must be 1 or 2, got " +
                              std::to_string(lab));
    }
  }
  Matrix class1 = rows_for_label(train, 1);
  Matrix class2 = rows_for_label(train, 2);
  if (class1.rows() < 3 || class2.rows() < 3) {
    throw InvalidInputError("fit: each class needs at least 3 samples");
  }

  double l1, l2;
  if (lambda1 && lambda2) {
    l1 = *lambda1;
    l2 = *lambda2;
  } else {
    double rate = rate_factor(
        static_cast<int>(std::min(class1.rows(), class2.rows())),
        static_cast<int>(train.x.cols()));
    std::vector<double> grid;
    for (double c : default_tuning_grid()) grid.push_back(c * rate);
    SolverOptions cv = default_cv_solver();
    CvResult best = cross_validate(
        class1, class2, grid, grid, folds,
        [&cv](const Matrix& x1, const Matrix& x2,
              const std::vector<double>& l1s, const std::vector<double>& l2s) {
          std::vector<ClassifyFn> out(l1s.size() * l2s.size());
          for (size_t i = 0; i < l1s.size(); ++i) {
            for (size_t j = 0; j < l2s.size(); ++j) {
              try {
                auto model = std::make_shared<DiscriminantModel>(
                    fit(x1, x2, l1s[i], l2s[j], FitOptions{1e-8, 500, cv}));
                out[i * l2s.size() + j] = [model](const Vector& z) {
                  return classify(*model, z);
                };
              } catch (const Error&) {
              }
            }
          }
          return out;
        });
    l1 = best.lambda1;
    l2 = best.lambda2;
    std::cout << "selected lambda1 " << l1 << " lambda2 " << l2 << "\n";
  }

  FitOptions opts;
  opts.solver = default_fit_solver();
  DiscriminantModel model = fit(class1, class2, l1, l2, opts);
  save_model(model_path, model);
  std::cout << "model written to " << model_path << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path, bool with_scores) {
  DiscriminantModel model = load_model(model_path);
  Dataset data = read_csv_dataset(data_path);
  if (data.x.cols() != model.beta.size()) {
    throw InvalidInputError(
        "predict: dataset dimension " + std::to_string(data.x.cols()) +
        " does not match model dimension " + std::to_string(model.beta.size()));
  }
  std::ofstream out(out_path);
  if (!out) throw IoError("cannot write " + out_path);
  out << (with_scores ? "label,score\n" : "label\n");
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    Vector z = data.x.row(i).transpose();
    if (with_scores) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", discriminant(model, z));
      out << classify(model, z) << "," << buf << "\n";
    } else {
      out << classify(model, z) << "\n";
    }
  }
  return 0;
}

int cmd_preprocess(const std::string& in_path, const std::string& out_path,
                   std::optional<int> label) {
  RawTensor tensor = read_raw_tensor(in_path);
  Vector features = grayscale_flatten(tensor);
  std::ofstream out(out_path);
  if (!out) throw IoError("cannot write " + out_path);
  for (Eigen::Index j = 0; j < features.size(); ++j) {
    out << "f" << j << (j + 1 < features.size() || label ? "," : "\n");
  }
  if (label) out << "label\n";
  for (Eigen::Index j = 0; j < features.size(); ++j) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", features[j]);
    out << buf << (j + 1 < features.size() || label ? "," : "\n");
  }
  if (label) out << *label << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial-sign based sparse quadratic discriminant analysis"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte Carlo comparison of the classifiers");
  simulate->add_option("--model", sim.model, "Precision model")
      ->check(CLI::IsMember({"ar1", "banded", "er"}));
  simulate->add_option("--dist", sim.dist, "Sampling distribution")
      ->check(CLI::IsMember({"normal", "t5", "mixture"}));
  simulate->add_option("--p", sim.p, "Dimension")->check(CLI::PositiveNumber);
  simulate->add_option("--n", sim.n, "Training samples per class")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--reps", sim.reps, "Replications")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--s1", sim.s1, "Nonzeros of the differential matrix")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--s2", sim.s2, "Nonzeros of the direction vector")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--folds", sim.folds, "Cross-validation folds")
      ->check(CLI::Range(2, 1000));
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--threads", sim.threads,
                       "Worker threads (default: SSQDA_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--d-range", sim.d_range,
                       "Magnitude range of the differential entries")
      ->expected(2);
  simulate->add_option("--methods", sim.methods,
                       "Comma list from ssqda,sdar,slda,lda,qda");
  simulate->add_option("--out-json", sim.out_json, "JSON output path");
  simulate->add_option("--out-table", sim.out_table, "Text table output path");

  std::string fit_train, fit_model = "model.ssqda";
  std::optional<double> fit_l1, fit_l2;
  int fit_folds = 5;
  CLI::App* fit_cmd =
      app.add_subcommand("fit", "Fit a model from a labeled CSV dataset");
  fit_cmd->add_option("--train", fit_train, "Training CSV")
      ->required()
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("--out", fit_model, "Model output path");
  fit_cmd->add_option("--lambda1", fit_l1, "Differential-problem lambda");
  fit_cmd->add_option("--lambda2", fit_l2, "Direction-problem lambda");
  fit_cmd->add_option("--folds", fit_folds, "CV folds when lambdas not given")
      ->check(CLI::Range(2, 1000));

  std::string pred_model, pred_data, pred_out = "predictions.csv";
  bool pred_scores = false;
  CLI::App* predict =
      app.add_subcommand("predict", "Predict labels with a saved model");
  predict->add_option("--model", pred_model, "Model container")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--data", pred_data, "CSV dataset to label")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--out", pred_out, "Predictions CSV path");
  predict->add_flag("--scores", pred_scores, "Include discriminant scores");

  std::string pre_in, pre_out = "features.csv";
  std::optional<int> pre_label;
  CLI::App* preprocess = app.add_subcommand(
      "preprocess", "Grayscale-flatten a raw RGB tensor into a feature row");
  preprocess->add_option("--input", pre_in, "Raw SSQT tensor file")
      ->required()
      ->check(CLI::ExistingFile);
  preprocess->add_option("--out", pre_out, "Feature CSV path");
  preprocess->add_option("--label", pre_label,
                         "Append a label column with this value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (fit_cmd->parsed()) return cmd_fit(fit_train, fit_model, fit_l1, fit_l2, fit_folds);
    if (predict->parsed()) return cmd_predict(pred_model, pred_data, pred_out, pred_scores);
    if (preprocess->parsed()) return cmd_preprocess(pre_in, pre_out, pre_label);
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
