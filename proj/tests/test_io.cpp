#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "ssqda/io.hpp"

using namespace ssqda;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

struct FileGuard {
  std::string path;
  ~FileGuard() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("csv dataset round trip preserves values") {
  Dataset ds;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  ds.x.resize(7, 3);
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 3; ++j) ds.x(i, j) = 1e3 * nd(rng);
    ds.labels.push_back(i % 2 + 1);
  }
  FileGuard guard{temp_path("ssqda_test_ds.csv")};
  write_csv_dataset(guard.path, ds);
  Dataset back = read_csv_dataset(guard.path);
  REQUIRE(back.x.rows() == 7);
  REQUIRE(back.x.cols() == 3);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 3; ++j) {
      double a = ds.x(i, j), b = back.x(i, j);
      CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
    }
  CHECK(back.labels == ds.labels);
}

TEST_CASE("csv reader rejects malformed input") {
  CHECK_THROWS_AS(read_csv_dataset(temp_path("ssqda_no_such_file.csv")), IoError);

  FileGuard guard{temp_path("ssqda_bad_header.csv")};
  {
    std::ofstream out(guard.path);
    out << "a,b,label\n1,2,1\n";
  }
  CHECK_THROWS_AS(read_csv_dataset(guard.path), IoError);

  FileGuard guard2{temp_path("ssqda_bad_label.csv")};
  {
    std::ofstream out(guard2.path);
    out << "f0,label\n1.5,1.5\n";
  }
  CHECK_THROWS_AS(read_csv_dataset(guard2.path), IoError);
}

TEST_CASE("model container round trip is exact") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  DiscriminantModel model;
  const int p = 4;
  model.d_matrix.resize(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) model.d_matrix(i, j) = nd(rng);
  model.d_matrix = 0.5 * (model.d_matrix + model.d_matrix.transpose()).eval();
  model.beta = Vector::Random(p);
  model.median1 = Vector::Random(p);
  model.median2 = Vector::Random(p);
  model.logdet_term = nd(rng);
  model.prior_logratio = nd(rng);

  FileGuard guard{temp_path("ssqda_test_model.txt")};
  save_model(guard.path, model);
  DiscriminantModel back = load_model(guard.path);
  // %.17g round-trips doubles exactly
  CHECK((back.d_matrix - model.d_matrix).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.beta - model.beta).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.median1 - model.median1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.median2 - model.median2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.logdet_term == model.logdet_term);
  CHECK(back.prior_logratio == model.prior_logratio);
}

TEST_CASE("model loader rejects foreign files") {
  FileGuard guard{temp_path("ssqda_not_a_model.txt")};
  {
    std::ofstream out(guard.path);
    out << "SOMETHING 2\n";
  }
  CHECK_THROWS_AS(load_model(guard.path), IoError);
}

TEST_CASE("raw tensor round trip") {
  RawTensor t;
  t.height = 2;
  t.width = 3;
  t.channels = 3;
  for (int i = 0; i < 18; ++i) t.data.push_back(static_cast<std::uint8_t>(i * 7));
  FileGuard guard{temp_path("ssqda_test_tensor.bin")};
  write_raw_tensor(guard.path, t);
  RawTensor back = read_raw_tensor(guard.path);
  CHECK(back.height == 2);
  CHECK(back.width == 3);
  CHECK(back.channels == 3);
  CHECK(back.data == t.data);
}

TEST_CASE("raw tensor reader checks magic and payload") {
  FileGuard guard{temp_path("ssqda_bad_tensor.bin")};
  {
    std::ofstream out(guard.path, std::ios::binary);
    out << "NOPE";
  }
  CHECK_THROWS_AS(read_raw_tensor(guard.path), IoError);
}

TEST_CASE("grayscale_flatten luminance arithmetic") {
  RawTensor t;
  t.height = 1;
  t.width = 3;
  t.channels = 3;
  // white, black, gray 100
  t.data = {255, 255, 255, 0, 0, 0, 100, 100, 100};
  Vector v = grayscale_flatten(t);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == doctest::Approx(254.9745).epsilon(1e-12));
  CHECK(v[1] == 0.0);
  CHECK(v[2] == doctest::Approx(99.99).epsilon(1e-12));
}

TEST_CASE("grayscale_flatten is row-major and channel-ordered") {
  RawTensor t;
  t.height = 2;
  t.width = 1;
  t.channels = 3;
  t.data = {255, 0, 0, 0, 255, 0};  // pure r pixel, then pure g pixel
  Vector v = grayscale_flatten(t);
  CHECK(v[0] == doctest::Approx(0.1140 * 255).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(0.5870 * 255).epsilon(1e-12));

  t.channels = 1;
  t.data = {9, 9};
  CHECK_THROWS_AS(grayscale_flatten(t), InvalidInputError);
}
