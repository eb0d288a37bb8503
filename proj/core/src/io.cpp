#include "ssqda/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ssqda {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(context + ": bad numeric field '" + s + "'");
  }
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = {}) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = {}) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

Vector read_labeled_vector(std::istream& in, const std::string& name,
                           Eigen::Index p) {
  std::string label;
  in >> label;
  if (label != name) throw IoError("model: expected field " + name);
  Vector v(p);
  for (Eigen::Index i = 0; i < p; ++i) in >> v[i];
  if (!in) throw IoError("model: truncated field " + name);
  return v;
}

}  // namespace

Dataset read_csv_dataset(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split(line, ',');
  if (header.size() < 2 || header.back() != "label") {
    throw IoError(path + ": expected header f0..f{p-1},label");
  }
  const size_t p = header.size() - 1;
  for (size_t j = 0; j < p; ++j) {
    if (header[j] != "f" + std::to_string(j)) {
      throw IoError(path + ": unexpected feature column '" + header[j] + "'");
    }
  }

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split(line, ',');
    if (fields.size() != p + 1) {
      throw IoError(path + ": row with " + std::to_string(fields.size()) +
                    " fields, expected " + std::to_string(p + 1));
    }
    std::vector<double> row(p);
    for (size_t j = 0; j < p; ++j) row[j] = parse_double(fields[j], path);
    double lab = parse_double(fields[p], path);
    int label = static_cast<int>(lab);
    if (static_cast<double>(label) != lab) {
      throw IoError(path + ": non-integer label '" + fields[p] + "'");
    }
    rows.push_back(std::move(row));
    labels.push_back(label);
  }
  if (rows.empty()) throw IoError(path + ": no data rows");

  Dataset dataset;
  dataset.x.resize(static_cast<Eigen::Index>(rows.size()),
                   static_cast<Eigen::Index>(p));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < p; ++j) {
      dataset.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  dataset.labels = std::move(labels);
  return dataset;
}

void write_csv_dataset(const std::string& path, const Dataset& dataset) {
  if (dataset.x.rows() != static_cast<Eigen::Index>(dataset.labels.size())) {
    throw InvalidInputError("write_csv_dataset: label count mismatch");
  }
  std::ofstream out = open_out(path);
  for (Eigen::Index j = 0; j < dataset.x.cols(); ++j) out << "f" << j << ",";
  out << "label\n";
  for (Eigen::Index i = 0; i < dataset.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < dataset.x.cols(); ++j) {
      out << fmt(dataset.x(i, j)) << ",";
    }
    out << dataset.labels[static_cast<size_t>(i)] << "\n";
  }
}

void save_model(const std::string& path, const DiscriminantModel& model) {
  const Eigen::Index p = model.beta.size();
  std::ofstream out = open_out(path);
  out << "SSQDA-MODEL 1\n";
  out << "p " << p << "\n";
  out << "prior_logratio " << fmt(model.prior_logratio) << "\n";
  out << "logdet_term " << fmt(model.logdet_term) << "\n";
  auto write_vec = [&](const char* name, const Vector& v) {
    out << name;
    for (Eigen::Index i = 0; i < v.size(); ++i) out << " " << fmt(v[i]);
    out << "\n";
  };
  write_vec("median1", model.median1);
  write_vec("median2", model.median2);
  write_vec("beta", model.beta);
  out << "d_matrix\n";
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      out << fmt(model.d_matrix(i, j)) << (j + 1 < p ? " " : "\n");
    }
  }
}

DiscriminantModel load_model(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "SSQDA-MODEL" || version != 1) {
    throw IoError(path + ": not a version-1 model container");
  }
  std::string key;
  Eigen::Index p = 0;
  in >> key >> p;
  if (key != "p" || p < 1) throw IoError(path + ": bad dimension field");

  DiscriminantModel model;
  in >> key >> model.prior_logratio;
  if (key != "prior_logratio") throw IoError(path + ": expected prior_logratio");
  in >> key >> model.logdet_term;
  if (key != "logdet_term") throw IoError(path + ": expected logdet_term");
  model.median1 = read_labeled_vector(in, "median1", p);
  model.median2 = read_labeled_vector(in, "median2", p);
  model.beta = read_labeled_vector(in, "beta", p);
  in >> key;
  if (key != "d_matrix") throw IoError(path + ": expected d_matrix");
  model.d_matrix.resize(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) in >> model.d_matrix(i, j);
  }
  if (!in) throw IoError(path + ": truncated d_matrix");
  return model;
}

RawTensor read_raw_tensor(const std::string& path) {
  std::ifstream in = open_in(path, std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "SSQT") {
    throw IoError(path + ": missing SSQT magic");
  }
  std::uint32_t dims[3];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!in) throw IoError(path + ": truncated header");
  RawTensor t;
  t.height = static_cast<int>(dims[0]);
  t.width = static_cast<int>(dims[1]);
  t.channels = static_cast<int>(dims[2]);
  if (t.height < 1 || t.width < 1 || t.channels < 1) {
    throw IoError(path + ": bad tensor dimensions");
  }
  const size_t n = static_cast<size_t>(t.height) * t.width * t.channels;
  t.data.resize(n);
  in.read(reinterpret_cast<char*>(t.data.data()),
          static_cast<std::streamsize>(n));
  if (!in) throw IoError(path + ": truncated payload");
  return t;
}

void write_raw_tensor(const std::string& path, const RawTensor& tensor) {
  const size_t n = static_cast<size_t>(tensor.height) * tensor.width *
                   tensor.channels;
  if (tensor.data.size() != n) {
    throw InvalidInputError("write_raw_tensor: payload size mismatch");
  }
  std::ofstream out = open_out(path, std::ios::binary);
  out.write("SSQT", 4);
  std::uint32_t dims[3] = {static_cast<std::uint32_t>(tensor.height),
                           static_cast<std::uint32_t>(tensor.width),
                           static_cast<std::uint32_t>(tensor.channels)};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  out.write(reinterpret_cast<const char*>(tensor.data.data()),
            static_cast<std::streamsize>(n));
}

Vector grayscale_flatten(const RawTensor& tensor) {
  if (tensor.channels != 3) {
    throw InvalidInputError("grayscale_flatten: expected 3 channels");
  }
  const size_t pixels = static_cast<size_t>(tensor.height) * tensor.width;
  if (tensor.data.size() != pixels * 3) {
    throw InvalidInputError("grayscale_flatten: malformed tensor payload");
  }
  Vector out(static_cast<Eigen::Index>(pixels));
  for (size_t i = 0; i < pixels; ++i) {
    const std::uint8_t* px = tensor.data.data() + 3 * i;
    out[static_cast<Eigen::Index>(i)] =
        0.1140 * px[0] + 0.5870 * px[1] + 0.2989 * px[2];
  }
  return out;
}

}  // namespace ssqda
