#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssqda/classifier.hpp"

namespace ssqda {

/// CSV-backed dataset: header f0..f{p-1},label; integer class labels.
struct Dataset {
  Matrix x;
  std::vector<int> labels;
};

Dataset read_csv_dataset(const std::string& path);
void write_csv_dataset(const std::string& path, const Dataset& dataset);

/// Versioned text model container (diffable; full double precision).
void save_model(const std::string& path, const DiscriminantModel& model);
DiscriminantModel load_model(const std::string& path);

/// Raw interleaved byte tensor: "SSQT" magic, u32-le h/w/channels, payload.
struct RawTensor {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;
};

RawTensor read_raw_tensor(const std::string& path);
void write_raw_tensor(const std::string& path, const RawTensor& tensor);

/// Row-major luminance flattening of an h x w x 3 byte tensor:
/// x = 0.1140 r + 0.5870 g + 0.2989 b per pixel.
Vector grayscale_flatten(const RawTensor& tensor);

}  // namespace ssqda
