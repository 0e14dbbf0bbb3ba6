#pragma once

// NIfTI-1 single-file (.nii / .nii.gz) subset: uint8, int16 and float32
// payloads, 3 or 4 dimensions, little-endian.

#include <array>
#include <cstdint>
#include <filesystem>

#include "freqseg/fuse.hpp"
#include "freqseg/volume.hpp"

namespace freqseg::nifti {

enum class DataType : std::int16_t { UInt8 = 2, Int16 = 4, Float32 = 16 };

struct HeaderView {
  int ndim = 0;
  std::array<std::size_t, 4> dims{1, 1, 1, 1};
  DataType datatype = DataType::Float32;
  std::array<double, 4> pixdim{1, 1, 1, 1};
  Affine affine{};
  double scl_slope = 1.0;
  double scl_inter = 0.0;
  bool gzip = false;
};

HeaderView read_header(const std::filesystem::path& path);

ScalarVolume read_scalar(const std::filesystem::path& path);
LabelVolume read_labels(const std::filesystem::path& path, const LabelSchema& schema);
ProbVolume read_prob(const std::filesystem::path& path);

/// Paths ending in ".gz" are gzip-compressed. Output is byte-deterministic.
void write_scalar(const std::filesystem::path& path, const ScalarVolume& vol);
/// uint8 when every label fits, int16 otherwise.
void write_labels(const std::filesystem::path& path, const LabelVolume& vol);
void write_prob(const std::filesystem::path& path, const ProbVolume& prob);

}  // namespace freqseg::nifti
