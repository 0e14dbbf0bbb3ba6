#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "freqseg/volume.hpp"

namespace freqseg {

/// Tolerance on per-voxel class sums accepted on load.
inline constexpr double kProbSumTol = 1e-4;

/// Per-class probabilities, stored class-major (all voxels of class 0, then
/// class 1, ...), matching a 4D NIfTI with class as the last axis.
class ProbVolume {
 public:
  /// Requires values in [0, 1] and per-voxel sums within kProbSumTol of 1.
  ProbVolume(VoxelGeometry geometry, std::size_t classes, std::vector<double> probs);

  /// Accepts sums within kProbSumTol of 1 and divides each voxel by its sum.
  static ProbVolume normalized(VoxelGeometry geometry, std::size_t classes, std::vector<double> probs);

  const VoxelGeometry& geometry() const noexcept { return geometry_; }
  std::size_t classes() const noexcept { return classes_; }
  std::size_t voxel_count() const noexcept { return geometry_.voxel_count(); }

  double at(std::size_t voxel, std::size_t cls) const noexcept { return probs_[cls * voxel_count() + voxel]; }
  std::span<const double> data() const noexcept { return probs_; }

 private:
  struct Unchecked {};
  ProbVolume(Unchecked, VoxelGeometry geometry, std::size_t classes, std::vector<double> probs);

  VoxelGeometry geometry_;
  std::size_t classes_;
  std::vector<double> probs_;
};

struct EnsembleSpec {
  std::vector<double> weights;

  /// n weights of 1/n.
  static EnsembleSpec equal(std::size_t n);
  /// Weights positive and summing to 1 within 1e-9.
  void validate() const;
};

/// output[v, c] = sum_i w_i * models_i[v, c].
ProbVolume fuse_probs(std::span<const ProbVolume> models, const EnsembleSpec& spec);

/// Schema code of the most probable class per voxel; class 0 is background,
/// class k >= 1 is the k-th raw region. Ties go to the lowest class index.
LabelVolume argmax_labels(const ProbVolume& prob, const LabelSchema& schema);

}  // namespace freqseg
