#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "freqseg/fuse.hpp"
#include "freqseg/image2d.hpp"
#include "freqseg/lesion_metrics.hpp"
#include "freqseg/volume.hpp"

namespace fixtures {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

freqseg::Image2D random_image(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double scale = 1.0);
freqseg::ScalarVolume random_volume(const freqseg::Dims& dims, std::mt19937_64& rng,
                                    const freqseg::Spacing& spacing = {1.0, 1.0, 1.0});

/// cos(2 pi / period * (-x sin(theta) + y cos(theta))): stripes along theta
/// in (x = column, y = row) coordinates.
freqseg::Image2D grating(std::size_t rows, std::size_t cols, double theta_deg, double period);

/// Rotated, translated geometry with the given spacing.
freqseg::VoxelGeometry oblique_geometry(const freqseg::Dims& dims, const freqseg::Spacing& spacing);

/// Random softmax-like probabilities, class-major.
freqseg::ProbVolume random_probs(const freqseg::VoxelGeometry& g, std::size_t classes, std::mt19937_64& rng);

/// Box-shaped lesions of random codes 1..4 plus scattered single voxels.
freqseg::LabelVolume random_labels(const freqseg::VoxelGeometry& g, std::mt19937_64& rng);

/// Copy of `ref` with boxes shifted, dropped, added and voxels flipped.
freqseg::LabelVolume perturb_labels(const freqseg::LabelVolume& ref, std::mt19937_64& rng);

void set_box(freqseg::BinaryMask& m, std::size_t x0, std::size_t y0, std::size_t z0, std::size_t n);
void set_box(freqseg::LabelVolume& m, std::size_t x0, std::size_t y0, std::size_t z0, std::size_t n,
             freqseg::Label code);

/// Writes <dir>/<id>-<mod>.nii.gz for the four modalities.
void write_synthetic_case(const std::filesystem::path& dir, const std::string& id, const freqseg::Dims& dims,
                          std::uint64_t seed, bool skip_t1c = false);

std::vector<char> read_bytes(const std::filesystem::path& p);

}  // namespace fixtures
