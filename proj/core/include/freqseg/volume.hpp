#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "freqseg/errors.hpp"

namespace freqseg {

using Dims = std::array<std::size_t, 3>;
using Spacing = std::array<double, 3>;
using Affine = std::array<std::array<double, 4>, 4>;

/// Relative tolerance used when comparing geometries read from different files.
inline constexpr double kGeometryRelTol = 1e-4;

Affine diagonal_affine(const Spacing& spacing);

/// Voxel grid shape plus its placement in scanner (mm) space.
///
/// The affine maps voxel indices (i, j, k, 1) to physical millimetres. Its
/// upper-left 3x3 column norms must agree with `spacing`.
class VoxelGeometry {
 public:
  VoxelGeometry(Dims dims, Spacing spacing);
  VoxelGeometry(Dims dims, Spacing spacing, const Affine& affine);

  const Dims& dims() const noexcept { return dims_; }
  const Spacing& spacing() const noexcept { return spacing_; }
  const Affine& affine() const noexcept { return affine_; }

  std::size_t voxel_count() const noexcept { return dims_[0] * dims_[1] * dims_[2]; }
  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return x + dims_[0] * (y + dims_[1] * z);
  }

  bool operator==(const VoxelGeometry&) const = default;

 private:
  Dims dims_;
  Spacing spacing_;
  Affine affine_;
};

/// True iff dims match exactly and spacing/affine agree within kGeometryRelTol.
bool geometry_compatible(const VoxelGeometry& a, const VoxelGeometry& b);

/// Throws CompatibilityError naming `what` when geometries differ.
void require_compatible(const VoxelGeometry& a, const VoxelGeometry& b, const std::string& what);

std::string to_string(const Dims& dims);

/// Dense 3D grid, x fastest, with its geometry.
template <typename T>
class Volume {
 public:
  using value_type = T;

  explicit Volume(VoxelGeometry geometry, T fill = T{})
      : geometry_(std::move(geometry)), data_(geometry_.voxel_count(), fill) {}

  Volume(VoxelGeometry geometry, std::vector<T> data)
      : geometry_(std::move(geometry)), data_(std::move(data)) {
    if (data_.size() != geometry_.voxel_count()) {
      throw ArgumentError("volume payload has " + std::to_string(data_.size()) +
                          " elements, geometry " + to_string(geometry_.dims()) + " needs " +
                          std::to_string(geometry_.voxel_count()));
    }
    if constexpr (std::is_floating_point_v<T>) {
      for (const T v : data_) {
        if (!std::isfinite(v)) throw ArgumentError("volume contains non-finite values");
      }
    }
  }

  const VoxelGeometry& geometry() const noexcept { return geometry_; }
  const Dims& dims() const noexcept { return geometry_.dims(); }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<const T> data() const noexcept { return data_; }
  std::span<T> data() noexcept { return data_; }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  T& at(std::size_t x, std::size_t y, std::size_t z) noexcept { return data_[geometry_.index(x, y, z)]; }
  const T& at(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return data_[geometry_.index(x, y, z)];
  }

  bool operator==(const Volume&) const = default;

 private:
  VoxelGeometry geometry_;
  std::vector<T> data_;
};

using Label = std::uint16_t;
using ScalarVolume = Volume<double>;
using LabelVolume = Volume<Label>;
/// 0/1 voxels; uint8 rather than vector<bool> so spans work.
using BinaryMask = Volume<std::uint8_t>;

std::size_t count(const BinaryMask& mask);

struct RegionCode {
  std::string name;
  int code;
};

struct CompositeRegion {
  std::string name;
  std::vector<std::string> members;
};

/// Raw label codes and the composite regions built from them.
///
/// Names are fixed to the six evaluation regions; codes and composite
/// membership are configurable.
class LabelSchema {
 public:
  LabelSchema(std::vector<RegionCode> raw, std::vector<CompositeRegion> composites);

  /// ET=1, NET=2, CC=3, ED=4; TC={ET,NET,CC}; WT={ET,NET,CC,ED}.
  static LabelSchema ped2025();

  const std::vector<RegionCode>& raw_regions() const noexcept { return raw_; }
  const std::vector<CompositeRegion>& composites() const noexcept { return composites_; }

  /// Raw regions in declaration order followed by composites.
  std::vector<std::string> evaluation_regions() const;

  bool is_known_code(long code) const noexcept;
  /// Index into raw_regions() for `code`, or -1.
  int raw_index(long code) const noexcept;

 private:
  std::vector<RegionCode> raw_;
  std::vector<CompositeRegion> composites_;
};

/// Throws SchemaViolation on the first label that is neither 0 nor a raw code.
void validate_labels(const LabelVolume& labels, const LabelSchema& schema);

using RegionMasks = std::map<std::string, BinaryMask>;

/// One mask per raw region and per composite (union of its members).
RegionMasks compose_regions(const LabelVolume& labels, const LabelSchema& schema);

}  // namespace freqseg
