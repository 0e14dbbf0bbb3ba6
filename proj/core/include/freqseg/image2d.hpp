#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "freqseg/volume.hpp"

namespace freqseg {

/// Row-major 2D real grid. Rows run along y, columns along x.
class Image2D {
 public:
  Image2D() = default;
  Image2D(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Image2D(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  const double& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  double max_abs() const noexcept;
  Image2D transposed() const;

  Image2D& operator+=(const Image2D& other);
  Image2D& operator-=(const Image2D& other);

  bool operator==(const Image2D&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Image2D operator+(Image2D a, const Image2D& b);
Image2D operator-(Image2D a, const Image2D& b);

/// Axial slice z of `vol` as an (ny rows) x (nx cols) image.
Image2D axial_slice(const ScalarVolume& vol, std::size_t z);
void set_axial_slice(ScalarVolume& vol, std::size_t z, const Image2D& slice);

/// Half-sample symmetric index: ..., 1, 0 | 0, 1, ..., n-1 | n-1, n-2, ...
inline std::ptrdiff_t symmetric_index(std::ptrdiff_t i, std::ptrdiff_t n) noexcept {
  const std::ptrdiff_t period = 2 * n;
  std::ptrdiff_t m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

/// Runs fn(z) for z in [0, count) on up to `jobs` threads. Each index is
/// processed exactly once; fn must not share mutable state across indices.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace freqseg
