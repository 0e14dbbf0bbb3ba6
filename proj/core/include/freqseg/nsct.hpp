#pragma once

// Single-level nonsubsampled contourlet transform producing four directional
// high-frequency images the same size as the input.
//
// Pyramid: lowpass = slice * separable smoother, bandpass = slice - lowpass.
// Directional bank: W = B * fan1, Wc = B - W, then each of W and Wc is split
// with fan2 and its complement. Every split is "kernel and identity minus
// kernel", so lowpass + sum(directions) reproduces the slice up to roundoff.
//
// Direction index = orientation of the features it keeps, measured in
// (x = column, y = row) coordinates:
//   0: ~0 deg (horizontal), 1: ~45 deg, 2: ~90 deg (vertical), 3: ~135 deg.

#include <array>
#include <cstddef>
#include <vector>

#include "freqseg/filter_tables.hpp"
#include "freqseg/image2d.hpp"
#include "freqseg/volume.hpp"

namespace freqseg {

/// Centered kernel with odd extents.
struct Kernel2D {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> taps;

  double operator()(std::size_t r, std::size_t c) const noexcept { return taps[r * cols + c]; }
  double sum() const noexcept;
};

struct NsctKernels {
  /// 1D taps applied along both axes.
  std::vector<double> pyramid_lowpass;
  Kernel2D fan_level1;
  Kernel2D fan_level2;

  static NsctKernels from_tables(const FilterTables& tables);
  static const NsctKernels& standard();
  void validate() const;
};

/// Convolution with half-sample symmetric boundary extension; same-size output.
Image2D convolve_symmetric(const Image2D& image, const Kernel2D& kernel);
Image2D convolve_separable_symmetric(const Image2D& image, const std::vector<double>& taps);

struct PyramidSplit {
  Image2D lowpass;
  Image2D bandpass;
};

PyramidSplit nsp_split(const Image2D& slice, const NsctKernels& kernels = NsctKernels::standard());

std::array<Image2D, 4> nsdfb_split(const Image2D& bandpass,
                                   const NsctKernels& kernels = NsctKernels::standard());

struct NsctSet {
  Image2D lowpass;
  Image2D bandpass;
  std::array<Image2D, 4> directions;
};

NsctSet nsct_forward(const Image2D& slice, const NsctKernels& kernels = NsctKernels::standard());

/// HF1..HF4 volumes (direction indices 0..3), one slice at a time.
std::array<ScalarVolume, 4> extract_hf(const ScalarVolume& vol,
                                       const NsctKernels& kernels = NsctKernels::standard(),
                                       unsigned jobs = 1);

}  // namespace freqseg
