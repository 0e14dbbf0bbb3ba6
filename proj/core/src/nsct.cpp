#include "freqseg/nsct.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "freqseg/errors.hpp"

namespace freqseg {
namespace {

void require_finite(const Image2D& img, const char* what) {
  for (const double v : img.data()) {
    if (!std::isfinite(v)) throw ArgumentError(std::string(what) + " contains non-finite values");
  }
}

Kernel2D kernel_from_table(const CoefficientTable& t) { return Kernel2D{t.rows, t.cols, t.values}; }

}  // namespace

double Kernel2D::sum() const noexcept { return std::accumulate(taps.begin(), taps.end(), 0.0); }

NsctKernels NsctKernels::from_tables(const FilterTables& tables) {
  NsctKernels k{tables.at("nsct.pyramid_lowpass").values, kernel_from_table(tables.at("nsct.fan1")),
                kernel_from_table(tables.at("nsct.fan2"))};
  k.validate();
  return k;
}

const NsctKernels& NsctKernels::standard() {
  static const NsctKernels kernels = from_tables(FilterTables::embedded());
  return kernels;
}

void NsctKernels::validate() const {
  if (pyramid_lowpass.empty() || pyramid_lowpass.size() % 2 == 0) {
    throw FormatError("pyramid lowpass needs an odd, non-zero tap count");
  }
  const double dc = std::accumulate(pyramid_lowpass.begin(), pyramid_lowpass.end(), 0.0);
  if (std::abs(dc - 1.0) > 1e-12) throw FormatError("pyramid lowpass must have unit DC gain, sums to " + std::to_string(dc));
  for (const Kernel2D* k : {&fan_level1, &fan_level2}) {
    if (k->rows % 2 == 0 || k->cols % 2 == 0 || k->taps.size() != k->rows * k->cols) {
      throw FormatError("fan kernels need odd extents");
    }
  }
}

Image2D convolve_symmetric(const Image2D& image, const Kernel2D& kernel) {
  const std::size_t kr = kernel.rows / 2;
  const std::size_t kc = kernel.cols / 2;
  const std::size_t rows = image.rows();
  const std::size_t cols = image.cols();

  Image2D padded(rows + 2 * kr, cols + 2 * kc);
  for (std::size_t i = 0; i < padded.rows(); ++i) {
    const auto si = symmetric_index(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(kr),
                                    static_cast<std::ptrdiff_t>(rows));
    for (std::size_t j = 0; j < padded.cols(); ++j) {
      const auto sj = symmetric_index(static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(kc),
                                      static_cast<std::ptrdiff_t>(cols));
      padded(i, j) = image(si, sj);
    }
  }

  // out(r, c) = sum_{a,b} K(a, b) * padded(r + 2kr - a, c + 2kc - b)
  Image2D out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double* dst = &out(r, 0);
    for (std::size_t a = 0; a < kernel.rows; ++a) {
      const double* src_row = &padded(r + 2 * kr - a, 0);
      for (std::size_t b = 0; b < kernel.cols; ++b) {
        const double w = kernel(a, b);
        if (w == 0.0) continue;
        const double* src = src_row + (2 * kc - b);
        for (std::size_t c = 0; c < cols; ++c) dst[c] += w * src[c];
      }
    }
  }
  return out;
}

Image2D convolve_separable_symmetric(const Image2D& image, const std::vector<double>& taps) {
  const auto half = static_cast<std::ptrdiff_t>(taps.size() / 2);
  const auto rows = static_cast<std::ptrdiff_t>(image.rows());
  const auto cols = static_cast<std::ptrdiff_t>(image.cols());

  Image2D tmp(image.rows(), image.cols());
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    for (std::ptrdiff_t c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(taps.size()); ++k) {
        acc += taps[k] * image(r, symmetric_index(c + half - k, cols));
      }
      tmp(r, c) = acc;
    }
  }
  Image2D out(image.rows(), image.cols());
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(taps.size()); ++k) {
      const double w = taps[k];
      const double* src = &tmp(symmetric_index(r + half - k, rows), 0);
      double* dst = &out(r, 0);
      for (std::ptrdiff_t c = 0; c < cols; ++c) dst[c] += w * src[c];
    }
  }
  return out;
}

PyramidSplit nsp_split(const Image2D& slice, const NsctKernels& kernels) {
  require_finite(slice, "pyramid input");
  PyramidSplit out;
  out.lowpass = convolve_separable_symmetric(slice, kernels.pyramid_lowpass);
  out.bandpass = slice - out.lowpass;
  return out;
}

std::array<Image2D, 4> nsdfb_split(const Image2D& bandpass, const NsctKernels& kernels) {
  require_finite(bandpass, "directional filter bank input");
  const Image2D axis = convolve_symmetric(bandpass, kernels.fan_level1);
  const Image2D diagonal = bandpass - axis;
  const Image2D horizontal = convolve_symmetric(axis, kernels.fan_level2);
  const Image2D rising = convolve_symmetric(diagonal, kernels.fan_level2);
  return {horizontal, rising, axis - horizontal, diagonal - rising};
}

NsctSet nsct_forward(const Image2D& slice, const NsctKernels& kernels) {
  auto [lowpass, bandpass] = nsp_split(slice, kernels);
  auto directions = nsdfb_split(bandpass, kernels);
  return NsctSet{std::move(lowpass), std::move(bandpass), std::move(directions)};
}

std::array<ScalarVolume, 4> extract_hf(const ScalarVolume& vol, const NsctKernels& kernels, unsigned jobs) {
  std::array<ScalarVolume, 4> out{ScalarVolume(vol.geometry()), ScalarVolume(vol.geometry()),
                                  ScalarVolume(vol.geometry()), ScalarVolume(vol.geometry())};
  parallel_for(vol.dims()[2], jobs, [&](std::size_t z) {
    const NsctSet set = nsct_forward(axial_slice(vol, z), kernels);
    for (int d = 0; d < 4; ++d) set_axial_slice(out[d], z, set.directions[d]);
  });
  return out;
}

}  // namespace freqseg
