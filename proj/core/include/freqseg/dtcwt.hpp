#pragma once

// 2D dual-tree complex wavelet transform (Kingsbury's q-shift construction).
//
// Level 1 filters every row and column with an odd-length near-symmetric
// biorthogonal pair without decimation; the 2x2 polyphase components of each
// highpass image form the four trees, combined into complex coefficients.
// Levels >= 2 use the even-length quarter-shift pair, tree a on one polyphase
// and tree b (time reverse) on the other, decimating by two.
//
// Orientation order of SubbandSet bands: +15, +45, +75, -75, -45, -15 degrees.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "freqseg/filter_tables.hpp"
#include "freqseg/image2d.hpp"
#include "freqseg/volume.hpp"

namespace freqseg {

enum class FilterRole { Level1, QshiftTreeA, QshiftTreeB };
enum class FilterDirection { Analysis, Synthesis };

struct FilterPair {
  std::vector<double> lowpass;
  std::vector<double> highpass;
  FilterRole role = FilterRole::Level1;
  FilterDirection direction = FilterDirection::Analysis;

  /// Nominal lowpass DC gain: 1 for the undecimated level-1 stage, sqrt(2)
  /// for the q-shift stages.
  double expected_lowpass_sum() const noexcept;
  /// Throws FormatError if sums or lengths break the filter-bank invariants.
  void validate() const;
};

struct DtcwtFilters {
  FilterPair level1_analysis;
  FilterPair level1_synthesis;
  FilterPair qshift_a_analysis;
  FilterPair qshift_b_analysis;
  FilterPair qshift_a_synthesis;
  FilterPair qshift_b_synthesis;

  static DtcwtFilters from_tables(const FilterTables& tables);
  static const DtcwtFilters& standard();
};

class ComplexImage {
 public:
  ComplexImage() = default;
  ComplexImage(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::complex<double>& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  const std::complex<double>& operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }
  std::span<std::complex<double>> data() noexcept { return data_; }
  std::span<const std::complex<double>> data() const noexcept { return data_; }

  void fill_zero() noexcept;
  double energy() const noexcept;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::complex<double>> data_;
};

/// Symmetric padding applied before the forward transform.
struct PadRecord {
  std::size_t top = 0;
  std::size_t bottom = 0;
  std::size_t left = 0;
  std::size_t right = 0;
};

using OrientedBands = std::array<ComplexImage, 6>;

struct SubbandSet {
  int levels = 0;
  /// oriented[j] holds the six bands of level j+1; each band is
  /// (padded dims) / 2^(j+1).
  std::vector<OrientedBands> oriented;
  /// Coarsest-scale lowpass split into its four tree combinations
  /// (row parity, column parity): [0]=(even,even), [1]=(even,odd),
  /// [2]=(odd,even), [3]=(odd,odd). Each is (padded dims) / 2^levels.
  std::array<Image2D, 4> lowpass;
  std::size_t original_rows = 0;
  std::size_t original_cols = 0;
  PadRecord pad;

  std::size_t padded_rows() const noexcept { return original_rows + pad.top + pad.bottom; }
  std::size_t padded_cols() const noexcept { return original_cols + pad.left + pad.right; }

  /// Throws StructureError when band shapes disagree with the pad record.
  void validate() const;
  void zero_oriented() noexcept;
};

SubbandSet dtcwt_forward(const Image2D& slice, int levels,
                         const DtcwtFilters& filters = DtcwtFilters::standard());

Image2D dtcwt_inverse(const SubbandSet& subbands,
                      const DtcwtFilters& filters = DtcwtFilters::standard());

/// Forward, zero every oriented band, inverse: the same-size smoothed image.
Image2D lowpass_image(const Image2D& slice, int levels,
                      const DtcwtFilters& filters = DtcwtFilters::standard());

inline constexpr int kDefaultDtcwtLevels = 3;

/// lowpass_image applied to every axial slice; output geometry equals input.
ScalarVolume extract_lf(const ScalarVolume& vol, int levels = kDefaultDtcwtLevels,
                        const DtcwtFilters& filters = DtcwtFilters::standard(), unsigned jobs = 1);

}  // namespace freqseg
