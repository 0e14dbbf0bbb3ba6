#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "freqseg/dtcwt.hpp"
#include "freqseg/nsct.hpp"
#include "freqseg/volume.hpp"

namespace freqseg {

enum class ZscoreMode { AllVoxels, NonzeroMask };

/// Zero mean, unit population std over the selected voxels. Voxels outside a
/// nonzero mask become 0; a std below 1e-12 zeroes the whole selection.
ScalarVolume zscore(const ScalarVolume& vol, ZscoreMode mode = ZscoreMode::NonzeroMask);

enum class PatchMode { Centered, SeededRandom };

struct PatchSpec {
  Dims size{1, 1, 1};
  PatchMode mode = PatchMode::Centered;
  std::optional<std::uint64_t> seed;
  double pad_value = 0.0;

  void validate() const;
};

/// Per-axis index of the patch origin in input coordinates. Negative where
/// the input is smaller than the patch (symmetric padding).
std::array<std::ptrdiff_t, 3> patch_origin(const Dims& input, const PatchSpec& spec);

/// Crop or pad to exactly spec.size. Seeded-random mode draws the origin with
/// std::mt19937_64 seeded by spec.seed.
ScalarVolume extract_patch(const ScalarVolume& vol, const PatchSpec& spec);

enum class Modality { T1N, T1C, T2W, T2F };

inline constexpr std::array<Modality, 4> kModalities{Modality::T1N, Modality::T1C, Modality::T2W,
                                                     Modality::T2F};

std::string_view modality_name(Modality m) noexcept;

struct CaseBundle {
  std::string case_id;
  std::map<Modality, ScalarVolume> modalities;

  /// Exactly four modalities, pairwise geometry-compatible.
  void validate() const;
};

struct DecomposeOptions {
  int levels = kDefaultDtcwtLevels;
  const DtcwtFilters* dtcwt = nullptr;  // null: DtcwtFilters::standard()
  const NsctKernels* nsct = nullptr;    // null: NsctKernels::standard()
  unsigned jobs = 1;
};

/// "t1n_lf", "t1n_hf1" .. "t2f_hf4" in emission order.
std::vector<std::string> channel_names();

using ChannelSink = std::function<void(const std::string& channel, ScalarVolume&& volume)>;

/// Streams the 20 channels (4 LF + 16 HF) to `sink` in channel_names() order.
void decompose_case(const CaseBundle& bundle, const DecomposeOptions& options, const ChannelSink& sink);

std::map<std::string, ScalarVolume> decompose_case(const CaseBundle& bundle,
                                                   const DecomposeOptions& options = {});

}  // namespace freqseg
