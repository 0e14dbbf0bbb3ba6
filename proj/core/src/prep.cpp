#include "freqseg/prep.hpp"

#include <cmath>
#include <random>
#include <string>

#include "freqseg/errors.hpp"

namespace freqseg {

ScalarVolume zscore(const ScalarVolume& vol, ZscoreMode mode) {
  const auto in = vol.data();
  auto selected = [&](std::size_t i) { return mode == ZscoreMode::AllVoxels || in[i] != 0.0; };

  std::size_t n = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (!std::isfinite(in[i])) throw ArgumentError("zscore input contains non-finite values");
    if (selected(i)) {
      sum += in[i];
      ++n;
    }
  }
  if (n == 0) throw DegenerateInputError("zscore: nonzero mask is empty");
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (selected(i)) ss += (in[i] - mean) * (in[i] - mean);
  }
  const double sd = std::sqrt(ss / static_cast<double>(n));

  ScalarVolume out(vol.geometry());
  if (sd < 1e-12) return out;
  auto dst = out.data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (selected(i)) dst[i] = (in[i] - mean) / sd;
  }
  return out;
}

void PatchSpec::validate() const {
  for (const auto s : size) {
    if (s < 1) throw ArgumentError("patch size components must be >= 1");
  }
  if (mode == PatchMode::SeededRandom && !seed) throw ArgumentError("seeded-random patch mode requires a seed");
  if (!std::isfinite(pad_value)) throw ArgumentError("patch pad value must be finite");
}

std::array<std::ptrdiff_t, 3> patch_origin(const Dims& input, const PatchSpec& spec) {
  spec.validate();
  std::array<std::ptrdiff_t, 3> origin{};
  std::mt19937_64 rng(spec.seed.value_or(0));
  for (int a = 0; a < 3; ++a) {
    const auto in = static_cast<std::ptrdiff_t>(input[a]);
    const auto out = static_cast<std::ptrdiff_t>(spec.size[a]);
    if (in < out) {
      origin[a] = -((out - in) / 2);
    } else if (spec.mode == PatchMode::Centered) {
      origin[a] = (in - out) / 2;
    } else {
      origin[a] = std::uniform_int_distribution<std::ptrdiff_t>(0, in - out)(rng);
    }
  }
  return origin;
}

ScalarVolume extract_patch(const ScalarVolume& vol, const PatchSpec& spec) {
  const auto origin = patch_origin(vol.dims(), spec);

  // Shift the affine so patch voxel (0,0,0) maps to input voxel `origin`.
  Affine affine = vol.geometry().affine();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) affine[r][3] += vol.geometry().affine()[r][c] * static_cast<double>(origin[c]);
  }
  ScalarVolume out(VoxelGeometry(spec.size, vol.geometry().spacing(), affine), spec.pad_value);

  const auto& in = vol.dims();
  for (std::size_t z = 0; z < spec.size[2]; ++z) {
    const std::ptrdiff_t sz = origin[2] + static_cast<std::ptrdiff_t>(z);
    if (sz < 0 || sz >= static_cast<std::ptrdiff_t>(in[2])) continue;
    for (std::size_t y = 0; y < spec.size[1]; ++y) {
      const std::ptrdiff_t sy = origin[1] + static_cast<std::ptrdiff_t>(y);
      if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(in[1])) continue;
      for (std::size_t x = 0; x < spec.size[0]; ++x) {
        const std::ptrdiff_t sx = origin[0] + static_cast<std::ptrdiff_t>(x);
        if (sx < 0 || sx >= static_cast<std::ptrdiff_t>(in[0])) continue;
        out.at(x, y, z) = vol.at(sx, sy, sz);
      }
    }
  }
  return out;
}

std::string_view modality_name(Modality m) noexcept {
  switch (m) {
    case Modality::T1N: return "t1n";
    case Modality::T1C: return "t1c";
    case Modality::T2W: return "t2w";
    case Modality::T2F: return "t2f";
  }
  return "?";
}

void CaseBundle::validate() const {
  for (const Modality m : kModalities) {
    if (!modalities.count(m)) {
      throw ArgumentError("case " + case_id + " is missing modality " + std::string(modality_name(m)));
    }
  }
  if (modalities.size() != kModalities.size()) throw ArgumentError("case " + case_id + " has extra modalities");
  const auto& ref = modalities.at(Modality::T1N).geometry();
  for (const auto& [m, vol] : modalities) {
    require_compatible(ref, vol.geometry(), "case " + case_id + " modality " + std::string(modality_name(m)));
  }
}

std::vector<std::string> channel_names() {
  std::vector<std::string> names;
  for (const Modality m : kModalities) {
    const std::string base(modality_name(m));
    names.push_back(base + "_lf");
    for (int i = 1; i <= 4; ++i) names.push_back(base + "_hf" + std::to_string(i));
  }
  return names;
}

void decompose_case(const CaseBundle& bundle, const DecomposeOptions& options, const ChannelSink& sink) {
  bundle.validate();
  const DtcwtFilters& dtcwt = options.dtcwt ? *options.dtcwt : DtcwtFilters::standard();
  const NsctKernels& nsct = options.nsct ? *options.nsct : NsctKernels::standard();

  for (const Modality m : kModalities) {
    const std::string base(modality_name(m));
    const ScalarVolume& vol = bundle.modalities.at(m);
    try {
      sink(base + "_lf", extract_lf(vol, options.levels, dtcwt, options.jobs));
      auto hf = extract_hf(vol, nsct, options.jobs);
      for (int i = 0; i < 4; ++i) sink(base + "_hf" + std::to_string(i + 1), std::move(hf[i]));
    } catch (const ArgumentError& e) {
      throw ArgumentError(base + ": " + e.what());
    } catch (const StructureError& e) {
      throw StructureError(base + ": " + e.what());
    }
  }
}

std::map<std::string, ScalarVolume> decompose_case(const CaseBundle& bundle, const DecomposeOptions& options) {
  std::map<std::string, ScalarVolume> out;
  decompose_case(bundle, options, [&](const std::string& name, ScalarVolume&& v) { out.emplace(name, std::move(v)); });
  return out;
}

}  // namespace freqseg
