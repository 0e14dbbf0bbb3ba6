#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "freqseg/volume.hpp"

namespace freqseg {

struct MetricConfig {
  int connectivity = 26;
  int match_dilation_voxels = 1;
  double tau_mm = 0.5;
  std::size_t min_lesion_voxels = 0;
  /// Also report whole-region Dice/NSD next to the lesion-wise scores.
  bool whole_region = false;

  void validate() const;
};

struct ComponentLabeling {
  /// 0 = background, 1..count = component id in first-voxel scan order.
  Volume<std::int32_t> labels;
  std::size_t count = 0;
  /// sizes[k - 1] = voxel count of component k.
  std::vector<std::size_t> sizes;
};

ComponentLabeling connected_components(const BinaryMask& mask, int connectivity);

/// 2|a & b| / (|a| + |b|); 1.0 when both are empty.
double dice(const BinaryMask& a, const BinaryMask& b);

/// Mask voxels with a 6-neighbour outside the mask or outside the volume.
BinaryMask surface_voxels(const BinaryMask& mask);

/// Fraction of both surfaces lying within tau_mm (Euclidean, voxel centres,
/// per-axis spacing) of the other surface. 1.0 if both empty, 0.0 if one is.
double nsd(const BinaryMask& a, const BinaryMask& b, double tau_mm);

struct LesionMatching {
  ComponentLabeling ref;
  ComponentLabeling pred;
  /// Reference component ids kept after the minimum-size filter.
  std::vector<std::int32_t> ref_lesions;
  /// assigned[i] = predicted component ids touching dilated ref_lesions[i].
  std::vector<std::vector<std::int32_t>> assigned;
  std::vector<std::int32_t> false_positives;
};

LesionMatching lesion_match(const BinaryMask& ref, const BinaryMask& pred, const MetricConfig& cfg);

struct RegionScore {
  double lesion_dice = 0.0;
  double lesion_nsd = 0.0;
  std::size_t n_ref_lesions = 0;
  std::size_t n_pred_lesions = 0;
  std::size_t n_false_positive_lesions = 0;
  std::optional<double> region_dice;
  std::optional<double> region_nsd;

  bool operator==(const RegionScore&) const = default;
};

/// Lesion-wise scores for one region's masks.
RegionScore lesion_wise_region(const BinaryMask& ref, const BinaryMask& pred, const MetricConfig& cfg);

struct LesionReport {
  MetricConfig config;
  std::vector<std::string> region_order;
  std::map<std::string, RegionScore> regions;
};

LesionReport lesion_wise_scores(const LabelVolume& ref, const LabelVolume& pred, const LabelSchema& schema,
                                const MetricConfig& cfg = {});

nlohmann::ordered_json to_json(const MetricConfig& cfg);
nlohmann::ordered_json to_json(const LesionReport& report);

}  // namespace freqseg
