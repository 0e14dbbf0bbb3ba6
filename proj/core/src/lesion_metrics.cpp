#include "freqseg/lesion_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace freqseg {
namespace {

struct Box {
  std::array<std::size_t, 3> lo;
  std::array<std::size_t, 3> hi;  // exclusive
};

bool in_bounds(std::ptrdiff_t x, std::ptrdiff_t y, std::ptrdiff_t z, const Dims& d) {
  return x >= 0 && y >= 0 && z >= 0 && x < static_cast<std::ptrdiff_t>(d[0]) &&
         y < static_cast<std::ptrdiff_t>(d[1]) && z < static_cast<std::ptrdiff_t>(d[2]);
}

std::array<std::size_t, 3> coords(std::size_t v, const Dims& d) {
  return {v % d[0], (v / d[0]) % d[1], v / (d[0] * d[1])};
}

// Count of surface voxels in `from` lying within tau of a surface voxel in `to`.
std::size_t surface_hits(const BinaryMask& from, const BinaryMask& to,
                         const std::vector<std::array<std::ptrdiff_t, 3>>& offsets) {
  const auto& d = from.dims();
  std::size_t hits = 0;
  for (std::size_t v = 0; v < from.size(); ++v) {
    if (!from[v]) continue;
    const auto c = coords(v, d);
    for (const auto& o : offsets) {
      const auto x = static_cast<std::ptrdiff_t>(c[0]) + o[0];
      const auto y = static_cast<std::ptrdiff_t>(c[1]) + o[1];
      const auto z = static_cast<std::ptrdiff_t>(c[2]) + o[2];
      if (in_bounds(x, y, z, d) && to.at(x, y, z)) {
        ++hits;
        break;
      }
    }
  }
  return hits;
}

// Sub-volume holding every voxel of `box` grown by one voxel, so a cropped
// mask has the same surface as the full one.
Box grow(Box b, const Dims& d) {
  for (int a = 0; a < 3; ++a) {
    b.lo[a] = b.lo[a] > 0 ? b.lo[a] - 1 : 0;
    b.hi[a] = std::min(d[a], b.hi[a] + 1);
  }
  return b;
}

template <typename Pred>
BinaryMask crop_mask(const Volume<std::int32_t>& labels, const Box& box, Pred keep) {
  const Dims dims{box.hi[0] - box.lo[0], box.hi[1] - box.lo[1], box.hi[2] - box.lo[2]};
  BinaryMask out(VoxelGeometry(dims, labels.geometry().spacing()));
  for (std::size_t z = 0; z < dims[2]; ++z) {
    for (std::size_t y = 0; y < dims[1]; ++y) {
      for (std::size_t x = 0; x < dims[0]; ++x) {
        out.at(x, y, z) = keep(labels.at(x + box.lo[0], y + box.lo[1], z + box.lo[2])) ? 1 : 0;
      }
    }
  }
  return out;
}

}  // namespace

void MetricConfig::validate() const {
  if (connectivity != 6 && connectivity != 18 && connectivity != 26) {
    throw ArgumentError("connectivity must be 6, 18 or 26");
  }
  if (match_dilation_voxels < 0) throw ArgumentError("match dilation must be >= 0");
  if (!(tau_mm > 0.0) || !std::isfinite(tau_mm)) throw ArgumentError("tau_mm must be positive");
}

double dice(const BinaryMask& a, const BinaryMask& b) {
  require_compatible(a.geometry(), b.geometry(), "dice");
  std::size_t na = 0, nb = 0, both = 0;
  for (std::size_t v = 0; v < a.size(); ++v) {
    na += a[v] != 0;
    nb += b[v] != 0;
    both += (a[v] != 0) && (b[v] != 0);
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

BinaryMask surface_voxels(const BinaryMask& mask) {
  static constexpr std::array<std::array<int, 3>, 6> kFaces{
      {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
  const auto& d = mask.dims();
  BinaryMask out(mask.geometry());
  for (std::size_t v = 0; v < mask.size(); ++v) {
    if (!mask[v]) continue;
    const auto c = coords(v, d);
    for (const auto& f : kFaces) {
      const auto x = static_cast<std::ptrdiff_t>(c[0]) + f[0];
      const auto y = static_cast<std::ptrdiff_t>(c[1]) + f[1];
      const auto z = static_cast<std::ptrdiff_t>(c[2]) + f[2];
      if (!in_bounds(x, y, z, d) || !mask.at(x, y, z)) {
        out[v] = 1;
        break;
      }
    }
  }
  return out;
}

double nsd(const BinaryMask& a, const BinaryMask& b, double tau_mm) {
  require_compatible(a.geometry(), b.geometry(), "nsd");
  if (!(tau_mm > 0.0)) throw ArgumentError("tau_mm must be positive");
  const std::size_t na = count(a);
  const std::size_t nb = count(b);
  if (na == 0 && nb == 0) return 1.0;
  if (na == 0 || nb == 0) return 0.0;

  const auto& s = a.geometry().spacing();
  std::array<std::ptrdiff_t, 3> reach{};
  for (int i = 0; i < 3; ++i) reach[i] = static_cast<std::ptrdiff_t>(std::floor(tau_mm / s[i]));
  std::vector<std::array<std::ptrdiff_t, 3>> offsets;
  for (std::ptrdiff_t dz = -reach[2]; dz <= reach[2]; ++dz) {
    for (std::ptrdiff_t dy = -reach[1]; dy <= reach[1]; ++dy) {
      for (std::ptrdiff_t dx = -reach[0]; dx <= reach[0]; ++dx) {
        const double ex = static_cast<double>(dx) * s[0];
        const double ey = static_cast<double>(dy) * s[1];
        const double ez = static_cast<double>(dz) * s[2];
        if (std::sqrt(ex * ex + ey * ey + ez * ez) <= tau_mm) offsets.push_back({dx, dy, dz});
      }
    }
  }
  std::sort(offsets.begin(), offsets.end(), [](const auto& p, const auto& q) {
    return std::abs(p[0]) + std::abs(p[1]) + std::abs(p[2]) < std::abs(q[0]) + std::abs(q[1]) + std::abs(q[2]);
  });

  const BinaryMask sa = surface_voxels(a);
  const BinaryMask sb = surface_voxels(b);
  const std::size_t hits = surface_hits(sa, sb, offsets) + surface_hits(sb, sa, offsets);
  return static_cast<double>(hits) / static_cast<double>(count(sa) + count(sb));
}

LesionMatching lesion_match(const BinaryMask& ref, const BinaryMask& pred, const MetricConfig& cfg) {
  cfg.validate();
  require_compatible(ref.geometry(), pred.geometry(), "lesion matching");
  LesionMatching m{connected_components(ref, cfg.connectivity), connected_components(pred, cfg.connectivity), {}, {}, {}};

  std::vector<std::vector<std::size_t>> voxels(m.ref.count + 1);
  const auto ref_labels = m.ref.labels.data();
  for (std::size_t v = 0; v < ref_labels.size(); ++v) {
    if (ref_labels[v] > 0) voxels[ref_labels[v]].push_back(v);
  }

  const auto& d = ref.dims();
  const int k = cfg.match_dilation_voxels;
  std::vector<std::size_t> seen_by(m.pred.count + 1, 0);
  std::vector<bool> assigned_any(m.pred.count + 1, false);
  for (std::int32_t id = 1; id <= static_cast<std::int32_t>(m.ref.count); ++id) {
    if (m.ref.sizes[id - 1] < cfg.min_lesion_voxels) continue;
    m.ref_lesions.push_back(id);
    std::vector<std::int32_t> hits;
    // Chebyshev ball of radius k == k rounds of 26-neighbour dilation.
    for (const std::size_t v : voxels[id]) {
      const auto c = coords(v, d);
      for (int dz = -k; dz <= k; ++dz) {
        for (int dy = -k; dy <= k; ++dy) {
          for (int dx = -k; dx <= k; ++dx) {
            const auto x = static_cast<std::ptrdiff_t>(c[0]) + dx;
            const auto y = static_cast<std::ptrdiff_t>(c[1]) + dy;
            const auto z = static_cast<std::ptrdiff_t>(c[2]) + dz;
            if (!in_bounds(x, y, z, d)) continue;
            const std::int32_t p = m.pred.labels.at(x, y, z);
            if (p > 0 && seen_by[p] != static_cast<std::size_t>(id)) {
              seen_by[p] = static_cast<std::size_t>(id);
              hits.push_back(p);
            }
          }
        }
      }
    }
    std::sort(hits.begin(), hits.end());
    for (const auto p : hits) assigned_any[p] = true;
    m.assigned.push_back(std::move(hits));
  }
  for (std::int32_t p = 1; p <= static_cast<std::int32_t>(m.pred.count); ++p) {
    if (!assigned_any[p]) m.false_positives.push_back(p);
  }
  return m;
}

RegionScore lesion_wise_region(const BinaryMask& ref, const BinaryMask& pred, const MetricConfig& cfg) {
  const LesionMatching m = lesion_match(ref, pred, cfg);
  RegionScore score;
  score.n_ref_lesions = m.ref_lesions.size();
  score.n_pred_lesions = m.pred.count;
  score.n_false_positive_lesions = m.false_positives.size();
  if (cfg.whole_region) {
    score.region_dice = dice(ref, pred);
    score.region_nsd = nsd(ref, pred, cfg.tau_mm);
  }

  if (m.ref_lesions.empty()) {
    const double s = m.pred.count == 0 ? 1.0 : 0.0;
    score.lesion_dice = s;
    score.lesion_nsd = s;
    return score;
  }

  const auto& d = ref.dims();
  std::vector<Box> ref_box(m.ref.count + 1, Box{{d[0], d[1], d[2]}, {0, 0, 0}});
  std::vector<Box> pred_box(m.pred.count + 1, Box{{d[0], d[1], d[2]}, {0, 0, 0}});
  auto extend = [](Box& b, const std::array<std::size_t, 3>& c) {
    for (int a = 0; a < 3; ++a) {
      b.lo[a] = std::min(b.lo[a], c[a]);
      b.hi[a] = std::max(b.hi[a], c[a] + 1);
    }
  };
  for (std::size_t v = 0; v < ref.size(); ++v) {
    if (const auto id = m.ref.labels[v]; id > 0) extend(ref_box[id], coords(v, d));
    if (const auto id = m.pred.labels[v]; id > 0) extend(pred_box[id], coords(v, d));
  }

  double dice_sum = 0.0;
  double nsd_sum = 0.0;
  for (std::size_t i = 0; i < m.ref_lesions.size(); ++i) {
    const std::int32_t id = m.ref_lesions[i];
    const auto& preds = m.assigned[i];
    Box box = ref_box[id];
    for (const auto p : preds) {
      extend(box, pred_box[p].lo);
      extend(box, {pred_box[p].hi[0] - 1, pred_box[p].hi[1] - 1, pred_box[p].hi[2] - 1});
    }
    box = grow(box, d);
    const BinaryMask lesion = crop_mask(m.ref.labels, box, [id](std::int32_t v) { return v == id; });
    const BinaryMask matched = crop_mask(m.pred.labels, box, [&preds](std::int32_t v) {
      return v > 0 && std::binary_search(preds.begin(), preds.end(), v);
    });
    dice_sum += dice(lesion, matched);
    nsd_sum += nsd(lesion, matched, cfg.tau_mm);
  }
  const double terms = static_cast<double>(m.ref_lesions.size() + m.false_positives.size());
  score.lesion_dice = dice_sum / terms;
  score.lesion_nsd = nsd_sum / terms;
  return score;
}

LesionReport lesion_wise_scores(const LabelVolume& ref, const LabelVolume& pred, const LabelSchema& schema,
                                const MetricConfig& cfg) {
  cfg.validate();
  require_compatible(ref.geometry(), pred.geometry(), "reference vs prediction");
  const RegionMasks ref_masks = compose_regions(ref, schema);
  const RegionMasks pred_masks = compose_regions(pred, schema);

  LesionReport report{cfg, schema.evaluation_regions(), {}};
  for (const auto& region : report.region_order) {
    report.regions.emplace(region, lesion_wise_region(ref_masks.at(region), pred_masks.at(region), cfg));
  }
  return report;
}

nlohmann::ordered_json to_json(const MetricConfig& cfg) {
  return {{"connectivity", cfg.connectivity},
          {"match_dilation_voxels", cfg.match_dilation_voxels},
          {"tau_mm", cfg.tau_mm},
          {"min_lesion_voxels", cfg.min_lesion_voxels},
          {"whole_region", cfg.whole_region}};
}

nlohmann::ordered_json to_json(const LesionReport& report) {
  nlohmann::ordered_json regions = nlohmann::ordered_json::object();
  for (const auto& name : report.region_order) {
    const RegionScore& s = report.regions.at(name);
    nlohmann::ordered_json r{{"lesion_dice", s.lesion_dice},
                             {"lesion_nsd", s.lesion_nsd},
                             {"n_ref_lesions", s.n_ref_lesions},
                             {"n_pred_lesions", s.n_pred_lesions},
                             {"n_false_positive_lesions", s.n_false_positive_lesions}};
    if (s.region_dice) r["region_dice"] = *s.region_dice;
    if (s.region_nsd) r["region_nsd"] = *s.region_nsd;
    regions[name] = std::move(r);
  }
  return {{"config", to_json(report.config)}, {"regions", std::move(regions)}};
}

}  // namespace freqseg
