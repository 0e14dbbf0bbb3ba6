#include "freqseg/fuse.hpp"

#include <cmath>
#include <string>

#include "freqseg/errors.hpp"

namespace freqseg {
namespace {

void check_shape(const VoxelGeometry& g, std::size_t classes, const std::vector<double>& probs) {
  if (classes < 2) throw SpecError("probability volume needs at least 2 classes");
  if (probs.size() != g.voxel_count() * classes) {
    throw ArgumentError("probability payload has " + std::to_string(probs.size()) + " values, expected " +
                        std::to_string(g.voxel_count() * classes));
  }
}

double voxel_sum(const std::vector<double>& probs, std::size_t nvox, std::size_t classes, std::size_t v) {
  double s = 0.0;
  for (std::size_t c = 0; c < classes; ++c) s += probs[c * nvox + v];
  return s;
}

void check_values(const std::vector<double>& probs, double hi) {
  for (const double p : probs) {
    if (!std::isfinite(p) || p < 0.0 || p > hi) {
      throw ArgumentError("probability " + std::to_string(p) + " outside [0, 1]");
    }
  }
}

}  // namespace

ProbVolume::ProbVolume(Unchecked, VoxelGeometry geometry, std::size_t classes, std::vector<double> probs)
    : geometry_(std::move(geometry)), classes_(classes), probs_(std::move(probs)) {}

ProbVolume::ProbVolume(VoxelGeometry geometry, std::size_t classes, std::vector<double> probs)
    : geometry_(std::move(geometry)), classes_(classes), probs_(std::move(probs)) {
  check_shape(geometry_, classes_, probs_);
  check_values(probs_, 1.0);
  const std::size_t nvox = voxel_count();
  for (std::size_t v = 0; v < nvox; ++v) {
    const double s = voxel_sum(probs_, nvox, classes_, v);
    if (std::abs(s - 1.0) > kProbSumTol) {
      throw ArgumentError("class probabilities at voxel " + std::to_string(v) + " sum to " + std::to_string(s));
    }
  }
}

ProbVolume ProbVolume::normalized(VoxelGeometry geometry, std::size_t classes, std::vector<double> probs) {
  check_shape(geometry, classes, probs);
  check_values(probs, 1.0 + kProbSumTol);
  const std::size_t nvox = geometry.voxel_count();
  for (std::size_t v = 0; v < nvox; ++v) {
    const double s = voxel_sum(probs, nvox, classes, v);
    if (std::abs(s - 1.0) > kProbSumTol) {
      throw ArgumentError("class probabilities at voxel " + std::to_string(v) + " sum to " + std::to_string(s));
    }
    for (std::size_t c = 0; c < classes; ++c) probs[c * nvox + v] /= s;
  }
  return ProbVolume(Unchecked{}, std::move(geometry), classes, std::move(probs));
}

EnsembleSpec EnsembleSpec::equal(std::size_t n) {
  if (n == 0) throw SpecError("ensemble needs at least one model");
  return EnsembleSpec{std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

void EnsembleSpec::validate() const {
  if (weights.empty()) throw SpecError("ensemble has no weights");
  double s = 0.0;
  for (const double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw SpecError("ensemble weights must be positive");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-9) throw SpecError("ensemble weights sum to " + std::to_string(s) + ", not 1");
}

ProbVolume fuse_probs(std::span<const ProbVolume> models, const EnsembleSpec& spec) {
  spec.validate();
  if (models.size() < 2) throw SpecError("fusion needs at least 2 models");
  if (spec.weights.size() != models.size()) {
    throw SpecError(std::to_string(spec.weights.size()) + " weights for " + std::to_string(models.size()) + " models");
  }
  const ProbVolume& first = models.front();
  for (std::size_t i = 1; i < models.size(); ++i) {
    require_compatible(first.geometry(), models[i].geometry(), "model " + std::to_string(i));
    if (models[i].classes() != first.classes()) {
      throw CompatibilityError("model " + std::to_string(i) + " has " + std::to_string(models[i].classes()) +
                               " classes, model 0 has " + std::to_string(first.classes()));
    }
  }

  std::vector<double> out(first.data().size(), 0.0);
  for (std::size_t i = 0; i < models.size(); ++i) {
    const double w = spec.weights[i];
    const auto src = models[i].data();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += w * src[k];
  }
  // Convex combination of valid maps: values stay in [0, 1] up to roundoff.
  for (double& v : out) v = std::min(1.0, std::max(0.0, v));
  return ProbVolume(first.geometry(), first.classes(), std::move(out));
}

LabelVolume argmax_labels(const ProbVolume& prob, const LabelSchema& schema) {
  const std::size_t expected = schema.raw_regions().size() + 1;
  if (prob.classes() != expected) {
    throw SpecError("probability map has " + std::to_string(prob.classes()) + " classes, schema needs " +
                    std::to_string(expected));
  }
  LabelVolume out(prob.geometry());
  const std::size_t nvox = prob.voxel_count();
  for (std::size_t v = 0; v < nvox; ++v) {
    std::size_t best = 0;
    double best_p = prob.at(v, 0);
    for (std::size_t c = 1; c < prob.classes(); ++c) {
      const double p = prob.at(v, c);
      if (p > best_p) {
        best_p = p;
        best = c;
      }
    }
    out[v] = best == 0 ? Label{0} : static_cast<Label>(schema.raw_regions()[best - 1].code);
  }
  return out;
}

}  // namespace freqseg
