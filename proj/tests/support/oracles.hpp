#pragma once

// Brute-force reference implementations used to check the library. They
// share no code with core/ beyond the data types.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "freqseg/fuse.hpp"
#include "freqseg/image2d.hpp"
#include "freqseg/lesion_metrics.hpp"
#include "freqseg/nsct.hpp"
#include "freqseg/volume.hpp"

namespace oracle {

using freqseg::BinaryMask;
using freqseg::Image2D;

/// Mirror index computed by repeated reflection.
long mirror(long i, long n);

/// out(r,c) = sum_{a,b} K(a,b) x(r + kr - a, c + kc - b), mirrored borders.
Image2D convolve(const Image2D& x, const freqseg::Kernel2D& k);
/// Separable taps expanded to their 2D outer product, then convolve().
Image2D convolve_outer(const Image2D& x, const std::vector<double>& taps);

double energy(const Image2D& x);
double inner(const Image2D& a, const Image2D& b);

/// Per-voxel weighted sum and first-maximum argmax.
std::vector<double> fuse(const std::vector<freqseg::ProbVolume>& models, const std::vector<double>& weights);
std::vector<int> argmax_classes(const std::vector<double>& probs, std::size_t voxels, std::size_t classes);

/// Union-find labeling, ids renumbered by first voxel in scan order.
std::vector<int> components(const BinaryMask& mask, int connectivity, int* count);

/// k rounds of 26-neighbour binary dilation.
BinaryMask dilate(const BinaryMask& mask, int k);

std::vector<std::size_t> surface(const BinaryMask& mask);

/// All-pairs surface-distance NSD.
double nsd(const BinaryMask& a, const BinaryMask& b, double tau_mm);

double dice(const BinaryMask& a, const BinaryMask& b);

struct RegionResult {
  double lesion_dice = 0.0;
  double lesion_nsd = 0.0;
  std::size_t n_ref = 0;
  std::size_t n_pred = 0;
  std::size_t n_fp = 0;
};

/// Lesion-wise scores for ET, NET, CC, ED, TC, WT with codes 1..4.
std::map<std::string, RegionResult> lesion_wise(const freqseg::LabelVolume& ref, const freqseg::LabelVolume& pred,
                                                const freqseg::MetricConfig& cfg);

}  // namespace oracle
