#include <array>
#include <string>
#include <vector>

#include "freqseg/lesion_metrics.hpp"

namespace freqseg {
namespace {

std::vector<std::array<int, 3>> neighbour_offsets(int connectivity) {
  std::vector<std::array<int, 3>> out;
  for (int dz = -1; dz <= 1; ++dz) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nonzero = (dx != 0) + (dy != 0) + (dz != 0);
        if (nonzero == 0) continue;
        if (connectivity == 6 && nonzero > 1) continue;
        if (connectivity == 18 && nonzero > 2) continue;
        out.push_back({dx, dy, dz});
      }
    }
  }
  return out;
}

}  // namespace

ComponentLabeling connected_components(const BinaryMask& mask, int connectivity) {
  if (connectivity != 6 && connectivity != 18 && connectivity != 26) {
    throw ArgumentError("connectivity must be 6, 18 or 26, got " + std::to_string(connectivity));
  }
  const auto offsets = neighbour_offsets(connectivity);
  const auto& d = mask.dims();
  const auto nx = static_cast<std::ptrdiff_t>(d[0]);
  const auto ny = static_cast<std::ptrdiff_t>(d[1]);
  const auto nz = static_cast<std::ptrdiff_t>(d[2]);

  ComponentLabeling out{Volume<std::int32_t>(mask.geometry()), 0, {}};
  auto labels = out.labels.data();
  const auto bits = mask.data();
  std::vector<std::size_t> queue;

  for (std::size_t seed = 0; seed < bits.size(); ++seed) {
    if (!bits[seed] || labels[seed] != 0) continue;
    const auto id = static_cast<std::int32_t>(++out.count);
    labels[seed] = id;
    queue.assign(1, seed);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t v = queue[head];
      const auto x = static_cast<std::ptrdiff_t>(v % d[0]);
      const auto y = static_cast<std::ptrdiff_t>((v / d[0]) % d[1]);
      const auto z = static_cast<std::ptrdiff_t>(v / (d[0] * d[1]));
      for (const auto& o : offsets) {
        const auto xx = x + o[0];
        const auto yy = y + o[1];
        const auto zz = z + o[2];
        if (xx < 0 || yy < 0 || zz < 0 || xx >= nx || yy >= ny || zz >= nz) continue;
        const auto n = static_cast<std::size_t>(xx + nx * (yy + ny * zz));
        if (bits[n] && labels[n] == 0) {
          labels[n] = id;
          queue.push_back(n);
        }
      }
    }
    out.sizes.push_back(queue.size());
  }
  return out;
}

}  // namespace freqseg
