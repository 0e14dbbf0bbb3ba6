#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace oracle {

using freqseg::Dims;

long mirror(long i, long n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

Image2D convolve(const Image2D& x, const freqseg::Kernel2D& k) {
  const long R = static_cast<long>(x.rows());
  const long C = static_cast<long>(x.cols());
  const long kr = static_cast<long>(k.rows / 2);
  const long kc = static_cast<long>(k.cols / 2);
  Image2D out(x.rows(), x.cols());
  for (long r = 0; r < R; ++r) {
    for (long c = 0; c < C; ++c) {
      double acc = 0.0;
      for (long a = 0; a < static_cast<long>(k.rows); ++a) {
        for (long b = 0; b < static_cast<long>(k.cols); ++b) {
          acc += k(a, b) * x(mirror(r + kr - a, R), mirror(c + kc - b, C));
        }
      }
      out(r, c) = acc;
    }
  }
  return out;
}

Image2D convolve_outer(const Image2D& x, const std::vector<double>& taps) {
  freqseg::Kernel2D k{taps.size(), taps.size(), std::vector<double>(taps.size() * taps.size())};
  for (std::size_t a = 0; a < taps.size(); ++a) {
    for (std::size_t b = 0; b < taps.size(); ++b) k.taps[a * taps.size() + b] = taps[a] * taps[b];
  }
  return convolve(x, k);
}

double energy(const Image2D& x) { return inner(x, x); }

double inner(const Image2D& a, const Image2D& b) {
  double s = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) s += a(r, c) * b(r, c);
  }
  return s;
}

std::vector<double> fuse(const std::vector<freqseg::ProbVolume>& models, const std::vector<double>& weights) {
  const std::size_t V = models.front().voxel_count();
  const std::size_t C = models.front().classes();
  std::vector<double> out(V * C);
  for (std::size_t v = 0; v < V; ++v) {
    for (std::size_t c = 0; c < C; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i < models.size(); ++i) s += weights[i] * models[i].at(v, c);
      out[c * V + v] = s;
    }
  }
  return out;
}

std::vector<int> argmax_classes(const std::vector<double>& probs, std::size_t voxels, std::size_t classes) {
  std::vector<int> out(voxels);
  for (std::size_t v = 0; v < voxels; ++v) {
    int best = 0;
    for (std::size_t c = 1; c < classes; ++c) {
      if (probs[c * voxels + v] > probs[static_cast<std::size_t>(best) * voxels + v]) best = static_cast<int>(c);
    }
    out[v] = best;
  }
  return out;
}

namespace {

struct Dsu {
  std::vector<std::size_t> parent;
  explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

bool neighbours(long dx, long dy, long dz, int connectivity) {
  const long m = std::abs(dx) + std::abs(dy) + std::abs(dz);
  if (m == 0 || std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) > 1) return false;
  if (connectivity == 6) return m == 1;
  if (connectivity == 18) return m <= 2;
  return true;
}

}  // namespace

std::vector<int> components(const BinaryMask& mask, int connectivity, int* count) {
  const Dims d = mask.dims();
  const std::size_t n = mask.size();
  Dsu dsu(n);
  for (std::size_t z = 0; z < d[2]; ++z) {
    for (std::size_t y = 0; y < d[1]; ++y) {
      for (std::size_t x = 0; x < d[0]; ++x) {
        if (!mask.at(x, y, z)) continue;
        for (long dz = -1; dz <= 1; ++dz) {
          for (long dy = -1; dy <= 1; ++dy) {
            for (long dx = -1; dx <= 1; ++dx) {
              if (!neighbours(dx, dy, dz, connectivity)) continue;
              const long xx = long(x) + dx, yy = long(y) + dy, zz = long(z) + dz;
              if (xx < 0 || yy < 0 || zz < 0 || xx >= long(d[0]) || yy >= long(d[1]) || zz >= long(d[2])) continue;
              if (mask.at(xx, yy, zz)) dsu.unite(mask.geometry().index(x, y, z), mask.geometry().index(xx, yy, zz));
            }
          }
        }
      }
    }
  }
  std::vector<int> labels(n, 0);
  std::map<std::size_t, int> root_id;
  for (std::size_t v = 0; v < n; ++v) {
    if (!mask[v]) continue;
    const std::size_t r = dsu.find(v);
    auto it = root_id.find(r);
    if (it == root_id.end()) it = root_id.emplace(r, static_cast<int>(root_id.size()) + 1).first;
    labels[v] = it->second;
  }
  if (count) *count = static_cast<int>(root_id.size());
  return labels;
}

BinaryMask dilate(const BinaryMask& mask, int k) {
  BinaryMask cur = mask;
  const Dims d = mask.dims();
  for (int round = 0; round < k; ++round) {
    BinaryMask next = cur;
    for (std::size_t z = 0; z < d[2]; ++z) {
      for (std::size_t y = 0; y < d[1]; ++y) {
        for (std::size_t x = 0; x < d[0]; ++x) {
          if (!cur.at(x, y, z)) continue;
          for (long dz = -1; dz <= 1; ++dz) {
            for (long dy = -1; dy <= 1; ++dy) {
              for (long dx = -1; dx <= 1; ++dx) {
                const long xx = long(x) + dx, yy = long(y) + dy, zz = long(z) + dz;
                if (xx < 0 || yy < 0 || zz < 0 || xx >= long(d[0]) || yy >= long(d[1]) || zz >= long(d[2])) continue;
                next.at(xx, yy, zz) = 1;
              }
            }
          }
        }
      }
    }
    cur = std::move(next);
  }
  return cur;
}

std::vector<std::size_t> surface(const BinaryMask& mask) {
  const Dims d = mask.dims();
  std::vector<std::size_t> out;
  for (std::size_t z = 0; z < d[2]; ++z) {
    for (std::size_t y = 0; y < d[1]; ++y) {
      for (std::size_t x = 0; x < d[0]; ++x) {
        if (!mask.at(x, y, z)) continue;
        const bool border = x == 0 || y == 0 || z == 0 || x + 1 == d[0] || y + 1 == d[1] || z + 1 == d[2];
        if (border || !mask.at(x - 1, y, z) || !mask.at(x + 1, y, z) || !mask.at(x, y - 1, z) ||
            !mask.at(x, y + 1, z) || !mask.at(x, y, z - 1) || !mask.at(x, y, z + 1)) {
          out.push_back(mask.geometry().index(x, y, z));
        }
      }
    }
  }
  return out;
}

namespace {

double distance(std::size_t u, std::size_t v, const Dims& d, const freqseg::Spacing& s) {
  const long ux = long(u % d[0]), uy = long((u / d[0]) % d[1]), uz = long(u / (d[0] * d[1]));
  const long vx = long(v % d[0]), vy = long((v / d[0]) % d[1]), vz = long(v / (d[0] * d[1]));
  const double ex = double(ux - vx) * s[0];
  const double ey = double(uy - vy) * s[1];
  const double ez = double(uz - vz) * s[2];
  return std::sqrt(ex * ex + ey * ey + ez * ez);
}

}  // namespace

double nsd(const BinaryMask& a, const BinaryMask& b, double tau_mm) {
  const auto sa = surface(a);
  const auto sb = surface(b);
  if (sa.empty() && sb.empty()) return 1.0;
  if (sa.empty() || sb.empty()) return 0.0;
  const Dims d = a.dims();
  const auto& s = a.geometry().spacing();
  auto within = [&](std::size_t p, const std::vector<std::size_t>& other) {
    double best = INFINITY;
    for (const auto q : other) best = std::min(best, distance(p, q, d, s));
    return best <= tau_mm;
  };
  std::size_t hits = 0;
  for (const auto p : sa) hits += within(p, sb);
  for (const auto p : sb) hits += within(p, sa);
  return double(hits) / double(sa.size() + sb.size());
}

double dice(const BinaryMask& a, const BinaryMask& b) {
  std::size_t na = 0, nb = 0, both = 0;
  for (std::size_t v = 0; v < a.size(); ++v) {
    na += a[v] ? 1 : 0;
    nb += b[v] ? 1 : 0;
    both += (a[v] && b[v]) ? 1 : 0;
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * double(both) / double(na + nb);
}

namespace {

RegionResult region(const BinaryMask& ref, const BinaryMask& pred, const freqseg::MetricConfig& cfg) {
  int nr = 0, np = 0;
  const auto rl = components(ref, cfg.connectivity, &nr);
  const auto pl = components(pred, cfg.connectivity, &np);
  RegionResult out;
  out.n_pred = static_cast<std::size_t>(np);

  std::set<int> matched_pred;
  std::vector<double> dices, nsds;
  for (int id = 1; id <= nr; ++id) {
    BinaryMask lesion(ref.geometry());
    std::size_t size = 0;
    for (std::size_t v = 0; v < ref.size(); ++v) {
      if (rl[v] == id) {
        lesion[v] = 1;
        ++size;
      }
    }
    if (size < cfg.min_lesion_voxels) continue;
    ++out.n_ref;
    const BinaryMask grown = dilate(lesion, cfg.match_dilation_voxels);
    std::set<int> hit;
    for (std::size_t v = 0; v < pred.size(); ++v) {
      if (grown[v] && pl[v] > 0) hit.insert(pl[v]);
    }
    BinaryMask matched(pred.geometry());
    for (std::size_t v = 0; v < pred.size(); ++v) matched[v] = hit.count(pl[v]) ? 1 : 0;
    matched_pred.insert(hit.begin(), hit.end());
    dices.push_back(oracle::dice(lesion, matched));
    nsds.push_back(oracle::nsd(lesion, matched, cfg.tau_mm));
  }
  out.n_fp = static_cast<std::size_t>(np) - matched_pred.size();
  if (out.n_ref == 0) {
    out.lesion_dice = out.lesion_nsd = (np == 0) ? 1.0 : 0.0;
    return out;
  }
  double sd = 0.0, sn = 0.0;
  for (std::size_t i = 0; i < dices.size(); ++i) {
    sd += dices[i];
    sn += nsds[i];
  }
  const double terms = double(out.n_ref + out.n_fp);
  out.lesion_dice = sd / terms;
  out.lesion_nsd = sn / terms;
  return out;
}

BinaryMask codes_mask(const freqseg::LabelVolume& labels, const std::vector<int>& codes) {
  BinaryMask m(labels.geometry());
  for (std::size_t v = 0; v < labels.size(); ++v) {
    for (int c : codes) {
      if (labels[v] == c) m[v] = 1;
    }
  }
  return m;
}

}  // namespace

std::map<std::string, RegionResult> lesion_wise(const freqseg::LabelVolume& ref, const freqseg::LabelVolume& pred,
                                                const freqseg::MetricConfig& cfg) {
  const std::vector<std::pair<std::string, std::vector<int>>> regions = {
      {"ET", {1}}, {"NET", {2}}, {"CC", {3}}, {"ED", {4}}, {"TC", {1, 2, 3}}, {"WT", {1, 2, 3, 4}}};
  std::map<std::string, RegionResult> out;
  for (const auto& [name, codes] : regions) {
    out[name] = region(codes_mask(ref, codes), codes_mask(pred, codes), cfg);
  }
  return out;
}

}  // namespace oracle
