#include "fixtures.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>

#include <unistd.h>

#include "freqseg/nifti.hpp"
#include "freqseg/prep.hpp"

namespace fixtures {

namespace fs = std::filesystem;
using namespace freqseg;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("freqseg-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Image2D random_image(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  Image2D out(rows, cols);
  for (auto& v : out.data()) v = n(rng);
  return out;
}

ScalarVolume random_volume(const Dims& dims, std::mt19937_64& rng, const Spacing& spacing) {
  std::normal_distribution<double> n(0.0, 1.0);
  ScalarVolume v(VoxelGeometry(dims, spacing));
  for (auto& x : v.data()) x = n(rng);
  return v;
}

Image2D grating(std::size_t rows, std::size_t cols, double theta_deg, double period) {
  const double th = theta_deg * std::numbers::pi / 180.0;
  Image2D g(rows, cols);
  for (std::size_t y = 0; y < rows; ++y) {
    for (std::size_t x = 0; x < cols; ++x) {
      g(y, x) = std::cos(2.0 * std::numbers::pi / period * (-double(x) * std::sin(th) + double(y) * std::cos(th)));
    }
  }
  return g;
}

VoxelGeometry oblique_geometry(const Dims& dims, const Spacing& spacing) {
  const double a = 0.3;
  const double R[3][3] = {{std::cos(a), -std::sin(a), 0.0}, {std::sin(a), std::cos(a), 0.0}, {0.0, 0.0, 1.0}};
  Affine A{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) A[r][c] = R[r][c] * spacing[c];
  }
  A[0][3] = -90.5;
  A[1][3] = 126.25;
  A[2][3] = -72.0;
  A[3][3] = 1.0;
  return VoxelGeometry(dims, spacing, A);
}

ProbVolume random_probs(const VoxelGeometry& g, std::size_t classes, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  const std::size_t V = g.voxel_count();
  std::vector<double> p(V * classes);
  for (std::size_t v = 0; v < V; ++v) {
    double s = 0.0;
    for (std::size_t c = 0; c < classes; ++c) s += p[c * V + v] = e(rng);
    for (std::size_t c = 0; c < classes; ++c) p[c * V + v] /= s;
  }
  return ProbVolume(g, classes, std::move(p));
}

void set_box(BinaryMask& m, std::size_t x0, std::size_t y0, std::size_t z0, std::size_t n) {
  const auto& d = m.dims();
  for (std::size_t z = z0; z < std::min(d[2], z0 + n); ++z) {
    for (std::size_t y = y0; y < std::min(d[1], y0 + n); ++y) {
      for (std::size_t x = x0; x < std::min(d[0], x0 + n); ++x) m.at(x, y, z) = 1;
    }
  }
}

void set_box(LabelVolume& m, std::size_t x0, std::size_t y0, std::size_t z0, std::size_t n, Label code) {
  const auto& d = m.dims();
  for (std::size_t z = z0; z < std::min(d[2], z0 + n); ++z) {
    for (std::size_t y = y0; y < std::min(d[1], y0 + n); ++y) {
      for (std::size_t x = x0; x < std::min(d[0], x0 + n); ++x) m.at(x, y, z) = code;
    }
  }
}

namespace {

void random_box(LabelVolume& m, std::mt19937_64& rng) {
  const auto& d = m.dims();
  std::uniform_int_distribution<std::size_t> size(1, 4);
  std::uniform_int_distribution<int> code(1, 4);
  const std::size_t n = size(rng);
  const std::size_t x0 = std::uniform_int_distribution<std::size_t>(0, d[0] - 1)(rng);
  const std::size_t y0 = std::uniform_int_distribution<std::size_t>(0, d[1] - 1)(rng);
  const std::size_t z0 = std::uniform_int_distribution<std::size_t>(0, d[2] - 1)(rng);
  set_box(m, x0, y0, z0, n, static_cast<Label>(code(rng)));
}

}  // namespace

LabelVolume random_labels(const VoxelGeometry& g, std::mt19937_64& rng) {
  LabelVolume m(g);
  const std::size_t boxes = std::uniform_int_distribution<std::size_t>(0, 6)(rng);
  for (std::size_t i = 0; i < boxes; ++i) random_box(m, rng);
  std::bernoulli_distribution speck(0.01);
  std::uniform_int_distribution<int> code(1, 4);
  for (auto& v : m.data()) {
    if (speck(rng)) v = static_cast<Label>(code(rng));
  }
  return m;
}

LabelVolume perturb_labels(const LabelVolume& ref, std::mt19937_64& rng) {
  LabelVolume m = ref;
  const auto& d = ref.dims();
  std::uniform_int_distribution<int> mode(0, 3);
  switch (mode(rng)) {
    case 0: {  // shift by one voxel along a random axis
      const int axis = std::uniform_int_distribution<int>(0, 2)(rng);
      LabelVolume s(ref.geometry());
      for (std::size_t z = 0; z < d[2]; ++z) {
        for (std::size_t y = 0; y < d[1]; ++y) {
          for (std::size_t x = 0; x < d[0]; ++x) {
            std::size_t p[3] = {x, y, z};
            if (p[axis] + 1 < d[axis]) {
              ++p[axis];
              s.at(p[0], p[1], p[2]) = ref.at(x, y, z);
            }
          }
        }
      }
      m = std::move(s);
      break;
    }
    case 1:  // erase a random slab
      for (std::size_t z = 0; z < d[2]; ++z) {
        if (z % 3 == 1) {
          for (std::size_t y = 0; y < d[1]; ++y) {
            for (std::size_t x = 0; x < d[0]; ++x) m.at(x, y, z) = 0;
          }
        }
      }
      break;
    case 2:
      break;
    default:
      m = random_labels(ref.geometry(), rng);
      break;
  }
  const std::size_t extra = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
  for (std::size_t i = 0; i < extra; ++i) random_box(m, rng);
  std::bernoulli_distribution flip(0.02);
  std::uniform_int_distribution<int> code(0, 4);
  for (auto& v : m.data()) {
    if (flip(rng)) v = static_cast<Label>(code(rng));
  }
  return m;
}

void write_synthetic_case(const fs::path& dir, const std::string& id, const Dims& dims, std::uint64_t seed,
                          bool skip_t1c) {
  fs::create_directories(dir);
  std::mt19937_64 rng(seed);
  const VoxelGeometry g = oblique_geometry(dims, {1.0, 1.0, 1.2});
  for (const Modality m : kModalities) {
    ScalarVolume v(g);
    std::normal_distribution<double> noise(0.0, 5.0);
    const double base = 100.0 + 20.0 * static_cast<double>(static_cast<int>(m));
    for (std::size_t z = 0; z < dims[2]; ++z) {
      for (std::size_t y = 0; y < dims[1]; ++y) {
        for (std::size_t x = 0; x < dims[0]; ++x) {
          const double blob = std::exp(-(std::pow(double(x) - dims[0] / 2.0, 2) + std::pow(double(y) - dims[1] / 2.0, 2)) /
                                       (2.0 * 64.0));
          v.at(x, y, z) = base * (0.5 + blob) + noise(rng);
        }
      }
    }
    if (skip_t1c && m == Modality::T1C) continue;
    nifti::write_scalar(dir / (id + "-" + std::string(modality_name(m)) + ".nii.gz"), v);
  }
}

std::vector<char> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace fixtures
