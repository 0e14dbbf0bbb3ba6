#include "freqseg/volume.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <thread>

#include "freqseg/image2d.hpp"

namespace freqseg {
namespace {

bool close_rel(double a, double b, double floor_scale = 0.0) {
  const double scale = std::max({std::abs(a), std::abs(b), floor_scale});
  return std::abs(a - b) <= kGeometryRelTol * scale;
}

void check_dims_spacing(const Dims& dims, const Spacing& spacing) {
  for (int i = 0; i < 3; ++i) {
    if (dims[i] < 1) throw ArgumentError("geometry dims must be >= 1, got " + to_string(dims));
    if (!(spacing[i] > 0.0) || !std::isfinite(spacing[i])) {
      throw ArgumentError("geometry spacing must be positive and finite");
    }
  }
}

}  // namespace

Affine diagonal_affine(const Spacing& spacing) {
  Affine a{};
  for (int i = 0; i < 3; ++i) a[i][i] = spacing[i];
  a[3][3] = 1.0;
  return a;
}

VoxelGeometry::VoxelGeometry(Dims dims, Spacing spacing)
    : VoxelGeometry(dims, spacing, diagonal_affine(spacing)) {}

VoxelGeometry::VoxelGeometry(Dims dims, Spacing spacing, const Affine& affine)
    : dims_(dims), spacing_(spacing), affine_(affine) {
  check_dims_spacing(dims_, spacing_);
  for (int c = 0; c < 3; ++c) {
    const double norm = std::sqrt(affine_[0][c] * affine_[0][c] + affine_[1][c] * affine_[1][c] +
                                  affine_[2][c] * affine_[2][c]);
    if (!close_rel(norm, spacing_[c])) {
      std::ostringstream msg;
      msg << "affine column " << c << " has norm " << norm << " but spacing is " << spacing_[c];
      throw ArgumentError(msg.str());
    }
  }
}

bool geometry_compatible(const VoxelGeometry& a, const VoxelGeometry& b) {
  if (a.dims() != b.dims()) return false;
  for (int i = 0; i < 3; ++i) {
    if (!close_rel(a.spacing()[i], b.spacing()[i])) return false;
  }
  // Affine entries may be zero, so compare on a scale of at least 1 mm.
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (!close_rel(a.affine()[r][c], b.affine()[r][c], 1.0)) return false;
    }
  }
  return true;
}

void require_compatible(const VoxelGeometry& a, const VoxelGeometry& b, const std::string& what) {
  if (!geometry_compatible(a, b)) {
    throw CompatibilityError(what + ": geometries differ (" + to_string(a.dims()) + " vs " +
                             to_string(b.dims()) + ")");
  }
}

std::string to_string(const Dims& dims) {
  return std::to_string(dims[0]) + "x" + std::to_string(dims[1]) + "x" + std::to_string(dims[2]);
}

std::size_t count(const BinaryMask& mask) {
  return static_cast<std::size_t>(std::count_if(mask.data().begin(), mask.data().end(),
                                                [](std::uint8_t v) { return v != 0; }));
}

LabelSchema::LabelSchema(std::vector<RegionCode> raw, std::vector<CompositeRegion> composites)
    : raw_(std::move(raw)), composites_(std::move(composites)) {
  std::set<int> codes;
  std::set<std::string> names;
  for (const auto& r : raw_) {
    if (r.code <= 0) throw SpecError("raw region " + r.name + " needs a positive code");
    if (r.code > 0xFFFF) throw SpecError("raw region " + r.name + " code exceeds label range");
    if (!codes.insert(r.code).second) throw SpecError("duplicate raw code " + std::to_string(r.code));
    if (!names.insert(r.name).second) throw SpecError("duplicate region name " + r.name);
  }
  for (const auto& c : composites_) {
    if (c.members.empty()) throw SpecError("composite " + c.name + " has no members");
    for (const auto& m : c.members) {
      if (std::none_of(raw_.begin(), raw_.end(), [&](const RegionCode& r) { return r.name == m; })) {
        throw SpecError("composite " + c.name + " references unknown region " + m);
      }
    }
    if (!names.insert(c.name).second) throw SpecError("duplicate region name " + c.name);
  }
  const std::set<std::string> expected{"ET", "NET", "CC", "ED", "TC", "WT"};
  if (names != expected) throw SpecError("evaluation regions must be exactly ET, NET, CC, ED, TC, WT");
}

LabelSchema LabelSchema::ped2025() {
  return LabelSchema({{"ET", 1}, {"NET", 2}, {"CC", 3}, {"ED", 4}},
                     {{"TC", {"ET", "NET", "CC"}}, {"WT", {"ET", "NET", "CC", "ED"}}});
}

std::vector<std::string> LabelSchema::evaluation_regions() const {
  std::vector<std::string> out;
  for (const auto& r : raw_) out.push_back(r.name);
  for (const auto& c : composites_) out.push_back(c.name);
  return out;
}

int LabelSchema::raw_index(long code) const noexcept {
  for (std::size_t i = 0; i < raw_.size(); ++i) {
    if (raw_[i].code == code) return static_cast<int>(i);
  }
  return -1;
}

bool LabelSchema::is_known_code(long code) const noexcept { return code == 0 || raw_index(code) >= 0; }

void validate_labels(const LabelVolume& labels, const LabelSchema& schema) {
  for (const Label v : labels.data()) {
    if (!schema.is_known_code(v)) {
      throw SchemaViolation("label code " + std::to_string(v) + " is not in the label schema", v);
    }
  }
}

RegionMasks compose_regions(const LabelVolume& labels, const LabelSchema& schema) {
  // Lookup from code to raw index; codes fit in 16 bits.
  std::vector<int> lut(0x10000, -1);
  for (std::size_t i = 0; i < schema.raw_regions().size(); ++i) lut[schema.raw_regions()[i].code] = int(i);

  std::vector<BinaryMask> raw(schema.raw_regions().size(), BinaryMask(labels.geometry()));
  const auto src = labels.data();
  for (std::size_t v = 0; v < src.size(); ++v) {
    const Label code = src[v];
    if (code == 0) continue;
    const int idx = lut[code];
    if (idx < 0) throw SchemaViolation("label code " + std::to_string(code) + " is not in the label schema", code);
    raw[idx][v] = 1;
  }

  RegionMasks out;
  for (const auto& comp : schema.composites()) {
    BinaryMask m(labels.geometry());
    for (const auto& member : comp.members) {
      const auto it = std::find_if(schema.raw_regions().begin(), schema.raw_regions().end(),
                                   [&](const RegionCode& r) { return r.name == member; });
      const auto& part = raw[it - schema.raw_regions().begin()];
      for (std::size_t v = 0; v < m.size(); ++v) m[v] |= part[v];
    }
    out.emplace(comp.name, std::move(m));
  }
  for (std::size_t i = 0; i < raw.size(); ++i) out.emplace(schema.raw_regions()[i].name, std::move(raw[i]));
  return out;
}

// Image2D ------------------------------------------------------------------

Image2D::Image2D(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) throw ArgumentError("image payload does not match its shape");
}

double Image2D::max_abs() const noexcept {
  double m = 0.0;
  for (const double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Image2D Image2D::transposed() const {
  Image2D t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

Image2D& Image2D::operator+=(const Image2D& other) {
  if (other.rows_ != rows_ || other.cols_ != cols_) throw ArgumentError("image shape mismatch in +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Image2D& Image2D::operator-=(const Image2D& other) {
  if (other.rows_ != rows_ || other.cols_ != cols_) throw ArgumentError("image shape mismatch in -=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Image2D operator+(Image2D a, const Image2D& b) { return a += b; }
Image2D operator-(Image2D a, const Image2D& b) { return a -= b; }

Image2D axial_slice(const ScalarVolume& vol, std::size_t z) {
  const auto& d = vol.dims();
  const std::size_t n = d[0] * d[1];
  const auto src = vol.data().subspan(z * n, n);
  return Image2D(d[1], d[0], std::vector<double>(src.begin(), src.end()));
}

void set_axial_slice(ScalarVolume& vol, std::size_t z, const Image2D& slice) {
  const auto& d = vol.dims();
  if (slice.rows() != d[1] || slice.cols() != d[0]) throw ArgumentError("slice shape does not match volume");
  std::copy(slice.data().begin(), slice.data().end(), vol.data().begin() + z * d[0] * d[1]);
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(jobs);
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < count; i += jobs) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace freqseg
