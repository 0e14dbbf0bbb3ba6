#include "freqseg/nifti.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace freqseg::nifti {
namespace {

constexpr std::size_t kHeaderSize = 348;
constexpr std::size_t kVoxOffset = 352;

struct GzCloser {
  void operator()(gzFile f) const noexcept {
    if (f) gzclose(f);
  }
};
using GzHandle = std::unique_ptr<std::remove_pointer_t<gzFile>, GzCloser>;

bool has_gz_suffix(const std::filesystem::path& p) {
  const std::string s = p.string();
  return s.size() >= 3 && s.compare(s.size() - 3, 3, ".gz") == 0;
}

template <typename T>
T get(const unsigned char* buf, std::size_t off) {
  T v;
  std::memcpy(&v, buf + off, sizeof(T));
  return v;
}

template <typename T>
void put(unsigned char* buf, std::size_t off, T v) {
  std::memcpy(buf + off, &v, sizeof(T));
}

int bitpix_of(DataType t) {
  switch (t) {
    case DataType::UInt8: return 8;
    case DataType::Int16: return 16;
    case DataType::Float32: return 32;
  }
  return 0;
}

void read_exact(gzFile f, void* dst, std::size_t n, const std::filesystem::path& path, const char* what) {
  auto* out = static_cast<unsigned char*>(dst);
  while (n > 0) {
    const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(n, 1u << 30));
    const int got = gzread(f, out, chunk);
    if (got < 0) {
      int err = 0;
      const char* msg = gzerror(f, &err);
      throw CorruptionError(path.string() + ": " + what + " unreadable: " + (msg ? msg : "zlib error"));
    }
    if (got == 0) throw CorruptionError(path.string() + ": truncated " + what);
    out += got;
    n -= static_cast<std::size_t>(got);
  }
}

GzHandle open_read(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError(path.string() + ": no such file");
  GzHandle f(gzopen(path.c_str(), "rb"));
  if (!f) throw IoError(path.string() + ": cannot open for reading");
  gzbuffer(f.get(), 1u << 20);
  return f;
}

Affine quaternion_affine(const unsigned char* h, const std::array<double, 4>& pixdim) {
  const double b = get<float>(h, 256);
  const double c = get<float>(h, 260);
  const double d = get<float>(h, 264);
  const double a = std::sqrt(std::max(0.0, 1.0 - (b * b + c * c + d * d)));
  const double qfac = pixdim[0] < 0.0 ? -1.0 : 1.0;
  const double R[3][3] = {{a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)},
                          {2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b)},
                          {2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - b * b - c * c}};
  const double scale[3] = {pixdim[1], pixdim[2], qfac * pixdim[3]};
  Affine A{};
  for (int r = 0; r < 3; ++r) {
    for (int col = 0; col < 3; ++col) A[r][col] = R[r][col] * scale[col];
    A[r][3] = get<float>(h, 268 + 4 * r);
  }
  A[3][3] = 1.0;
  return A;
}

HeaderView parse_header(const unsigned char* h, const std::filesystem::path& path) {
  const auto sizeof_hdr = get<std::int32_t>(h, 0);
  if (sizeof_hdr != static_cast<std::int32_t>(kHeaderSize)) {
    std::int32_t swapped = 0;
    for (int i = 0; i < 4; ++i) reinterpret_cast<unsigned char*>(&swapped)[i] = h[3 - i];
    if (swapped == static_cast<std::int32_t>(kHeaderSize)) {
      throw FormatError(path.string() + ": big-endian NIfTI is not supported");
    }
    throw FormatError(path.string() + ": sizeof_hdr is " + std::to_string(sizeof_hdr) + ", expected 348");
  }
  if (std::memcmp(h + 344, "n+1\0", 4) != 0) {
    throw FormatError(path.string() + ": magic is not \"n+1\" (only single-file NIfTI-1 is supported)");
  }

  HeaderView v;
  const auto ndim = get<std::int16_t>(h, 40);
  if (ndim != 3 && ndim != 4) {
    throw FormatError(path.string() + ": dim[0]=" + std::to_string(ndim) + ", only 3 or 4 dimensions are supported");
  }
  v.ndim = ndim;
  for (int i = 0; i < ndim; ++i) {
    const auto n = get<std::int16_t>(h, 42 + 2 * i);
    if (n < 1) throw FormatError(path.string() + ": dim[" + std::to_string(i + 1) + "]=" + std::to_string(n));
    v.dims[i] = static_cast<std::size_t>(n);
  }

  const auto dt = get<std::int16_t>(h, 70);
  const auto bitpix = get<std::int16_t>(h, 72);
  if (dt != 2 && dt != 4 && dt != 16) {
    throw FormatError(path.string() + ": datatype " + std::to_string(dt) + " (bitpix " + std::to_string(bitpix) +
                      ") is not one of uint8(2), int16(4), float32(16)");
  }
  v.datatype = static_cast<DataType>(dt);
  if (bitpix != bitpix_of(v.datatype)) {
    throw FormatError(path.string() + ": bitpix " + std::to_string(bitpix) + " does not match datatype " +
                      std::to_string(dt));
  }

  for (int i = 0; i < 4; ++i) v.pixdim[i] = get<float>(h, 76 + 4 * i);
  for (int i = 1; i <= 3; ++i) {
    if (!(v.pixdim[i] > 0.0) || !std::isfinite(v.pixdim[i])) {
      std::ostringstream msg;
      msg << path.string() << ": pixdim[" << i << "]=" << v.pixdim[i] << " must be positive";
      throw FormatError(msg.str());
    }
  }

  const double slope = get<float>(h, 112);
  const double inter = get<float>(h, 116);
  v.scl_slope = (slope == 0.0 || !std::isfinite(slope)) ? 1.0 : slope;
  v.scl_inter = std::isfinite(inter) ? inter : 0.0;

  const auto qform_code = get<std::int16_t>(h, 252);
  const auto sform_code = get<std::int16_t>(h, 254);
  if (sform_code > 0) {
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) v.affine[r][c] = get<float>(h, 280 + 16 * r + 4 * c);
    }
    v.affine[3][3] = 1.0;
  } else if (qform_code > 0) {
    v.affine = quaternion_affine(h, v.pixdim);
  } else {
    v.affine = diagonal_affine({v.pixdim[1], v.pixdim[2], v.pixdim[3]});
  }

  const double vox_offset = get<float>(h, 108);
  if (vox_offset < static_cast<double>(kHeaderSize)) {
    throw FormatError(path.string() + ": vox_offset " + std::to_string(vox_offset) + " is inside the header");
  }
  return v;
}

struct RawImage {
  HeaderView header;
  VoxelGeometry geometry;
  std::vector<double> values;  // scaled, x fastest, 4th axis slowest
};

RawImage read_raw(const std::filesystem::path& path, int want_ndim) {
  GzHandle f = open_read(path);
  unsigned char h[kHeaderSize];
  read_exact(f.get(), h, kHeaderSize, path, "header");
  HeaderView hv = parse_header(h, path);
  hv.gzip = gzdirect(f.get()) == 0;

  if (hv.ndim != want_ndim) {
    throw DimensionalityError(path.string() + ": file is " + std::to_string(hv.ndim) + "D, expected " +
                              std::to_string(want_ndim) + "D");
  }

  const auto offset = static_cast<std::size_t>(get<float>(h, 108));
  if (offset > kHeaderSize) {
    std::vector<unsigned char> skip(offset - kHeaderSize);
    read_exact(f.get(), skip.data(), skip.size(), path, "header extension");
  }

  const Spacing spacing{hv.pixdim[1], hv.pixdim[2], hv.pixdim[3]};
  const Dims dims{hv.dims[0], hv.dims[1], hv.dims[2]};
  std::optional<VoxelGeometry> geom;
  try {
    geom.emplace(dims, spacing, hv.affine);
  } catch (const ArgumentError& e) {
    throw FormatError(path.string() + ": inconsistent header geometry: " + e.what());
  }

  const std::size_t n = hv.dims[0] * hv.dims[1] * hv.dims[2] * hv.dims[3];
  const std::size_t bytes = n * static_cast<std::size_t>(bitpix_of(hv.datatype) / 8);
  std::vector<unsigned char> payload(bytes);
  read_exact(f.get(), payload.data(), bytes, path, "payload");

  std::vector<double> values(n);
  const double s = hv.scl_slope;
  const double b = hv.scl_inter;
  switch (hv.datatype) {
    case DataType::UInt8:
      for (std::size_t i = 0; i < n; ++i) values[i] = payload[i] * s + b;
      break;
    case DataType::Int16:
      for (std::size_t i = 0; i < n; ++i) values[i] = get<std::int16_t>(payload.data(), 2 * i) * s + b;
      break;
    case DataType::Float32:
      for (std::size_t i = 0; i < n; ++i) {
        const double x = get<float>(payload.data(), 4 * i);
        if (!std::isfinite(x)) {
          throw FormatError(path.string() + ": non-finite value at voxel " + std::to_string(i));
        }
        values[i] = x * s + b;
      }
      break;
  }
  return {hv, std::move(*geom), std::move(values)};
}

void init_header(unsigned char* h, const VoxelGeometry& g, std::size_t t, DataType dt) {
  std::memset(h, 0, kVoxOffset);
  put<std::int32_t>(h, 0, static_cast<std::int32_t>(kHeaderSize));
  const std::size_t dims[4] = {g.dims()[0], g.dims()[1], g.dims()[2], t};
  put<std::int16_t>(h, 40, static_cast<std::int16_t>(t > 1 || t == 0 ? 4 : 3));
  for (int i = 0; i < 4; ++i) {
    if (dims[i] > static_cast<std::size_t>(std::numeric_limits<std::int16_t>::max())) {
      throw ArgumentError("NIfTI-1 axis length " + std::to_string(dims[i]) + " exceeds 32767");
    }
    put<std::int16_t>(h, 42 + 2 * i, static_cast<std::int16_t>(dims[i]));
  }
  for (int i = 4; i < 7; ++i) put<std::int16_t>(h, 42 + 2 * i, 1);
  put<std::int16_t>(h, 70, static_cast<std::int16_t>(dt));
  put<std::int16_t>(h, 72, static_cast<std::int16_t>(bitpix_of(dt)));
  put<float>(h, 76, 1.0f);
  for (int i = 0; i < 3; ++i) put<float>(h, 80 + 4 * i, static_cast<float>(g.spacing()[i]));
  put<float>(h, 92, 1.0f);
  put<float>(h, 108, static_cast<float>(kVoxOffset));
  put<float>(h, 112, 1.0f);
  put<float>(h, 116, 0.0f);
  h[123] = 2;  // xyzt_units: mm
  put<std::int16_t>(h, 252, 0);
  put<std::int16_t>(h, 254, 1);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) put<float>(h, 280 + 16 * r + 4 * c, static_cast<float>(g.affine()[r][c]));
  }
  std::memcpy(h + 344, "n+1\0", 4);
}

void write_file(const std::filesystem::path& path, const unsigned char* header, const std::vector<unsigned char>& payload) {
  std::vector<unsigned char> blob(header, header + kVoxOffset);
  blob.insert(blob.end(), payload.begin(), payload.end());

  if (has_gz_suffix(path)) {
    GzHandle f(gzopen(path.c_str(), "wb6"));
    if (!f) throw IoError(path.string() + ": cannot open for writing");
    std::size_t done = 0;
    while (done < blob.size()) {
      const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(blob.size() - done, 1u << 30));
      if (gzwrite(f.get(), blob.data() + done, chunk) != static_cast<int>(chunk)) {
        throw IoError(path.string() + ": write failed");
      }
      done += chunk;
    }
    if (gzclose(f.release()) != Z_OK) throw IoError(path.string() + ": write failed on close");
  } else {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw IoError(path.string() + ": cannot open for writing");
    const bool ok = std::fwrite(blob.data(), 1, blob.size(), fp) == blob.size();
    if (std::fclose(fp) != 0 || !ok) throw IoError(path.string() + ": write failed");
  }
}

std::vector<unsigned char> float_payload(std::span<const double> values) {
  std::vector<unsigned char> out(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v) || std::abs(v) > std::numeric_limits<float>::max()) {
      throw ArgumentError("value at index " + std::to_string(i) + " is not representable as float32");
    }
    put<float>(out.data(), 4 * i, static_cast<float>(v));
  }
  return out;
}

}  // namespace

HeaderView read_header(const std::filesystem::path& path) {
  GzHandle f = open_read(path);
  unsigned char h[kHeaderSize];
  read_exact(f.get(), h, kHeaderSize, path, "header");
  HeaderView hv = parse_header(h, path);
  hv.gzip = gzdirect(f.get()) == 0;
  return hv;
}

ScalarVolume read_scalar(const std::filesystem::path& path) {
  RawImage raw = read_raw(path, 3);
  return ScalarVolume(std::move(raw.geometry), std::move(raw.values));
}

LabelVolume read_labels(const std::filesystem::path& path, const LabelSchema& schema) {
  RawImage raw = read_raw(path, 3);
  if (raw.header.datatype == DataType::Float32) {
    throw FormatError(path.string() + ": label files must have an integer datatype");
  }
  std::vector<Label> labels(raw.values.size());
  for (std::size_t i = 0; i < raw.values.size(); ++i) {
    const double v = raw.values[i];
    if (v != std::round(v) || v < 0.0 || v > std::numeric_limits<Label>::max()) {
      std::ostringstream msg;
      msg << path.string() << ": voxel " << i << " has non-integer or out-of-range label " << v;
      throw FormatError(msg.str());
    }
    labels[i] = static_cast<Label>(v);
  }
  LabelVolume out(std::move(raw.geometry), std::move(labels));
  validate_labels(out, schema);
  return out;
}

ProbVolume read_prob(const std::filesystem::path& path) {
  RawImage raw = read_raw(path, 4);
  const std::size_t classes = raw.header.dims[3];
  return ProbVolume::normalized(std::move(raw.geometry), classes, std::move(raw.values));
}

void write_scalar(const std::filesystem::path& path, const ScalarVolume& vol) {
  unsigned char h[kVoxOffset];
  init_header(h, vol.geometry(), 1, DataType::Float32);
  write_file(path, h, float_payload(vol.data()));
}

void write_labels(const std::filesystem::path& path, const LabelVolume& vol) {
  const auto data = vol.data();
  const Label top = data.empty() ? 0 : *std::max_element(data.begin(), data.end());
  if (top > std::numeric_limits<std::int16_t>::max()) {
    throw ArgumentError("label " + std::to_string(top) + " does not fit in int16");
  }
  const DataType dt = top <= 255 ? DataType::UInt8 : DataType::Int16;
  unsigned char h[kVoxOffset];
  init_header(h, vol.geometry(), 1, dt);
  std::vector<unsigned char> payload;
  if (dt == DataType::UInt8) {
    payload.assign(data.begin(), data.end());
  } else {
    payload.resize(data.size() * 2);
    for (std::size_t i = 0; i < data.size(); ++i) put<std::int16_t>(payload.data(), 2 * i, static_cast<std::int16_t>(data[i]));
  }
  write_file(path, h, payload);
}

void write_prob(const std::filesystem::path& path, const ProbVolume& prob) {
  unsigned char h[kVoxOffset];
  init_header(h, prob.geometry(), prob.classes(), DataType::Float32);
  put<std::int16_t>(h, 40, 4);
  write_file(path, h, float_payload(prob.data()));
}

}  // namespace freqseg::nifti
