#include "freqseg/dtcwt.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "freqseg/errors.hpp"

namespace freqseg {
namespace {

using Taps = std::vector<double>;

constexpr double kSumTol = 1e-8;

std::ptrdiff_t sym(std::ptrdiff_t i, std::size_t n) { return symmetric_index(i, static_cast<std::ptrdiff_t>(n)); }

// Adds w * row `src` of X into row `dst` of Y.
inline void axpy_row(Image2D& y, std::size_t dst, const Image2D& x, std::ptrdiff_t src, double w) {
  double* out = &y(dst, 0);
  const double* in = &x(static_cast<std::size_t>(src), 0);
  for (std::size_t c = 0; c < x.cols(); ++c) out[c] += w * in[c];
}

// Odd-length filter down the columns, no decimation, same-size output.
Image2D colfilter(const Image2D& x, const Taps& h) {
  const auto m2 = static_cast<std::ptrdiff_t>(h.size() / 2);
  Image2D y(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t k = 0; k < h.size(); ++k) {
      axpy_row(y, i, x, sym(static_cast<std::ptrdiff_t>(i) + m2 - static_cast<std::ptrdiff_t>(k), x.rows()), h[k]);
    }
  }
  return y;
}

Image2D rowfilter(const Image2D& x, const Taps& h) {
  const auto m2 = static_cast<std::ptrdiff_t>(h.size() / 2);
  const std::size_t n = x.cols();
  Image2D y(x.rows(), n);
  std::vector<std::ptrdiff_t> idx(n * h.size());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < h.size(); ++k) {
      idx[j * h.size() + k] = sym(static_cast<std::ptrdiff_t>(j) + m2 - static_cast<std::ptrdiff_t>(k), n);
    }
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double* in = &x(r, 0);
    double* out = &y(r, 0);
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      const std::ptrdiff_t* ix = &idx[j * h.size()];
      for (std::size_t k = 0; k < h.size(); ++k) acc += h[k] * in[ix[k]];
      out[j] = acc;
    }
  }
  return y;
}

struct Polyphase {
  Taps even;  // taps 0, 2, 4, ...
  Taps odd;   // taps 1, 3, 5, ...
};

Polyphase polyphase(const Taps& h) {
  Polyphase p;
  for (std::size_t k = 0; k < h.size(); ++k) (k % 2 == 0 ? p.even : p.odd).push_back(h[k]);
  return p;
}

double dot(const Taps& a, const Taps& b) { return std::inner_product(a.begin(), a.end(), b.begin(), 0.0); }

// Decimating q-shift filter down the columns: `ha` and `hb` run on
// alternate input phases and their outputs are interleaved.
Image2D coldfilt(const Image2D& x, const Taps& ha, const Taps& hb) {
  const std::size_t r = x.rows();
  if (r % 4 != 0) throw StructureError("q-shift analysis needs a multiple of 4 rows, got " + std::to_string(r));
  const auto m = static_cast<std::ptrdiff_t>(ha.size());
  const std::ptrdiff_t len = m / 2;
  const Polyphase a = polyphase(ha);
  const Polyphase b = polyphase(hb);
  const bool a_first = dot(ha, hb) > 0;

  Image2D y(r / 2, x.cols());
  for (std::size_t i = 0; i < r / 4; ++i) {
    const std::size_t row_a = 2 * i + (a_first ? 0 : 1);
    const std::size_t row_b = 2 * i + (a_first ? 1 : 0);
    for (std::ptrdiff_t k = 0; k < len; ++k) {
      const std::ptrdiff_t base = 4 * (static_cast<std::ptrdiff_t>(i) + len - 1 - k) + 5 - m;
      axpy_row(y, row_a, x, sym(base - 1, r), a.even[k]);
      axpy_row(y, row_a, x, sym(base - 3, r), a.odd[k]);
      axpy_row(y, row_b, x, sym(base, r), b.even[k]);
      axpy_row(y, row_b, x, sym(base - 2, r), b.odd[k]);
    }
  }
  return y;
}

// Interpolating q-shift filter down the columns (inverse of coldfilt's
// sampling pattern); output has twice the rows.
Image2D colifilt(const Image2D& x, const Taps& ha, const Taps& hb) {
  const std::size_t r = x.rows();
  if (r % 2 != 0) throw StructureError("q-shift synthesis needs an even row count, got " + std::to_string(r));
  const auto m = static_cast<std::ptrdiff_t>(ha.size());
  const std::ptrdiff_t m2 = m / 2;
  const std::ptrdiff_t len = m / 2;
  const Polyphase a = polyphase(ha);
  const Polyphase b = polyphase(hb);
  const bool a_lead = dot(ha, hb) > 0;

  Image2D y(2 * r, x.cols());
  for (std::size_t i = 0; i < r / 2; ++i) {
    for (std::ptrdiff_t k = 0; k < len; ++k) {
      const std::ptrdiff_t p = static_cast<std::ptrdiff_t>(i) + len - 1 - k;
      if (m2 % 2 == 1) {
        const std::ptrdiff_t t = 2 + 2 * p;
        const std::ptrdiff_t ta = a_lead ? t : t - 1;
        const std::ptrdiff_t tb = a_lead ? t - 1 : t;
        axpy_row(y, 4 * i, x, sym(tb - m2, r), a.even[k]);
        axpy_row(y, 4 * i + 1, x, sym(ta - m2, r), b.even[k]);
        axpy_row(y, 4 * i + 2, x, sym(tb - m2, r), a.odd[k]);
        axpy_row(y, 4 * i + 3, x, sym(ta - m2, r), b.odd[k]);
      } else {
        const std::ptrdiff_t t = 3 + 2 * p;
        const std::ptrdiff_t ta = a_lead ? t : t - 1;
        const std::ptrdiff_t tb = a_lead ? t - 1 : t;
        axpy_row(y, 4 * i, x, sym(tb - 2 - m2, r), a.odd[k]);
        axpy_row(y, 4 * i + 1, x, sym(ta - 2 - m2, r), b.odd[k]);
        axpy_row(y, 4 * i + 2, x, sym(tb - m2, r), a.even[k]);
        axpy_row(y, 4 * i + 3, x, sym(ta - m2, r), b.even[k]);
      }
    }
  }
  return y;
}

Image2D rowdfilt(const Image2D& x, const Taps& ha, const Taps& hb) {
  return coldfilt(x.transposed(), ha, hb).transposed();
}

Image2D rowifilt(const Image2D& x, const Taps& ha, const Taps& hb) {
  return colifilt(x.transposed(), ha, hb).transposed();
}

// 2x2 quads of a real image -> a pair of complex subbands.
std::pair<ComplexImage, ComplexImage> q2c(const Image2D& y) {
  const double s = std::sqrt(0.5);
  ComplexImage z0(y.rows() / 2, y.cols() / 2);
  ComplexImage z1(y.rows() / 2, y.cols() / 2);
  for (std::size_t i = 0; i < z0.rows(); ++i) {
    for (std::size_t j = 0; j < z0.cols(); ++j) {
      const std::complex<double> p(s * y(2 * i, 2 * j), s * y(2 * i, 2 * j + 1));
      const std::complex<double> q(s * y(2 * i + 1, 2 * j + 1), -s * y(2 * i + 1, 2 * j));
      z0(i, j) = p - q;
      z1(i, j) = p + q;
    }
  }
  return {std::move(z0), std::move(z1)};
}

Image2D c2q(const ComplexImage& w0, const ComplexImage& w1) {
  const double s = std::sqrt(0.5);
  Image2D x(2 * w0.rows(), 2 * w0.cols());
  for (std::size_t i = 0; i < w0.rows(); ++i) {
    for (std::size_t j = 0; j < w0.cols(); ++j) {
      const std::complex<double> p = s * (w0(i, j) + w1(i, j));
      const std::complex<double> q = s * (w0(i, j) - w1(i, j));
      x(2 * i, 2 * j) = p.real();
      x(2 * i, 2 * j + 1) = p.imag();
      x(2 * i + 1, 2 * j) = q.imag();
      x(2 * i + 1, 2 * j + 1) = -q.real();
    }
  }
  return x;
}

void store_bands(OrientedBands& bands, const Image2D& horizontal, const Image2D& vertical, const Image2D& diagonal) {
  auto [h0, h1] = q2c(horizontal);
  auto [v0, v1] = q2c(vertical);
  auto [d0, d1] = q2c(diagonal);
  bands[0] = std::move(h0);
  bands[5] = std::move(h1);
  bands[2] = std::move(v0);
  bands[3] = std::move(v1);
  bands[1] = std::move(d0);
  bands[4] = std::move(d1);
}

std::size_t round_up(std::size_t n, std::size_t block) { return (n + block - 1) / block * block; }

FilterPair make_pair(const FilterTables& t, const std::string& lo, const std::string& hi, FilterRole role,
                     FilterDirection dir) {
  FilterPair p{t.at(lo).values, t.at(hi).values, role, dir};
  p.validate();
  return p;
}

}  // namespace

double FilterPair::expected_lowpass_sum() const noexcept {
  return role == FilterRole::Level1 ? 1.0 : std::sqrt(2.0);
}

void FilterPair::validate() const {
  if (lowpass.empty() || highpass.empty()) throw FormatError("filter pair has an empty filter");
  if (role == FilterRole::Level1) {
    if (lowpass.size() % 2 == 0 || highpass.size() % 2 == 0) throw FormatError("level-1 filters must have odd length");
  } else if (lowpass.size() % 2 != 0 || lowpass.size() != highpass.size()) {
    throw FormatError("q-shift filters must share one even length");
  }
  const double lo = std::accumulate(lowpass.begin(), lowpass.end(), 0.0);
  const double hi = std::accumulate(highpass.begin(), highpass.end(), 0.0);
  if (std::abs(lo - expected_lowpass_sum()) > kSumTol) {
    throw FormatError("lowpass filter sums to " + std::to_string(lo));
  }
  if (std::abs(hi) > kSumTol) throw FormatError("highpass filter sums to " + std::to_string(hi));
}

DtcwtFilters DtcwtFilters::from_tables(const FilterTables& t) {
  using enum FilterRole;
  using enum FilterDirection;
  return DtcwtFilters{
      make_pair(t, "dtcwt.level1.h0o", "dtcwt.level1.h1o", Level1, Analysis),
      make_pair(t, "dtcwt.level1.g0o", "dtcwt.level1.g1o", Level1, Synthesis),
      make_pair(t, "dtcwt.qshift.h0a", "dtcwt.qshift.h1a", QshiftTreeA, Analysis),
      make_pair(t, "dtcwt.qshift.h0b", "dtcwt.qshift.h1b", QshiftTreeB, Analysis),
      make_pair(t, "dtcwt.qshift.g0a", "dtcwt.qshift.g1a", QshiftTreeA, Synthesis),
      make_pair(t, "dtcwt.qshift.g0b", "dtcwt.qshift.g1b", QshiftTreeB, Synthesis),
  };
}

const DtcwtFilters& DtcwtFilters::standard() {
  static const DtcwtFilters filters = from_tables(FilterTables::embedded());
  return filters;
}

void ComplexImage::fill_zero() noexcept {
  for (auto& v : data_) v = 0.0;
}

double ComplexImage::energy() const noexcept {
  double e = 0.0;
  for (const auto& v : data_) e += std::norm(v);
  return e;
}

void SubbandSet::validate() const {
  if (levels < 1) throw StructureError("subband set needs at least one level");
  if (oriented.size() != static_cast<std::size_t>(levels)) {
    throw StructureError("subband set has " + std::to_string(oriented.size()) + " oriented levels, expected " +
                         std::to_string(levels));
  }
  const std::size_t block = std::size_t{1} << levels;
  const std::size_t pr = padded_rows();
  const std::size_t pc = padded_cols();
  if (original_rows == 0 || original_cols == 0 || pr % block != 0 || pc % block != 0) {
    throw StructureError("pad record does not give a multiple of 2^levels");
  }
  for (int j = 0; j < levels; ++j) {
    const std::size_t rr = pr >> (j + 1);
    const std::size_t cc = pc >> (j + 1);
    for (const auto& band : oriented[j]) {
      if (band.rows() != rr || band.cols() != cc) {
        throw StructureError("level " + std::to_string(j + 1) + " band is " + std::to_string(band.rows()) + "x" +
                             std::to_string(band.cols()) + ", expected " + std::to_string(rr) + "x" +
                             std::to_string(cc));
      }
    }
  }
  for (const auto& lp : lowpass) {
    if (lp.rows() != pr / block || lp.cols() != pc / block) throw StructureError("lowpass residual has wrong shape");
  }
}

void SubbandSet::zero_oriented() noexcept {
  for (auto& level : oriented) {
    for (auto& band : level) band.fill_zero();
  }
}

SubbandSet dtcwt_forward(const Image2D& slice, int levels, const DtcwtFilters& f) {
  if (levels < 1) throw ArgumentError("DTCWT needs levels >= 1, got " + std::to_string(levels));
  if (slice.rows() == 0 || slice.cols() == 0) throw ArgumentError("DTCWT input grid is empty");
  if (levels > 30) throw ArgumentError("DTCWT level count is unreasonably large");

  SubbandSet out;
  out.levels = levels;
  out.original_rows = slice.rows();
  out.original_cols = slice.cols();
  const std::size_t block = std::size_t{1} << levels;
  const std::size_t pr = round_up(slice.rows(), block);
  const std::size_t pc = round_up(slice.cols(), block);
  out.pad.top = (pr - slice.rows()) / 2;
  out.pad.bottom = pr - slice.rows() - out.pad.top;
  out.pad.left = (pc - slice.cols()) / 2;
  out.pad.right = pc - slice.cols() - out.pad.left;

  Image2D x(pr, pc);
  for (std::size_t i = 0; i < pr; ++i) {
    const auto si = sym(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(out.pad.top), slice.rows());
    for (std::size_t j = 0; j < pc; ++j) {
      const auto sj = sym(static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(out.pad.left), slice.cols());
      x(i, j) = slice(si, sj);
    }
  }

  out.oriented.resize(levels);
  const auto& l1 = f.level1_analysis;
  Image2D lo = colfilter(x, l1.lowpass);
  Image2D hi = colfilter(x, l1.highpass);
  Image2D lolo = rowfilter(lo, l1.lowpass);
  store_bands(out.oriented[0], rowfilter(hi, l1.lowpass), rowfilter(lo, l1.highpass), rowfilter(hi, l1.highpass));

  const auto& ta = f.qshift_a_analysis;
  const auto& tb = f.qshift_b_analysis;
  for (int level = 1; level < levels; ++level) {
    lo = coldfilt(lolo, tb.lowpass, ta.lowpass);
    hi = coldfilt(lolo, tb.highpass, ta.highpass);
    lolo = rowdfilt(lo, tb.lowpass, ta.lowpass);
    store_bands(out.oriented[level], rowdfilt(hi, tb.lowpass, ta.lowpass), rowdfilt(lo, tb.highpass, ta.highpass),
                rowdfilt(hi, tb.highpass, ta.highpass));
  }

  for (int q = 0; q < 4; ++q) {
    const std::size_t r0 = q / 2;
    const std::size_t c0 = q % 2;
    Image2D part(lolo.rows() / 2, lolo.cols() / 2);
    for (std::size_t i = 0; i < part.rows(); ++i) {
      for (std::size_t j = 0; j < part.cols(); ++j) part(i, j) = lolo(2 * i + r0, 2 * j + c0);
    }
    out.lowpass[q] = std::move(part);
  }
  return out;
}

Image2D dtcwt_inverse(const SubbandSet& s, const DtcwtFilters& f) {
  s.validate();

  Image2D z(2 * s.lowpass[0].rows(), 2 * s.lowpass[0].cols());
  for (int q = 0; q < 4; ++q) {
    const std::size_t r0 = q / 2;
    const std::size_t c0 = q % 2;
    for (std::size_t i = 0; i < s.lowpass[q].rows(); ++i) {
      for (std::size_t j = 0; j < s.lowpass[q].cols(); ++j) z(2 * i + r0, 2 * j + c0) = s.lowpass[q](i, j);
    }
  }

  const auto& ta = f.qshift_a_synthesis;
  const auto& tb = f.qshift_b_synthesis;
  for (int level = s.levels; level >= 2; --level) {
    const auto& b = s.oriented[level - 1];
    const Image2D lh = c2q(b[0], b[5]);
    const Image2D hl = c2q(b[2], b[3]);
    const Image2D hh = c2q(b[1], b[4]);
    const Image2D y1 = colifilt(z, tb.lowpass, ta.lowpass) + colifilt(lh, tb.highpass, ta.highpass);
    const Image2D y2 = colifilt(hl, tb.lowpass, ta.lowpass) + colifilt(hh, tb.highpass, ta.highpass);
    z = rowifilt(y1, tb.lowpass, ta.lowpass) + rowifilt(y2, tb.highpass, ta.highpass);
  }

  const auto& g = f.level1_synthesis;
  const auto& b = s.oriented[0];
  const Image2D y1 = colfilter(z, g.lowpass) + colfilter(c2q(b[0], b[5]), g.highpass);
  const Image2D y2 = colfilter(c2q(b[2], b[3]), g.lowpass) + colfilter(c2q(b[1], b[4]), g.highpass);
  z = rowfilter(y1, g.lowpass) + rowfilter(y2, g.highpass);

  Image2D out(s.original_rows, s.original_cols);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = z(i + s.pad.top, j + s.pad.left);
  }
  return out;
}

Image2D lowpass_image(const Image2D& slice, int levels, const DtcwtFilters& filters) {
  SubbandSet s = dtcwt_forward(slice, levels, filters);
  s.zero_oriented();
  return dtcwt_inverse(s, filters);
}

ScalarVolume extract_lf(const ScalarVolume& vol, int levels, const DtcwtFilters& filters, unsigned jobs) {
  if (levels < 1) throw ArgumentError("DTCWT needs levels >= 1, got " + std::to_string(levels));
  ScalarVolume out(vol.geometry());
  parallel_for(vol.dims()[2], jobs, [&](std::size_t z) {
    set_axial_slice(out, z, lowpass_image(axial_slice(vol, z), levels, filters));
  });
  return out;
}

}  // namespace freqseg
