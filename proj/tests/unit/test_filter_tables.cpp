#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "fixtures.hpp"
#include "freqseg/dtcwt.hpp"
#include "freqseg/filter_tables.hpp"
#include "freqseg/nsct.hpp"

using namespace freqseg;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// sum_n h[n] h[n + 2k]
double even_autocorr(const std::vector<double>& h, std::size_t k) {
  double s = 0.0;
  for (std::size_t n = 0; n + 2 * k < h.size(); ++n) s += h[n] * h[n + 2 * k];
  return s;
}

std::string embedded_text_with(const std::string& section, double scale) {
  std::ostringstream out;
  out << "version 1\n";
  const FilterTables& t = FilterTables::embedded();
  out.precision(17);
  for (const auto& name : t.section_names()) {
    const auto& tab = t.at(name);
    out << "[" << name << "]\n";
    if (tab.rows > 1) out << "shape " << tab.rows << " " << tab.cols << "\n";
    for (double v : tab.values) out << (name == section ? v * scale : v) << "\n";
  }
  return out.str();
}

}  // namespace

TEST_SUITE("filter_tables") {
  TEST_CASE("embedded tables hold every section") {
    const FilterTables& t = FilterTables::embedded();
    CHECK(t.version() == 1);
    for (const char* s : {"dtcwt.level1.h0o", "dtcwt.level1.h1o", "dtcwt.level1.g0o", "dtcwt.level1.g1o",
                          "dtcwt.qshift.h0a", "dtcwt.qshift.h0b", "dtcwt.qshift.g0a", "dtcwt.qshift.g0b",
                          "dtcwt.qshift.h1a", "dtcwt.qshift.h1b", "dtcwt.qshift.g1a", "dtcwt.qshift.g1b",
                          "nsct.pyramid_lowpass", "nsct.fan1", "nsct.fan2"}) {
      CHECK_MESSAGE(t.contains(s), s);
    }
    CHECK(t.at("dtcwt.level1.h0o").values.size() == 13);
    CHECK(t.at("dtcwt.level1.h1o").values.size() == 19);
    CHECK(t.at("dtcwt.qshift.h0a").values.size() == 14);
    CHECK(t.at("nsct.fan1").rows == 19);
    CHECK(t.at("nsct.fan1").cols == 19);
    CHECK_THROWS_AS(t.at("nope"), FormatError);
  }

  TEST_CASE("filter pair sums: level-1 lowpass 1, q-shift lowpass sqrt 2, highpass 0") {
    const DtcwtFilters& f = DtcwtFilters::standard();
    CHECK(std::abs(sum(f.level1_analysis.lowpass) - 1.0) <= 1e-8);
    CHECK(std::abs(sum(f.level1_synthesis.lowpass) - 1.0) <= 1e-8);
    for (const FilterPair* p : {&f.level1_analysis, &f.level1_synthesis, &f.qshift_a_analysis, &f.qshift_b_analysis,
                                &f.qshift_a_synthesis, &f.qshift_b_synthesis}) {
      CHECK(std::abs(sum(p->highpass)) <= 1e-8);
      CHECK_NOTHROW(p->validate());
    }
    for (const FilterPair* p : {&f.qshift_a_analysis, &f.qshift_b_analysis, &f.qshift_a_synthesis, &f.qshift_b_synthesis}) {
      CHECK(std::abs(sum(p->lowpass) - std::sqrt(2.0)) <= 1e-8);
    }
  }

  TEST_CASE("q-shift lowpass is orthonormal to its even shifts") {
    const auto& h = DtcwtFilters::standard().qshift_a_analysis.lowpass;
    CHECK(std::abs(even_autocorr(h, 0) - 1.0) <= 1e-13);
    for (std::size_t k = 1; k < 7; ++k) CHECK(std::abs(even_autocorr(h, k)) <= 1e-13);
    // Tree b is the time reverse of tree a.
    const auto& hb = DtcwtFilters::standard().qshift_b_analysis.lowpass;
    for (std::size_t n = 0; n < h.size(); ++n) CHECK(hb[n] == h[h.size() - 1 - n]);
  }

  TEST_CASE("parse rejects malformed files") {
    CHECK_THROWS_AS(FilterTables::parse("[a]\n1\n"), FormatError);              // no version
    CHECK_THROWS_AS(FilterTables::parse("version 2\n[a]\n1\n"), FormatError);   // wrong version
    CHECK_THROWS_AS(FilterTables::parse("version 1\n[a]\nx1\n"), FormatError);  // bad number
    CHECK_THROWS_AS(FilterTables::parse("version 1\n[a]\nshape 2 2\n1\n2\n3\n"), FormatError);
    CHECK_THROWS_AS(FilterTables::parse("version 1\n1\n"), FormatError);
    CHECK_THROWS_AS(FilterTables::parse("version 1\n[a]\n1\n[a]\n2\n"), FormatError);
    const FilterTables ok = FilterTables::parse("# c\nversion 1\n\n[a]\nshape 1 3\n1\n2\n3\n[b]\n-0.5\n");
    CHECK(ok.at("a").values == std::vector<double>{1, 2, 3});
    CHECK(ok.at("b").values == std::vector<double>{-0.5});
  }

  TEST_CASE("from_tables rejects filters that break the sum invariants") {
    const FilterTables bad = FilterTables::parse(embedded_text_with("dtcwt.qshift.h0a", 1.01));
    CHECK_THROWS_AS(DtcwtFilters::from_tables(bad), FormatError);
    const FilterTables bad_nsct = FilterTables::parse(embedded_text_with("nsct.pyramid_lowpass", 1.01));
    CHECK_THROWS_AS(NsctKernels::from_tables(bad_nsct), FormatError);
    CHECK_NOTHROW(DtcwtFilters::from_tables(FilterTables::parse(embedded_text_with("", 1.0))));
  }

  TEST_CASE("resolve prefers the explicit path, then the environment variable") {
    fixtures::TempDir dir("tables");
    const auto path = dir / "t.txt";
    std::ofstream(path) << "version 1\n[only]\n42\n";
    CHECK(FilterTables::resolve(path).at("only").values.front() == 42.0);

    ::setenv(kFilterTablesEnvVar, path.c_str(), 1);
    CHECK(FilterTables::resolve(std::nullopt).contains("only"));
    ::unsetenv(kFilterTablesEnvVar);
    CHECK(FilterTables::resolve(std::nullopt).contains("nsct.fan2"));
    CHECK_THROWS_AS(FilterTables::load(dir / "missing.txt"), IoError);
  }
}
