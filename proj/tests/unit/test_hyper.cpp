#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "freqseg/errors.hpp"
#include "freqseg/hyper.hpp"

using namespace freqseg;

TEST_SUITE("hyper") {
  TEST_CASE("init_std closed form") {
    CHECK(init_std({100, 0.5}) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(init_std({37, 0.0}) == 1.0);
    CHECK(init_std({10, 1.0}) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(init_std({100, 0.7}) == doctest::Approx(std::pow(100.0, -0.7)).epsilon(1e-15));
    CHECK_THROWS_AS(init_std({0, 0.5}), ArgumentError);
    CHECK_THROWS_AS(init_std({10, -0.1}), ArgumentError);
  }

  TEST_CASE("property: init_std strictly decreases in gamma for d > 1") {
    for (std::int64_t d : {2, 10, 100, 4096}) {
      double prev = init_std({d, 0.0});
      for (int k = 1; k <= 20; ++k) {
        const double cur = init_std({d, 0.05 * k});
        CHECK(cur < prev);
        prev = cur;
      }
    }
    CHECK(init_std({1, 0.9}) == 1.0);
  }

  TEST_CASE("sample_init moments and determinism") {
    const InitSpec spec{100, 0.5};
    const auto s = sample_init(spec, 1000000, 7);
    const SampleStats st = summarize_samples(spec, s);
    CHECK(st.n == 1000000);
    CHECK(std::abs(st.std - 0.1) <= 0.01 * 0.1);
    CHECK(std::abs(st.mean) <= 3.0 * 0.1 / 1000.0);
    CHECK(st.target_std == init_std(spec));

    const SampleStats unit = summarize_samples({5, 0.0}, sample_init({5, 0.0}, 1000000, 8));
    CHECK(std::abs(unit.std - 1.0) <= 0.01);

    CHECK(sample_init(spec, 1000, 99) == sample_init(spec, 1000, 99));
    CHECK(sample_init(spec, 1000, 99) != sample_init(spec, 1000, 100));
  }

  TEST_CASE("property: Kolmogorov-Smirnov test does not reject normality at 1%") {
    const InitSpec spec{64, 0.8};
    const double sd = init_std(spec);
    auto s = sample_init(spec, 100000, 12345);
    std::sort(s.begin(), s.end());
    double d = 0.0;
    const double n = double(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double f = 0.5 * std::erfc(-s[i] / (sd * std::sqrt(2.0)));
      d = std::max({d, f - double(i) / n, double(i + 1) / n - f});
    }
    // Asymptotic critical value of sqrt(n) D at alpha = 0.01.
    CHECK(std::sqrt(n) * d < 1.6276);
  }

  TEST_CASE("lr_at examples and range checks") {
    const ScheduleSpec spec;
    CHECK(lr_at(spec, 0) == 1e-2);
    CHECK(lr_at(spec, 1000) == 0.0);
    CHECK(std::abs(lr_at(spec, 500) - 5.3589e-3) <= 1e-7);
    CHECK_THROWS_AS(lr_at(spec, -1), ArgumentError);
    CHECK_THROWS_AS(lr_at(spec, 1001), ArgumentError);
    CHECK_THROWS_AS(lr_at(ScheduleSpec{0.0, 10}, 1), ArgumentError);
    CHECK_THROWS_AS(lr_at(ScheduleSpec{1e-3, 0}, 0), ArgumentError);
    CHECK(lr_at(ScheduleSpec{1e-3, 1000}, 0) == 1e-3);
  }

  TEST_CASE("property: the schedule strictly decreases and matches the formula") {
    for (const ScheduleSpec spec : {ScheduleSpec{}, ScheduleSpec{1e-3, 250}, ScheduleSpec{0.3, 7}}) {
      const auto curve = lr_curve(spec);
      REQUIRE(curve.size() == std::size_t(spec.max_epoch) + 1);
      for (std::size_t e = 0; e < curve.size(); ++e) {
        const double expect = spec.lr_init * std::pow(1.0 - double(e) / double(spec.max_epoch), 0.9);
        CHECK(std::abs(curve[e] - expect) <= 1e-12 * spec.lr_init);
        if (e > 0) CHECK(curve[e] < curve[e - 1]);
      }
    }
  }
}
