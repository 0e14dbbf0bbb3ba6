#pragma once

#include <cstdint>
#include <vector>

namespace freqseg {

/// Gaussian initialization N(0, (d^-gamma)^2) for fan-in d.
struct InitSpec {
  std::int64_t fan_in = 1;
  double gamma = 0.0;

  void validate() const;
};

double init_std(const InitSpec& spec);

/// n draws from N(0, init_std^2); std::mt19937_64 seeded with `seed`.
std::vector<double> sample_init(const InitSpec& spec, std::size_t n, std::uint64_t seed);

struct SampleStats {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;  // population
  double target_std = 0.0;
};

SampleStats summarize_samples(const InitSpec& spec, const std::vector<double>& samples);

/// Polynomial decay lr = lr_init * (1 - epoch / max_epoch)^0.9.
struct ScheduleSpec {
  static constexpr double kExponent = 0.9;

  double lr_init = 1e-2;
  std::int64_t max_epoch = 1000;

  void validate() const;
};

double lr_at(const ScheduleSpec& spec, std::int64_t epoch);

/// lr_at for epochs 0..max_epoch.
std::vector<double> lr_curve(const ScheduleSpec& spec);

}  // namespace freqseg
