#include "freqseg/hyper.hpp"

#include <cmath>
#include <random>
#include <string>

#include "freqseg/errors.hpp"

namespace freqseg {

void InitSpec::validate() const {
  if (fan_in < 1) throw ArgumentError("fan-in d must be >= 1, got " + std::to_string(fan_in));
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ArgumentError("gamma must be a finite value >= 0");
}

double init_std(const InitSpec& spec) {
  spec.validate();
  return std::pow(static_cast<double>(spec.fan_in), -spec.gamma);
}

std::vector<double> sample_init(const InitSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ArgumentError("sample count must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, init_std(spec));
  std::vector<double> out(n);
  for (auto& v : out) v = dist(rng);
  return out;
}

SampleStats summarize_samples(const InitSpec& spec, const std::vector<double>& samples) {
  SampleStats s;
  s.n = samples.size();
  s.target_std = init_std(spec);
  if (samples.empty()) return s;
  double sum = 0.0;
  for (const double v : samples) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  double ss = 0.0;
  for (const double v : samples) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(s.n));
  return s;
}

void ScheduleSpec::validate() const {
  if (!(lr_init > 0.0) || !std::isfinite(lr_init)) throw ArgumentError("lr_init must be positive");
  if (max_epoch < 1) throw ArgumentError("max_epoch must be >= 1");
}

double lr_at(const ScheduleSpec& spec, std::int64_t epoch) {
  spec.validate();
  if (epoch < 0 || epoch > spec.max_epoch) {
    throw ArgumentError("epoch " + std::to_string(epoch) + " outside [0, " + std::to_string(spec.max_epoch) + "]");
  }
  const double progress = static_cast<double>(epoch) / static_cast<double>(spec.max_epoch);
  return spec.lr_init * std::pow(1.0 - progress, ScheduleSpec::kExponent);
}

std::vector<double> lr_curve(const ScheduleSpec& spec) {
  spec.validate();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(spec.max_epoch) + 1);
  for (std::int64_t e = 0; e <= spec.max_epoch; ++e) out.push_back(lr_at(spec, e));
  return out;
}

}  // namespace freqseg
