#include "fricobs/signals.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fricobs {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + stream * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

BandLimitedNoise::BandLimitedNoise(const NoiseConfig& cfg) : rng_(cfg.seed) {
  if (!(cfg.sample_rate_hz > 0.0))
    throw std::invalid_argument("band_limited_noise: zero sample rate");
  if (!(cfg.cutoff_hz > 0.0)) throw std::invalid_argument("band_limited_noise: cutoff must be > 0");
  alpha_ = 1.0 - std::exp(-2.0 * std::numbers::pi * cfg.cutoff_hz / cfg.sample_rate_hz);
  // One-pole recursion y' = (1-alpha)*y + alpha*x has output variance
  // alpha/(2-alpha) * var(x); invert so the output std hits the target.
  input_std_ = cfg.std_amplitude * std::sqrt((2.0 - alpha_) / alpha_);
}

double BandLimitedNoise::gaussian() {
  // Marsaglia polar method on top of mt19937_64: the stream is fixed by
  // the seed across standard library implementations.
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * std::generate_canonical<double, 53>(rng_) - 1.0;
    v = 2.0 * std::generate_canonical<double, 53>(rng_) - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

double BandLimitedNoise::next() {
  const double x = gaussian() * input_std_;
  state_ += alpha_ * (x - state_);
  return state_;
}

std::vector<double> band_limited_noise(const NoiseConfig& cfg, std::size_t n) {
  if (n == 0) throw std::invalid_argument("band_limited_noise: n must be > 0");
  BandLimitedNoise gen(cfg);
  std::vector<double> out(n);
  for (auto& v : out) v = gen.next();
  return out;
}

double ChirpSpec::amplitude() const {
  return velocity_limit / (2.0 * std::numbers::pi * f1_hz);
}

double ChirpSpec::instantaneous_frequency(double t) const {
  if (t <= 0.0) return f0_hz;
  if (t >= duration) return f1_hz;
  return f0_hz + (f1_hz - f0_hz) * t / duration;
}

RefSample chirp_reference(const ChirpSpec& spec, double t) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double a = spec.amplitude();
  RefSample r;
  if (t <= 0.0) return r;
  double phase, freq;
  if (t <= spec.duration) {
    phase = two_pi * (spec.f0_hz * t + 0.5 * (spec.f1_hz - spec.f0_hz) * t * t / spec.duration);
    freq = spec.instantaneous_frequency(t);
  } else {
    const double phase_end =
        two_pi * (spec.f0_hz * spec.duration + 0.5 * (spec.f1_hz - spec.f0_hz) * spec.duration);
    phase = phase_end + two_pi * spec.f1_hz * (t - spec.duration);
    freq = spec.f1_hz;
  }
  r.position = a * std::sin(phase);
  r.velocity = a * two_pi * freq * std::cos(phase);
  return r;
}

PositioningSpec PositioningSpec::default_profile() {
  PositioningSpec spec;
  spec.start = 0.0;
  spec.segments = {{4e-3, 0.4, 2.6}, {8e-3, 0.4, 2.6}};
  return spec;
}

double PositioningSpec::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.move_time + s.hold_time;
  return t;
}

RefSample positioning_reference(const PositioningSpec& spec, double t) {
  double level = spec.start;
  double t0 = 0.0;
  for (const auto& seg : spec.segments) {
    if (t < t0 + seg.move_time) {
      const double s = (t - t0) / seg.move_time;
      const double blend = s * s * (3.0 - 2.0 * s);
      RefSample r;
      r.position = level + (seg.target - level) * blend;
      r.velocity = (seg.target - level) * 6.0 * s * (1.0 - s) / seg.move_time;
      return r;
    }
    if (t < t0 + seg.move_time + seg.hold_time) return {seg.target, 0.0};
    t0 += seg.move_time + seg.hold_time;
    level = seg.target;
  }
  return {level, 0.0};  // final setpoint held past the profile end
}

std::vector<std::pair<double, double>> hold_windows(const PositioningSpec& spec) {
  std::vector<std::pair<double, double>> out;
  double t0 = 0.0;
  for (const auto& seg : spec.segments) {
    out.emplace_back(t0 + seg.move_time, t0 + seg.move_time + seg.hold_time);
    t0 += seg.move_time + seg.hold_time;
  }
  return out;
}

RefSample constant_velocity_reference(const ConstantVelocitySpec& spec, double t) {
  return {spec.v0 * t, spec.v0};
}

}  // namespace fricobs
