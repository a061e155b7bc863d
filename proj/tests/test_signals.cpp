#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fricobs/signals.hpp"

using namespace fricobs;

TEST_CASE("band-limited noise: degenerate and error cases") {
  NoiseConfig cfg;
  cfg.seed = 1;
  cfg.std_amplitude = 0.0;
  cfg.cutoff_hz = 10.0;
  cfg.sample_rate_hz = 10000.0;
  for (double v : band_limited_noise(cfg, 1000)) CHECK(v == 0.0);

  cfg.sample_rate_hz = 0.0;
  CHECK_THROWS_AS(band_limited_noise(cfg, 10), std::invalid_argument);
  cfg.sample_rate_hz = 10000.0;
  CHECK_THROWS_AS(band_limited_noise(cfg, 0), std::invalid_argument);
}

TEST_CASE("band-limited noise: deterministic per seed") {
  NoiseConfig cfg;
  cfg.seed = 1234;
  cfg.std_amplitude = 0.5;
  cfg.cutoff_hz = 50.0;
  cfg.sample_rate_hz = 10000.0;
  const auto a = band_limited_noise(cfg, 5000);
  const auto b = band_limited_noise(cfg, 5000);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

  cfg.seed = 1235;
  const auto c = band_limited_noise(cfg, 5000);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) any_diff |= (a[i] != c[i]);
  CHECK(any_diff);
}

TEST_CASE("band-limited noise: empirical std within 5 % over 1e6 samples") {
  NoiseConfig cfg;
  cfg.seed = 777;
  cfg.std_amplitude = 0.25;
  cfg.cutoff_hz = 50.0;
  cfg.sample_rate_hz = 10000.0;
  const auto v = band_limited_noise(cfg, 1000000);
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= double(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= double(v.size());
  CHECK(std::sqrt(var) == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("band-limited noise: power above 2x cutoff down by at least 6 dB") {
  NoiseConfig cfg;
  cfg.seed = 99;
  cfg.std_amplitude = 1.0;
  cfg.cutoff_hz = 100.0;
  cfg.sample_rate_hz = 10000.0;
  const std::size_t n = 1 << 17;
  const auto v = band_limited_noise(cfg, n);

  // Direct DFT power at selected bins (Goertzel-style periodogram).
  const auto band_power = [&](double f_lo, double f_hi, int bins) {
    double acc = 0.0;
    for (int b = 0; b < bins; ++b) {
      const double f = f_lo + (f_hi - f_lo) * (b + 0.5) / bins;
      const double w = 2.0 * std::numbers::pi * f / cfg.sample_rate_hz;
      double c = 0.0, s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        c += v[k] * std::cos(w * double(k));
        s += v[k] * std::sin(w * double(k));
      }
      acc += (c * c + s * s) / double(n);
    }
    return acc / bins;
  };

  const double passband = band_power(5.0, 50.0, 8);
  const double stopband = band_power(200.0, 300.0, 8);
  CHECK(10.0 * std::log10(passband / stopband) >= 6.0);
}

TEST_CASE("chirp: phase zero at start, 3 Hz at the end, velocity envelope") {
  const ChirpSpec spec;
  const RefSample at0 = chirp_reference(spec, 0.0);
  CHECK(at0.position == 0.0);
  CHECK(spec.instantaneous_frequency(spec.duration) == doctest::Approx(3.0));
  CHECK(spec.instantaneous_frequency(0.0) == doctest::Approx(0.01));

  // monotone nondecreasing frequency
  double prev = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double f = spec.instantaneous_frequency(spec.duration * i / 1000.0);
    CHECK(f >= prev);
    prev = f;
  }

  // numeric max of |v_ref| over a dense grid lands in [0.095, 0.1]
  double vmax = 0.0;
  const double dt = 1e-4;
  for (double t = 0.0; t <= spec.duration; t += dt)
    vmax = std::max(vmax, std::fabs(chirp_reference(spec, t).velocity));
  CHECK(vmax <= 0.1 + 1e-12);
  CHECK(vmax >= 0.095);
}

TEST_CASE("chirp: analytic velocity matches the numeric derivative") {
  const ChirpSpec spec;
  const double dt = 1e-5;
  for (double t = 0.5; t < spec.duration; t += 7.3) {
    const double xm = chirp_reference(spec, t - dt).position;
    const double xp = chirp_reference(spec, t + dt).position;
    const double v = chirp_reference(spec, t).velocity;
    CHECK(v == doctest::Approx((xp - xm) / (2.0 * dt)).epsilon(1e-4));
  }
}

TEST_CASE("positioning profile: holds, exact setpoints, extension rule") {
  const PositioningSpec spec = PositioningSpec::default_profile();
  REQUIRE(spec.segments.size() >= 2);

  const auto windows = hold_windows(spec);
  REQUIRE(windows.size() == spec.segments.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto [begin, end] = windows[i];
    CHECK(end - begin >= 1.0);  // holds at least one second
    for (double t = begin; t < end; t += 0.1) {
      const RefSample r = positioning_reference(spec, t);
      CHECK(r.velocity == 0.0);
      CHECK(r.position == spec.segments[i].target);
    }
  }
  // two distinct setpoints
  CHECK(spec.segments[0].target != spec.segments[1].target);

  // beyond the profile end the final setpoint is held
  const double total = spec.total_duration();
  const RefSample after = positioning_reference(spec, total + 5.0);
  CHECK(after.position == spec.segments.back().target);
  CHECK(after.velocity == 0.0);
}

TEST_CASE("generators are pure: identical outputs for identical inputs") {
  const ChirpSpec spec;
  for (double t : {0.0, 1.0, 13.7, 59.9}) {
    const RefSample a = chirp_reference(spec, t);
    const RefSample b = chirp_reference(spec, t);
    CHECK(a.position == b.position);
    CHECK(a.velocity == b.velocity);
  }
  const ConstantVelocitySpec cv{0.05};
  CHECK(constant_velocity_reference(cv, 2.0).position == doctest::Approx(0.1));
  CHECK(constant_velocity_reference(cv, 2.0).velocity == 0.05);
}
