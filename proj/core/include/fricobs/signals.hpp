#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fricobs {

/// Derives decorrelated substream seeds from a master seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Band-limited Gaussian noise: white samples shaped by a first-order
/// low-pass at the cutoff.  The input variance is scaled so that the
/// steady-state output standard deviation equals `std_amplitude`.
struct NoiseConfig {
  std::uint64_t seed = 0;
  double std_amplitude = 0.0;  ///< target output std, units of the carried signal
  double cutoff_hz = 10.0;
  double sample_rate_hz = 10000.0;
};

class BandLimitedNoise {
 public:
  explicit BandLimitedNoise(const NoiseConfig& cfg);
  double next();

 private:
  double gaussian();
  std::mt19937_64 rng_;
  double alpha_ = 1.0;
  double input_std_ = 0.0;
  double state_ = 0.0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::vector<double> band_limited_noise(const NoiseConfig& cfg, std::size_t n);

struct RefSample {
  double position = 0.0;
  double velocity = 0.0;
};

/// Linear-in-frequency up-sweep f0 -> f1; the amplitude is set so the
/// peak reference velocity stays at `velocity_limit`.  Beyond the sweep
/// the signal continues as a constant-frequency sine (phase-continuous).
struct ChirpSpec {
  double f0_hz = 0.01;
  double f1_hz = 3.0;
  double duration = 60.0;
  double velocity_limit = 0.1;  ///< [m/s]

  double amplitude() const;
  double instantaneous_frequency(double t) const;
};

RefSample chirp_reference(const ChirpSpec& spec, double t);

/// Move-hold positioning profile.  Each segment ramps to its target with
/// a smoothstep (zero boundary velocities) and then holds it.
struct PositioningSegment {
  double target = 0.0;     ///< [m]
  double move_time = 0.5;  ///< [s]
  double hold_time = 2.0;  ///< [s]
};

struct PositioningSpec {
  double start = 0.0;
  std::vector<PositioningSegment> segments;

  /// Two distinct setpoints with >= 1 s holds, desk-scale amplitudes.
  static PositioningSpec default_profile();
  double total_duration() const;
};

RefSample positioning_reference(const PositioningSpec& spec, double t);

/// Time windows [begin, end) of the hold phases, for steady-state error
/// metrics.
std::vector<std::pair<double, double>> hold_windows(const PositioningSpec& spec);

struct ConstantVelocitySpec {
  double v0 = 0.05;  ///< [m/s]
};

RefSample constant_velocity_reference(const ConstantVelocitySpec& spec, double t);

}  // namespace fricobs
