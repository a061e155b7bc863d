#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fricobs/control.hpp"
#include "fricobs/friction.hpp"
#include "fricobs/observer.hpp"
#include "fricobs/plant.hpp"
#include "fricobs/signals.hpp"

namespace fricobs {

enum class ScenarioMode {
  open_loop_observer,
  closed_loop_pid,
  closed_loop_pid_observer,
  eigen_scan,
  design_report,
};

std::string to_string(ScenarioMode m);
ScenarioMode scenario_mode_from_string(const std::string& s);

/// What drives the input u(t) of an open-loop run.
struct InputDriveConfig {
  enum class Type { none, noise, hold_velocity };
  Type type = Type::none;
  double noise_std_volts = 0.05;   ///< std of the voltage noise v(t), u = K*v
  double noise_cutoff_hz = 0.2;
  double hold_velocity = 0.05;     ///< [m/s]; u holds the exact sliding equilibrium
};

/// Measurement disturbance eta(t) on the position channel.
struct OutputNoiseConfig {
  enum class Type { none, gaussian, sine };
  Type type = Type::none;
  double std = 0.0;        ///< [m]
  double cutoff_hz = 500.0;
  double amplitude = 0.0;  ///< [m], sine variant
  double freq_hz = 40.0;
};

struct ObserverSection {
  bool enabled = true;
  double rho = 1.02;
  ObserverModel model = ObserverModel::lag;
  double omega_co_hz = 40.0;
  std::optional<ObserverGains> gains_override;
  DivergenceConfig divergence;

  ObserverGains gains(const FrictionParams& fp, double mass) const;
};

struct ControllerSection {
  PidConfig pid;
  std::optional<double> design_max_S;  ///< when set, gains come from design_pid
};

struct ReferenceSection {
  enum class Type { positioning, chirp, constant_velocity };
  Type type = Type::positioning;
  PositioningSpec positioning = PositioningSpec::default_profile();
  ChirpSpec chirp;
  ConstantVelocitySpec constant_velocity;

  RefSample sample(double t) const;
};

struct ScenarioConfig {
  ScenarioMode mode = ScenarioMode::open_loop_observer;
  double dt = 1e-4;
  double duration = 10.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  PlantParams plant;
  FrictionParams friction;
  ObserverSection observer;
  ControllerSection controller;
  InputDriveConfig input;
  OutputNoiseConfig output_noise;
  ReferenceSection reference;
  double encoder_resolution = 0.0;  ///< [m], 0 disables quantization

  // eigen_scan / design_report sections
  std::vector<double> scan_rho = {1.001, 1.02, 1.5, 4.0};
  std::size_t scan_samples = 1000;

  bool uses_noise() const;
  /// Throws std::invalid_argument on inconsistent sections (missing seed
  /// for noisy scenarios, nonpositive dt, ...).
  void validate() const;
};

/// Time-series record of one run.  Column order matches the CSV layout.
struct RunSeries {
  std::vector<double> t, u, x_true, x_meas, v_true, v_est, f_true, f_est, eps2, eps3;

  std::size_t size() const { return t.size(); }
  void reserve(std::size_t n);
  void push_row(double t_, double u_, double xt, double xm, double vt, double ve, double ft,
                double fe, double e2, double e3);
};

struct RunMetrics {
  double rms_error = 0.0;      ///< closed loop: e = x_ref - x_true; open loop: eps3
  double max_abs_error = 0.0;
  std::vector<double> hold_errors;  ///< mean |e| over the tail of each hold phase
  bool diverged = false;
  double divergence_onset = -1.0;
  double convergence_time = -1.0;  ///< entry into the 5 % band, -1 if never
  double rms_eps2 = 0.0;
  double rms_eps3 = 0.0;
  bool fault = false;
  long fault_step = -1;
};

struct RunResult {
  RunSeries series;
  RunMetrics metrics;
  IgnatyevMargins margins;
  bool margins_evaluated = false;
  std::vector<double> a0_trace;      ///< aux, not part of the CSV
  std::vector<double> a0_dot_trace;
  double observer_a1 = 0.0;
  long pid_windup_events = 0;
};

/// Metrics are a pure function of the recorded series plus the scenario
/// description, so they can be recomputed bit-exactly from an exported CSV.
RunMetrics compute_metrics(const RunSeries& s, const ScenarioConfig& cfg);

RunResult run_open_loop_observer(const ScenarioConfig& cfg);
RunResult run_closed_loop(const ScenarioConfig& cfg);
RunResult run_scenario(const ScenarioConfig& cfg);  ///< dispatch over the three sim modes

struct EigenScanRow {
  double rho = 0.0;
  double stiffness = 0.0;
  std::complex<double> lambda1, lambda2;
  bool real = false;
  bool negative = false;
  double dominant = 0.0;
};

std::vector<EigenScanRow> eigen_scan(const FrictionParams& fp, double mass,
                                     const std::vector<double>& rho_list,
                                     std::size_t stiffness_samples);

struct DesignReport {
  PlantTF tf;
  PidDesign design;
  PidGains gains;
  double peak_sensitivity = 0.0;
};

DesignReport design_report(const ScenarioConfig& cfg, double max_S);

// Scenario presets used by the test fixtures and shipped example configs.
inline constexpr std::uint64_t kFixtureSeed = 987654321;
ScenarioConfig preset_sim_observer(double rho, std::uint64_t seed = kFixtureSeed);
ScenarioConfig preset_constant_velocity(double v0 = 0.05, double rho = 1.02);
ScenarioConfig preset_noise_feedthrough(double amplitude = 1e-5, double freq_hz = 40.0,
                                        double rho = 1.02);
ScenarioConfig preset_positioning(bool with_observer);
ScenarioConfig preset_chirp(bool with_observer);

// JSON round trip for config files; implemented over the documented schema.
ScenarioConfig scenario_from_json(const std::string& text);
ScenarioConfig scenario_from_json_file(const std::string& path);
std::string scenario_to_json(const ScenarioConfig& cfg);

/// Applies a `/section/key=value` override (JSON pointer syntax).
void apply_override(ScenarioConfig& cfg, const std::string& pointer_assignment);

}  // namespace fricobs
