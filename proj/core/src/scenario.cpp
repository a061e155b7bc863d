#include "fricobs/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fricobs {

std::string to_string(ScenarioMode m) {
  switch (m) {
    case ScenarioMode::open_loop_observer: return "open_loop_observer";
    case ScenarioMode::closed_loop_pid: return "closed_loop_pid";
    case ScenarioMode::closed_loop_pid_observer: return "closed_loop_pid_observer";
    case ScenarioMode::eigen_scan: return "eigen_scan";
    case ScenarioMode::design_report: return "design_report";
  }
  return "open_loop_observer";
}

ScenarioMode scenario_mode_from_string(const std::string& s) {
  if (s == "open_loop_observer") return ScenarioMode::open_loop_observer;
  if (s == "closed_loop_pid") return ScenarioMode::closed_loop_pid;
  if (s == "closed_loop_pid_observer") return ScenarioMode::closed_loop_pid_observer;
  if (s == "eigen_scan") return ScenarioMode::eigen_scan;
  if (s == "design_report") return ScenarioMode::design_report;
  throw std::invalid_argument("unknown scenario mode: " + s);
}

ObserverGains ObserverSection::gains(const FrictionParams& fp, double mass) const {
  if (gains_override) return *gains_override;
  return model == ObserverModel::lag ? design_gains(fp, mass, rho)
                                     : design_gains_static(fp, mass, rho);
}

RefSample ReferenceSection::sample(double t) const {
  switch (type) {
    case Type::positioning: return positioning_reference(positioning, t);
    case Type::chirp: return chirp_reference(chirp, t);
    case Type::constant_velocity: return constant_velocity_reference(constant_velocity, t);
  }
  return {};
}

bool ScenarioConfig::uses_noise() const {
  const bool in = input.type == InputDriveConfig::Type::noise && input.noise_std_volts > 0.0;
  const bool out = output_noise.type == OutputNoiseConfig::Type::gaussian && output_noise.std > 0.0;
  return in || out;
}

void ScenarioConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("scenario: dt must be > 0");
  if (!(duration > 0.0)) throw std::invalid_argument("scenario: duration must be > 0");
  plant.validate();
  friction.validate();
  if (uses_noise() && !seed_set)
    throw std::invalid_argument("scenario: a seed is mandatory for noisy scenarios");
  if (mode == ScenarioMode::open_loop_observer && !observer.enabled)
    throw std::invalid_argument("scenario: open_loop_observer requires the observer section");
  if (!(observer.omega_co_hz > 0.0))
    throw std::invalid_argument("scenario: observer cutoff must be > 0");
}

void RunSeries::reserve(std::size_t n) {
  for (auto* v : {&t, &u, &x_true, &x_meas, &v_true, &v_est, &f_true, &f_est, &eps2, &eps3})
    v->reserve(n);
}

void RunSeries::push_row(double t_, double u_, double xt, double xm, double vt, double ve,
                         double ft, double fe, double e2, double e3) {
  t.push_back(t_);
  u.push_back(u_);
  x_true.push_back(xt);
  x_meas.push_back(xm);
  v_true.push_back(vt);
  v_est.push_back(ve);
  f_true.push_back(ft);
  f_est.push_back(fe);
  eps2.push_back(e2);
  eps3.push_back(e3);
}

namespace {

double rms(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc / static_cast<double>(v.size()));
}

bool observer_active(const ScenarioConfig& cfg) {
  return cfg.mode == ScenarioMode::open_loop_observer ||
         cfg.mode == ScenarioMode::closed_loop_pid_observer;
}

bool closed_loop(const ScenarioConfig& cfg) {
  return cfg.mode == ScenarioMode::closed_loop_pid ||
         cfg.mode == ScenarioMode::closed_loop_pid_observer;
}

}  // namespace

RunMetrics compute_metrics(const RunSeries& s, const ScenarioConfig& cfg) {
  RunMetrics m;
  const std::size_t n = s.size();
  if (n == 0) return m;

  // Primary error signal: tracking error for closed-loop runs, raw
  // friction estimation error otherwise.
  std::vector<double> err(n);
  if (closed_loop(cfg)) {
    for (std::size_t k = 0; k < n; ++k)
      err[k] = cfg.reference.sample(s.t[k]).position - s.x_true[k];
  } else {
    err = s.eps3;
  }
  m.rms_error = rms(err);
  for (double e : err) m.max_abs_error = std::max(m.max_abs_error, std::fabs(e));
  m.rms_eps2 = rms(s.eps2);
  m.rms_eps3 = rms(s.eps3);

  if (closed_loop(cfg) && cfg.reference.type == ReferenceSection::Type::positioning) {
    for (const auto& [begin, end] : hold_windows(cfg.reference.positioning)) {
      const double tail = end - 0.25 * (end - begin);
      double acc = 0.0;
      std::size_t cnt = 0;
      for (std::size_t k = 0; k < n; ++k) {
        if (s.t[k] >= tail && s.t[k] < end) {
          acc += std::fabs(err[k]);
          ++cnt;
        }
      }
      if (cnt > 0) m.hold_errors.push_back(acc / static_cast<double>(cnt));
    }
  }

  if (observer_active(cfg)) {
    DivergenceDetector det(cfg.observer.divergence, cfg.dt);
    for (std::size_t k = 0; k < n; ++k) {
      det.update(s.v_est[k], s.eps3[k] + s.f_true[k], s.t[k]);
      if (det.diverged()) break;
    }
    m.diverged = det.diverged();
    m.divergence_onset = det.onset_time();
  }

  // Convergence to the 5 % band of the early-run error peak.
  const double t_head = std::min(0.5, s.t[n - 1]);
  double peak = 0.0;
  for (std::size_t k = 0; k < n && s.t[k] <= t_head; ++k)
    peak = std::max(peak, std::fabs(err[k]));
  const double band = 0.05 * peak;
  if (band > 0.0) {
    std::size_t last_outside = n;  // n = never outside
    for (std::size_t k = 0; k < n; ++k)
      if (std::fabs(err[k]) > band) last_outside = k;
    if (last_outside == n)
      m.convergence_time = 0.0;
    else if (last_outside + 1 >= n)
      m.convergence_time = -1.0;
    else
      m.convergence_time = s.t[last_outside + 1];
  }
  return m;
}

namespace {

struct OutputDisturbance {
  const ScenarioConfig& cfg;
  std::optional<BandLimitedNoise> noise;

  explicit OutputDisturbance(const ScenarioConfig& c) : cfg(c) {
    if (c.output_noise.type == OutputNoiseConfig::Type::gaussian) {
      NoiseConfig nc;
      nc.seed = derive_seed(c.seed, 2);
      nc.std_amplitude = c.output_noise.std;
      nc.cutoff_hz = c.output_noise.cutoff_hz;
      nc.sample_rate_hz = 1.0 / c.dt;
      noise.emplace(nc);
    }
  }

  double sample(double t) {
    switch (cfg.output_noise.type) {
      case OutputNoiseConfig::Type::none: return 0.0;
      case OutputNoiseConfig::Type::gaussian: return noise->next();
      case OutputNoiseConfig::Type::sine:
        return cfg.output_noise.amplitude *
               std::sin(2.0 * std::numbers::pi * cfg.output_noise.freq_hz * t);
    }
    return 0.0;
  }
};

double quantize(double x, double resolution) {
  if (resolution <= 0.0) return x;
  return std::round(x / resolution) * resolution;
}

PlantState initial_plant_state(const ScenarioConfig& cfg) {
  PlantState s{};
  if (cfg.mode == ScenarioMode::open_loop_observer &&
      cfg.input.type == InputDriveConfig::Type::hold_velocity) {
    const double v0 = cfg.input.hold_velocity;
    const int dir = v0 >= 0.0 ? +1 : -1;
    s.velocity = v0;
    s.presliding.direction = dir;
    s.presliding.distance = 2.0 * dir;  // start saturated: gross sliding
    s.presliding.saturated = true;
    s.friction.coulomb_force = cfg.friction.coulomb * dir;
    s.friction.viscous_force = cfg.friction.viscous * v0;
  }
  return s;
}

}  // namespace

RunResult run_open_loop_observer(const ScenarioConfig& cfg) {
  cfg.validate();
  RunResult res;
  const std::size_t n = static_cast<std::size_t>(cfg.duration / cfg.dt);
  res.series.reserve(n);
  res.a0_trace.reserve(n);
  res.a0_dot_trace.reserve(n);

  PlantState plant = initial_plant_state(cfg);
  const ObserverGains gains = cfg.observer.gains(cfg.friction, cfg.plant.mass);
  ObserverRunner obs(cfg.plant, cfg.friction, gains,
                     cfg.observer.model, 2.0 * std::numbers::pi * cfg.observer.omega_co_hz,
                     cfg.dt, cfg.observer.divergence);
  res.observer_a1 = obs.a1();

  std::optional<BandLimitedNoise> input_noise;
  if (cfg.input.type == InputDriveConfig::Type::noise) {
    NoiseConfig nc;
    nc.seed = derive_seed(cfg.seed, 1);
    nc.std_amplitude = cfg.input.noise_std_volts;
    nc.cutoff_hz = cfg.input.noise_cutoff_hz;
    nc.sample_rate_hz = 1.0 / cfg.dt;
    input_noise.emplace(nc);
  }
  const double hold_u = cfg.friction.coulomb * (cfg.input.hold_velocity >= 0.0 ? 1.0 : -1.0) +
                        cfg.friction.viscous * cfg.input.hold_velocity;
  OutputDisturbance eta(cfg);

  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    double u = 0.0;
    switch (cfg.input.type) {
      case InputDriveConfig::Type::none: u = 0.0; break;
      case InputDriveConfig::Type::noise: u = cfg.plant.input_gain * input_noise->next(); break;
      case InputDriveConfig::Type::hold_velocity: u = hold_u; break;
    }
    const double w_bar = quantize(plant.position + eta.sample(t), cfg.encoder_resolution);
    const ObserverRunner::Output out = obs.step(u, w_bar);
    const double f_true = plant.friction_total();
    res.series.push_row(t, u, plant.position, w_bar, plant.velocity, out.w2_est, f_true,
                        out.f_filtered, out.w2_est - plant.velocity, out.w3_est - f_true);
    res.a0_trace.push_back(out.a0);
    res.a0_dot_trace.push_back(out.a0_dot);

    plant = plant_step(cfg.plant, cfg.friction, plant, u, cfg.dt);
    if (!state_finite(plant) || !std::isfinite(out.w2_est) || !std::isfinite(out.w3_est)) {
      res.metrics.fault = true;
      res.metrics.fault_step = static_cast<long>(k);
      break;
    }
  }

  const RunMetrics fault = res.metrics;
  res.metrics = compute_metrics(res.series, cfg);
  res.metrics.fault = fault.fault;
  res.metrics.fault_step = fault.fault_step;
  if (!res.a0_trace.empty()) {
    res.margins = ignatyev_margins(res.a0_trace, res.a0_dot_trace, obs.a1(), cfg.dt);
    res.margins_evaluated = true;
  }
  return res;
}

RunResult run_closed_loop(const ScenarioConfig& cfg) {
  cfg.validate();
  RunResult res;
  const std::size_t n = static_cast<std::size_t>(cfg.duration / cfg.dt);
  res.series.reserve(n);

  PlantState plant{};
  PidConfig pid_cfg = cfg.controller.pid;
  if (cfg.controller.design_max_S) {
    const PlantTF tf = identify_plant_tf(cfg.plant, cfg.friction);
    const PidDesign d = design_pid(tf, *cfg.controller.design_max_S);
    pid_cfg.gains = to_parallel_gains(d, tf);
    pid_cfg.deriv_filter_omega = 10.0 * d.crossover;
  }
  PidState pid{};

  const bool with_observer = cfg.mode == ScenarioMode::closed_loop_pid_observer;
  std::optional<ObserverRunner> obs;
  if (with_observer) {
    obs.emplace(cfg.plant, cfg.friction, cfg.observer.gains(cfg.friction, cfg.plant.mass),
                cfg.observer.model, 2.0 * std::numbers::pi * cfg.observer.omega_co_hz, cfg.dt,
                cfg.observer.divergence);
    res.observer_a1 = obs->a1();
    res.a0_trace.reserve(n);
    res.a0_dot_trace.reserve(n);
  }
  OutputDisturbance eta(cfg);

  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    const RefSample ref = cfg.reference.sample(t);
    const double w_bar = quantize(plant.position + eta.sample(t), cfg.encoder_resolution);

    ObserverRunner::Output out{};
    if (with_observer) {
      out = obs->observe(w_bar);
      res.a0_trace.push_back(out.a0);
      res.a0_dot_trace.push_back(out.a0_dot);
    }
    const double e = ref.position - w_bar;
    const double u_pid = pid_step(pid_cfg, pid, e, cfg.dt);
    const double v_cmd = with_observer
                             ? compensated_input(u_pid, out.f_filtered, cfg.plant.input_gain)
                             : u_pid;
    const double u = cfg.plant.input_gain * v_cmd;

    const double f_true = plant.friction_total();
    res.series.push_row(t, u, plant.position, w_bar, plant.velocity,
                        with_observer ? out.w2_est : 0.0, f_true,
                        with_observer ? out.f_filtered : 0.0,
                        with_observer ? out.w2_est - plant.velocity : 0.0,
                        with_observer ? out.w3_est - f_true : 0.0);

    if (with_observer) obs->advance(u, w_bar);
    plant = plant_step(cfg.plant, cfg.friction, plant, u, cfg.dt);
    if (!state_finite(plant) || !std::isfinite(u)) {
      res.metrics.fault = true;
      res.metrics.fault_step = static_cast<long>(k);
      break;
    }
  }

  const RunMetrics fault = res.metrics;
  res.metrics = compute_metrics(res.series, cfg);
  res.metrics.fault = fault.fault;
  res.metrics.fault_step = fault.fault_step;
  res.pid_windup_events = pid.windup_events;
  if (with_observer && !res.a0_trace.empty()) {
    res.margins = ignatyev_margins(res.a0_trace, res.a0_dot_trace, obs->a1(), cfg.dt);
    res.margins_evaluated = true;
  }
  return res;
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  switch (cfg.mode) {
    case ScenarioMode::open_loop_observer: return run_open_loop_observer(cfg);
    case ScenarioMode::closed_loop_pid:
    case ScenarioMode::closed_loop_pid_observer: return run_closed_loop(cfg);
    default:
      throw std::invalid_argument("run_scenario: mode " + to_string(cfg.mode) +
                                  " is not a simulation mode");
  }
}

std::vector<EigenScanRow> eigen_scan(const FrictionParams& fp, double mass,
                                     const std::vector<double>& rho_list,
                                     std::size_t stiffness_samples) {
  if (rho_list.empty() || stiffness_samples < 2)
    throw std::invalid_argument("eigen_scan: need rho values and >= 2 stiffness samples");
  std::vector<EigenScanRow> rows;
  rows.reserve(rho_list.size() * stiffness_samples);
  for (double rho : rho_list) {
    const ObserverGains g = design_gains(fp, mass, rho);
    for (std::size_t i = 0; i < stiffness_samples; ++i) {
      EigenScanRow row;
      row.rho = rho;
      row.stiffness = fp.stiffness_clamp * static_cast<double>(i) /
                      static_cast<double>(stiffness_samples - 1);
      const EigenPair e = observer_eigenvalues(g, mass, row.stiffness, fp.sigma_over_beta());
      row.lambda1 = e.lambda1;
      row.lambda2 = e.lambda2;
      row.real = e.real;
      row.dominant = std::max(e.lambda1.real(), e.lambda2.real());
      row.negative = e.real && row.dominant < 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

DesignReport design_report(const ScenarioConfig& cfg, double max_S) {
  DesignReport rep;
  rep.tf = identify_plant_tf(cfg.plant, cfg.friction);
  rep.design = design_pid(rep.tf, max_S);
  rep.gains = to_parallel_gains(rep.design, rep.tf);
  std::vector<double> grid(1000);
  const double lo = rep.design.crossover / 100.0, hi = rep.design.crossover * 100.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (grid.size() - 1));
  for (double m : sensitivity_magnitude(rep.tf, rep.design, grid))
    if (std::isfinite(m)) rep.peak_sensitivity = std::max(rep.peak_sensitivity, m);
  return rep;
}

ScenarioConfig preset_sim_observer(double rho, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.mode = ScenarioMode::open_loop_observer;
  cfg.dt = 1e-4;
  cfg.duration = 60.0;
  cfg.seed = seed;
  cfg.seed_set = true;
  cfg.observer.rho = rho;
  cfg.observer.model = ObserverModel::lag;
  cfg.input.type = InputDriveConfig::Type::noise;
  cfg.input.noise_std_volts = 0.1;
  cfg.input.noise_cutoff_hz = 0.2;
  cfg.output_noise.type = OutputNoiseConfig::Type::gaussian;
  cfg.output_noise.std = 1e-5;
  cfg.output_noise.cutoff_hz = 500.0;
  return cfg;
}

ScenarioConfig preset_constant_velocity(double v0, double rho) {
  ScenarioConfig cfg;
  cfg.mode = ScenarioMode::open_loop_observer;
  cfg.dt = 1e-4;
  cfg.duration = 4.0;
  cfg.friction.static_viscous = true;
  cfg.observer.rho = rho;
  cfg.observer.model = ObserverModel::static_viscous;
  cfg.input.type = InputDriveConfig::Type::hold_velocity;
  cfg.input.hold_velocity = v0;
  return cfg;
}

ScenarioConfig preset_noise_feedthrough(double amplitude, double freq_hz, double rho) {
  ScenarioConfig cfg;
  cfg.mode = ScenarioMode::open_loop_observer;
  cfg.dt = 1e-4;
  cfg.duration = 2.0;
  cfg.observer.rho = rho;
  cfg.observer.model = ObserverModel::lag;
  cfg.input.type = InputDriveConfig::Type::none;
  cfg.output_noise.type = OutputNoiseConfig::Type::sine;
  cfg.output_noise.amplitude = amplitude;
  cfg.output_noise.freq_hz = freq_hz;
  return cfg;
}

ScenarioConfig preset_positioning(bool with_observer) {
  ScenarioConfig cfg;
  cfg.mode = with_observer ? ScenarioMode::closed_loop_pid_observer : ScenarioMode::closed_loop_pid;
  cfg.dt = 1e-4;
  cfg.friction.static_viscous = true;
  cfg.reference.type = ReferenceSection::Type::positioning;
  cfg.reference.positioning = PositioningSpec::default_profile();
  cfg.duration = cfg.reference.positioning.total_duration() + 1.0;
  cfg.controller.pid.gains = {429.0, 4348.0, 2.67};  // deployed reference set
  cfg.controller.pid.deriv_filter_omega = 2.0 * std::numbers::pi * 100.0;
  cfg.observer.rho = 4.0;
  cfg.observer.model = ObserverModel::static_viscous;
  cfg.observer.omega_co_hz = 40.0;
  return cfg;
}

ScenarioConfig preset_chirp(bool with_observer) {
  ScenarioConfig cfg = preset_positioning(with_observer);
  cfg.reference.type = ReferenceSection::Type::chirp;
  cfg.reference.chirp = ChirpSpec{};
  cfg.duration = cfg.reference.chirp.duration;
  return cfg;
}

// ---------------------------------------------------------------------------
// JSON round trip

namespace {

using nlohmann::json;

json to_json_impl(const ScenarioConfig& c) {
  json j;
  j["mode"] = to_string(c.mode);
  j["dt"] = c.dt;
  j["duration"] = c.duration;
  if (c.seed_set) j["seed"] = c.seed;
  j["plant"] = {{"mass", c.plant.mass},
                {"input_gain", c.plant.input_gain},
                {"gravity_load", c.plant.gravity_load}};
  j["friction"] = {
      {"coulomb", c.friction.coulomb},
      {"viscous", c.friction.viscous},
      {"presliding_scale", c.friction.presliding_scale},
      {"viscous_lag", c.friction.viscous_lag},
      {"stiffness_clamp", c.friction.stiffness_clamp},
      {"reversal_band", c.friction.reversal_band},
      {"chain_rule",
       c.friction.chain_rule == StiffnessChainRule::multiply_s ? "multiply_s" : "divide_s"},
      {"static_viscous", c.friction.static_viscous},
      {"lipschitz_bound", c.friction.lipschitz_bound},
      {"coulomb_max", c.friction.coulomb_max},
      {"viscous_max", c.friction.viscous_max}};
  j["observer"] = {
      {"enabled", c.observer.enabled},
      {"rho", c.observer.rho},
      {"model", c.observer.model == ObserverModel::lag ? "lag" : "static_viscous"},
      {"omega_co_hz", c.observer.omega_co_hz},
      {"divergence",
       {{"velocity_bound", c.observer.divergence.velocity_bound},
        {"force_bound", c.observer.divergence.force_bound},
        {"factor", c.observer.divergence.factor},
        {"hold_time", c.observer.divergence.hold_time}}}};
  if (c.observer.gains_override) {
    j["observer"]["gains_override"] = {{"L1", c.observer.gains_override->L1},
                                       {"L2", c.observer.gains_override->L2},
                                       {"rho", c.observer.gains_override->rho}};
  }
  j["controller"] = {{"kp", c.controller.pid.gains.kp},
                     {"ki", c.controller.pid.gains.ki},
                     {"kd", c.controller.pid.gains.kd},
                     {"deriv_filter_hz",
                      c.controller.pid.deriv_filter_omega / (2.0 * std::numbers::pi)},
                     {"anti_windup", c.controller.pid.anti_windup},
                     {"output_limit", c.controller.pid.output_limit}};
  if (c.controller.design_max_S) j["controller"]["design_max_S"] = *c.controller.design_max_S;
  const char* input_type = c.input.type == InputDriveConfig::Type::none ? "none"
                           : c.input.type == InputDriveConfig::Type::noise ? "noise"
                                                                           : "hold_velocity";
  j["input"] = {{"type", input_type},
                {"noise_std_volts", c.input.noise_std_volts},
                {"noise_cutoff_hz", c.input.noise_cutoff_hz},
                {"hold_velocity", c.input.hold_velocity}};
  const char* noise_type = c.output_noise.type == OutputNoiseConfig::Type::none ? "none"
                           : c.output_noise.type == OutputNoiseConfig::Type::gaussian ? "gaussian"
                                                                                      : "sine";
  j["output_noise"] = {{"type", noise_type},
                       {"std", c.output_noise.std},
                       {"cutoff_hz", c.output_noise.cutoff_hz},
                       {"amplitude", c.output_noise.amplitude},
                       {"freq_hz", c.output_noise.freq_hz}};
  const char* ref_type = c.reference.type == ReferenceSection::Type::positioning ? "positioning"
                         : c.reference.type == ReferenceSection::Type::chirp ? "chirp"
                                                                             : "constant_velocity";
  json segments = json::array();
  for (const auto& s : c.reference.positioning.segments)
    segments.push_back(
        {{"target", s.target}, {"move_time", s.move_time}, {"hold_time", s.hold_time}});
  j["reference"] = {{"type", ref_type},
                    {"positioning", {{"start", c.reference.positioning.start},
                                     {"segments", segments}}},
                    {"chirp",
                     {{"f0_hz", c.reference.chirp.f0_hz},
                      {"f1_hz", c.reference.chirp.f1_hz},
                      {"duration", c.reference.chirp.duration},
                      {"velocity_limit", c.reference.chirp.velocity_limit}}},
                    {"constant_velocity", {{"v0", c.reference.constant_velocity.v0}}}};
  j["encoder_resolution"] = c.encoder_resolution;
  j["scan"] = {{"rho", c.scan_rho}, {"samples", c.scan_samples}};
  return j;
}

ScenarioConfig from_json_impl(const json& j) {
  ScenarioConfig c;
  c.mode = scenario_mode_from_string(j.value("mode", std::string("open_loop_observer")));
  c.dt = j.value("dt", c.dt);
  c.duration = j.value("duration", c.duration);
  if (j.contains("seed")) {
    c.seed = j.at("seed").get<std::uint64_t>();
    c.seed_set = true;
  }
  if (j.contains("plant")) {
    const auto& p = j.at("plant");
    c.plant.mass = p.value("mass", c.plant.mass);
    c.plant.input_gain = p.value("input_gain", c.plant.input_gain);
    c.plant.gravity_load = p.value("gravity_load", c.plant.gravity_load);
  }
  if (j.contains("friction")) {
    const auto& f = j.at("friction");
    c.friction.coulomb = f.value("coulomb", c.friction.coulomb);
    c.friction.viscous = f.value("viscous", c.friction.viscous);
    c.friction.presliding_scale = f.value("presliding_scale", c.friction.presliding_scale);
    c.friction.viscous_lag = f.value("viscous_lag", c.friction.viscous_lag);
    c.friction.stiffness_clamp = f.value("stiffness_clamp", c.friction.stiffness_clamp);
    c.friction.reversal_band = f.value("reversal_band", c.friction.reversal_band);
    c.friction.chain_rule = f.value("chain_rule", std::string("multiply_s")) == "divide_s"
                                ? StiffnessChainRule::divide_s
                                : StiffnessChainRule::multiply_s;
    c.friction.static_viscous = f.value("static_viscous", c.friction.static_viscous);
    c.friction.lipschitz_bound = f.value("lipschitz_bound", c.friction.lipschitz_bound);
    c.friction.coulomb_max = f.value("coulomb_max", c.friction.coulomb_max);
    c.friction.viscous_max = f.value("viscous_max", c.friction.viscous_max);
  }
  if (j.contains("observer")) {
    const auto& o = j.at("observer");
    c.observer.enabled = o.value("enabled", c.observer.enabled);
    c.observer.rho = o.value("rho", c.observer.rho);
    c.observer.model = o.value("model", std::string("lag")) == "static_viscous"
                           ? ObserverModel::static_viscous
                           : ObserverModel::lag;
    c.observer.omega_co_hz = o.value("omega_co_hz", c.observer.omega_co_hz);
    if (o.contains("gains_override")) {
      ObserverGains g;
      g.L1 = o.at("gains_override").value("L1", 0.0);
      g.L2 = o.at("gains_override").value("L2", 0.0);
      g.rho = o.at("gains_override").value("rho", 0.0);
      c.observer.gains_override = g;
    }
    if (o.contains("divergence")) {
      const auto& d = o.at("divergence");
      c.observer.divergence.velocity_bound =
          d.value("velocity_bound", c.observer.divergence.velocity_bound);
      c.observer.divergence.force_bound = d.value("force_bound", c.observer.divergence.force_bound);
      c.observer.divergence.factor = d.value("factor", c.observer.divergence.factor);
      c.observer.divergence.hold_time = d.value("hold_time", c.observer.divergence.hold_time);
    }
  }
  if (j.contains("controller")) {
    const auto& ct = j.at("controller");
    c.controller.pid.gains.kp = ct.value("kp", 0.0);
    c.controller.pid.gains.ki = ct.value("ki", 0.0);
    c.controller.pid.gains.kd = ct.value("kd", 0.0);
    c.controller.pid.deriv_filter_omega =
        2.0 * std::numbers::pi * ct.value("deriv_filter_hz", 100.0);
    c.controller.pid.anti_windup = ct.value("anti_windup", false);
    c.controller.pid.output_limit = ct.value("output_limit", 10.0);
    if (ct.contains("design_max_S")) c.controller.design_max_S = ct.at("design_max_S").get<double>();
  }
  if (j.contains("input")) {
    const auto& in = j.at("input");
    const std::string t = in.value("type", std::string("none"));
    c.input.type = t == "noise" ? InputDriveConfig::Type::noise
                   : t == "hold_velocity" ? InputDriveConfig::Type::hold_velocity
                                          : InputDriveConfig::Type::none;
    c.input.noise_std_volts = in.value("noise_std_volts", c.input.noise_std_volts);
    c.input.noise_cutoff_hz = in.value("noise_cutoff_hz", c.input.noise_cutoff_hz);
    c.input.hold_velocity = in.value("hold_velocity", c.input.hold_velocity);
  }
  if (j.contains("output_noise")) {
    const auto& on = j.at("output_noise");
    const std::string t = on.value("type", std::string("none"));
    c.output_noise.type = t == "gaussian" ? OutputNoiseConfig::Type::gaussian
                          : t == "sine" ? OutputNoiseConfig::Type::sine
                                        : OutputNoiseConfig::Type::none;
    c.output_noise.std = on.value("std", c.output_noise.std);
    c.output_noise.cutoff_hz = on.value("cutoff_hz", c.output_noise.cutoff_hz);
    c.output_noise.amplitude = on.value("amplitude", c.output_noise.amplitude);
    c.output_noise.freq_hz = on.value("freq_hz", c.output_noise.freq_hz);
  }
  if (j.contains("reference")) {
    const auto& r = j.at("reference");
    const std::string t = r.value("type", std::string("positioning"));
    c.reference.type = t == "chirp" ? ReferenceSection::Type::chirp
                       : t == "constant_velocity" ? ReferenceSection::Type::constant_velocity
                                                  : ReferenceSection::Type::positioning;
    if (r.contains("positioning")) {
      const auto& p = r.at("positioning");
      c.reference.positioning.start = p.value("start", 0.0);
      if (p.contains("segments")) {
        c.reference.positioning.segments.clear();
        for (const auto& s : p.at("segments")) {
          PositioningSegment seg;
          seg.target = s.value("target", 0.0);
          seg.move_time = s.value("move_time", 0.5);
          seg.hold_time = s.value("hold_time", 2.0);
          c.reference.positioning.segments.push_back(seg);
        }
      }
    }
    if (r.contains("chirp")) {
      const auto& ch = r.at("chirp");
      c.reference.chirp.f0_hz = ch.value("f0_hz", c.reference.chirp.f0_hz);
      c.reference.chirp.f1_hz = ch.value("f1_hz", c.reference.chirp.f1_hz);
      c.reference.chirp.duration = ch.value("duration", c.reference.chirp.duration);
      c.reference.chirp.velocity_limit =
          ch.value("velocity_limit", c.reference.chirp.velocity_limit);
    }
    if (r.contains("constant_velocity"))
      c.reference.constant_velocity.v0 =
          r.at("constant_velocity").value("v0", c.reference.constant_velocity.v0);
  }
  c.encoder_resolution = j.value("encoder_resolution", 0.0);
  if (j.contains("scan")) {
    c.scan_rho = j.at("scan").value("rho", c.scan_rho);
    c.scan_samples = j.at("scan").value("samples", c.scan_samples);
  }
  return c;
}

}  // namespace

ScenarioConfig scenario_from_json(const std::string& text) {
  return from_json_impl(json::parse(text));
}

ScenarioConfig scenario_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

std::string scenario_to_json(const ScenarioConfig& cfg) { return to_json_impl(cfg).dump(2); }

void apply_override(ScenarioConfig& cfg, const std::string& pointer_assignment) {
  const auto eq = pointer_assignment.find('=');
  if (eq == std::string::npos || pointer_assignment.empty() || pointer_assignment[0] != '/')
    throw std::invalid_argument("override must look like /section/key=value");
  const std::string ptr = pointer_assignment.substr(0, eq);
  const std::string value = pointer_assignment.substr(eq + 1);
  json j = to_json_impl(cfg);
  json parsed;
  if (value == "true" || value == "false") {
    parsed = value == "true";
  } else {
    try {
      std::size_t pos = 0;
      const double d = std::stod(value, &pos);
      if (pos == value.size())
        parsed = d;
      else
        parsed = value;
    } catch (const std::exception&) {
      parsed = value;
    }
  }
  j[json::json_pointer(ptr)] = parsed;
  cfg = from_json_impl(j);
}

}  // namespace fricobs
