#include "fricobs/control.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace fricobs {

PlantTF identify_plant_tf(const PlantParams& pp, const FrictionParams& fp) {
  return PlantTF{pp.input_gain / fp.viscous, pp.mass / fp.viscous};
}

std::vector<double> sensitivity_magnitude(const PlantTF& tf, const PidDesign& d,
                                          const std::vector<double>& omega_grid) {
  // With the plant pole canceled, S = H/(1 + H*C) reduces to
  //   S(s) = phi*Ti*s / ((tau*s + 1) * (Ti*s^2 + k*phi*Ti*s + k*phi)).
  std::vector<double> out;
  out.reserve(omega_grid.size());
  const double phi = tf.gain, tau = tf.time_constant;
  for (double w : omega_grid) {
    const std::complex<double> s(0.0, w);
    const std::complex<double> num = phi * d.Ti * s;
    const std::complex<double> den =
        (tau * s + 1.0) * (d.Ti * s * s + d.k * phi * d.Ti * s + d.k * phi);
    const double mag = std::abs(num / den);
    out.push_back(std::isfinite(mag) ? mag : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

namespace {

// |C(jw)H(jw)| = k*phi*sqrt(1 + (Ti*w)^2) / (Ti*w^2), strictly decreasing.
double open_loop_gain(double k_phi, double Ti, double w) {
  return k_phi * std::sqrt(1.0 + Ti * Ti * w * w) / (Ti * w * w);
}

double find_crossover(double k_phi, double Ti) {
  double lo = 1e-6, hi = 1e9;
  if (open_loop_gain(k_phi, Ti, lo) < 1.0 || open_loop_gain(k_phi, Ti, hi) > 1.0)
    throw std::runtime_error("design_pid: no 0 dB crossover in the search window");
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (open_loop_gain(k_phi, Ti, mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace

PidDesign design_pid(const PlantTF& tf, double max_S) {
  if (!(max_S > 0.0)) throw std::invalid_argument("design_pid: max_S must be > 0");
  if (!(tf.gain > 0.0) || !(tf.time_constant > 0.0))
    throw std::invalid_argument("design_pid: plant gain and time constant must be > 0");
  PidDesign d;
  d.max_S = max_S;
  d.k = 1.0 / max_S;
  d.Ti = tf.time_constant;
  const double k_phi = d.k * tf.gain;
  double ws = 0.0, phase = 0.0;
  for (int it = 0; it < 100; ++it) {
    ws = find_crossover(k_phi, d.Ti);
    phase = std::atan(d.Ti * ws);  // pi + angle(C*H) at the crossover
    const double t = std::tan(phase);
    const double Ti_next = t * t / (k_phi * std::sqrt(1.0 + t * t));
    d.iterations = it + 1;
    const double rel = std::fabs(Ti_next - d.Ti) / d.Ti;
    d.Ti = Ti_next;
    if (rel < 1e-9) break;
  }
  d.crossover = ws;
  d.phase_arg = phase;
  return d;
}

PidGains to_parallel_gains(const PidDesign& d, const PlantTF& tf) {
  PidGains g;
  g.kp = d.k * (d.Ti + tf.time_constant) / d.Ti;
  g.ki = d.k / d.Ti;
  g.kd = d.k * tf.time_constant;
  return g;
}

double pid_step(const PidConfig& cfg, PidState& st, double e, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("pid_step: dt must be > 0");
  if (st.first_sample) {
    st.prev_error = e;
    st.first_sample = false;
  }
  const double integral_next = st.integral + 0.5 * (e + st.prev_error) * dt;
  const double d_raw = (e - st.prev_error) / dt;
  const double alpha = 1.0 - std::exp(-cfg.deriv_filter_omega * dt);
  st.deriv_filtered += alpha * (d_raw - st.deriv_filtered);
  st.prev_error = e;

  const double u_trial =
      cfg.gains.kp * e + cfg.gains.ki * integral_next + cfg.gains.kd * st.deriv_filtered;
  if (cfg.anti_windup && std::fabs(u_trial) > cfg.output_limit) {
    // Clamp and hold the integral state while saturated.
    ++st.windup_events;
    const double u_held =
        cfg.gains.kp * e + cfg.gains.ki * st.integral + cfg.gains.kd * st.deriv_filtered;
    return std::clamp(u_held, -cfg.output_limit, cfg.output_limit);
  }
  st.integral = integral_next;
  return u_trial;
}

double compensated_input(double u_pid, double w3_est, double input_gain) {
  return u_pid + w3_est / input_gain;
}

}  // namespace fricobs
