#pragma once

#include <vector>

#include "fricobs/friction.hpp"
#include "fricobs/plant.hpp"

namespace fricobs {

/// Second-order approximation H(s) = phi / (s * (tau*s + 1)) of the
/// motion plant, input in volts.
struct PlantTF {
  double gain = 0.0;           ///< phi [(m/s)/V]
  double time_constant = 0.0;  ///< tau [s]
};

/// phi = K/sigma, tau = m/sigma.
PlantTF identify_plant_tf(const PlantParams& pp, const FrictionParams& fp);

/// Result of the sensitivity-bound loop shaping with the pole-canceling
/// controller C(s) = k*(tau*s + 1)*(Ti*s + 1) / (Ti*s).
struct PidDesign {
  double k = 0.0;          ///< total gain, k = 1/max_S
  double Ti = 0.0;         ///< integrator time constant [s]
  double max_S = 0.0;      ///< design bound on |S|
  double crossover = 0.0;  ///< open-loop 0 dB frequency [rad/s]
  double phase_arg = 0.0;  ///< Phi = pi + angle(C*H) at the crossover [rad]
  int iterations = 0;
};

/// |S(jw)| = |H / (1 + H*C)| evaluated pointwise on the grid.  Grid
/// points where the expression is singular are returned as NaN.
std::vector<double> sensitivity_magnitude(const PlantTF& tf, const PidDesign& d,
                                          const std::vector<double>& omega_grid);

/// Fixed-point design: k = 1/max_S, Ti initialized to tau, then the 0 dB
/// crossover of |C*H| is located by bisection and Ti updated from
/// Ti = tan^2(Phi) / (k*phi*sqrt(1 + tan^2(Phi))) until stationary.
PidDesign design_pid(const PlantTF& tf, double max_S);

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
};

/// kp = k*(Ti + tau)/Ti, ki = k/Ti, kd = k*tau.
PidGains to_parallel_gains(const PidDesign& d, const PlantTF& tf);

/// Parallel-form discrete PID with trapezoidal integral and first-order
/// filtered derivative.  Optional clamping anti-windup (integration
/// freezes while the output is saturated), disabled by default.
struct PidConfig {
  PidGains gains;
  double deriv_filter_omega = 2.0 * 3.14159265358979323846 * 100.0;  ///< [rad/s]
  bool anti_windup = false;
  double output_limit = 10.0;  ///< [V], used only when anti_windup is on
};

struct PidState {
  double integral = 0.0;
  double prev_error = 0.0;
  double deriv_filtered = 0.0;
  bool first_sample = true;
  long windup_events = 0;
};

double pid_step(const PidConfig& cfg, PidState& st, double e, double dt);

/// u = u_pid + K^-1 * w3_est: adds the filtered friction estimate,
/// converted to input units, to the feedback output.
double compensated_input(double u_pid, double w3_est, double input_gain);

}  // namespace fricobs
