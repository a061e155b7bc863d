#pragma once

#include <stdexcept>
#include <string>

#include "fricobs/friction.hpp"

namespace fricobs {

/// 1-DOF motion system m*xddot + f(xdot) = u.  The input u is already
/// compensated for gravity and known load forces.
struct PlantParams {
  double mass = 0.538;        ///< m [kg]
  double input_gain = 3.28;   ///< K [N/V]
  double gravity_load = 5.27; ///< G [N], feed-forward pre-compensated by the harness

  void validate() const;
};

struct PlantState {
  double position = 0.0;
  double velocity = 0.0;
  FrictionState friction;
  PreslidingState presliding;

  double friction_total() const {
    return total_friction(friction.coulomb_force, friction.viscous_force);
  }
};

/// Time-varying state-space form for w = (x, xdot, f).  Only A[2][1]
/// carries the state-dependent term dFc/dx + sigma/beta; C = (1, 0, 0).
struct StateSpace {
  double A[3][3];
  double B[3];
  double C[3];
};

/// Thrown when a simulated or observed state turns non-finite.
struct SimulationFault : std::runtime_error {
  long step;
  explicit SimulationFault(const std::string& what, long step_index)
      : std::runtime_error(what + " at step " + std::to_string(step_index)), step(step_index) {}
};

bool state_finite(const PlantState& s);

/// State-space matrices with A32 = dFc/dx + sigma/beta (clamped into
/// [sigma/beta, kappa + sigma/beta]).
StateSpace build_state_space(const PlantParams& pp, const FrictionParams& fp,
                             const PreslidingState& st, int velocity_sign);

/// beta->0 variant: with F_v = sigma*xdot the friction state obeys
/// df/dt = (dFc/dx)*xdot + (sigma/m)*(u - f), so A32 = dFc/dx,
/// A33 = -sigma/m and B3 = sigma/m.
StateSpace build_state_space_static(const PlantParams& pp, const FrictionParams& fp,
                                    const PreslidingState& st, int velocity_sign);

/// One fixed step of m*vdot = u - f(v), semi-implicit Euler.  The
/// friction force is evaluated at the step's start state; the hysteresis
/// and lag substates advance with the post-update velocity so that z
/// stays consistent with the integrated displacement.
PlantState plant_step(const PlantParams& pp, const FrictionParams& fp, PlantState s, double u,
                      double dt);

/// Classical RK4 step for smooth segments.  Requires coulomb == 0 (the
/// hysteresis branch logic is not differentiable); supports both the
/// lag and the static viscous model.
PlantState plant_step_rk4(const PlantParams& pp, const FrictionParams& fp, PlantState s, double u,
                          double dt);

enum class PreslidingCurve {
  logarithmic,     ///< z*(1 - ln|z|) transition, unbounded stiffness at reversal
  clamped_linear,  ///< linear spring of slope kappa from the reversal anchor
};

struct StopResult {
  bool stopped = false;
  double stop_time = 0.0;
};

/// Simulates the autonomous system (u = 0) from velocity v0 and returns
/// the first time |v| drops below the reversal band.  A missed stop
/// within the horizon is reported, not thrown.
StopResult autonomous_stop_test(const PlantParams& pp, const FrictionParams& fp, double v0,
                                double horizon, double dt,
                                PreslidingCurve curve = PreslidingCurve::logarithmic);

}  // namespace fricobs
