#include "fricobs/plant.hpp"

#include <algorithm>
#include <cmath>

namespace fricobs {

void PlantParams::validate() const {
  if (!(mass > 0.0)) throw std::invalid_argument("plant: mass must be > 0");
  if (!(input_gain > 0.0)) throw std::invalid_argument("plant: input gain must be > 0");
}

bool state_finite(const PlantState& s) {
  return std::isfinite(s.position) && std::isfinite(s.velocity) &&
         std::isfinite(s.friction.coulomb_force) && std::isfinite(s.friction.viscous_force) &&
         std::isfinite(s.presliding.distance);
}

StateSpace build_state_space(const PlantParams& pp, const FrictionParams& fp,
                             const PreslidingState& st, int velocity_sign) {
  StateSpace ss{};
  const double stiffness = presliding_stiffness(fp, st, velocity_sign);
  ss.A[0][1] = 1.0;
  ss.A[1][2] = -1.0 / pp.mass;
  ss.A[2][1] = stiffness + fp.sigma_over_beta();
  ss.B[1] = 1.0 / pp.mass;
  ss.C[0] = 1.0;
  return ss;
}

StateSpace build_state_space_static(const PlantParams& pp, const FrictionParams& fp,
                                    const PreslidingState& st, int velocity_sign) {
  StateSpace ss{};
  const double stiffness = presliding_stiffness(fp, st, velocity_sign);
  ss.A[0][1] = 1.0;
  ss.A[1][2] = -1.0 / pp.mass;
  ss.A[2][1] = stiffness;
  ss.A[2][2] = -fp.viscous / pp.mass;
  ss.B[1] = 1.0 / pp.mass;
  ss.B[2] = fp.viscous / pp.mass;
  ss.C[0] = 1.0;
  return ss;
}

PlantState plant_step(const PlantParams& pp, const FrictionParams& fp, PlantState s, double u,
                      double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("plant_step: dt must be > 0");
  const double f_now = s.friction_total();
  const double v_next = s.velocity + dt * (u - f_now) / pp.mass;
  s.position += dt * v_next;
  s.velocity = v_next;
  s.presliding = advance_presliding(fp, s.presliding, v_next, dt);
  s.friction.coulomb_force = coulomb_force(fp, s.presliding, velocity_sign(fp, s.presliding, v_next));
  s.friction.viscous_force = viscous_step(fp, s.friction.viscous_force, v_next, dt);
  return s;
}

namespace {

struct Deriv {
  double dx, dv, dfv;
};

Deriv smooth_deriv(const PlantParams& pp, const FrictionParams& fp, double v, double f_v,
                   double u) {
  Deriv d{};
  const double fv_now = fp.static_viscous ? fp.viscous * v : f_v;
  d.dx = v;
  d.dv = (u - fv_now) / pp.mass;
  d.dfv = fp.static_viscous ? 0.0 : (fp.viscous * v - f_v) / fp.viscous_lag;
  return d;
}

}  // namespace

PlantState plant_step_rk4(const PlantParams& pp, const FrictionParams& fp, PlantState s, double u,
                          double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("plant_step_rk4: dt must be > 0");
  if (fp.coulomb != 0.0)
    throw std::invalid_argument("plant_step_rk4: only valid for coulomb == 0 segments");
  const double x0 = s.position, v0 = s.velocity, f0 = s.friction.viscous_force;
  const Deriv k1 = smooth_deriv(pp, fp, v0, f0, u);
  const Deriv k2 = smooth_deriv(pp, fp, v0 + 0.5 * dt * k1.dv, f0 + 0.5 * dt * k1.dfv, u);
  const Deriv k3 = smooth_deriv(pp, fp, v0 + 0.5 * dt * k2.dv, f0 + 0.5 * dt * k2.dfv, u);
  const Deriv k4 = smooth_deriv(pp, fp, v0 + dt * k3.dv, f0 + dt * k3.dfv, u);
  s.position = x0 + dt / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  s.velocity = v0 + dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
  if (fp.static_viscous) {
    s.friction.viscous_force = fp.viscous * s.velocity;
  } else {
    s.friction.viscous_force = f0 + dt / 6.0 * (k1.dfv + 2.0 * k2.dfv + 2.0 * k3.dfv + k4.dfv);
  }
  s.friction.coulomb_force = 0.0;
  return s;
}

namespace {

/// Linear-spring pre-sliding force: slope kappa from the anchor latched
/// at the last reversal, clamped at +-C_f.
struct LinearSpringFriction {
  double anchor_position = 0.0;
  double anchor_force = 0.0;
  int direction = +1;

  double force(const FrictionParams& fp, double x) const {
    const double raw = anchor_force + fp.stiffness_clamp * (x - anchor_position);
    return std::clamp(raw, -fp.coulomb, fp.coulomb);
  }

  void maybe_reverse(const FrictionParams& fp, double x, double v) {
    int sign = direction;
    if (v > fp.reversal_band) sign = +1;
    if (v < -fp.reversal_band) sign = -1;
    if (sign != direction) {
      anchor_force = force(fp, x);
      anchor_position = x;
      direction = sign;
    }
  }
};

}  // namespace

StopResult autonomous_stop_test(const PlantParams& pp, const FrictionParams& fp, double v0,
                                double horizon, double dt, PreslidingCurve curve) {
  StopResult r{};
  if (std::fabs(v0) < fp.reversal_band) {
    r.stopped = true;
    return r;
  }
  const long n = static_cast<long>(horizon / dt);
  if (curve == PreslidingCurve::logarithmic) {
    PlantState s{};
    s.velocity = v0;
    s.presliding.direction = v0 > 0.0 ? +1 : -1;
    s.friction.viscous_force = fp.viscous * v0;
    for (long k = 0; k < n; ++k) {
      s = plant_step(pp, fp, s, 0.0, dt);
      if (!state_finite(s)) throw SimulationFault("autonomous stop: non-finite state", k);
      if (std::fabs(s.velocity) < fp.reversal_band) {
        r.stopped = true;
        r.stop_time = (k + 1) * dt;
        return r;
      }
    }
  } else {
    double x = 0.0, v = v0, fv = fp.viscous * v0;
    LinearSpringFriction spring;
    spring.direction = v0 > 0.0 ? +1 : -1;
    for (long k = 0; k < n; ++k) {
      const double f = spring.force(fp, x) + fv;
      const double v_next = v + dt * (-f) / pp.mass;
      x += dt * v_next;
      v = v_next;
      spring.maybe_reverse(fp, x, v);
      fv = viscous_step(fp, fv, v, dt);
      if (!std::isfinite(v)) throw SimulationFault("autonomous stop: non-finite state", k);
      if (std::fabs(v) < fp.reversal_band) {
        r.stopped = true;
        r.stop_time = (k + 1) * dt;
        return r;
      }
    }
  }
  r.stopped = false;
  r.stop_time = horizon;
  return r;
}

}  // namespace fricobs
