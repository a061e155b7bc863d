#include "fricobs/friction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fricobs {

void FrictionParams::validate() const {
  if (!(coulomb > 0.0)) throw std::invalid_argument("friction: coulomb coefficient must be > 0");
  if (!(viscous > 0.0)) throw std::invalid_argument("friction: viscous coefficient must be > 0");
  if (!(presliding_scale > 0.0))
    throw std::invalid_argument("friction: presliding scale must be > 0");
  if (!static_viscous && !(viscous_lag > 0.0))
    throw std::invalid_argument("friction: viscous lag must be > 0");
  if (!(stiffness_clamp > 0.0))
    throw std::invalid_argument("friction: stiffness clamp must be > 0");
  if (coulomb_max > 0.0 && !(coulomb < coulomb_max))
    throw std::invalid_argument("friction: coulomb coefficient exceeds its upper bound");
  if (viscous_max > 0.0 && !(viscous < viscous_max))
    throw std::invalid_argument("friction: viscous coefficient exceeds its upper bound");
}

int velocity_sign(const FrictionParams& p, const PreslidingState& st, double velocity) {
  if (velocity > p.reversal_band) return +1;
  if (velocity < -p.reversal_band) return -1;
  return st.direction;
}

double presliding_map(double z, double f_r, int direction) {
  if (std::fabs(z) > 1.0) throw std::invalid_argument("presliding_map: |z| > 1, saturate first");
  if (z == 0.0) return f_r;  // limit of z*(1 - ln|z|) at 0
  return std::fabs(static_cast<double>(direction) - f_r) * z * (1.0 - std::log(std::fabs(z))) +
         f_r;
}

double normalized_coulomb(const PreslidingState& st, int velocity_sign) {
  const int dir = velocity_sign == 0 ? st.direction : velocity_sign;
  if (std::fabs(st.distance) > 1.0) return static_cast<double>(dir);
  return std::clamp(presliding_map(st.distance, st.reversal_memory, dir), -1.0, 1.0);
}

double coulomb_force(const FrictionParams& p, const PreslidingState& st, int velocity_sign) {
  return p.coulomb * normalized_coulomb(st, velocity_sign);
}

double presliding_stiffness(const FrictionParams& p, const PreslidingState& st,
                            int velocity_sign) {
  const double z = st.distance;
  if (std::fabs(z) > 1.0) return 0.0;  // saturated: dFc/dx = 0
  if (z == 0.0) return p.stiffness_clamp;
  const int dir = velocity_sign == 0 ? st.direction : velocity_sign;
  const double branch = std::fabs(static_cast<double>(dir) - st.reversal_memory);
  const double dz = -p.coulomb * branch * std::log(std::fabs(z));
  const double dx = p.chain_rule == StiffnessChainRule::multiply_s ? dz * p.presliding_scale
                                                                   : dz / p.presliding_scale;
  return std::clamp(dx, 0.0, p.stiffness_clamp);
}

PreslidingState advance_presliding(const FrictionParams& p, PreslidingState st, double velocity,
                                   double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("advance_presliding: dt must be > 0");
  const int sign = velocity_sign(p, st, velocity);
  if (sign != st.direction) {
    // Motion reversal: latch the branch value, restart the distance state.
    const double captured = normalized_coulomb(st, st.direction);
    st.reversal_memory = std::clamp(captured, -1.0, 1.0);
    st.distance = 0.0;
    st.direction = sign;
  }
  st.distance += p.presliding_scale * velocity * dt;
  st.saturated = std::fabs(st.distance) > 1.0;
  return st;
}

double viscous_step(const FrictionParams& p, double f_v, double velocity, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("viscous_step: dt must be > 0");
  const double target = p.viscous * velocity;
  if (p.static_viscous) return target;
  return target + (f_v - target) * std::exp(-dt / p.viscous_lag);
}

double viscous_step_euler(const FrictionParams& p, double f_v, double velocity, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("viscous_step: dt must be > 0");
  if (p.static_viscous) return p.viscous * velocity;
  return f_v + dt / p.viscous_lag * (p.viscous * velocity - f_v);
}

double total_friction(double f_c, double f_v) { return f_c + f_v; }

}  // namespace fricobs
