#pragma once

#include <cstdint>

namespace fricobs {

/// How the displacement-domain stiffness dFc/dx is derived from the
/// z-domain derivative dFc/dz.  `multiply_s` is the default and follows
/// from z = s * integral(v) dt; `divide_s` reproduces the reciprocal
/// chain-rule reading and is kept as a documented switch.
enum class StiffnessChainRule { multiply_s, divide_s };

/// Physical friction constants.  All units SI.
struct FrictionParams {
  double coulomb = 0.35;             ///< C_f [N]
  double viscous = 21.1;             ///< sigma [N*s/m]
  double presliding_scale = 3000.0;  ///< s [1/m]
  double viscous_lag = 0.001;        ///< beta [s]
  double stiffness_clamp = 8000.0;   ///< kappa [N/m], cap on dFc/dx
  double reversal_band = 1e-5;       ///< v_eps [m/s], reversal detector hysteresis
  StiffnessChainRule chain_rule = StiffnessChainRule::multiply_s;
  bool static_viscous = false;       ///< beta->0 mode: F_v = sigma*v, no lag state

  // Optional bounds; 0 means unspecified.  Used by validate() only.
  double lipschitz_bound = 0.0;  ///< Phi [N/s]
  double coulomb_max = 0.0;
  double viscous_max = 0.0;

  /// Throws std::invalid_argument when a constant is out of range.
  void validate() const;

  double sigma_over_beta() const { return viscous / viscous_lag; }
};

/// Hysteresis memory of the pre-sliding regime.
///
/// `distance` is the scaled displacement z accumulated since the last
/// reversal, `reversal_memory` the normalized friction value latched at
/// that reversal.  `direction` holds the sign of the last velocity that
/// exceeded the reversal band.
struct PreslidingState {
  double distance = 0.0;
  double reversal_memory = 0.0;
  int direction = +1;
  bool saturated = false;
};

/// Current dynamic friction force components.
struct FrictionState {
  double coulomb_force = 0.0;  ///< F_c [N], |F_c| <= C_f always
  double viscous_force = 0.0;  ///< F_v [N]
};

/// Sign of `velocity` with the reversal hysteresis band applied: inside
/// the band the previously held direction is kept.
int velocity_sign(const FrictionParams& p, const PreslidingState& st, double velocity);

/// Normalized pre-sliding friction map
///   f_p = |direction - f_r| * z * (1 - ln|z|) + f_r.
/// Requires |z| <= 1 (throws otherwise); the z->0 singularity resolves to f_r.
double presliding_map(double z, double f_r, int direction);

/// Normalized Coulomb value for the current state: the pre-sliding map
/// while |z| <= 1, clamped into [-1, 1], else the saturated sign.
double normalized_coulomb(const PreslidingState& st, int velocity_sign);

/// Overall Coulomb friction force C_f * f_p (pre-sliding) or
/// C_f * sign (gross sliding); continuous across |z| = 1.
double coulomb_force(const FrictionParams& p, const PreslidingState& st, int velocity_sign);

/// Instantaneous pre-sliding stiffness dFc/dx, clamped into [0, kappa].
/// Returns kappa at z = 0 (the analytic value diverges) and 0 outside
/// the pre-sliding region.
double presliding_stiffness(const FrictionParams& p, const PreslidingState& st, int velocity_sign);

/// One step of the pre-sliding distance integral z += s*v*dt with
/// reversal detection: when v crosses the band against the held
/// direction, the branch memory f_r is latched and z resets to 0.
PreslidingState advance_presliding(const FrictionParams& p, PreslidingState st, double velocity,
                                   double dt);

/// One step of the frictional-lag ODE dF_v/dt = (sigma*v - F_v)/beta,
/// exact first-order discretization.  In static_viscous mode returns
/// sigma*v directly.
double viscous_step(const FrictionParams& p, double f_v, double velocity, double dt);

/// Explicit-Euler variant of viscous_step, kept for cross-checks.
double viscous_step_euler(const FrictionParams& p, double f_v, double velocity, double dt);

/// f = F_c + F_v.
double total_friction(double f_c, double f_v);

}  // namespace fricobs
