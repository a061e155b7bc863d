#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "fricobs/plant.hpp"

namespace fricobs {

/// Which friction-state dynamics the observer model assumes.
/// `lag` is the full form with the first-order viscous lag folded into
/// A32 = dFc/dx + sigma/beta.  `static_viscous` is the beta->0 variant
/// (F_v = sigma*v): A32 = dFc/dx, A33 = -sigma/m, B3 = sigma/m, with the
/// gain design adjusted accordingly (see design_gains_static).
enum class ObserverModel { lag, static_viscous };

/// Block partition of the (A, B) pair separating the measured state
/// wbar = w1 from the unmeasured y = (w2, w3).
struct RegularFormBlocks {
  double a11;
  double a12[2];
  double a21[2];
  double a22[2][2];
  double b_wbar;
  double b_y[2];
};

RegularFormBlocks regular_form(const StateSpace& ss);

/// Reassembles the full state-space from its blocks (partition identity).
StateSpace assemble_state_space(const RegularFormBlocks& b);

struct ObserverGains {
  double L1 = 0.0;  ///< [1/s]
  double L2 = 0.0;  ///< [N/m]
  double rho = 0.0; ///< design parameter; > 1 for stable designs
};

/// Gain synthesis for the lag model:
///   L1 = 2*rho*sqrt(kappa/m),  L2 = sigma/beta + kappa*(1 - rho^2).
/// rho <= 1 is allowed (reproduces the divergence demonstration) but
/// violates the stability inequalities.
ObserverGains design_gains(const FrictionParams& fp, double mass, double rho);

/// Gain synthesis for the static-viscous (beta->0) model, placing the
/// same eigenvalue family -rho*sqrt(kappa/m) +- sqrt((kappa-k)/m):
///   L1 = 2*rho*sqrt(kappa/m) - sigma/m,  L2 = sigma*L1 + kappa*(1 - rho^2).
ObserverGains design_gains_static(const FrictionParams& fp, double mass, double rho);

struct EigenPair {
  std::complex<double> lambda1;  ///< fast root
  std::complex<double> lambda2;  ///< slow (dominant) root
  bool real = false;
};

/// Eigenvalues of the observer error matrix for the lag model:
///   lambda = -1/2 * (L1 +- sqrt(L1^2 + 4/m*(L2 - stiffness - sigma/beta))).
/// A discriminant within rounding noise of zero is treated as a double
/// real pole.
EigenPair observer_eigenvalues(const ObserverGains& g, double mass, double stiffness,
                               double sigma_over_beta);

/// Eigenvalues of the static-viscous error matrix
///   lambda^2 + (L1 + sigma/m)*lambda + (sigma*L1 + stiffness - L2)/m = 0.
EigenPair observer_eigenvalues_static(const ObserverGains& g, double mass, double stiffness,
                                      double sigma);

struct StabilityReport {
  bool gain1_ok = false;  ///< L1 > 0
  bool gain2_ok = false;  ///< L2 < sigma/beta (lag) or L2 < sigma*L1 (static)
  EigenPair at_reversal;  ///< stiffness = kappa
  EigenPair at_sliding;   ///< stiffness = 0
  double dominant_pole = 0.0;          ///< max real part over the stiffness range
  bool all_real_negative = false;      ///< swept over [0, kappa]
  double ignatyev_margin_min = 0.0;    ///< min of a0dot + 2*a0*a1 (filled from a run)
  double coeff_bound_max = 0.0;        ///< max of |a0dot| + |a1|
  bool margins_evaluated = false;
};

/// Static part of the stability audit: the gain inequalities plus an
/// eigenvalue sweep over stiffness in [0, kappa].
StabilityReport check_stability(const ObserverGains& g, const FrictionParams& fp, double mass,
                                ObserverModel model = ObserverModel::lag,
                                std::size_t sweep_samples = 1000);

/// Direct feedthrough of measurement noise into the friction estimate,
/// kappa*(rho^2 - 1).
double noise_gain(double kappa, double rho);

struct ObserverState {
  double y[2] = {0.0, 0.0};       ///< transformed estimate
  double w2_est = 0.0;            ///< back-transformed velocity estimate [m/s]
  double w3_est = 0.0;            ///< back-transformed friction estimate [N]
};

/// One forward-Euler step of the reduced-order observer
///   dy/dt = (A22 - L*A12)*y + (By - L*Bwbar)*u
///         + (A21 - L*A11 + A22*L - L*A12*L)*wbar,
/// followed by the back transformation (w2, w3) = y + L*wbar.
ObserverState observer_step(const RegularFormBlocks& b, const ObserverGains& g, ObserverState obs,
                            double u, double w_bar, double dt);

struct IgnatyevMargins {
  double coeff_bound_max = 0.0;  ///< max over t of |a0dot| + |a1|
  double margin_min = 0.0;       ///< min over t of a0dot + 2*a0*a1
};

/// Empirical witnesses for the two coefficient conditions of the
/// time-varying stability criterion, evaluated along a sampled a0(t)
/// trajectory.  `a0_dot_analytic` may supply exact derivatives where the
/// chain-rule expression is defined (NaN elsewhere); central finite
/// differences fill the gaps.  Throws on an empty trajectory.
IgnatyevMargins ignatyev_margins(const std::vector<double>& a0,
                                 const std::vector<double>& a0_dot_analytic, double a1, double dt);

/// Critically damped second-order low-pass
///   yddot + 2*wco*ydot + wco^2*y = wco^2*x,
/// discretized with the bilinear transform (unit DC gain preserved).
class LowPass2 {
 public:
  LowPass2() = default;
  LowPass2(double omega_co, double dt);
  double step(double x);
  double value() const { return last_; }
  void reset();

 private:
  double b0_ = 1.0, b1_ = 0.0, b2_ = 0.0, a1_ = 0.0, a2_ = 0.0;
  double s1_ = 0.0, s2_ = 0.0;  // direct form II transposed
  double last_ = 0.0;
};

struct DivergenceConfig {
  double velocity_bound = 0.1;  ///< feasible |v| range [m/s]
  double force_bound = 2.5;     ///< feasible |f| range [N]
  double factor = 10.0;         ///< declare beyond factor * bound
  double hold_time = 0.1;       ///< sustained exceedance required [s]
};

/// Declares divergence when the bound-scaled estimate magnitude exceeds
/// `factor` continuously for `hold_time`.
class DivergenceDetector {
 public:
  DivergenceDetector() = default;
  DivergenceDetector(const DivergenceConfig& cfg, double dt) : cfg_(cfg), dt_(dt) {}
  void update(double w2_est, double w3_est, double t);
  bool diverged() const { return diverged_; }
  double onset_time() const { return onset_; }

 private:
  DivergenceConfig cfg_;
  double dt_ = 1e-4;
  double exceed_since_ = -1.0;
  bool diverged_ = false;
  double onset_ = -1.0;
};

/// Full observer composition as deployed against a plant: rebuilds the
/// system blocks each step from its own pre-sliding replica (driven by
/// the low-pass-filtered velocity estimate), steps the reduced-order
/// law, filters the friction estimate and tracks divergence.
class ObserverRunner {
 public:
  struct Output {
    double w2_est = 0.0;       ///< raw velocity estimate
    double w3_est = 0.0;       ///< raw friction estimate
    double v_filtered = 0.0;   ///< low-passed w2_est (drives the replica)
    double f_filtered = 0.0;   ///< low-passed w3_est (usable friction output)
    double stiffness = 0.0;    ///< replica stiffness fed into A32
    double a0 = 0.0;           ///< characteristic-polynomial coefficient
    double a0_dot = 0.0;       ///< analytic derivative, NaN where undefined
  };

  ObserverRunner(const PlantParams& pp, const FrictionParams& fp, const ObserverGains& g,
                 ObserverModel model, double omega_co, double dt,
                 const DivergenceConfig& div = DivergenceConfig{});

  /// Current-sample outputs: back-transformed estimates, their filtered
  /// versions, and the replica stiffness that will enter this step's
  /// system blocks.  Call once per sample, before advance().
  Output observe(double position_meas);

  /// Euler update of the transformed estimate with the blocks prepared
  /// by the preceding observe() call.
  void advance(double u, double position_meas);

  /// observe() followed by advance() for open-loop use.
  Output step(double u, double position_meas);

  const ObserverState& state() const { return obs_; }
  const PreslidingState& replica() const { return replica_; }
  const ObserverGains& gains() const { return gains_; }
  double a1() const;
  bool diverged() const { return detector_.diverged(); }
  double divergence_onset() const { return detector_.onset_time(); }

 private:
  PlantParams pp_;
  FrictionParams fp_;
  ObserverGains gains_;
  ObserverModel model_;
  double dt_;
  ObserverState obs_;
  PreslidingState replica_;
  RegularFormBlocks blocks_{};
  LowPass2 vel_filter_;
  LowPass2 force_filter_;
  DivergenceDetector detector_;
  double t_ = 0.0;
};

}  // namespace fricobs
