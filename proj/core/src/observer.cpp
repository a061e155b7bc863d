#include "fricobs/observer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fricobs {

RegularFormBlocks regular_form(const StateSpace& ss) {
  RegularFormBlocks b{};
  b.a11 = ss.A[0][0];
  b.a12[0] = ss.A[0][1];
  b.a12[1] = ss.A[0][2];
  b.a21[0] = ss.A[1][0];
  b.a21[1] = ss.A[2][0];
  b.a22[0][0] = ss.A[1][1];
  b.a22[0][1] = ss.A[1][2];
  b.a22[1][0] = ss.A[2][1];
  b.a22[1][1] = ss.A[2][2];
  b.b_wbar = ss.B[0];
  b.b_y[0] = ss.B[1];
  b.b_y[1] = ss.B[2];
  return b;
}

StateSpace assemble_state_space(const RegularFormBlocks& b) {
  StateSpace ss{};
  ss.A[0][0] = b.a11;
  ss.A[0][1] = b.a12[0];
  ss.A[0][2] = b.a12[1];
  ss.A[1][0] = b.a21[0];
  ss.A[2][0] = b.a21[1];
  ss.A[1][1] = b.a22[0][0];
  ss.A[1][2] = b.a22[0][1];
  ss.A[2][1] = b.a22[1][0];
  ss.A[2][2] = b.a22[1][1];
  ss.B[0] = b.b_wbar;
  ss.B[1] = b.b_y[0];
  ss.B[2] = b.b_y[1];
  ss.C[0] = 1.0;
  return ss;
}

ObserverGains design_gains(const FrictionParams& fp, double mass, double rho) {
  if (!(fp.stiffness_clamp > 0.0) || !(mass > 0.0))
    throw std::invalid_argument("design_gains: kappa and mass must be > 0");
  if (!(rho > 0.0)) throw std::invalid_argument("design_gains: rho must be > 0");
  ObserverGains g;
  g.rho = rho;
  g.L1 = 2.0 * rho * std::sqrt(fp.stiffness_clamp / mass);
  g.L2 = fp.sigma_over_beta() + fp.stiffness_clamp * (1.0 - rho * rho);
  return g;
}

ObserverGains design_gains_static(const FrictionParams& fp, double mass, double rho) {
  if (!(fp.stiffness_clamp > 0.0) || !(mass > 0.0))
    throw std::invalid_argument("design_gains_static: kappa and mass must be > 0");
  if (!(rho > 0.0)) throw std::invalid_argument("design_gains_static: rho must be > 0");
  ObserverGains g;
  g.rho = rho;
  g.L1 = 2.0 * rho * std::sqrt(fp.stiffness_clamp / mass) - fp.viscous / mass;
  g.L2 = fp.viscous * g.L1 + fp.stiffness_clamp * (1.0 - rho * rho);
  return g;
}

namespace {

EigenPair quadratic_eigenvalues(double p, double q) {
  // lambda^2 + p*lambda + q = 0
  EigenPair e;
  const double disc = p * p - 4.0 * q;
  const double scale = std::max({p * p, std::fabs(4.0 * q), 1.0});
  if (std::fabs(disc) <= 1e-9 * scale) {
    e.real = true;
    e.lambda1 = e.lambda2 = -0.5 * p;
  } else if (disc > 0.0) {
    e.real = true;
    const double r = std::sqrt(disc);
    e.lambda1 = -0.5 * (p + r);
    e.lambda2 = -0.5 * (p - r);
  } else {
    e.real = false;
    const double r = std::sqrt(-disc);
    e.lambda1 = std::complex<double>(-0.5 * p, -0.5 * r);
    e.lambda2 = std::complex<double>(-0.5 * p, 0.5 * r);
  }
  return e;
}

}  // namespace

EigenPair observer_eigenvalues(const ObserverGains& g, double mass, double stiffness,
                               double sigma_over_beta) {
  return quadratic_eigenvalues(g.L1, (stiffness + sigma_over_beta - g.L2) / mass);
}

EigenPair observer_eigenvalues_static(const ObserverGains& g, double mass, double stiffness,
                                      double sigma) {
  return quadratic_eigenvalues(g.L1 + sigma / mass, (sigma * g.L1 + stiffness - g.L2) / mass);
}

StabilityReport check_stability(const ObserverGains& g, const FrictionParams& fp, double mass,
                                ObserverModel model, std::size_t sweep_samples) {
  StabilityReport rep;
  rep.gain1_ok = g.L1 > 0.0;
  rep.gain2_ok = model == ObserverModel::lag ? g.L2 < fp.sigma_over_beta()
                                             : g.L2 < fp.viscous * g.L1;
  const auto eig = [&](double k) {
    return model == ObserverModel::lag
               ? observer_eigenvalues(g, mass, k, fp.sigma_over_beta())
               : observer_eigenvalues_static(g, mass, k, fp.viscous);
  };
  rep.at_reversal = eig(fp.stiffness_clamp);
  rep.at_sliding = eig(0.0);
  rep.all_real_negative = true;
  rep.dominant_pole = -std::numeric_limits<double>::infinity();
  const std::size_t n = std::max<std::size_t>(sweep_samples, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = fp.stiffness_clamp * static_cast<double>(i) / static_cast<double>(n - 1);
    const EigenPair e = eig(k);
    const double re = std::max(e.lambda1.real(), e.lambda2.real());
    rep.dominant_pole = std::max(rep.dominant_pole, re);
    if (!e.real || re >= 0.0) rep.all_real_negative = false;
  }
  return rep;
}

double noise_gain(double kappa, double rho) { return kappa * (rho * rho - 1.0); }

ObserverState observer_step(const RegularFormBlocks& b, const ObserverGains& g, ObserverState obs,
                            double u, double w_bar, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("observer_step: dt must be > 0");
  const double L[2] = {g.L1, g.L2};

  // A22*L and the scalar A12*L
  const double a22L[2] = {b.a22[0][0] * L[0] + b.a22[0][1] * L[1],
                          b.a22[1][0] * L[0] + b.a22[1][1] * L[1]};
  const double a12L = b.a12[0] * L[0] + b.a12[1] * L[1];

  double ydot[2];
  for (int i = 0; i < 2; ++i) {
    const double atil_row[2] = {b.a22[i][0] - L[i] * b.a12[0], b.a22[i][1] - L[i] * b.a12[1]};
    const double bu = b.b_y[i] - L[i] * b.b_wbar;
    const double gw = b.a21[i] - L[i] * b.a11 + a22L[i] - L[i] * a12L;
    ydot[i] = atil_row[0] * obs.y[0] + atil_row[1] * obs.y[1] + bu * u + gw * w_bar;
  }
  obs.y[0] += dt * ydot[0];
  obs.y[1] += dt * ydot[1];
  obs.w2_est = obs.y[0] + g.L1 * w_bar;
  obs.w3_est = obs.y[1] + g.L2 * w_bar;
  return obs;
}

IgnatyevMargins ignatyev_margins(const std::vector<double>& a0,
                                 const std::vector<double>& a0_dot_analytic, double a1,
                                 double dt) {
  if (a0.empty()) throw std::invalid_argument("ignatyev_margins: empty trajectory");
  IgnatyevMargins m;
  m.coeff_bound_max = -std::numeric_limits<double>::infinity();
  m.margin_min = std::numeric_limits<double>::infinity();
  const std::size_t n = a0.size();
  for (std::size_t i = 0; i < n; ++i) {
    double adot;
    if (i < a0_dot_analytic.size() && std::isfinite(a0_dot_analytic[i])) {
      adot = a0_dot_analytic[i];
    } else if (n == 1) {
      adot = 0.0;
    } else if (i == 0) {
      adot = (a0[1] - a0[0]) / dt;
    } else if (i + 1 == n) {
      adot = (a0[n - 1] - a0[n - 2]) / dt;
    } else {
      adot = (a0[i + 1] - a0[i - 1]) / (2.0 * dt);
    }
    m.coeff_bound_max = std::max(m.coeff_bound_max, std::fabs(adot) + std::fabs(a1));
    m.margin_min = std::min(m.margin_min, adot + 2.0 * a0[i] * a1);
  }
  return m;
}

LowPass2::LowPass2(double omega_co, double dt) {
  if (!(omega_co > 0.0) || !(dt > 0.0))
    throw std::invalid_argument("LowPass2: omega_co and dt must be > 0");
  const double c = 2.0 / dt;
  const double w2 = omega_co * omega_co;
  const double a0 = c * c + 2.0 * omega_co * c + w2;
  b0_ = w2 / a0;
  b1_ = 2.0 * w2 / a0;
  b2_ = w2 / a0;
  a1_ = (2.0 * w2 - 2.0 * c * c) / a0;
  a2_ = (c * c - 2.0 * omega_co * c + w2) / a0;
}

double LowPass2::step(double x) {
  const double y = b0_ * x + s1_;
  s1_ = b1_ * x - a1_ * y + s2_;
  s2_ = b2_ * x - a2_ * y;
  last_ = y;
  return y;
}

void LowPass2::reset() {
  s1_ = s2_ = 0.0;
  last_ = 0.0;
}

void DivergenceDetector::update(double w2_est, double w3_est, double t) {
  if (diverged_) return;
  const double level = std::max(std::fabs(w2_est) / cfg_.velocity_bound,
                                std::fabs(w3_est) / cfg_.force_bound);
  if (level > cfg_.factor) {
    if (exceed_since_ < 0.0) exceed_since_ = t;
    if (t - exceed_since_ + dt_ >= cfg_.hold_time) {
      diverged_ = true;
      onset_ = exceed_since_;
    }
  } else {
    exceed_since_ = -1.0;
  }
}

ObserverRunner::ObserverRunner(const PlantParams& pp, const FrictionParams& fp,
                               const ObserverGains& g, ObserverModel model, double omega_co,
                               double dt, const DivergenceConfig& div)
    : pp_(pp),
      fp_(fp),
      gains_(g),
      model_(model),
      dt_(dt),
      vel_filter_(omega_co, dt),
      force_filter_(omega_co, dt),
      detector_(div, dt) {}

double ObserverRunner::a1() const {
  return model_ == ObserverModel::lag ? gains_.L1 : gains_.L1 + fp_.viscous / pp_.mass;
}

ObserverRunner::Output ObserverRunner::observe(double position_meas) {
  Output out;
  out.w2_est = obs_.y[0] + gains_.L1 * position_meas;
  out.w3_est = obs_.y[1] + gains_.L2 * position_meas;
  out.v_filtered = vel_filter_.step(out.w2_est);
  out.f_filtered = force_filter_.step(out.w3_est);

  replica_ = advance_presliding(fp_, replica_, out.v_filtered, dt_);
  const int sign = velocity_sign(fp_, replica_, out.v_filtered);
  out.stiffness = presliding_stiffness(fp_, replica_, sign);

  if (model_ == ObserverModel::lag) {
    out.a0 = (out.stiffness + fp_.sigma_over_beta() - gains_.L2) / pp_.mass;
  } else {
    out.a0 = (fp_.viscous * gains_.L1 + out.stiffness - gains_.L2) / pp_.mass;
  }

  // Analytic a0dot where the chain-rule expression is defined: inside the
  // pre-sliding region, away from the clamp and the z = 0 singularity.
  out.a0_dot = std::numeric_limits<double>::quiet_NaN();
  const double z = replica_.distance;
  const double branch =
      std::fabs(static_cast<double>(sign) - replica_.reversal_memory);
  if (z != 0.0 && std::fabs(z) <= 1.0 && branch > 0.0 && out.stiffness > 0.0 &&
      out.stiffness < fp_.stiffness_clamp) {
    const double c = fp_.chain_rule == StiffnessChainRule::multiply_s
                         ? fp_.coulomb * fp_.presliding_scale
                         : fp_.coulomb / fp_.presliding_scale;
    out.a0_dot = -c * branch * fp_.presliding_scale * out.v_filtered / (z * pp_.mass);
  }

  const StateSpace ss = model_ == ObserverModel::lag
                            ? build_state_space(pp_, fp_, replica_, sign)
                            : build_state_space_static(pp_, fp_, replica_, sign);
  blocks_ = regular_form(ss);

  detector_.update(out.w2_est, out.w3_est, t_);
  return out;
}

void ObserverRunner::advance(double u, double position_meas) {
  obs_ = observer_step(blocks_, gains_, obs_, u, position_meas, dt_);
  t_ += dt_;
}

ObserverRunner::Output ObserverRunner::step(double u, double position_meas) {
  Output out = observe(position_meas);
  advance(u, position_meas);
  return out;
}

}  // namespace fricobs
