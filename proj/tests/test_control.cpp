#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fricobs/control.hpp"

using namespace fricobs;

namespace {

PlantTF identified_tf() { return identify_plant_tf(PlantParams{}, FrictionParams{}); }

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = lo * std::pow(hi / lo, double(i) / double(n - 1));
  return g;
}

}  // namespace

TEST_CASE("plant transfer-function identification") {
  const PlantTF tf = identified_tf();
  CHECK(tf.gain == doctest::Approx(0.1554502369668246).epsilon(1e-12));
  CHECK(tf.time_constant == doctest::Approx(0.025497630331753555).epsilon(1e-12));
}

TEST_CASE("pid design: definitional gain, crossover, sensitivity bound") {
  const PlantTF tf = identified_tf();
  for (double max_S : {0.001, 0.0025, 0.01}) {
    const PidDesign d = design_pid(tf, max_S);
    CHECK(d.k == 1.0 / max_S);  // exact by definition
    CHECK(d.Ti > 0.0);
    CHECK(d.crossover > 0.0);
    CHECK(d.phase_arg > 0.0);
    CHECK(d.phase_arg < std::numbers::pi / 2.0);

    const auto grid = log_grid(d.crossover / 100.0, d.crossover * 100.0, 1000);
    double peak = 0.0;
    for (double m : sensitivity_magnitude(tf, d, grid))
      if (std::isfinite(m)) peak = std::max(peak, m);
    CHECK(peak <= max_S * 1.001);
    CHECK(peak > 0.3 * max_S);  // the bound is actually approached
  }
  CHECK_THROWS_AS(design_pid(tf, 0.0), std::invalid_argument);
}

TEST_CASE("sensitivity asymptotes vanish at both ends") {
  const PlantTF tf = identified_tf();
  const PidDesign d = design_pid(tf, 0.0025);
  const std::vector<double> ends = {1e-6, 1e6};
  const auto mags = sensitivity_magnitude(tf, d, ends);
  CHECK(mags[0] < 1e-6 * d.max_S * 1e3);
  CHECK(mags[0] < mags[1] + d.max_S);  // both finite
  CHECK(mags[1] < 1e-4 * d.max_S);
}

TEST_CASE("parallel gains: identities and limits") {
  const PlantTF tf = identified_tf();
  const PidDesign d = design_pid(tf, 0.0025);
  const PidGains g = to_parallel_gains(d, tf);
  CHECK(g.kp == doctest::Approx(d.k * (d.Ti + tf.time_constant) / d.Ti).epsilon(1e-15));
  CHECK(g.ki == doctest::Approx(d.k / d.Ti).epsilon(1e-15));
  CHECK(g.kd == doctest::Approx(d.k * tf.time_constant).epsilon(1e-15));
  // identity kp*k = k^2 + kd*ki, exact up to rounding
  CHECK(g.kp * d.k == doctest::Approx(d.k * d.k + g.kd * g.ki).epsilon(1e-14));
  // consistency form kp = k + kd*ki/k
  CHECK(g.kp == doctest::Approx(d.k + g.kd * g.ki / d.k).epsilon(1e-14));

  // tau -> 0: kp -> k, kd -> 0
  PlantTF stiff = tf;
  stiff.time_constant = 1e-9;
  const PidDesign d2 = design_pid(stiff, 0.0025);
  const PidGains g2 = to_parallel_gains(d2, stiff);
  CHECK(g2.kp == doctest::Approx(d2.k).epsilon(1e-4));
  CHECK(g2.kd == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("deployed reference gain set is self-consistent on the k~400 branch") {
  const double kp = 429.0, ki = 4348.0, kd = 2.67;
  // k solves k^2 - kp*k + kd*ki = 0
  const double disc = kp * kp - 4.0 * kd * ki;
  REQUIRE(disc > 0.0);
  const double k = 0.5 * (kp + std::sqrt(disc));
  CHECK(k == doctest::Approx(399.97530832970733).epsilon(1e-12));
  CHECK(kp * k == doctest::Approx(k * k + kd * ki).epsilon(1e-12));
  // implied series parameters stay positive
  CHECK(kd / k > 0.0);
  CHECK(k / ki > 0.0);
}

TEST_CASE("pid step: zero error, integral ramp, derivative kick, zero gains") {
  PidConfig cfg;
  cfg.gains = {429.0, 4348.0, 2.67};
  cfg.deriv_filter_omega = 2.0 * std::numbers::pi * 100.0;
  const double dt = 1e-4;

  PidState st{};
  for (int i = 0; i < 100; ++i) CHECK(pid_step(cfg, st, 0.0, dt) == 0.0);

  // constant error: integral term grows as ki*c*t
  PidState ramp{};
  const double c = 2e-4;
  double u = 0.0;
  for (int i = 0; i < 10000; ++i) u = pid_step(cfg, ramp, c, dt);
  const double integral_part = u - cfg.gains.kp * c;  // derivative settled to zero
  CHECK(integral_part == doctest::Approx(cfg.gains.ki * c * 1.0).epsilon(1e-3));

  // step from zero to one mid-run: kick bounded by the derivative filter,
  // afterwards the output slope settles to ki per second
  PidState step{};
  for (int i = 0; i < 100; ++i) pid_step(cfg, step, 0.0, dt);
  const double u_before = pid_step(cfg, step, 0.0, dt);
  const double u_kick = pid_step(cfg, step, 1.0, dt);
  CHECK(u_kick - u_before <= cfg.gains.kp + cfg.gains.kd * cfg.deriv_filter_omega + 1.0);
  double u1 = u_kick;
  for (int i = 0; i < 10000; ++i) u1 = pid_step(cfg, step, 1.0, dt);
  double u2 = u1;
  for (int i = 0; i < 10000; ++i) u2 = pid_step(cfg, step, 1.0, dt);
  CHECK(u2 - u1 == doctest::Approx(cfg.gains.ki * 1.0).epsilon(1e-6));

  PidConfig zero;
  PidState z{};
  for (int i = 0; i < 100; ++i)
    CHECK(pid_step(zero, z, std::sin(0.1 * i), dt) == 0.0);
}

TEST_CASE("anti-windup clamps and counts, and leaves small signals alone") {
  PidConfig cfg;
  cfg.gains = {429.0, 4348.0, 2.67};
  cfg.anti_windup = true;
  cfg.output_limit = 10.0;
  PidState st{};
  double u = 0.0;
  for (int i = 0; i < 1000; ++i) u = pid_step(cfg, st, 0.5, 1e-4);  // deep saturation
  CHECK(std::fabs(u) <= cfg.output_limit);
  CHECK(st.windup_events > 0);
  // integral froze near the saturation threshold rather than winding up
  CHECK(cfg.gains.ki * st.integral <= cfg.output_limit + cfg.gains.kp * 0.5 + 1.0);

  PidState small{};
  PidConfig cfg_small = cfg;
  for (int i = 0; i < 1000; ++i) pid_step(cfg_small, small, 1e-6, 1e-4);
  CHECK(small.windup_events == 0);
}

TEST_CASE("compensated input adds the scaled friction estimate") {
  CHECK(compensated_input(1.0, 0.0, 3.28) == doctest::Approx(1.0));
  CHECK(compensated_input(0.0, 0.35, 3.28) == doctest::Approx(0.10670731707317073).epsilon(1e-12));
}
