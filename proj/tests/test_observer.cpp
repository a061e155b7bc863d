#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fricobs/observer.hpp"
#include "fricobs/scenario.hpp"

using namespace fricobs;

namespace {

const double kSqrtKappaOverM = 121.94215216993848;  // sqrt(8000/0.538)

PlantParams table_plant() { return PlantParams{}; }
FrictionParams table_friction() { return FrictionParams{}; }

}  // namespace

TEST_CASE("gain synthesis at the reference design points") {
  const FrictionParams fp = table_friction();
  const ObserverGains g = design_gains(fp, 0.538, 1.02);
  CHECK(g.L1 == doctest::Approx(248.76199042667452).epsilon(1e-12));
  CHECK(g.L2 == doctest::Approx(20776.8).epsilon(1e-12));

  const ObserverGains boundary = design_gains(fp, 0.538, 1.0);
  CHECK(boundary.L2 == doctest::Approx(fp.sigma_over_beta()).epsilon(1e-15));

  const ObserverGains bad = design_gains(fp, 0.538, 0.98);
  CHECK(bad.L2 == doctest::Approx(21416.8).epsilon(1e-12));
  const StabilityReport rep = check_stability(bad, fp, 0.538);
  CHECK(rep.gain1_ok);
  CHECK(!rep.gain2_ok);

  CHECK_THROWS_AS(design_gains(fp, 0.0, 1.02), std::invalid_argument);
  CHECK_THROWS_AS(design_gains(fp, 0.538, -1.0), std::invalid_argument);
}

TEST_CASE("gain inequality check") {
  const FrictionParams fp = table_friction();
  ObserverGains g{248.76199042667452, 20776.8, 1.02};
  StabilityReport rep = check_stability(g, fp, 0.538);
  CHECK(rep.gain1_ok);
  CHECK(rep.gain2_ok);

  g.L1 = 0.0;
  rep = check_stability(g, fp, 0.538);
  CHECK(!rep.gain1_ok);
}

TEST_CASE("design / inequality consistency over random rho") {
  const FrictionParams fp = table_friction();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> above(1.0 + 1e-6, 5.0), below(0.05, 1.0 - 1e-6);
  for (int i = 0; i < 200; ++i) {
    const StabilityReport ok = check_stability(design_gains(fp, 0.538, above(rng)), fp, 0.538);
    CHECK(ok.gain1_ok);
    CHECK(ok.gain2_ok);
    const StabilityReport bad = check_stability(design_gains(fp, 0.538, below(rng)), fp, 0.538);
    CHECK(!bad.gain2_ok);
  }
}

TEST_CASE("eigenvalues: double pole, spread pair, dominant identity") {
  const FrictionParams fp = table_friction();
  const ObserverGains g = design_gains(fp, 0.538, 1.02);

  const EigenPair at_kappa = observer_eigenvalues(g, 0.538, fp.stiffness_clamp, 21100.0);
  CHECK(at_kappa.real);
  CHECK(at_kappa.lambda1.real() == doctest::Approx(-124.38099521333726).epsilon(1e-9));
  CHECK(at_kappa.lambda2.real() == doctest::Approx(-124.38099521333726).epsilon(1e-9));

  const EigenPair at_zero = observer_eigenvalues(g, 0.538, 0.0, 21100.0);
  CHECK(at_zero.real);
  CHECK(at_zero.lambda1.real() == doctest::Approx(-246.32314738327574).epsilon(1e-9));
  CHECK(at_zero.lambda2.real() == doctest::Approx(-2.4388430433987764).epsilon(1e-9));

  // dominant-pole identity to 1e-9 relative
  const double dominant = std::max(at_zero.lambda1.real(), at_zero.lambda2.real());
  CHECK(dominant == doctest::Approx(-kSqrtKappaOverM * 0.02).epsilon(1e-9));
}

TEST_CASE("realness sweep: any rho > 1 gives real negative eigenvalues on [0, kappa]") {
  const FrictionParams fp = table_friction();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> rdist(1.0 + 1e-4, 6.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double rho = rdist(rng);
    const ObserverGains g = design_gains(fp, 0.538, rho);
    for (int i = 0; i < 1000; ++i) {
      const double k = fp.stiffness_clamp * double(i) / 999.0;
      const EigenPair e = observer_eigenvalues(g, 0.538, k, fp.sigma_over_beta());
      CHECK(e.real);
      CHECK(e.lambda1.real() < 0.0);
      CHECK(e.lambda2.real() < 0.0);
    }
  }
}

TEST_CASE("static-variant design places the same eigenvalue family") {
  const FrictionParams fp = table_friction();
  const double m = 0.538, rho = 1.02;
  const ObserverGains g = design_gains_static(fp, m, rho);
  for (int i = 0; i <= 100; ++i) {
    const double k = fp.stiffness_clamp * double(i) / 100.0;
    const EigenPair e = observer_eigenvalues_static(g, m, k, fp.viscous);
    const double spread = std::sqrt((fp.stiffness_clamp - k) / m);
    CHECK(e.real);
    CHECK(e.lambda1.real() ==
          doctest::Approx(-rho * kSqrtKappaOverM - spread).epsilon(1e-9));
    CHECK(e.lambda2.real() ==
          doctest::Approx(-rho * kSqrtKappaOverM + spread).epsilon(1e-9));
  }
  // stability inequality analogue: L2 < sigma*L1 for rho > 1
  CHECK(g.L2 < fp.viscous * g.L1);
  const ObserverGains bad = design_gains_static(fp, m, 0.98);
  CHECK(bad.L2 > fp.viscous * bad.L1);
}

TEST_CASE("regular form blocks and partition identity") {
  const PlantParams pp = table_plant();
  const FrictionParams fp = table_friction();
  PreslidingState sliding;
  sliding.distance = 2.0;
  const StateSpace ss = build_state_space(pp, fp, sliding, +1);
  const RegularFormBlocks b = regular_form(ss);

  CHECK(b.a11 == 0.0);
  CHECK(b.a12[0] == 1.0);
  CHECK(b.a12[1] == 0.0);
  CHECK(b.a21[0] == 0.0);
  CHECK(b.a21[1] == 0.0);
  CHECK(b.a22[0][0] == 0.0);
  CHECK(b.a22[0][1] == doctest::Approx(-1.858736059479554).epsilon(1e-12));
  CHECK(b.a22[1][0] == doctest::Approx(21100.0).epsilon(1e-12));
  CHECK(b.a22[1][1] == 0.0);
  CHECK(b.b_wbar == 0.0);
  CHECK(b.b_y[0] == doctest::Approx(1.858736059479554).epsilon(1e-12));
  CHECK(b.b_y[1] == 0.0);

  const StateSpace back = assemble_state_space(b);
  for (int i = 0; i < 3; ++i) {
    CHECK(back.B[i] == ss.B[i]);
    for (int j = 0; j < 3; ++j) CHECK(back.A[i][j] == ss.A[i][j]);
  }
}

TEST_CASE("observer step: equilibrium and bit-consistent back transformation") {
  const PlantParams pp = table_plant();
  const FrictionParams fp = table_friction();
  const ObserverGains g = design_gains(fp, pp.mass, 1.02);
  PreslidingState sliding;
  sliding.distance = 2.0;
  const RegularFormBlocks b = regular_form(build_state_space(pp, fp, sliding, +1));

  ObserverState obs{};
  obs = observer_step(b, g, obs, 0.0, 0.0, 1e-4);
  CHECK(obs.y[0] == 0.0);
  CHECK(obs.y[1] == 0.0);
  CHECK(obs.w2_est == 0.0);
  CHECK(obs.w3_est == 0.0);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double u = dist(rng), wbar = 1e-3 * dist(rng);
    obs = observer_step(b, g, obs, u, wbar, 1e-4);
    // identity must hold bit-for-bit as computed
    CHECK(obs.w2_est == obs.y[0] + g.L1 * wbar);
    CHECK(obs.w3_est == obs.y[1] + g.L2 * wbar);
  }
}

TEST_CASE("noise gain formula") {
  CHECK(noise_gain(8000.0, 1.02) == doctest::Approx(323.2).epsilon(1e-12));
  CHECK(noise_gain(8000.0, 1.0 + 1e-12) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("ignatyev margins: gross-sliding algebra and sign flip") {
  const FrictionParams fp = table_friction();
  const double m = 0.538;
  const ObserverGains good = design_gains(fp, m, 1.02);
  // constant-velocity gross sliding: a0 = (sigma/beta - L2)/m constant
  const double a0_good = (fp.sigma_over_beta() - good.L2) / m;
  std::vector<double> trace(100, a0_good);
  std::vector<double> nan_dot(100, std::numeric_limits<double>::quiet_NaN());
  const IgnatyevMargins mg = ignatyev_margins(trace, nan_dot, good.L1, 1e-4);
  CHECK(mg.margin_min == doctest::Approx(298884.29481747723).epsilon(1e-12));
  CHECK(mg.coeff_bound_max == doctest::Approx(good.L1).epsilon(1e-12));

  const ObserverGains bad = design_gains(fp, m, 0.98);
  const double a0_bad = (fp.sigma_over_beta() - bad.L2) / m;
  std::vector<double> trace_bad(100, a0_bad);
  const IgnatyevMargins mb = ignatyev_margins(trace_bad, nan_dot, bad.L1, 1e-4);
  CHECK(mb.margin_min < 0.0);

  CHECK_THROWS_AS(ignatyev_margins({}, {}, 1.0, 1e-4), std::invalid_argument);
}

TEST_CASE("ignatyev margins: analytic derivative wins over finite differences") {
  std::vector<double> a0 = {1.0, 2.0, 4.0};
  std::vector<double> adot = {10.0, 10.0, 10.0};
  const IgnatyevMargins m = ignatyev_margins(a0, adot, 0.5, 1.0);
  CHECK(m.coeff_bound_max == doctest::Approx(10.5));
  CHECK(m.margin_min == doctest::Approx(10.0 + 2.0 * 1.0 * 0.5));
}

TEST_CASE("second-order low-pass: DC gain and -6.02 dB at the corner") {
  const double dt = 1e-4;
  const double wco = 2.0 * std::numbers::pi * 40.0;
  LowPass2 lp(wco, dt);
  double y = 0.0;
  for (int i = 0; i < 100000; ++i) y = lp.step(3.5);
  CHECK(y == doctest::Approx(3.5).epsilon(1e-9));

  // steady amplitude ratio at w = wco is 1/|2j| = 0.5
  LowPass2 lp2(wco, dt);
  double c = 0.0, s = 0.0;
  const int settle = 20000, n = 25000;  // whole periods: 25000*dt*40 Hz = 100 cycles
  int count = 0;
  for (int k = 0; k < n; ++k) {
    const double t = k * dt;
    const double x = std::sin(wco * t);
    const double out = lp2.step(x);
    if (k >= settle) {
      c += out * std::cos(wco * t);
      s += out * std::sin(wco * t);
      ++count;
    }
  }
  const double amp = 2.0 * std::sqrt(c * c + s * s) / count;
  CHECK(amp == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("divergence detector requires sustained exceedance") {
  DivergenceConfig cfg;  // bounds 0.1 / 2.5, factor 10, hold 0.1 s
  const double dt = 1e-3;
  DivergenceDetector det(cfg, dt);
  // brief spike: no divergence
  for (int k = 0; k < 50; ++k) det.update(k == 10 ? 5.0 : 0.0, 0.0, k * dt);
  CHECK(!det.diverged());
  // sustained: trips after 0.1 s
  DivergenceDetector det2(cfg, dt);
  for (int k = 0; k < 200 && !det2.diverged(); ++k) det2.update(0.0, 100.0, k * dt);
  CHECK(det2.diverged());
  CHECK(det2.onset_time() == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("noise-free constant velocity: estimation error contracts at the dominant pole") {
  ScenarioConfig cfg = preset_constant_velocity(0.05, 1.02);
  const RunResult res = run_open_loop_observer(cfg);
  REQUIRE(!res.metrics.fault);
  REQUIRE(!res.metrics.diverged);
  const auto& s = res.series;

  const double lam = -2.4388430433987764;
  // pick the anchor at t = 0.1 s
  std::size_t k0 = 0;
  while (s.t[k0] < 0.1) ++k0;
  const auto norm = [&](std::size_t k) {
    return std::hypot(s.eps2[k], s.eps3[k]);
  };
  const double anchor = norm(k0);
  CHECK(anchor > 0.0);
  for (std::size_t k = k0; k < s.size(); k += 50) {
    const double bound = 1.05 * anchor * std::exp(lam * (s.t[k] - s.t[k0])) + 1e-12;
    CHECK(norm(k) <= bound);
  }

  // error halves within ln(2)/|lam| = 0.284 s after the transient
  std::size_t kh = k0;
  while (kh < s.size() && norm(kh) > 0.5 * anchor) ++kh;
  REQUIRE(kh < s.size());
  CHECK(s.t[kh] - s.t[k0] <= 0.285);

  // monotone convergence: eps3 crosses zero at most once after 5/|lam|
  std::size_t crossings = 0;
  bool started = false;
  double prev = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s.t[k] <= 5.0 / std::fabs(lam)) continue;
    if (started && std::signbit(s.eps3[k]) != std::signbit(prev) && s.eps3[k] != 0.0) ++crossings;
    prev = s.eps3[k];
    started = true;
  }
  CHECK(crossings <= 1);
}
