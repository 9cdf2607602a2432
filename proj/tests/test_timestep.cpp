#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "displab/random_field.hpp"
#include "displab/timestep.hpp"
#include "oracles.hpp"

using namespace displab;
using oracle::max_abs_diff;

TEST_CASE("phi functions agree across the series threshold") {
  for (double r : {0.49, 0.5, 0.51}) {
    for (double angle : {0.0, 1.0, 2.5, 3.14159}) {
      const cplx z = std::polar(r, angle);
      const auto phi = phi_functions(z);
      const cplx e = std::exp(z);
      const cplx p1 = (e - 1.0) / z;
      const cplx p2 = (e - 1.0 - z) / (z * z);
      const cplx p3 = (e - 1.0 - z - z * z / 2.0) / (z * z * z);
      CHECK(std::abs(phi[0] - p1) < 1e-13);
      CHECK(std::abs(phi[1] - p2) < 1e-12);
      CHECK(std::abs(phi[2] - p3) < 1e-11);
    }
  }
  const auto at0 = phi_functions(0.0);
  CHECK(std::abs(at0[0] - 1.0) < 1e-16);
  CHECK(std::abs(at0[1] - 0.5) < 1e-16);
  CHECK(std::abs(at0[2] - 1.0 / 6.0) < 1e-16);
}

TEST_CASE("linear steps are exact exponentials") {
  ModelSpec heat{ModelKind::GL2Averaged, {}};
  heat.params.nonlinear_scale = 0.0;
  const auto e1 = SpectralField::unit(4, 1);
  CHECK(max_abs_diff(etdrk4_step(heat, 0.0, 0.1, e1), std::exp(-0.1) * e1) < 1e-13);

  ModelSpec ks{ModelKind::KSPhysical, {}};
  ks.params.a = 2.0;
  ks.params.with_L(5.0);
  ks.params.nonlinear_scale = 0.0;
  const double h = 0.01;
  const auto u = make_field(4, {{1, 1.0}, {-1, 1.0}}).with_flags(true, true);
  const auto stepped = etdrk4_step(ks, 0.0, h, u);
  CHECK(std::abs(stepped[1] - std::exp(cplx(1.0, -5.0) * h)) < 1e-13);
  CHECK(std::abs(stepped[-1] - std::exp(cplx(1.0, 5.0) * h)) < 1e-13);

  Rng rng(1);
  const auto w = random_complex_field(12, rng);
  ModelSpec gl1{ModelKind::GL1Physical, {}};
  gl1.params.gamma_diff = 0.5;
  gl1.params.beta = cplx(1.0, 0.5);
  gl1.params.with_L(100.0);
  gl1.params.nonlinear_scale = 0.0;
  const EtdStepper stepper(gl1, 12, 0.05);
  auto state = w;
  for (int k = 0; k < 20; ++k) state = stepper.step(0.05 * k, state);
  SpectralField exact(12);
  for (int n = -12; n <= 12; ++n) exact.mode(n) = std::exp(linear_symbol(gl1, n) * 1.0) * w[n];
  CHECK(max_abs_diff(state, exact) < 1e-13 * (1.0 + hs_norm(exact, 0.0)));
}

TEST_CASE("fourth-order self-convergence") {
  ModelSpec m{ModelKind::GL2Averaged, {}};
  m.params.beta = cplx(1.0, 0.5);
  m.params.omega = 1.0;
  const auto w0 = make_field(6, {{0, 0.6}, {1, cplx(0.3, 0.2)}, {-1, 0.25}, {2, 0.1}});
  auto run = [&](double h) {
    SimConfig c;
    c.truncation = 6;
    c.h = h;
    c.T = 1.0;
    return integrate(m, c, w0).final_state();
  };
  const auto ref = run(0.1 / 64);
  const double e1 = hs_norm(run(0.1) - ref, 0.0);
  const double e2 = hs_norm(run(0.05) - ref, 0.0);
  const double e3 = hs_norm(run(0.025) - ref, 0.0);
  const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
  MESSAGE("observed orders " << o1 << " " << o2);
  CHECK(o1 >= 3.7);
  CHECK(o1 <= 4.3);
  CHECK(o2 >= 3.7);
  CHECK(o2 <= 4.3);
}

TEST_CASE("classical Runge-Kutta") {
  const VectorRhs zero = [](double, const std::vector<double>& x) { return std::vector<double>(x.size(), 0.0); };
  const std::vector<double> x0{1.0, -2.0};
  CHECK(rk4_step(zero, 0.0, 0.1, x0) == x0);

  const VectorRhs grow = [](double, const std::vector<double>& x) { return x; };
  std::vector<double> x{1.0};
  for (int k = 0; k < 100; ++k) x = rk4_step(grow, 0.01 * k, 0.01, x);
  CHECK(std::abs(x[0] - std::exp(1.0)) < 1e-9);

  const VectorRhs bad = [](double, const std::vector<double>& v) {
    return std::vector<double>(v.size(), std::nan(""));
  };
  CHECK_THROWS_AS(rk4_step(bad, 0.0, 0.1, x0), BlowUp);
}

TEST_CASE("trajectory driver") {
  ModelSpec ks{ModelKind::KSPhysical, {}};
  ks.params.a = 2.0;
  Rng rng(2);
  const auto u0 = random_real_field(8, true, rng);
  SimConfig zero_horizon;
  zero_horizon.truncation = 8;
  zero_horizon.T = 0.0;
  const auto single = integrate(ks, zero_horizon, u0);
  REQUIRE(single.samples.size() == 1);
  CHECK(single.samples[0].t == 0.0);
  CHECK(single.samples[0].h_norm == doctest::Approx(hs_norm(u0, 0.0)));

  SimConfig c;
  c.truncation = 8;
  c.h = 0.01;
  c.T = 0.105;
  c.sample_every = 2;
  c.snapshot_every = 5;
  const auto log = integrate(ks, c, u0);
  CHECK(log.samples.back().t == doctest::Approx(0.105));
  for (std::size_t i = 1; i < log.samples.size(); ++i) CHECK(log.samples[i].t > log.samples[i - 1].t);
  CHECK(log.snapshots.front().t == 0.0);
  CHECK(log.snapshots.back().t == doctest::Approx(0.105));
}

TEST_CASE("reduced runs record a nonincreasing Lyapunov functional") {
  const double alpha = 2.5;
  ModelSpec m{ModelKind::GL2Reduced, {}};
  m.params.beta = alpha;
  SimConfig c;
  c.truncation = default_reduced_dimension(alpha);
  c.h = 0.01;
  c.T = 10.0;
  const auto v0 = make_field(c.truncation, {{-1, 0.4}, {0, 0.3}, {1, -0.2}, {2, 0.1}});
  const auto log = integrate(m, c, v0);
  for (std::size_t i = 1; i < log.samples.size(); ++i)
    CHECK(log.samples[i].lyapunov <= log.samples[i - 1].lyapunov + 1e-12);
}

TEST_CASE("Lyapunov functional examples") {
  CHECK(lyapunov_value(SpectralField(2), 1.3) == 0.0);
  const double alpha = 2.0;
  const auto e0 = make_field(2, {{0, std::sqrt(alpha)}});
  CHECK(lyapunov_value(e0, alpha) == doctest::Approx(-alpha * alpha / 2.0));
}

TEST_CASE("blow-up carries the partial log") {
  ModelSpec m{ModelKind::GL2Averaged, {}};
  m.params.beta = 1.0;
  m.params.omega = 0.0;
  // Anti-dissipative cubic: flip the nonlinearity sign.
  m.params.nonlinear_scale = -1.0;
  SimConfig c;
  c.truncation = 2;
  c.h = 0.01;
  c.T = 50.0;
  try {
    integrate(m, c, make_field(2, {{0, 3.0}}));
    FAIL("expected blow-up");
  } catch (const BlowUp& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() < 50.0);
    CHECK_FALSE(e.partial_log().samples.empty());
    CHECK(e.partial_log().samples.back().t <= e.time());
  }
}

TEST_CASE("dissipative fit") {
  TrajectoryLog log;
  for (int k = 0; k <= 200; ++k) {
    const double t = 0.05 * k;
    log.samples.push_back({t, std::sqrt(4.0 + 10.0 * std::exp(-2.0 * t)), 0.0});
  }
  log.samples.back().h_norm = 2.0;
  const auto fit = fit_dissipative_bound(log);
  CHECK(fit.plateau == doctest::Approx(4.0 + 10.0 * std::exp(-10.0)).epsilon(1e-6));
  CHECK(fit.decay_rate == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("dissipative bound on an averaged run") {
  ModelSpec m{ModelKind::GL2Averaged, {}};
  m.params.beta = cplx(1.5, 0.2);
  m.params.omega = 0.5;
  Rng rng(9);
  const auto w0 = 3.0 * random_complex_field(8, rng);
  SimConfig c;
  c.truncation = 8;
  c.h = 1e-3;
  c.T = 5.0;
  const auto log = integrate(m, c, w0);
  // (v, M v) >= |v|^4 gives d/dt |v|^2 <= 2 alpha |v|^2 - 2 |v|^4, so |v|^2 <= max(|v0|^2, alpha).
  const double bound = std::max(std::pow(hs_norm(w0, 0.0), 2), 1.5);
  for (const auto& s : log.samples) CHECK(s.h_norm * s.h_norm <= bound + 1e-9);
}
