#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "displab/models.hpp"
#include "displab/random_field.hpp"
#include "oracles.hpp"

using namespace displab;
using oracle::max_abs_diff;

namespace {
ModelSpec model_of(ModelKind kind) { return ModelSpec{kind, {}}; }
}  // namespace

TEST_CASE("linear symbols") {
  auto gl2 = model_of(ModelKind::GL2Averaged);
  gl2.params.beta = 1.0;
  CHECK(std::abs(linear_symbol(gl2, 1)) < 1e-15);
  auto ks = model_of(ModelKind::KSAveraged);
  ks.params.a = 2.0;
  CHECK(linear_symbol(ks, 1) == cplx(1.0));
  auto gl1 = model_of(ModelKind::GL1Physical);
  gl1.params.with_L(10.0);
  CHECK(std::abs(linear_symbol(gl1, 2) - cplx(-4.0, -80.0)) < 1e-13);

  auto gl2p = model_of(ModelKind::GL2Physical);
  gl2p.params.with_L(3.0);
  gl2p.params.beta = cplx(0.5, 0.2);
  CHECK(std::abs(linear_symbol(gl2p, 2) - (-cplx(1.0, 3.0) * 4.0 + cplx(0.5, 0.2))) < 1e-13);
  auto ksp = model_of(ModelKind::KSPhysical);
  ksp.params.a = 2.0;
  ksp.params.with_L(5.0);
  CHECK(std::abs(linear_symbol(ksp, 1) - cplx(1.0, -5.0)) < 1e-13);
  auto ksr = ksp;
  ksr.kind = ModelKind::KSRotating;
  CHECK(linear_symbol(ksr, 1) == cplx(1.0));
  CHECK_THROWS(linear_symbol(model_of(ModelKind::ODE3), 1));
}

TEST_CASE("nonlinear right-hand sides") {
  Rng rng(2);
  const auto r = random_real_field(6, true, rng);
  auto ks = model_of(ModelKind::KSAveraged);
  ks.params.a = 2.0;
  CHECK(hs_norm(nonlinear_rhs(ks, 0.0, r), 0.0) <= 1e-12);

  auto gl2 = model_of(ModelKind::GL2Averaged);
  CHECK(max_abs_diff(nonlinear_rhs(gl2, 0.0, SpectralField::unit(3, 1)), -1.0 * SpectralField::unit(3, 1)) < 1e-15);

  const auto w = random_complex_field(5, rng);
  auto rot = model_of(ModelKind::GL1Rotating);
  rot.params.with_L(20.0);
  rot.params.omega = 0.7;
  auto phys = rot;
  phys.kind = ModelKind::GL1Physical;
  CHECK(max_abs_diff(nonlinear_rhs(rot, 0.0, w), nonlinear_rhs(phys, 0.0, w)) < 1e-14);
  CHECK(max_abs_diff(nonlinear_rhs(phys, 0.0, w), -cplx(1.0, 0.7) * gl_cubic(w)) < 1e-14);

  auto scaled = phys;
  scaled.params.nonlinear_scale = 0.0;
  CHECK(hs_norm(nonlinear_rhs(scaled, 0.0, w), 0.0) == 0.0);
}

TEST_CASE("state flags must match the family") {
  Rng rng(3);
  const auto complex_state = random_complex_field(4, rng);
  auto ks = model_of(ModelKind::KSPhysical);
  CHECK_THROWS_AS(nonlinear_rhs(ks, 0.0, complex_state), FlagMismatch);
  CHECK_THROWS_AS(rhs_rescaled_kdv(2.0, 0.1, complex_state), FlagMismatch);
}

TEST_CASE("validation and advisory warnings") {
  auto m = model_of(ModelKind::GL1Physical);
  m.params.L = 10.0;
  m.params.eps = 0.2;
  CHECK_THROWS(validate(m));
  m.params.with_L(10.0);
  CHECK_NOTHROW(validate(m));

  auto ks = model_of(ModelKind::KSAveraged);
  ks.params.a = 4.0;
  CHECK_FALSE(model_warnings(ks, 1e-3).empty());
  ks.params.a = 2.0;
  CHECK(model_warnings(ks, 1e-3).empty());

  auto rot = model_of(ModelKind::GL2Rotating);
  rot.params.with_L(100.0);
  CHECK_FALSE(model_warnings(rot, 0.01).empty());
  CHECK(model_warnings(rot, 1e-3).empty());
}

TEST_CASE("rescaled KdV right-hand side") {
  const auto zero = SpectralField(4, true, true);
  CHECK(hs_norm(rhs_rescaled_kdv(2.0, 0.1, zero), 0.0) == 0.0);
  const auto cosine = make_field(4, {{1, 1.0}, {-1, 1.0}}).with_flags(true, true);
  // v''' = -i e_1 + i e_{-1}; v v_x = i e_2 - i e_{-2}.
  const auto expected = make_field(4, {{1, cplx(0, -1)}, {-1, cplx(0, 1)}, {2, cplx(0, 1)}, {-2, cplx(0, -1)}});
  CHECK(max_abs_diff(rhs_rescaled_kdv(2.0, 0.0, cosine), expected) < 1e-14);
  Rng rng(4);
  for (int k = 0; k < 10; ++k) {
    const auto v = random_real_field(8, true, rng);
    const auto f = rhs_rescaled_kdv(2.0, 0.05, v);
    CHECK(f[0] == cplx{});
    CHECK(f.reality_defect() < 1e-14);
  }
}

TEST_CASE("reduced GL2 right-hand side") {
  const double alpha = 1.7;
  const auto eq = make_field(2, {{0, std::sqrt(alpha)}});
  CHECK(hs_norm(rhs_reduced_gl2(alpha, eq, 2), 0.0) < 1e-15);
  CHECK(hs_norm(rhs_reduced_gl2(alpha, SpectralField(2), 2), 0.0) == 0.0);
  const auto real_input = make_field(2, {{-2, 0.3}, {0, -0.5}, {1, 0.9}});
  const auto out = rhs_reduced_gl2(alpha, real_input, 2);
  for (int n = -2; n <= 2; ++n) CHECK(out[n].imag() == 0.0);
  CHECK_THROWS(rhs_reduced_gl2(alpha, real_input, 3));
  CHECK(default_reduced_dimension(1.5) == 2);
  CHECK(default_reduced_dimension(4.0) == 3);
  CHECK(default_reduced_dimension(-1.0) == 1);
}

TEST_CASE("three-dimensional reduction") {
  const ODE3Params p{1.3, 0.8, -0.4};
  const auto origin = rhs_ode3(p, {0.0, 0.0, 0.3});
  CHECK(origin.dr == 0.0);
  CHECK(origin.drho == 0.0);
  CHECK(origin.deta == doctest::Approx(-0.8));
  for (double rho : {0.1, 0.7, 2.0})
    for (double eta : {-1.0, 0.5, 3.0}) CHECK(rhs_ode3(p, {0.0, rho, eta}).dr == 0.0);
}

TEST_CASE("kind names round trip") {
  for (int k = 0; k <= static_cast<int>(ModelKind::ODE3); ++k) {
    const auto kind = static_cast<ModelKind>(k);
    const auto parsed = parse_model_kind(to_string(kind));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == kind);
  }
  CHECK_FALSE(parse_model_kind("nonsense").has_value());
}

TEST_CASE("structural properties") {
  Rng rng(5);
  SUBCASE("averaged right-hand sides preserve low-mode support") {
    for (auto kind : {ModelKind::GL1Averaged, ModelKind::GL2Averaged}) {
      auto m = model_of(kind);
      m.params.beta = cplx(2.0, 0.3);
      m.params.omega = 0.4;
      const auto w = random_complex_field(3, rng).resized(8);
      const auto f = full_rhs(m, 0.0, w);
      for (int n = 4; n <= 8; ++n) {
        CHECK(f[n] == cplx{});
        CHECK(f[-n] == cplx{});
      }
    }
  }
  SUBCASE("KS keeps the mean at zero") {
    auto m = model_of(ModelKind::KSPhysical);
    m.params.a = 2.0;
    m.params.with_L(30.0);
    const auto u = random_real_field(12, true, rng);
    CHECK(full_rhs(m, 0.0, u)[0] == cplx{});
  }
  SUBCASE("dispersion does not change the energy") {
    auto m = model_of(ModelKind::GL1Physical);
    m.params.with_L(250.0);
    const auto u = random_complex_field(10, rng);
    SpectralField dispersive(10);
    for (int n = -10; n <= 10; ++n) dispersive.mode(n) = cplx(0.0, -m.params.L * n * n * n) * u[n];
    CHECK(std::abs(inner_product(dispersive, u).real()) <= 1e-12);
  }
}
