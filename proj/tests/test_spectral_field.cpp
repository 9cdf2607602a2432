#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "displab/random_field.hpp"
#include "displab/spectral_field.hpp"
#include "oracles.hpp"

using namespace displab;

namespace {
SpectralField product2(const SpectralField& a, const SpectralField& b, bool ca = false, bool cb = false) {
  const std::array<SpectralField, 2> f{a, b};
  const std::array<bool, 2> c{ca, cb};
  return dealiased_product(f, c);
}
}  // namespace

TEST_CASE("field layout and flags") {
  SpectralField f(3);
  CHECK(f.size() == 7);
  CHECK(f.truncation() == 3);
  f.mode(-3) = 2.0;
  CHECK(f.coeffs()[0] == cplx(2.0));
  CHECK(f.at_or_zero(5) == cplx{});
  CHECK_THROWS_AS(SpectralField(-1), std::invalid_argument);
  CHECK_THROWS_AS(SpectralField::unit(2, 3), std::out_of_range);

  const auto cosine = make_field(2, {{1, 1.0}, {-1, 1.0}});
  CHECK(cosine.real_flag());
  CHECK(cosine.zero_mean_flag());
  const auto complex_field = make_field(2, {{1, cplx(0.0, 1.0)}});
  CHECK_FALSE(complex_field.real_flag());
}

TEST_CASE("hs_norm examples") {
  CHECK(hs_norm(SpectralField::unit(4, 1), 0.0) == doctest::Approx(1.0));
  CHECK(hs_norm(SpectralField::unit(4, 1), 1.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(hs_norm(make_field(4, {{1, 1.0}, {2, 1.0}}), 1.0) == doctest::Approx(std::sqrt(7.0)));
}

TEST_CASE("pairing and inner product") {
  CHECK(pairing(SpectralField::unit(3, 1), SpectralField::unit(3, -1)) == cplx(1.0));
  CHECK(pairing(SpectralField::unit(3, 1), SpectralField::unit(3, 1)) == cplx(0.0));
  const auto w = make_field(3, {{0, 1.0}, {1, 1.0}, {-1, 1.0}});
  CHECK(pairing(w, w) == cplx(3.0));
  CHECK(inner_product(SpectralField::unit(3, 1), SpectralField::unit(3, 1)) == cplx(1.0));
  CHECK(inner_product(SpectralField::unit(3, 1), SpectralField::unit(3, 2)) == cplx(0.0));
  CHECK(inner_product(make_field(1, {{0, 2.0}}), make_field(1, {{0, cplx(0.0, 1.0)}})) == cplx(0.0, -2.0));
  CHECK_THROWS_AS(inner_product(SpectralField(2), SpectralField(3)), std::invalid_argument);

  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    const auto v = random_complex_field(6, rng);
    const auto u = random_complex_field(6, rng);
    CHECK(std::abs(pairing(v, u) - pairing(u, v)) < 1e-15);
    // (v,w) = [v, conj(w)], where conj(w) has modes conj(w_{-n}).
    CHECK(std::abs(inner_product(v, u) - pairing(v, u.conjugated())) < 1e-15);
    CHECK(inner_product(v, v).real() == doctest::Approx(std::pow(hs_norm(v, 0.0), 2)).epsilon(1e-14));
  }
}

TEST_CASE("derivative examples") {
  const auto d1 = derivative(SpectralField::unit(3, 1), 1);
  CHECK(d1[1] == cplx(0.0, 1.0));
  const auto d2 = derivative(SpectralField::unit(3, 2), 2);
  CHECK(d2[2] == cplx(-4.0));
  const auto dc = derivative(make_field(3, {{1, 1.0}, {-1, 1.0}}), 1);
  CHECK(dc[1] == cplx(0.0, 1.0));
  CHECK(dc[-1] == cplx(0.0, -1.0));
  CHECK(dc.real_flag());
  CHECK(dc.reality_defect() == 0.0);
  CHECK_THROWS_AS(derivative(dc, 0), std::invalid_argument);

  Rng rng(3);
  const auto r = random_real_field(9, true, rng);
  const auto d3 = derivative(r, 3);
  CHECK(d3.reality_defect() == 0.0);
  CHECK(d3.zero_mean_flag());
}

TEST_CASE("dealiased product examples") {
  const auto e1 = SpectralField::unit(4, 1);
  CHECK(oracle::max_abs_diff(product2(e1, e1), SpectralField::unit(4, 2)) < 1e-15);
  const auto eN = SpectralField::unit(4, 4);
  CHECK(hs_norm(product2(eN, eN), 0.0) < 1e-15);
  const cplx c(0.7, -0.4);
  const auto u = make_field(3, {{0, c}});
  const std::array<SpectralField, 3> f{u, u, u};
  const std::array<bool, 3> mask{false, false, true};
  const auto cubic = dealiased_product(f, mask);
  CHECK(std::abs(cubic[0] - std::norm(c) * c) < 1e-15);
}

TEST_CASE("dealiased product matches direct convolution") {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int N = 1 + trial % 8;
    const auto a = random_complex_field(N, rng);
    const auto b = random_complex_field(N, rng);
    const auto c = random_complex_field(N, rng);
    for (bool cb : {false, true}) {
      const auto fast = product2(a, b, false, cb);
      const auto slow = oracle::direct_product({a, b}, {false, cb});
      CHECK(oracle::max_abs_diff(fast, slow) <= 1e-12 * (1.0 + hs_norm(slow, 0.0)));
    }
    const std::array<SpectralField, 3> f{a, b, c};
    const std::array<bool, 3> mask{false, trial % 2 == 0, true};
    const auto fast3 = dealiased_product(f, mask);
    const auto slow3 = oracle::direct_product({a, b, c}, {false, trial % 2 == 0, true});
    CHECK(oracle::max_abs_diff(fast3, slow3) <= 1e-12 * (1.0 + hs_norm(slow3, 0.0)));
  }
}

TEST_CASE("real factors give an exactly real product") {
  Rng rng(2);
  for (int k = 0; k < 10; ++k) {
    const auto a = random_real_field(7, false, rng);
    const auto b = random_real_field(7, true, rng);
    const auto p = product2(a, b);
    CHECK(p.real_flag());
    CHECK(p.reality_defect() == 0.0);
    CHECK(oracle::max_abs_diff(p, oracle::direct_product({a, b}, {false, false})) < 1e-12);
  }
}

TEST_CASE("mismatched truncations are rejected") {
  const std::array<SpectralField, 2> f{SpectralField(3), SpectralField(4)};
  const std::array<bool, 2> mask{false, false};
  CHECK_THROWS_WITH_AS(dealiased_product(f, mask), doctest::Contains("grid-size mismatch"), std::invalid_argument);
  const std::array<SpectralField, 1> one{SpectralField(3)};
  const std::array<bool, 1> m1{false};
  CHECK_THROWS_AS(dealiased_product(one, m1), std::invalid_argument);
}

TEST_CASE("Parseval on the padded grid") {
  Rng rng(8);
  for (int k = 0; k < 10; ++k) {
    const auto w = random_complex_field(10, rng);
    const int M = padded_grid_size(10);
    const auto values = to_physical(w, M);
    double mean_sq = 0.0;
    for (const auto& v : values) mean_sq += std::norm(v);
    mean_sq /= M;
    CHECK(mean_sq == doctest::Approx(std::pow(hs_norm(w, 0.0), 2)).epsilon(1e-12));
    CHECK(oracle::max_abs_diff(from_physical(values, 10), w) < 1e-14);
  }
  CHECK(padded_grid_size(8) == 64);
  CHECK(padded_grid_size(16) == 128);
}

TEST_CASE("derivative commutes with the product away from truncation") {
  Rng rng(4);
  const auto a = random_complex_field(6, rng).resized(12);
  const auto b = random_complex_field(6, rng).resized(12);
  const auto lhs = derivative(product2(a, b), 1);
  const auto rhs = product2(derivative(a, 1), b) + product2(a, derivative(b, 1));
  CHECK(oracle::max_abs_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("symmetrized projects onto real fields") {
  Rng rng(6);
  const auto w = random_complex_field(5, rng);
  const auto s = symmetrized(w);
  CHECK(s.reality_defect() == 0.0);
  const auto r = random_real_field(5, false, rng);
  CHECK(oracle::max_abs_diff(symmetrized(r), r) < 1e-16);
}

TEST_CASE("random generators") {
  Rng a(42), b(42);
  CHECK(oracle::max_abs_diff(random_complex_field(8, a), random_complex_field(8, b)) == 0.0);
  Rng rng(1);
  const auto u = random_unit_real_field(16, rng);
  CHECK(u.real_flag());
  CHECK(u.zero_mean_flag());
  CHECK(u[0] == cplx{});
  CHECK(hs_norm(u, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(u.reality_defect() == 0.0);
}
