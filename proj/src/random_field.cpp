#include "displab/random_field.hpp"

#include <cmath>

namespace displab {

namespace {

cplx gaussian_mode(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sigma = 1.0 / (1.0 + static_cast<double>(n) * n);
  // Each of the two components carries half the variance.
  const double re = normal(rng);
  const double im = normal(rng);
  return sigma * std::sqrt(0.5) * cplx(re, im);
}

}  // namespace

SpectralField random_complex_field(int truncation, Rng& rng) {
  SpectralField f(truncation);
  for (int n = -truncation; n <= truncation; ++n) f.mode(n) = gaussian_mode(n, rng);
  return f;
}

SpectralField random_real_field(int truncation, bool zero_mean, Rng& rng) {
  SpectralField f(truncation, true, zero_mean);
  std::normal_distribution<double> normal(0.0, 1.0);
  f.mode(0) = zero_mean ? 0.0 : normal(rng);
  for (int n = 1; n <= truncation; ++n) {
    f.mode(n) = gaussian_mode(n, rng);
    f.mode(-n) = std::conj(f[n]);
  }
  return f;
}

SpectralField random_unit_real_field(int truncation, Rng& rng) {
  SpectralField f = random_real_field(truncation, true, rng);
  return (1.0 / hs_norm(f, 0.0)) * f;
}

}  // namespace displab
