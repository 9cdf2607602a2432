#include "displab/dispersion.hpp"

#include <cmath>
#include <numbers>

namespace displab {

long double dispersion_exponent(GroupKind kind, int n) {
  const long double x = n;
  return kind == GroupKind::Airy ? x * x * x : x * x;
}

cplx group_phase(GroupKind kind, double L, double t, int n) {
  constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  const long double arg = static_cast<long double>(L) * dispersion_exponent(kind, n) *
                          static_cast<long double>(t);
  const double reduced = static_cast<double>(std::fmod(arg, two_pi));
  return {std::cos(reduced), -std::sin(reduced)};
}

SpectralField apply_group(GroupKind kind, double L, double t, const SpectralField& w) {
  const bool keeps_reality = w.real_flag() && kind == GroupKind::Airy;
  SpectralField out(w.truncation(), keeps_reality, w.zero_mean_flag());
  const int n_max = w.truncation();
  out.mode(0) = w[0];
  for (int n = 1; n <= n_max; ++n) {
    const cplx phase = group_phase(kind, L, t, n);
    out.mode(n) = phase * w[n];
    // phi(-n) = -phi(n) for Airy, phi(n) for Schrodinger.
    out.mode(-n) = (kind == GroupKind::Airy ? std::conj(phase) : phase) * w[-n];
  }
  return out;
}

}  // namespace displab
