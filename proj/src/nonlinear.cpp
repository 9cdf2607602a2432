#include "displab/nonlinear.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace displab {

GroupKind group_of(OscillatoryKind kind) {
  return kind == OscillatoryKind::CubicSchrodinger ? GroupKind::Schrodinger : GroupKind::Airy;
}

SpectralField gl_cubic(const SpectralField& u) {
  const int m = padded_grid_size(u.truncation());
  std::vector<cplx> values = to_physical(u, m);
  for (auto& v : values) v *= std::norm(v);
  SpectralField out = from_physical(values, u.truncation());
  return u.real_flag() ? symmetrized(out.with_flags(true, false)) : out;
}

SpectralField burgers_term(const SpectralField& u) {
  const std::array<SpectralField, 2> factors{u, derivative(u, 1)};
  const std::array<bool, 2> conj{false, false};
  SpectralField out = dealiased_product(factors, conj);
  if (u.real_flag()) {
    // u u_x = (u^2/2)_x has no mean for real u.
    out = symmetrized(out.with_flags(true, true));
  }
  return out;
}

SpectralField oscillatory_eval(OscillatoryKind kind, double tau, const SpectralField& w) {
  const GroupKind group = group_of(kind);
  const SpectralField rotated = apply_group(group, 1.0, tau, w);
  const SpectralField product =
      kind == OscillatoryKind::BurgersAiry ? burgers_term(rotated) : gl_cubic(rotated);
  return apply_group(group, 1.0, -tau, product);
}

SpectralField averaged_N(const SpectralField& w) {
  const int n_max = w.truncation();
  const double norm_sq = hs_norm(w, 0.0) * hs_norm(w, 0.0);
  const cplx self_pairing = pairing(w, w);
  SpectralField out(n_max, w.real_flag(), false);
  const cplx w0 = w[0];
  out.mode(0) = 2.0 * w0 * (norm_sq - std::norm(w0)) + std::conj(w0) * self_pairing;
  for (int n = 1; n <= n_max; ++n) {
    for (int sign : {1, -1}) {
      const int k = sign * n;
      out.mode(k) = w[k] * (2.0 * norm_sq - std::norm(w[k]) - 2.0 * std::norm(w[-k])) +
                    std::conj(w[-k]) * self_pairing;
    }
  }
  return out;
}

SpectralField averaged_N_unseparated(const SpectralField& w) {
  const int n_max = w.truncation();
  const double norm_sq = hs_norm(w, 0.0) * hs_norm(w, 0.0);
  const cplx self_pairing = pairing(w, w);
  SpectralField out = 2.0 * norm_sq * w + self_pairing * w.conjugated();
  out.mode(0) -= 2.0 * w[0] * std::norm(w[0]);
  for (int n = -n_max; n <= n_max; ++n) {
    if (n == 0) continue;
    out.mode(n) -= w[n] * (std::norm(w[n]) + 2.0 * std::norm(w[-n]));
  }
  return out.with_flags(w.real_flag(), false);
}

SpectralField averaged_M(const SpectralField& w) {
  const double norm_sq = hs_norm(w, 0.0) * hs_norm(w, 0.0);
  SpectralField out(w.truncation(), w.real_flag(), w.zero_mean_flag());
  for (int n = -w.truncation(); n <= w.truncation(); ++n)
    out.mode(n) = w[n] * (2.0 * norm_sq - std::norm(w[n]));
  return out;
}

SpectralField averaged_K(const SpectralField& w) {
  SpectralField out = w[0] * derivative(w, 1);
  cplx resonant{};
  for (int n = -w.truncation(); n <= w.truncation(); ++n)
    resonant += cplx(0.0, n) * w[n] * w[-n];
  out.mode(0) += resonant;
  return out.with_flags(w.real_flag(), false);
}

long long quadrature_threshold(OscillatoryKind kind, int truncation) {
  const long long three_n = 3LL * truncation;
  const long long top = group_of(kind) == GroupKind::Airy ? 2 * three_n * three_n * three_n
                                                          : 2 * three_n * three_n;
  return top + 1;
}

SpectralField quadrature_average(OscillatoryKind kind, const SpectralField& w, long long points) {
  const long long needed = quadrature_threshold(kind, w.truncation());
  if (points < needed)
    throw InexactQuadrature("inexact quadrature: " + std::to_string(points) +
                            " points, need at least " + std::to_string(needed));
  const std::size_t size = w.size();
  // Neumaier summation per coefficient.
  std::vector<cplx> sum(size), carry(size);
  auto accumulate = [](double& s, double& c, double x) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  };
  for (long long j = 0; j < points; ++j) {
    const double tau = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(points);
    const SpectralField value = oscillatory_eval(kind, tau, w);
    const auto coeffs = value.coeffs();
    for (std::size_t i = 0; i < size; ++i) {
      double sr = sum[i].real(), si = sum[i].imag();
      double cr = carry[i].real(), ci = carry[i].imag();
      accumulate(sr, cr, coeffs[i].real());
      accumulate(si, ci, coeffs[i].imag());
      sum[i] = {sr, si};
      carry[i] = {cr, ci};
    }
  }
  SpectralField out(w.truncation(), w.real_flag() && kind != OscillatoryKind::CubicSchrodinger,
                    false);
  const double scale = 1.0 / static_cast<double>(points);
  auto coeffs = out.coeffs_mut();
  for (std::size_t i = 0; i < size; ++i) coeffs[i] = (sum[i] + carry[i]) * scale;
  return out;
}

}  // namespace displab
