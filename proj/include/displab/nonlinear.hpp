#pragma once

#include <stdexcept>

#include "displab/dispersion.hpp"
#include "displab/spectral_field.hpp"

namespace displab {

/// The three rapidly oscillating nonlinearities, all 2pi-periodic in tau:
///   CubicAiry         F(tau,w) = H_1(-tau)(H_1(tau)w |H_1(tau)w|^2)
///   CubicSchrodinger  G(tau,w) = F_1(-tau)(F_1(tau)w |F_1(tau)w|^2)
///   BurgersAiry       H(tau,w) = H_1(-tau)(H_1(tau)w d/dx H_1(tau)w)
enum class OscillatoryKind { CubicAiry, CubicSchrodinger, BurgersAiry };

GroupKind group_of(OscillatoryKind kind);

class InexactQuadrature : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Alias-free u|u|^2.
SpectralField gl_cubic(const SpectralField& u);

/// Alias-free u u_x. Real input gives a real output with mode 0 exactly zero.
SpectralField burgers_term(const SpectralField& u);

SpectralField oscillatory_eval(OscillatoryKind kind, double tau, const SpectralField& w);

/// Closed-form tau-average of F (mode-separated form).
SpectralField averaged_N(const SpectralField& w);

/// The same average written as 2w|w|^2 + conj(w)[w,w] - 2w_0|w_0|^2 e_0
/// - sum_{n!=0} w_n(|w_n|^2 + 2|w_{-n}|^2) e_n. Kept for cross-checking.
SpectralField averaged_N_unseparated(const SpectralField& w);

/// Closed-form tau-average of G: mode n is w_n(2|w|^2 - |w_n|^2).
SpectralField averaged_M(const SpectralField& w);

/// Closed-form tau-average of the Burgers term: w_0 w_x + (sum i n w_n w_{-n}) e_0.
SpectralField averaged_K(const SpectralField& w);

/// Smallest trapezoid point count accepted by quadrature_average: one more
/// than 2(3N)^3 (Airy kernels) or 2(3N)^2 (Schrodinger).
long long quadrature_threshold(OscillatoryKind kind, int truncation);

/// (1/P) sum_j oscillatory_eval(kind, 2 pi j / P, w) with compensated summation.
/// Throws InexactQuadrature when P does not exceed the integrand's top frequency.
SpectralField quadrature_average(OscillatoryKind kind, const SpectralField& w, long long points);

}  // namespace displab
