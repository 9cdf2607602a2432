#pragma once

#include "displab/spectral_field.hpp"

namespace displab {

/// Linear dispersion groups: Airy (d/dt v = L v_xxx) rotates e_n by
/// exp(-i L n^3 t); Schrodinger (d/dt v = i L v_xx) by exp(-i L n^2 t).
enum class GroupKind { Airy, Schrodinger };

/// n^3 or n^2.
long double dispersion_exponent(GroupKind kind, int n);

/// exp(-i L phi(n) t), with L phi(n) t reduced modulo 2pi in extended precision.
cplx group_phase(GroupKind kind, double L, double t, int n);

/// Mode-wise e^{-i L phi(n) t} w_n. Airy keeps real fields real.
SpectralField apply_group(GroupKind kind, double L, double t, const SpectralField& w);

}  // namespace displab
