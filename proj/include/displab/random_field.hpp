#pragma once

#include <cstdint>
#include <random>

#include "displab/spectral_field.hpp"

namespace displab {

using Rng = std::mt19937_64;

/// Independent complex Gaussian modes with variance (1+n^2)^-2.
SpectralField random_complex_field(int truncation, Rng& rng);

/// Real field (w_{-n} = conj(w_n)) with the same spectral variance; mode 0
/// is zero when zero_mean is set.
SpectralField random_real_field(int truncation, bool zero_mean, Rng& rng);

/// Real zero-mean field rescaled to unit H norm.
SpectralField random_unit_real_field(int truncation, Rng& rng);

}  // namespace displab
