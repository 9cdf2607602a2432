#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

namespace displab {

using cplx = std::complex<double>;

/// Truncated Fourier coefficients w_n, |n| <= N, of a 2pi-periodic function
/// on (-pi, pi). Storage is the dense symmetric range -N..N; reality and
/// zero mean are flags asserted by the producer, not storage layouts.
class SpectralField {
 public:
  explicit SpectralField(int truncation, bool real = false, bool zero_mean = false);

  /// The basis function e_n = exp(i n x).
  static SpectralField unit(int truncation, int n);

  int truncation() const { return truncation_; }
  std::size_t size() const { return coeffs_.size(); }

  cplx operator[](int n) const { return coeffs_[index(n)]; }
  cplx& mode(int n) { return coeffs_[index(n)]; }

  /// Mode n, or zero when |n| exceeds the truncation.
  cplx at_or_zero(int n) const;

  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<cplx> coeffs_mut() { return coeffs_; }

  bool real_flag() const { return real_; }
  bool zero_mean_flag() const { return zero_mean_; }
  SpectralField with_flags(bool real, bool zero_mean) const;

  /// max_n |w_{-n} - conj(w_n)|
  double reality_defect() const;

  /// Zero-pads or truncates to a new N; flags carry over.
  SpectralField resized(int truncation) const;

  /// Coefficients of the pointwise conjugate function: (conj w)_n = conj(w_{-n}).
  SpectralField conjugated() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(cplx scalar);
  SpectralField& operator*=(double scalar);

 private:
  std::size_t index(int n) const { return static_cast<std::size_t>(n + truncation_); }

  int truncation_;
  std::vector<cplx> coeffs_;
  bool real_;
  bool zero_mean_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(cplx s, SpectralField a);
SpectralField operator*(double s, SpectralField a);

/// Projection onto real fields, w_{-n} = conj(w_n) bit-exact; sets the reality flag.
SpectralField symmetrized(const SpectralField& field);

/// Builds a field from explicit (mode, value) pairs.
SpectralField make_field(int truncation, std::initializer_list<std::pair<int, cplx>> modes);

/// sqrt(sum_n (n^2+1)^s |w_n|^2); s = 0 is the H norm.
double hs_norm(const SpectralField& field, double s);

/// [v, w] = sum_n v_n w_{-n}. Fields of different truncation are zero-padded.
cplx pairing(const SpectralField& v, const SpectralField& w);

/// (v, w)_H = sum_n v_n conj(w_n).
cplx inner_product(const SpectralField& v, const SpectralField& w);

/// Mode n multiplied by (i n)^order.
SpectralField derivative(const SpectralField& field, int order);

/// Smallest power of two >= 4N+2; alias-free for quadratic and cubic products.
int padded_grid_size(int truncation);

/// Point values u(x_j), x_j = 2 pi j / M, j = 0..M-1.
std::vector<cplx> to_physical(const SpectralField& field, int grid_size);

/// Discrete Fourier coefficients of grid values, truncated to |n| <= N.
SpectralField from_physical(std::span<const cplx> values, int truncation);

/// Alias-free product of 2 or 3 factors (conjugated where the mask says so),
/// truncated back to |n| <= N. Equivalent to exact truncated convolution.
SpectralField dealiased_product(std::span<const SpectralField> factors,
                                std::span<const bool> conjugate);

}  // namespace displab
