#include <Eigen/Dense>

#include <cmath>

#include "displab/analysis.hpp"

namespace displab {

namespace {

SpectralField stationary_residual(double a, double eps, const SpectralField& V, double c) {
  SpectralField r = rhs_rescaled_kdv(a, eps, V);
  r += c * derivative(V, 1);
  return symmetrized(r);
}

// Unknowns: cosine coefficients a_1..a_N, sine coefficients b_2..b_N, then c.
// V = sum a_n cos(nx) + b_n sin(nx), so V_n = (a_n - i b_n) / 2.
SpectralField profile_of(const Eigen::VectorXd& x, int N) {
  SpectralField V(N, true, true);
  for (int n = 1; n <= N; ++n) {
    const double an = x(n - 1);
    const double bn = n >= 2 ? x(N + n - 2) : 0.0;
    V.mode(n) = cplx(0.5 * an, -0.5 * bn);
    V.mode(-n) = std::conj(V[n]);
  }
  return V;
}

Eigen::VectorXd unknowns_of(const SpectralField& V, double c) {
  const int N = V.truncation();
  Eigen::VectorXd x(2 * N);
  for (int n = 1; n <= N; ++n) {
    x(n - 1) = 2.0 * V[n].real();
    if (n >= 2) x(N + n - 2) = -2.0 * V[n].imag();
  }
  x(2 * N - 1) = c;
  return x;
}

Eigen::VectorXd equations(double a, double eps, const Eigen::VectorXd& x, int N) {
  const SpectralField r = stationary_residual(a, eps, profile_of(x, N), x(2 * N - 1));
  Eigen::VectorXd out(2 * N);
  for (int n = 1; n <= N; ++n) {
    out(2 * (n - 1)) = r[n].real();
    out(2 * (n - 1) + 1) = r[n].imag();
  }
  return out;
}

WaveRecord balance_guess(double a, int N) {
  // Two harmonics A cos x + B cos 2x with B = A^2/12 from the KdV mode-2
  // balance and A fixed by the energy balance (a-1)A^2 = (16-4a)B^2.
  const double amp_sq = a > 1.0 && a < 4.0 ? 144.0 * (a - 1.0) / (16.0 - 4.0 * a) : 9.0;
  const double A = std::sqrt(amp_sq);
  const double B = amp_sq / 12.0;
  WaveRecord guess;
  guess.profile = SpectralField(N, true, true);
  guess.profile.mode(1) = guess.profile.mode(-1) = 0.5 * A;
  if (N >= 2) guess.profile.mode(2) = guess.profile.mode(-2) = 0.5 * B;
  guess.c = 1.0 - B / 2.0;
  return guess;
}

}  // namespace

double wave_residual(double a, double eps, const SpectralField& V, double c) {
  return hs_norm(stationary_residual(a, eps, V, c), 0.0);
}

SpectralField translate_profile(const SpectralField& V, double shift) {
  SpectralField out(V.truncation(), true, V.zero_mean_flag());
  for (int n = 0; n <= V.truncation(); ++n) {
    out.mode(n) = V[n] * std::polar(1.0, -n * shift);
    out.mode(-n) = std::conj(out[n]);
  }
  return out;
}

SpectralField pin_phase(const SpectralField& V) {
  if (V.truncation() < 1 || V[1] == cplx{}) return V;
  return translate_profile(V, std::arg(V[1]));
}

WaveRecord traveling_wave_solve(double a, double eps, const std::optional<WaveRecord>& initial_guess,
                                const WaveOptions& options) {
  const int N = options.truncation;
  if (N < 2) throw std::invalid_argument("wave solver needs at least two harmonics");
  WaveRecord guess = initial_guess ? *initial_guess : balance_guess(a, N);
  const SpectralField start = pin_phase(symmetrized(guess.profile.resized(N).with_flags(true, true)));
  if (hs_norm(start, 0.0) < options.amplitude_floor)
    throw std::invalid_argument("initial guess below the amplitude floor; Newton would find V = 0");

  Eigen::VectorXd x = unknowns_of(start, guess.c);
  Eigen::VectorXd F = equations(a, eps, x, N);
  double residual = wave_residual(a, eps, profile_of(x, N), x(2 * N - 1));
  const int dim = 2 * N;
  for (int iter = 0; iter < options.max_iterations && residual >= options.tolerance; ++iter) {
    // The residual is quadratic in the unknowns, so central differences are exact up to rounding.
    Eigen::MatrixXd J(dim, dim);
    const double delta = 1e-3;
    for (int j = 0; j < dim; ++j) {
      Eigen::VectorXd xp = x, xm = x;
      xp(j) += delta;
      xm(j) -= delta;
      J.col(j) = (equations(a, eps, xp, N) - equations(a, eps, xm, N)) / (2.0 * delta);
    }
    const Eigen::VectorXd step = J.fullPivLu().solve(-F);
    double scale = 1.0;
    for (int halving = 0; halving < 20; ++halving, scale *= 0.5) {
      const Eigen::VectorXd trial = x + scale * step;
      const double r = wave_residual(a, eps, profile_of(trial, N), trial(dim - 1));
      if (std::isfinite(r) && (r < residual || halving == 19)) {
        x = trial;
        residual = r;
        break;
      }
    }
    F = equations(a, eps, x, N);
  }
  if (!(residual < options.tolerance))
    throw NewtonDiverged("wave Newton iteration did not converge", residual);

  WaveRecord out;
  out.profile = profile_of(x, N);
  out.c = x(dim - 1);
  out.eps = eps;
  out.residual = residual;
  if (hs_norm(out.profile, 0.0) < options.amplitude_floor)
    throw NewtonDiverged("wave Newton iteration collapsed to the trivial solution", residual);
  return out;
}

std::vector<WaveRecord> wave_continuation(double a, const std::vector<double>& eps_list, const WaveOptions& options) {
  std::vector<WaveRecord> out;
  std::optional<WaveRecord> guess;
  for (double eps : eps_list) {
    out.push_back(traveling_wave_solve(a, eps, guess, options));
    guess = out.back();
  }
  return out;
}

}  // namespace displab
