#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "displab/models.hpp"
#include "displab/spectral_field.hpp"
#include "displab/timestep.hpp"

namespace displab {

// ---- Equilibria of the reduced GL2 system -------------------------------

enum class Stability { Stable, Unstable };

struct EquilibriumRecord {
  std::vector<int> support;    ///< ascending modes with v_n != 0
  std::vector<double> moduli;  ///< |v_n|^2, aligned with support
  int n0 = 0;                  ///< support size
  int n2 = 0;                  ///< sum of n^2 over the support
  double norm_sq = 0.0;
  Stability stability = Stability::Unstable;
  bool hyperbolic = true;

  /// Real representative on the torus (all phases zero) with truncation D.
  SpectralField point(int D) const;
  /// Modulus vector (|v_n|) for n = -D..D.
  std::vector<double> modulus_pattern(int D) const;
  /// "{-1;1}" style label, "{}" for the zero equilibrium.
  std::string support_label() const;
};

/// Zero equilibrium first, then every nonempty support of {-D..D} meeting
/// both positivity conditions, in order of increasing support size and then
/// lexicographic support. Throws std::invalid_argument for D > 12 or D < 1.
std::vector<EquilibriumRecord> enumerate_equilibria(double alpha, int D);

/// Max modulus of the reduced right-hand side at record.point(D).
double equilibrium_residual(const EquilibriumRecord& record, double alpha, int D);

/// Eigenvalues (ascending) of the real linearization
/// J_nm = delta_nm(-n^2 + alpha - 2|v|^2 + 3 v_n^2) - 4 v_n v_m on |n| <= D.
std::vector<double> linearization_spectrum(const EquilibriumRecord& record, double alpha, int D);

// ---- Averaging rate -----------------------------------------------------

struct RateRow {
  double L;
  double eps;
  double err_h1;
};

struct RateTable {
  std::vector<RateRow> rows;
  double slope = 0.0;  ///< least squares of log err_h1 against log eps
};

struct RateOptions {
  double rotating_steps_per_period = 64.0;  ///< h_rot <= (2pi/L) / this
  double averaged_step = 1e-3;
  int threads = 1;
};

class RateAborted : public std::runtime_error {
 public:
  RateAborted(const std::string& what, RateTable partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const RateTable& partial_table() const { return partial_; }

 private:
  RateTable partial_;
};

/// Integrates the rotating and averaged forms of the GL1 or GL2 model from
/// w0 to T for each L and records |w_eps(T) - w_hat(T)|_{H^1}.
RateTable averaging_rate_experiment(Family family, const ModelParams& params, const SpectralField& w0,
                                    double T, const std::vector<double>& L_list,
                                    const RateOptions& options = {});

// ---- Attractor norm scan ------------------------------------------------

struct ScanRow {
  double L;
  std::uint64_t seed;
  double stat;             ///< time average of |u|_H over [burn_in, T]
  double bound_coefficient;  ///< max_t (|u(t)|^2 - |u0|^2 e^{-t}) / (L^2 + 1)
  bool blew_up;
};

struct ScanTable {
  std::vector<ScanRow> rows;           ///< ordered by (L, seed)
  std::vector<double> L_values;
  std::vector<double> statistic;       ///< max over the ensemble, per L
  double slope = 0.0;                  ///< log statistic against log L
};

struct ScanOptions {
  int truncation = 32;
  double h_max = 1e-2;     ///< step is min(h_max, h_scale / L)
  double h_scale = 0.1;
  int sample_every = 10;
  double initial_norm = 1.0;
  std::uint64_t seed = 1;  ///< member k uses seed + k
  int threads = 1;
};

/// Ensemble integrations of `model` with L replaced by each entry of L_list.
/// KS members start from random real zero-mean data, GL members from random
/// complex data, all scaled to |u0|_H = initial_norm.
ScanTable attractor_norm_scan(const ModelSpec& model, const std::vector<double>& L_list, int ensemble_size,
                              double T, double burn_in, const ScanOptions& options = {});

// ---- H_D invariance -----------------------------------------------------

struct HdReport {
  double leakage = 0.0;         ///< largest |RHS_n| with |n| > D for input in H_D
  double max_super_mode = 0.0;  ///< largest |w_n(T)| with n^2 > Re beta
  bool passed = false;          ///< leakage == 0 and max_super_mode <= 1e-8
};

struct HdOptions {
  double beta_im = 0.0;
  double omega = 0.0;
  double h = 1e-2;
  std::uint64_t seed = 1;
};

HdReport hd_invariance_check(double beta, int D, double T, const HdOptions& options = {});

// ---- Gradient dynamics --------------------------------------------------

struct GradientMember {
  std::uint64_t seed = 0;
  int nearest = -1;  ///< index into GradientReport::equilibria
  double distance = 0.0;
  bool converged = false;        ///< distance <= tolerance and the nearest torus is stable
  double max_lyapunov_increase = 0.0;
  double max_rate_mismatch = 0.0;  ///< relative error of the centered dL/dt
  int rate_points = 0;
};

struct GradientReport {
  std::vector<EquilibriumRecord> equilibria;
  std::vector<GradientMember> members;
  bool all_converged = false;
  bool monotone = false;         ///< every step raised L by at most 1e-8
  double max_rate_mismatch = 0.0;
};

struct GradientOptions {
  int D = 0;  ///< 0 selects default_reduced_dimension(alpha)
  double h = 1e-2;
  double tolerance = 1e-4;
  double rate_floor = 1e-6;  ///< skip dL/dt comparisons where 2 sum |v_n'|^2 is below this
  std::uint64_t seed = 1;
  int threads = 1;
};

GradientReport gradient_convergence_experiment(double alpha, int ensemble_size, double T,
                                               const GradientOptions& options = {});

// ---- Rotating waves of the rescaled KdV-KS equation ---------------------

struct WaveRecord {
  SpectralField profile{0, true, true};
  double c = 0.0;
  double eps = 0.0;
  double residual = 0.0;
};

class NewtonDiverged : public std::runtime_error {
 public:
  NewtonDiverged(const std::string& what, double last_residual)
      : std::runtime_error(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

struct WaveOptions {
  int truncation = 32;
  double tolerance = 1e-10;
  int max_iterations = 60;
  double amplitude_floor = 1e-3;
};

/// H norm of c V' + eps(-V'''' - a V'') + V V' + V'''.
double wave_residual(double a, double eps, const SpectralField& V, double c);

/// Shifts the profile in x: V_n -> V_n e^{-i n s}.
SpectralField translate_profile(const SpectralField& V, double shift);

/// Translates so that the mode-1 coefficient is real and nonnegative.
SpectralField pin_phase(const SpectralField& V);

/// Newton iteration on the cosine/sine coefficients and c with the mode-1
/// sine coefficient fixed at zero. Without a guess it starts from the
/// two-harmonic KdV balance profile.
WaveRecord traveling_wave_solve(double a, double eps, const std::optional<WaveRecord>& initial_guess,
                                const WaveOptions& options = {});

/// Solves at eps_list[0] and continues through the remaining values.
std::vector<WaveRecord> wave_continuation(double a, const std::vector<double>& eps_list,
                                          const WaveOptions& options = {});

// ---- Lyapunov exponents and the three-dimensional reduction -------------

struct ExponentOptions {
  double h = 1e-2;
  double transient = 0.0;  ///< time integrated before accumulation starts
};

/// Top exponent by tangent-vector renormalization; the tangent is advanced
/// with central-difference directional derivatives of rhs.
double largest_lyapunov_exponent(const VectorRhs& rhs, const std::vector<double>& x0, double T,
                                 double renorm_every, const ExponentOptions& options = {});

VectorRhs ode3_vector_rhs(const ODE3Params& p);

struct ODE3Equilibrium {
  ODE3State state;
  double residual = 0.0;
  std::vector<cplx> eigenvalues;
};

/// Newton root of rhs_ode3 from the guess, eta reduced to [-pi, pi]. Throws
/// NewtonDiverged on failure or when the root leaves r, rho >= 0.
ODE3Equilibrium find_ode3_equilibrium(const ODE3Params& p, const ODE3State& guess);

struct ExponentRow {
  double beta, gamma, omega, lambda1;
};

struct ExponentScanOptions {
  ODE3State start{0.5, 0.5, 1.0};
  double T = 500.0;
  double renorm_every = 1.0;
  ExponentOptions integration{};
  int threads = 1;
};

/// Exponent over the grid, rows in (beta, gamma, omega) lexicographic order.
std::vector<ExponentRow> ode3_exponent_scan(const std::vector<double>& betas, const std::vector<double>& gammas,
                                            const std::vector<double>& omegas,
                                            const ExponentScanOptions& options = {});

// ---- Shared helpers -----------------------------------------------------

/// Fixed smooth complex datum w_n = e^{-|n|} + (i/2) e^{-3|n-1|/2}.
SpectralField smooth_reference_field(int truncation);

/// Least-squares slope of y against x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace displab
