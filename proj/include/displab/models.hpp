#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "displab/dispersion.hpp"
#include "displab/nonlinear.hpp"
#include "displab/spectral_field.hpp"

namespace displab {

/// The twelve right-hand sides. GL1 carries Airy dispersion L u_xxx, GL2
/// carries Schrodinger dispersion i L u_xx, KS is real with L u_xxx.
enum class ModelKind {
  GL1Physical,
  GL1Rotating,
  GL1Averaged,
  GL2Physical,
  GL2Rotating,
  GL2Averaged,
  KSPhysical,
  KSRotating,
  KSAveraged,
  KdVRescaled,
  GL2Reduced,
  ODE3,
};

enum class Family { GL1, GL2, KS, Other };
enum class Frame { Physical, Rotating, Averaged, Standalone };

struct ModelParams {
  double gamma_diff = 0.0;  ///< diffusion phase of GL1, (1 + i gamma) u_xx
  cplx beta{0.0, 0.0};      ///< linear growth; Re is alpha, Im is beta_im (gamma_4)
  double omega = 0.0;       ///< cubic phase, (1 + i omega) u|u|^2
  double a = 0.0;           ///< KS anti-diffusion
  double L = 0.0;           ///< dispersion
  double eps = 0.0;         ///< 1/L, or the KdV perturbation size
  double nonlinear_scale = 1.0;  ///< multiplies the nonlinear part; 0 leaves the linear problem

  /// Sets L and eps = 1/L together.
  ModelParams& with_L(double dispersion);
};

struct ModelSpec {
  ModelKind kind;
  ModelParams params;
};

class FlagMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Family family_of(ModelKind kind);
Frame frame_of(ModelKind kind);
bool is_pde(ModelKind kind);
std::string to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(const std::string& name);

/// Rejects inconsistent parameters (eps * L != 1 when both are set).
void validate(const ModelSpec& model);

/// Advisory messages: KS with a equal to a perfect square, rotating-frame
/// step too coarse for the tau oscillation.
std::vector<std::string> model_warnings(const ModelSpec& model, double step);

/// Diagonal Fourier symbol lambda_n of the linear part.
cplx linear_symbol(const ModelSpec& model, int n);

/// Non-diagonal part of the right-hand side at time t.
SpectralField nonlinear_rhs(const ModelSpec& model, double t, const SpectralField& w);

/// linear part + nonlinear part.
SpectralField full_rhs(const ModelSpec& model, double t, const SpectralField& w);

/// d/dtau v = eps(-v_xxxx - a v_xx) + v v_x + v_xxx.
SpectralField rhs_rescaled_kdv(double a, double eps, const SpectralField& v);

/// d/dt v_n = -n^2 v_n + alpha v_n - 2 v_n |v|^2 + v_n |v_n|^2.
SpectralField rhs_reduced_gl2(double alpha, const SpectralField& v, int D);

/// Default reduced dimension floor(sqrt(alpha)) + 1 (1 when alpha <= 0).
int default_reduced_dimension(double alpha);

/// State of the 3D reduction on the invariant manifold y e_0 + v(e_1 + e_{-1}):
/// r = |y|^2, rho = |v|^2, eta = 2(arg v - arg y).
struct ODE3State {
  double r = 0.0;
  double rho = 0.0;
  double eta = 0.0;
};

struct ODE3Rate {
  double dr = 0.0;
  double drho = 0.0;
  double deta = 0.0;
};

struct ODE3Params {
  double beta = 0.0;
  double gamma = 0.0;
  double omega = 0.0;
};

ODE3Rate rhs_ode3(const ODE3Params& p, const ODE3State& s);

}  // namespace displab
