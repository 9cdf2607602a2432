#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "displab/models.hpp"
#include "displab/spectral_field.hpp"

namespace displab {

struct SimConfig {
  int truncation = 16;
  double h = 1e-3;
  double T = 1.0;
  int sample_every = 1;    ///< steps between norm samples
  int snapshot_every = 0;  ///< steps between full snapshots; 0 = never
  std::uint64_t seed = 0;
};

struct Sample {
  double t = 0.0;
  double h_norm = 0.0;
  double h1_norm = 0.0;
  double lyapunov = std::numeric_limits<double>::quiet_NaN();
};

struct Snapshot {
  double t;
  SpectralField field;
};

struct TrajectoryLog {
  std::vector<Sample> samples;
  std::vector<Snapshot> snapshots;
  std::vector<std::string> warnings;
  std::optional<SpectralField> last_state;

  const SpectralField& final_state() const;
};

/// Nonfinite state or a coefficient above 1e12. Carries the failure time and
/// whatever was logged before it.
class BlowUp : public std::runtime_error {
 public:
  BlowUp(double time, TrajectoryLog partial);
  double time() const { return time_; }
  const TrajectoryLog& partial_log() const { return partial_; }

 private:
  double time_;
  TrajectoryLog partial_;
};

/// phi_1..phi_3 at z: series below |z| = 0.5, closed form above.
std::array<cplx, 3> phi_functions(cplx z);

/// Fourth-order exponential time differencing (Cox-Matthews) for
/// d/dt w = diag(lambda_n) w + nonlinear_rhs(t, w). Coefficients are
/// precomputed for a fixed step; with a vanishing nonlinearity a step is
/// exactly w_n -> exp(lambda_n h) w_n.
class EtdStepper {
 public:
  EtdStepper(ModelSpec model, int truncation, double h);

  SpectralField step(double t, const SpectralField& w) const;
  double h() const { return h_; }
  const ModelSpec& model() const { return model_; }

 private:
  struct ModeCoefficients {
    cplx e_full, e_half, q_half, f1, f2, f3;
  };

  ModelSpec model_;
  int truncation_;
  double h_;
  std::vector<ModeCoefficients> coeffs_;
};

/// One step from scratch; prefer EtdStepper when stepping repeatedly.
SpectralField etdrk4_step(const ModelSpec& model, double t, double h, const SpectralField& w);

using VectorRhs = std::function<std::vector<double>(double, const std::vector<double>&)>;
using FieldRhs = std::function<SpectralField(double, const SpectralField&)>;

/// Classical fourth-order Runge-Kutta. Throws BlowUp on a nonfinite result.
std::vector<double> rk4_step(const VectorRhs& rhs, double t, double h, const std::vector<double>& x);
SpectralField rk4_step(const FieldRhs& rhs, double t, double h, const SpectralField& x);

/// True when any coefficient is nonfinite or exceeds 1e12 in modulus.
bool blown_up(const SpectralField& w);

/// Lyapunov functional of the reduced GL2 system:
/// |v|_{H^1}^2 + |v|^4 - sum |v_n|^4 / 2 - (alpha + 1)|v|^2.
double lyapunov_value(const SpectralField& v, double alpha);

/// Runs a field model to the horizon with a fixed step (the last step count is
/// ceil(T/h), the step shrunk to land on T). ETDRK4 for PDE kinds, RK4 for
/// GL2Reduced; the latter also records the Lyapunov functional.
TrajectoryLog integrate(const ModelSpec& model, const SimConfig& config, const SpectralField& w0);

/// Fitted shape of a dissipative estimate |u(t)|^2 <= |u0|^2 e^{-rate t} + plateau.
struct DissipativeFit {
  double decay_rate;
  double plateau;
};

/// plateau = max of |u|^2 over the second half of the log; rate from a
/// least-squares fit of log(|u|^2 - plateau) while that excess is positive
/// (rate 0 when there is no such excess).
DissipativeFit fit_dissipative_bound(const TrajectoryLog& log);

}  // namespace displab
