#include "displab/timestep.hpp"

#include <algorithm>
#include <cmath>

namespace displab {

const SpectralField& TrajectoryLog::final_state() const {
  if (!last_state) throw std::logic_error("trajectory log holds no state");
  return *last_state;
}

BlowUp::BlowUp(double time, TrajectoryLog partial)
    : std::runtime_error("blow-up at t = " + std::to_string(time)),
      time_(time),
      partial_(std::move(partial)) {}

std::array<cplx, 3> phi_functions(cplx z) {
  std::array<cplx, 3> phi{};
  if (std::abs(z) < 0.5) {
    // phi_k(z) = sum_j z^j / (j + k)!
    for (int k = 1; k <= 3; ++k) {
      double factorial = 1.0;
      for (int j = 2; j <= k; ++j) factorial *= j;
      cplx term = 1.0 / factorial;
      cplx sum = term;
      for (int j = 1; j < 24; ++j) {
        term *= z / static_cast<double>(j + k);
        sum += term;
      }
      phi[k - 1] = sum;
    }
    return phi;
  }
  const cplx ez = std::exp(z);
  phi[0] = (ez - 1.0) / z;
  phi[1] = (ez - 1.0 - z) / (z * z);
  phi[2] = (ez - 1.0 - z - 0.5 * z * z) / (z * z * z);
  return phi;
}

EtdStepper::EtdStepper(ModelSpec model, int truncation, double h)
    : model_(model), truncation_(truncation), h_(h) {
  if (!is_pde(model.kind) && model.kind != ModelKind::GL2Reduced)
    throw std::invalid_argument("ETDRK4 needs a field model");
  if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
  coeffs_.reserve(static_cast<std::size_t>(2 * truncation + 1));
  for (int n = -truncation; n <= truncation; ++n) {
    const cplx z = linear_symbol(model_, n) * h;
    const auto phi = phi_functions(z);
    const auto phi_half = phi_functions(0.5 * z);
    ModeCoefficients c;
    c.e_full = std::exp(z);
    c.e_half = std::exp(0.5 * z);
    c.q_half = 0.5 * h * phi_half[0];
    c.f1 = h * (phi[0] - 3.0 * phi[1] + 4.0 * phi[2]);
    c.f2 = h * (phi[1] - 2.0 * phi[2]);
    c.f3 = h * (-phi[1] + 4.0 * phi[2]);
    coeffs_.push_back(c);
  }
}

SpectralField EtdStepper::step(double t, const SpectralField& w) const {
  if (w.truncation() != truncation_) throw std::invalid_argument("stepper truncation mismatch");
  const bool keeps_reality = family_of(model_.kind) == Family::KS ||
                             model_.kind == ModelKind::KdVRescaled;
  const std::size_t size = w.size();
  auto finish = [&](SpectralField f) {
    if (keeps_reality && w.real_flag())
      return symmetrized(f.with_flags(true, w.zero_mean_flag()));
    return f.with_flags(false, false);
  };
  auto combine = [&](auto&& fill) {
    SpectralField out(truncation_);
    auto dst = out.coeffs_mut();
    for (std::size_t i = 0; i < size; ++i) dst[i] = fill(i);
    return finish(std::move(out));
  };

  const auto u = w.coeffs();
  const SpectralField nu = nonlinear_rhs(model_, t, w);
  const auto nu_c = nu.coeffs();
  const SpectralField a =
      combine([&](std::size_t i) { return coeffs_[i].e_half * u[i] + coeffs_[i].q_half * nu_c[i]; });
  const SpectralField na = nonlinear_rhs(model_, t + 0.5 * h_, a);
  const auto na_c = na.coeffs();
  const SpectralField b =
      combine([&](std::size_t i) { return coeffs_[i].e_half * u[i] + coeffs_[i].q_half * na_c[i]; });
  const SpectralField nb = nonlinear_rhs(model_, t + 0.5 * h_, b);
  const auto nb_c = nb.coeffs();
  const auto a_c = a.coeffs();
  const SpectralField c = combine([&](std::size_t i) {
    return coeffs_[i].e_half * a_c[i] + coeffs_[i].q_half * (2.0 * nb_c[i] - nu_c[i]);
  });
  const SpectralField nc = nonlinear_rhs(model_, t + h_, c);
  const auto nc_c = nc.coeffs();
  return combine([&](std::size_t i) {
    const auto& k = coeffs_[i];
    return k.e_full * u[i] + k.f1 * nu_c[i] + 2.0 * k.f2 * (na_c[i] + nb_c[i]) + k.f3 * nc_c[i];
  });
}

SpectralField etdrk4_step(const ModelSpec& model, double t, double h, const SpectralField& w) {
  return EtdStepper(model, w.truncation(), h).step(t, w);
}

bool blown_up(const SpectralField& w) {
  for (const cplx c : w.coeffs())
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()) || std::abs(c) > 1e12) return true;
  return false;
}

std::vector<double> rk4_step(const VectorRhs& rhs, double t, double h, const std::vector<double>& x) {
  const std::size_t d = x.size();
  auto shifted = [&](const std::vector<double>& k, double scale) {
    std::vector<double> y(d);
    for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + scale * k[i];
    return y;
  };
  const auto k1 = rhs(t, x);
  const auto k2 = rhs(t + 0.5 * h, shifted(k1, 0.5 * h));
  const auto k3 = rhs(t + 0.5 * h, shifted(k2, 0.5 * h));
  const auto k4 = rhs(t + h, shifted(k3, h));
  std::vector<double> y(d);
  for (std::size_t i = 0; i < d; ++i) {
    y[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!std::isfinite(y[i])) throw BlowUp(t + h, {});
  }
  return y;
}

SpectralField rk4_step(const FieldRhs& rhs, double t, double h, const SpectralField& x) {
  const SpectralField k1 = rhs(t, x);
  const SpectralField k2 = rhs(t + 0.5 * h, x + (0.5 * h) * k1);
  const SpectralField k3 = rhs(t + 0.5 * h, x + (0.5 * h) * k2);
  const SpectralField k4 = rhs(t + h, x + h * k3);
  SpectralField y = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (blown_up(y)) throw BlowUp(t + h, {});
  return y;
}

double lyapunov_value(const SpectralField& v, double alpha) {
  const double h1_sq = std::pow(hs_norm(v, 1.0), 2);
  const double norm_sq = std::pow(hs_norm(v, 0.0), 2);
  double quartic = 0.0;
  for (const cplx c : v.coeffs()) quartic += std::norm(c) * std::norm(c);
  return h1_sq + norm_sq * norm_sq - 0.5 * quartic - (alpha + 1.0) * norm_sq;
}

TrajectoryLog integrate(const ModelSpec& model, const SimConfig& config, const SpectralField& w0) {
  if (!(config.h > 0.0)) throw std::invalid_argument("step must be positive");
  if (config.T < 0.0) throw std::invalid_argument("horizon must be nonnegative");
  if (model.kind == ModelKind::ODE3) throw std::invalid_argument("integrate takes field models");
  validate(model);

  const bool reduced = model.kind == ModelKind::GL2Reduced;
  const double alpha = model.params.beta.real();
  TrajectoryLog log;
  log.warnings = model_warnings(model, config.h);

  auto record = [&](double t, const SpectralField& w, bool snapshot) {
    Sample s{t, hs_norm(w, 0.0), hs_norm(w, 1.0)};
    if (reduced) s.lyapunov = lyapunov_value(w, alpha);
    log.samples.push_back(s);
    if (snapshot) log.snapshots.push_back({t, w});
  };

  const long long steps =
      config.T == 0.0 ? 0 : static_cast<long long>(std::ceil(config.T / config.h - 1e-9));
  const double h = steps > 0 ? config.T / static_cast<double>(steps) : config.h;
  const int sample_every = std::max(1, config.sample_every);
  const bool snapshots = config.snapshot_every > 0;

  record(0.0, w0, snapshots);
  log.last_state = w0;
  if (steps == 0) return log;

  SpectralField w = w0;
  const FieldRhs reduced_rhs = [&](double t, const SpectralField& x) { return full_rhs(model, t, x); };
  std::optional<EtdStepper> stepper;
  if (!reduced) stepper.emplace(model, w0.truncation(), h);

  for (long long k = 1; k <= steps; ++k) {
    const double t_prev = static_cast<double>(k - 1) * h;
    const double t = static_cast<double>(k) * h;
    try {
      w = reduced ? rk4_step(reduced_rhs, t_prev, h, w) : stepper->step(t_prev, w);
    } catch (const BlowUp&) {
      throw BlowUp(t, log);
    }
    if (blown_up(w)) throw BlowUp(t, log);
    log.last_state = w;
    const bool last = k == steps;
    const bool take_sample = last || k % sample_every == 0;
    const bool take_snapshot = snapshots && (last || k % config.snapshot_every == 0);
    if (take_sample || take_snapshot) record(t, w, take_snapshot);
  }
  return log;
}

DissipativeFit fit_dissipative_bound(const TrajectoryLog& log) {
  const auto& s = log.samples;
  if (s.empty()) return {0.0, 0.0};
  const double t_end = s.back().t;
  double plateau = 0.0;
  for (const auto& x : s)
    if (x.t >= 0.5 * t_end) plateau = std::max(plateau, x.h_norm * x.h_norm);
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  int count = 0;
  for (const auto& x : s) {
    const double excess = x.h_norm * x.h_norm - plateau;
    if (excess <= 0.0) break;
    const double y = std::log(excess);
    st += x.t;
    sy += y;
    stt += x.t * x.t;
    sty += x.t * y;
    ++count;
  }
  double rate = 0.0;
  if (count >= 2) {
    const double denom = count * stt - st * st;
    if (denom > 0.0) rate = -(count * sty - st * sy) / denom;
  }
  return {rate, plateau};
}

}  // namespace displab
