#include "displab/models.hpp"

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace displab {

ModelParams& ModelParams::with_L(double dispersion) {
  L = dispersion;
  eps = dispersion != 0.0 ? 1.0 / dispersion : 0.0;
  return *this;
}

namespace {

const std::map<ModelKind, std::string>& kind_names() {
  static const std::map<ModelKind, std::string> names{
      {ModelKind::GL1Physical, "gl1"},          {ModelKind::GL1Rotating, "gl1-rotating"},
      {ModelKind::GL1Averaged, "gl1-averaged"}, {ModelKind::GL2Physical, "gl2"},
      {ModelKind::GL2Rotating, "gl2-rotating"}, {ModelKind::GL2Averaged, "gl2-averaged"},
      {ModelKind::KSPhysical, "ks"},            {ModelKind::KSRotating, "ks-rotating"},
      {ModelKind::KSAveraged, "ks-averaged"},   {ModelKind::KdVRescaled, "kdv-rescaled"},
      {ModelKind::GL2Reduced, "gl2-reduced"},   {ModelKind::ODE3, "ode3"},
  };
  return names;
}

void require_ks_state(const SpectralField& w) {
  if (!w.real_flag() || !w.zero_mean_flag())
    throw FlagMismatch("KS-type models need a real zero-mean state");
}

double eps_of(const ModelParams& p) { return p.eps != 0.0 ? p.eps : (p.L != 0.0 ? 1.0 / p.L : 0.0); }

}  // namespace

Family family_of(ModelKind kind) {
  switch (kind) {
    case ModelKind::GL1Physical:
    case ModelKind::GL1Rotating:
    case ModelKind::GL1Averaged:
      return Family::GL1;
    case ModelKind::GL2Physical:
    case ModelKind::GL2Rotating:
    case ModelKind::GL2Averaged:
      return Family::GL2;
    case ModelKind::KSPhysical:
    case ModelKind::KSRotating:
    case ModelKind::KSAveraged:
      return Family::KS;
    default:
      return Family::Other;
  }
}

Frame frame_of(ModelKind kind) {
  switch (kind) {
    case ModelKind::GL1Physical:
    case ModelKind::GL2Physical:
    case ModelKind::KSPhysical:
      return Frame::Physical;
    case ModelKind::GL1Rotating:
    case ModelKind::GL2Rotating:
    case ModelKind::KSRotating:
      return Frame::Rotating;
    case ModelKind::GL1Averaged:
    case ModelKind::GL2Averaged:
    case ModelKind::KSAveraged:
      return Frame::Averaged;
    default:
      return Frame::Standalone;
  }
}

bool is_pde(ModelKind kind) { return kind != ModelKind::ODE3 && kind != ModelKind::GL2Reduced; }

std::string to_string(ModelKind kind) { return kind_names().at(kind); }

std::optional<ModelKind> parse_model_kind(const std::string& name) {
  for (const auto& [kind, text] : kind_names())
    if (text == name) return kind;
  return std::nullopt;
}

void validate(const ModelSpec& model) {
  const auto& p = model.params;
  if (model.kind != ModelKind::KdVRescaled && p.L != 0.0 && p.eps != 0.0 &&
      std::abs(p.eps * p.L - 1.0) > 1e-12)
    throw std::invalid_argument("eps * L must equal 1");
  if (frame_of(model.kind) == Frame::Rotating && p.L == 0.0)
    throw std::invalid_argument("rotating frame needs L > 0");
}

std::vector<std::string> model_warnings(const ModelSpec& model, double step) {
  std::vector<std::string> out;
  const auto& p = model.params;
  if (family_of(model.kind) == Family::KS || model.kind == ModelKind::KdVRescaled) {
    const double root = std::round(std::sqrt(std::max(p.a, 0.0)));
    if (root >= 1.0 && root * root == p.a) {
      std::ostringstream msg;
      msg << "KS parameter a = " << p.a << " equals k^2; zero equilibrium is not hyperbolic";
      out.push_back(msg.str());
    }
  }
  if (frame_of(model.kind) == Frame::Rotating && p.L > 0.0) {
    const double limit = 2.0 * std::numbers::pi / p.L / 16.0;
    if (step > limit) {
      std::ostringstream msg;
      msg << "rotating-frame step " << step << " exceeds (2pi/L)/16 = " << limit
          << "; the fast oscillation is under-resolved";
      out.push_back(msg.str());
    }
  }
  return out;
}

cplx linear_symbol(const ModelSpec& model, int n) {
  const auto& p = model.params;
  const double n2 = static_cast<double>(n) * n;
  const double n3 = n2 * n;
  const cplx i(0.0, 1.0);
  switch (model.kind) {
    case ModelKind::GL1Physical:
      return -(1.0 + i * p.gamma_diff) * n2 + p.beta - i * p.L * n3;
    case ModelKind::GL1Rotating:
    case ModelKind::GL1Averaged:
      return -(1.0 + i * p.gamma_diff) * n2 + p.beta;
    case ModelKind::GL2Physical:
      return -(1.0 + i * p.L) * n2 + p.beta;
    case ModelKind::GL2Rotating:
    case ModelKind::GL2Averaged:
      return -n2 + p.beta;
    case ModelKind::KSPhysical:
      return -n2 * n2 + p.a * n2 - i * p.L * n3;
    case ModelKind::KSRotating:
    case ModelKind::KSAveraged:
      return -n2 * n2 + p.a * n2;
    case ModelKind::KdVRescaled:
      return p.eps * (-n2 * n2 + p.a * n2) - i * n3;
    case ModelKind::GL2Reduced:
      return -n2 + p.beta.real();
    case ModelKind::ODE3:
      break;
  }
  throw std::invalid_argument("linear_symbol needs a PDE model, got " + to_string(model.kind));
}

namespace {

SpectralField unscaled_nonlinear_rhs(const ModelSpec& model, double t, const SpectralField& w) {
  const auto& p = model.params;
  const cplx cubic_coeff = -cplx(1.0, p.omega);
  const double tau = t / eps_of(p);
  switch (model.kind) {
    case ModelKind::GL1Physical:
    case ModelKind::GL2Physical:
      return cubic_coeff * gl_cubic(w);
    case ModelKind::GL1Rotating:
      return cubic_coeff * oscillatory_eval(OscillatoryKind::CubicAiry, tau, w);
    case ModelKind::GL2Rotating:
      return cubic_coeff * oscillatory_eval(OscillatoryKind::CubicSchrodinger, tau, w);
    case ModelKind::GL1Averaged:
      return cubic_coeff * averaged_N(w);
    case ModelKind::GL2Averaged:
      return cubic_coeff * averaged_M(w);
    case ModelKind::KSPhysical:
    case ModelKind::KdVRescaled:
      require_ks_state(w);
      return burgers_term(w);
    case ModelKind::KSRotating:
      require_ks_state(w);
      return oscillatory_eval(OscillatoryKind::BurgersAiry, tau, w);
    case ModelKind::KSAveraged: {
      require_ks_state(w);
      // K vanishes identically on real zero-mean fields; the projection
      // removes the rounding left in the resonant mode-0 sum.
      return symmetrized(averaged_K(w).with_flags(true, true));
    }
    case ModelKind::GL2Reduced: {
      const double norm_sq = hs_norm(w, 0.0) * hs_norm(w, 0.0);
      SpectralField out(w.truncation(), w.real_flag(), w.zero_mean_flag());
      for (int n = -w.truncation(); n <= w.truncation(); ++n)
        out.mode(n) = w[n] * (std::norm(w[n]) - 2.0 * norm_sq);
      return out;
    }
    case ModelKind::ODE3:
      break;
  }
  throw std::invalid_argument("nonlinear_rhs needs a field model, got " + to_string(model.kind));
}

}  // namespace

SpectralField nonlinear_rhs(const ModelSpec& model, double t, const SpectralField& w) {
  SpectralField out = unscaled_nonlinear_rhs(model, t, w);
  const double scale = model.params.nonlinear_scale;
  return scale == 1.0 ? out : scale * out;
}

SpectralField full_rhs(const ModelSpec& model, double t, const SpectralField& w) {
  SpectralField out = nonlinear_rhs(model, t, w);
  for (int n = -w.truncation(); n <= w.truncation(); ++n)
    out.mode(n) += linear_symbol(model, n) * w[n];
  if (out.real_flag()) out = symmetrized(out);
  return out;
}

SpectralField rhs_rescaled_kdv(double a, double eps, const SpectralField& v) {
  ModelSpec model{ModelKind::KdVRescaled, {}};
  model.params.a = a;
  model.params.eps = eps;
  return full_rhs(model, 0.0, v);
}

SpectralField rhs_reduced_gl2(double alpha, const SpectralField& v, int D) {
  if (v.truncation() != D) throw std::invalid_argument("reduced state must have truncation D");
  ModelSpec model{ModelKind::GL2Reduced, {}};
  model.params.beta = alpha;
  return full_rhs(model, 0.0, v);
}

int default_reduced_dimension(double alpha) {
  return alpha > 0.0 ? static_cast<int>(std::floor(std::sqrt(alpha))) + 1 : 1;
}

ODE3Rate rhs_ode3(const ODE3Params& p, const ODE3State& s) {
  const double c = std::cos(s.eta);
  const double sn = std::sin(s.eta);
  const double w = p.omega;
  ODE3Rate out;
  out.dr = s.r * (p.beta - s.r - 4.0 * s.rho - 2.0 * s.rho * (c - w * sn));
  out.drho = s.rho * (p.beta - 1.0 - 2.0 * s.r - 3.0 * s.rho - s.r * (c + w * sn));
  out.deta = -p.gamma + w * (s.rho - s.r) + s.r * (sn - w * c) + 2.0 * s.rho * (sn + w * c);
  return out;
}

}  // namespace displab
