#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "displab/analysis.hpp"
#include "displab/parallel.hpp"

namespace displab {

namespace {

double euclidean(const std::vector<double>& v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

}  // namespace

double largest_lyapunov_exponent(const VectorRhs& rhs, const std::vector<double>& x0, double T,
                                 double renorm_every, const ExponentOptions& options) {
  if (!(T > 0.0) || !(renorm_every > 0.0) || !(options.h > 0.0))
    throw std::invalid_argument("exponent estimator needs positive T, interval and step");
  const std::size_t d = x0.size();

  // State and tangent stacked; J(x) y by a central difference along y.
  const VectorRhs augmented = [&](double t, const std::vector<double>& z) {
    std::vector<double> x(z.begin(), z.begin() + d), y(z.begin() + d, z.end());
    std::vector<double> out = rhs(t, x);
    const double ny = euclidean(y);
    out.resize(2 * d, 0.0);
    if (ny == 0.0) return out;
    const double s = 1e-6 * (1.0 + euclidean(x)) / ny;
    std::vector<double> xp(d), xm(d);
    for (std::size_t i = 0; i < d; ++i) {
      xp[i] = x[i] + s * y[i];
      xm[i] = x[i] - s * y[i];
    }
    const auto fp = rhs(t, xp);
    const auto fm = rhs(t, xm);
    for (std::size_t i = 0; i < d; ++i) out[d + i] = (fp[i] - fm[i]) / (2.0 * s);
    return out;
  };

  std::vector<double> z(2 * d);
  std::copy(x0.begin(), x0.end(), z.begin());
  for (std::size_t i = 0; i < d; ++i) z[d + i] = 1.0 / std::sqrt(static_cast<double>(d));

  const long long per_interval = std::max<long long>(1, std::llround(renorm_every / options.h));
  const double h = renorm_every / static_cast<double>(per_interval);
  const long long warm = static_cast<long long>(std::ceil(options.transient / renorm_every - 1e-9));
  const long long intervals = static_cast<long long>(std::ceil(T / renorm_every - 1e-9));
  double t = 0.0;
  double log_sum = 0.0;
  for (long long k = 0; k < warm + intervals; ++k) {
    for (long long s = 0; s < per_interval; ++s, t += h) z = rk4_step(augmented, t, h, z);
    std::vector<double> y(z.begin() + d, z.end());
    const double growth = euclidean(y);
    if (!(growth > 0.0) || !std::isfinite(growth)) throw BlowUp(t, {});
    for (std::size_t i = 0; i < d; ++i) z[d + i] /= growth;
    if (k >= warm) log_sum += std::log(growth);
  }
  return log_sum / (static_cast<double>(intervals) * renorm_every);
}

VectorRhs ode3_vector_rhs(const ODE3Params& p) {
  return [p](double, const std::vector<double>& x) {
    const ODE3Rate r = rhs_ode3(p, {x[0], x[1], x[2]});
    return std::vector<double>{r.dr, r.drho, r.deta};
  };
}

namespace {

Eigen::Vector3d rate_vector(const ODE3Params& p, const Eigen::Vector3d& x) {
  const ODE3Rate r = rhs_ode3(p, {x(0), x(1), x(2)});
  return {r.dr, r.drho, r.deta};
}

Eigen::Matrix3d ode3_jacobian(const ODE3Params& p, const Eigen::Vector3d& x) {
  Eigen::Matrix3d J;
  const double delta = 1e-7;
  for (int j = 0; j < 3; ++j) {
    Eigen::Vector3d xp = x, xm = x;
    xp(j) += delta;
    xm(j) -= delta;
    J.col(j) = (rate_vector(p, xp) - rate_vector(p, xm)) / (2.0 * delta);
  }
  return J;
}

}  // namespace

ODE3Equilibrium find_ode3_equilibrium(const ODE3Params& p, const ODE3State& guess) {
  Eigen::Vector3d x(guess.r, guess.rho, guess.eta);
  double residual = rate_vector(p, x).cwiseAbs().maxCoeff();
  for (int iter = 0; iter < 100 && residual > 1e-13; ++iter) {
    const Eigen::Vector3d step = ode3_jacobian(p, x).fullPivLu().solve(-rate_vector(p, x));
    x += step;
    residual = rate_vector(p, x).cwiseAbs().maxCoeff();
    if (!std::isfinite(residual)) break;
  }
  if (!(residual < 1e-10)) throw NewtonDiverged("ODE3 equilibrium search did not converge", residual);
  if (x(0) < -1e-10 || x(1) < -1e-10)
    throw NewtonDiverged("ODE3 equilibrium has negative r or rho", residual);
  x(0) = std::max(x(0), 0.0);
  x(1) = std::max(x(1), 0.0);
  x(2) = std::remainder(x(2), 2.0 * std::numbers::pi);
  ODE3Equilibrium out;
  out.state = {x(0), x(1), x(2)};
  out.residual = residual;
  Eigen::EigenSolver<Eigen::Matrix3d> solver(ode3_jacobian(p, x), false);
  for (int i = 0; i < 3; ++i) out.eigenvalues.push_back(solver.eigenvalues()(i));
  return out;
}

std::vector<ExponentRow> ode3_exponent_scan(const std::vector<double>& betas, const std::vector<double>& gammas,
                                            const std::vector<double>& omegas,
                                            const ExponentScanOptions& options) {
  std::vector<ODE3Params> grid;
  for (double b : betas)
    for (double g : gammas)
      for (double w : omegas) grid.push_back({b, g, w});
  const std::vector<double> x0{options.start.r, options.start.rho, options.start.eta};
  const std::function<ExponentRow(std::size_t)> job = [&](std::size_t i) {
    const auto& p = grid[i];
    double lambda = std::numeric_limits<double>::quiet_NaN();
    try {
      lambda = largest_lyapunov_exponent(ode3_vector_rhs(p), x0, options.T, options.renorm_every,
                                         options.integration);
    } catch (const BlowUp&) {
    }
    return ExponentRow{p.beta, p.gamma, p.omega, lambda};
  };
  return parallel_map<ExponentRow>(grid.size(), options.threads, job);
}

}  // namespace displab
