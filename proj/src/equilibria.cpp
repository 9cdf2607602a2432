#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "displab/analysis.hpp"

namespace displab {

SpectralField EquilibriumRecord::point(int D) const {
  SpectralField v(D, true, false);
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (std::abs(support[i]) > D) throw std::out_of_range("support mode outside truncation");
    v.mode(support[i]) = std::sqrt(moduli[i]);
  }
  const bool real = v.reality_defect() == 0.0;
  return v.with_flags(real, v[0] == cplx{});
}

std::vector<double> EquilibriumRecord::modulus_pattern(int D) const {
  std::vector<double> out(static_cast<std::size_t>(2 * D + 1), 0.0);
  for (std::size_t i = 0; i < support.size(); ++i) out[support[i] + D] = std::sqrt(moduli[i]);
  return out;
}

std::string EquilibriumRecord::support_label() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < support.size(); ++i) os << (i ? ";" : "") << support[i];
  os << '}';
  return os.str();
}

std::vector<EquilibriumRecord> enumerate_equilibria(double alpha, int D) {
  if (D < 1) throw std::invalid_argument("D must be positive");
  if (D > 12) throw std::invalid_argument("D > 12 rejected: support enumeration is 2^(2D+1)");

  std::vector<EquilibriumRecord> out;

  EquilibriumRecord zero;
  zero.stability = alpha <= 0.0 ? Stability::Stable : Stability::Unstable;
  for (int k = 0; k <= D; ++k)
    if (alpha == static_cast<double>(k) * k) zero.hyperbolic = false;
  out.push_back(zero);

  const int modes = 2 * D + 1;
  std::vector<EquilibriumRecord> found;
  for (std::uint32_t mask = 1; mask < (1u << modes); ++mask) {
    EquilibriumRecord r;
    for (int j = 0; j < modes; ++j)
      if (mask & (1u << j)) r.support.push_back(j - D);
    r.n0 = static_cast<int>(r.support.size());
    for (int n : r.support) r.n2 += n * n;
    const double denom = 2.0 * r.n0 - 1.0;
    r.norm_sq = (r.n0 * alpha - r.n2) / denom;
    if (!(r.norm_sq > 0.0)) continue;
    const double shift = (alpha - 2.0 * r.n2) / denom;
    bool feasible = true;
    for (int n : r.support) {
      const double m = static_cast<double>(n) * n + shift;
      if (!(m > 0.0)) feasible = false;
      r.moduli.push_back(m);
    }
    if (!feasible) continue;
    for (int k = -D; k <= D; ++k) {
      if (std::find(r.support.begin(), r.support.end(), k) != r.support.end()) continue;
      if (static_cast<double>(k) * k + shift == 0.0) r.hyperbolic = false;
    }
    const bool single = r.n0 == 1;
    const double k2 = static_cast<double>(r.support[0]) * r.support[0];
    r.stability = single && k2 < alpha / 2.0 ? Stability::Stable : Stability::Unstable;
    found.push_back(std::move(r));
  }
  std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    if (a.n0 != b.n0) return a.n0 < b.n0;
    return a.support < b.support;
  });
  out.insert(out.end(), found.begin(), found.end());
  return out;
}

double equilibrium_residual(const EquilibriumRecord& record, double alpha, int D) {
  const SpectralField rhs = rhs_reduced_gl2(alpha, record.point(D), D);
  double worst = 0.0;
  for (const cplx c : rhs.coeffs()) worst = std::max(worst, std::abs(c));
  return worst;
}

std::vector<double> linearization_spectrum(const EquilibriumRecord& record, double alpha, int D) {
  if (D < 1 || D > 512) throw std::invalid_argument("linearization dimension out of range");
  const int dim = 2 * D + 1;
  std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
  for (std::size_t i = 0; i < record.support.size(); ++i) v[record.support[i] + D] = std::sqrt(record.moduli[i]);
  const double norm_sq = record.norm_sq;
  Eigen::MatrixXd J(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const double n = i - D;
    for (int j = 0; j < dim; ++j) J(i, j) = -4.0 * v[i] * v[j];
    J(i, i) += -n * n + alpha - 2.0 * norm_sq + 3.0 * v[i] * v[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(J, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + dim};
}

}  // namespace displab
