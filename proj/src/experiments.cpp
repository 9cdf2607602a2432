#include <algorithm>
#include <cmath>
#include <limits>

#include "displab/analysis.hpp"
#include "displab/parallel.hpp"
#include "displab/random_field.hpp"

namespace displab {

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope needs two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("slope needs distinct abscissae");
  return (n * sxy - sx * sy) / denom;
}

SpectralField smooth_reference_field(int truncation) {
  SpectralField w(truncation);
  for (int n = -truncation; n <= truncation; ++n)
    w.mode(n) = cplx(std::exp(-std::abs(n)), 0.5 * std::exp(-1.5 * std::abs(n - 1)));
  return w;
}

namespace {

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return least_squares_slope(lx, ly);
}

SimConfig final_state_only(double h, double T) {
  SimConfig c;
  c.h = h;
  c.T = T;
  c.sample_every = std::numeric_limits<int>::max();
  return c;
}

}  // namespace

RateTable averaging_rate_experiment(Family family, const ModelParams& params, const SpectralField& w0,
                                    double T, const std::vector<double>& L_list, const RateOptions& options) {
  if (family != Family::GL1 && family != Family::GL2)
    throw std::invalid_argument("averaging rate experiment takes GL1 or GL2");
  const ModelKind rotating = family == Family::GL1 ? ModelKind::GL1Rotating : ModelKind::GL2Rotating;
  const ModelKind averaged = family == Family::GL1 ? ModelKind::GL1Averaged : ModelKind::GL2Averaged;
  const SpectralField start = w0.with_flags(false, false);

  struct Outcome {
    std::optional<RateRow> row;
    std::string failure;
  };
  const std::function<Outcome(std::size_t)> job = [&](std::size_t i) -> Outcome {
    const double L = L_list[i];
    ModelParams p = params;
    p.with_L(L);
    const double period = 2.0 * std::acos(-1.0) / L;
    const double h_rot = std::min(options.averaged_step, period / options.rotating_steps_per_period);
    try {
      const auto fast = integrate({rotating, p}, final_state_only(h_rot, T), start).final_state();
      const auto slow = integrate({averaged, p}, final_state_only(options.averaged_step, T), start).final_state();
      return {RateRow{L, p.eps, hs_norm(fast - slow, 1.0)}, {}};
    } catch (const BlowUp& e) {
      return {std::nullopt, std::string("L = ") + std::to_string(L) + ": " + e.what()};
    }
  };
  const auto outcomes = parallel_map<Outcome>(L_list.size(), options.threads, job);

  RateTable table;
  for (const auto& o : outcomes) {
    if (!o.row) throw RateAborted("averaging run blew up at " + o.failure, table);
    table.rows.push_back(*o.row);
  }
  std::vector<double> eps, err;
  for (const auto& r : table.rows) {
    eps.push_back(r.eps);
    err.push_back(r.err_h1);
  }
  table.slope = table.rows.size() >= 2 ? log_slope(eps, err) : std::numeric_limits<double>::quiet_NaN();
  return table;
}

ScanTable attractor_norm_scan(const ModelSpec& model, const std::vector<double>& L_list, int ensemble_size,
                              double T, double burn_in, const ScanOptions& options) {
  if (!(T > burn_in)) throw std::invalid_argument("horizon must exceed burn-in");
  if (ensemble_size < 1) throw std::invalid_argument("ensemble must be nonempty");
  if (!is_pde(model.kind)) throw std::invalid_argument("attractor scan takes a PDE model");
  const bool real_model = family_of(model.kind) == Family::KS;
  const std::size_t members = static_cast<std::size_t>(ensemble_size);

  const std::function<ScanRow(std::size_t)> job = [&](std::size_t index) {
    const double L = L_list[index / members];
    const std::uint64_t seed = options.seed + index % members;
    Rng rng(seed);
    SpectralField u0 = real_model ? random_unit_real_field(options.truncation, rng)
                                  : random_complex_field(options.truncation, rng);
    u0 *= options.initial_norm / hs_norm(u0, 0.0);
    ModelSpec run = model;
    run.params.with_L(L);
    SimConfig config;
    config.h = L > 0.0 ? std::min(options.h_max, options.h_scale / L) : options.h_max;
    config.T = T;
    config.sample_every = options.sample_every;
    ScanRow row{L, seed, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), false};
    TrajectoryLog log;
    try {
      log = integrate(run, config, u0);
    } catch (const BlowUp&) {
      row.blew_up = true;
      return row;
    }
    const double u0_sq = std::pow(hs_norm(u0, 0.0), 2);
    double excess = -std::numeric_limits<double>::infinity();
    double area = 0.0, span = 0.0;
    const Sample* prev = nullptr;
    for (const auto& s : log.samples) {
      excess = std::max(excess, s.h_norm * s.h_norm - u0_sq * std::exp(-s.t));
      if (s.t >= burn_in) {
        if (prev) {
          area += 0.5 * (s.t - prev->t) * (s.h_norm + prev->h_norm);
          span += s.t - prev->t;
        }
        prev = &s;
      }
    }
    row.stat = span > 0.0 ? area / span : (prev ? prev->h_norm : row.stat);
    row.bound_coefficient = excess / (L * L + 1.0);
    return row;
  };

  ScanTable table;
  table.rows = parallel_map<ScanRow>(L_list.size() * members, options.threads, job);
  for (std::size_t i = 0; i < L_list.size(); ++i) {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < members; ++k) {
      const auto& r = table.rows[i * members + k];
      if (!r.blew_up && (std::isnan(best) || r.stat > best)) best = r.stat;
    }
    table.L_values.push_back(L_list[i]);
    table.statistic.push_back(best);
  }
  table.slope = L_list.size() >= 2 ? log_slope(table.L_values, table.statistic)
                                   : std::numeric_limits<double>::quiet_NaN();
  return table;
}

HdReport hd_invariance_check(double beta, int D, double T, const HdOptions& options) {
  if (D < 1) throw std::invalid_argument("D must be positive");
  ModelSpec model{ModelKind::GL2Averaged, {}};
  model.params.beta = cplx(beta, options.beta_im);
  model.params.omega = options.omega;
  const int wide = 2 * D;
  Rng rng(options.seed);

  HdReport report;
  const SpectralField inside = random_complex_field(D, rng).resized(wide).with_flags(false, false);
  const SpectralField image = full_rhs(model, 0.0, inside);
  for (int n = -wide; n <= wide; ++n)
    if (std::abs(n) > D) report.leakage = std::max(report.leakage, std::abs(image[n]));

  const SpectralField start = random_complex_field(wide, rng);
  SimConfig config = final_state_only(options.h, T);
  const SpectralField end = integrate(model, config, start).final_state();
  for (int n = -wide; n <= wide; ++n)
    if (static_cast<double>(n) * n > beta) report.max_super_mode = std::max(report.max_super_mode, std::abs(end[n]));
  report.passed = report.leakage == 0.0 && report.max_super_mode <= 1e-8;
  return report;
}

GradientReport gradient_convergence_experiment(double alpha, int ensemble_size, double T,
                                               const GradientOptions& options) {
  const int D = options.D > 0 ? options.D : default_reduced_dimension(alpha);
  GradientReport report;
  report.equilibria = enumerate_equilibria(alpha, D);
  std::vector<std::vector<double>> patterns;
  for (const auto& r : report.equilibria) patterns.push_back(r.modulus_pattern(D));

  ModelSpec model{ModelKind::GL2Reduced, {}};
  model.params.beta = alpha;
  const FieldRhs rhs = [&](double t, const SpectralField& v) { return full_rhs(model, t, v); };
  const long long steps = static_cast<long long>(std::ceil(T / options.h - 1e-9));
  const double h = T / static_cast<double>(steps);

  const std::function<GradientMember(std::size_t)> job = [&](std::size_t k) {
    GradientMember m;
    m.seed = options.seed + k;
    Rng rng(m.seed);
    SpectralField v = random_complex_field(D, rng);

    auto dissipation = [&](const SpectralField& x) { return 2.0 * std::pow(hs_norm(rhs(0.0, x), 0.0), 2); };
    double L_prev = lyapunov_value(v, alpha);
    double L_curr = L_prev;
    double dissipation_curr = dissipation(v);
    for (long long s = 1; s <= steps; ++s) {
      v = rk4_step(rhs, 0.0, h, v);
      const double L_next = lyapunov_value(v, alpha);
      m.max_lyapunov_increase = std::max(m.max_lyapunov_increase, L_next - L_curr);
      if (s >= 2 && dissipation_curr > options.rate_floor) {
        const double centered = (L_next - L_prev) / (2.0 * h);
        m.max_rate_mismatch =
            std::max(m.max_rate_mismatch, std::abs(centered + dissipation_curr) / dissipation_curr);
        ++m.rate_points;
      }
      L_prev = L_curr;
      L_curr = L_next;
      dissipation_curr = dissipation(v);
    }

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      double d2 = 0.0;
      for (int n = -D; n <= D; ++n) d2 += std::pow(std::abs(v[n]) - patterns[i][n + D], 2);
      if (std::sqrt(d2) < best) {
        best = std::sqrt(d2);
        m.nearest = static_cast<int>(i);
      }
    }
    m.distance = best;
    m.converged = best <= options.tolerance && report.equilibria[m.nearest].stability == Stability::Stable;
    return m;
  };
  report.members = parallel_map<GradientMember>(static_cast<std::size_t>(ensemble_size), options.threads, job);

  report.all_converged = true;
  report.monotone = true;
  for (const auto& m : report.members) {
    report.all_converged = report.all_converged && m.converged;
    report.monotone = report.monotone && m.max_lyapunov_increase <= 1e-8;
    report.max_rate_mismatch = std::max(report.max_rate_mismatch, m.max_rate_mismatch);
  }
  return report;
}

}  // namespace displab
