#include "displab/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

#include "displab/analysis.hpp"
#include "displab/nonlinear.hpp"
#include "displab/parallel.hpp"
#include "displab/random_field.hpp"
#include "displab/timestep.hpp"

namespace displab::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class ConfigUnreadable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AssertionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw CLI::ValidationError("list", "not a number: '" + item + "'");
    out.push_back(value);
  }
  if (out.empty()) throw CLI::ValidationError("list", "empty list '" + text + "'");
  return out;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Flat key=value lines become "--key value" pairs; blank lines and '#' comments are skipped.
std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigUnreadable("cannot read config file '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CLI::ParseError("config line " + std::to_string(line_no) + " lacks '='", kUsage);
    out.push_back("--" + trim(line.substr(0, eq)));
    out.push_back(trim(line.substr(eq + 1)));
  }
  return out;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << header << '\n';
  }
  template <class... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double x) { return num(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(long long x) { return std::to_string(x); }
  static std::string cell(std::uint64_t x) { return std::to_string(x); }
  static std::string cell(bool x) { return x ? "1" : "0"; }
  static std::string cell(const std::string& x) { return x; }
  static std::string cell(const char* x) { return x; }
  std::ofstream out_;
};

void write_field(const fs::path& path, const SpectralField& field) {
  CsvWriter csv(path, "n,re,im");
  for (int n = -field.truncation(); n <= field.truncation(); ++n) csv.row(n, field[n].real(), field[n].imag());
}

// One subcommand: its CLI11 app, the values it parsed, and a record of every
// option for the manifest.
struct Command {
  CLI::App* app = nullptr;
  std::vector<std::pair<std::string, std::function<std::string()>>> settings;
  std::function<int(const Command&)> run;

  std::string out_dir = ".";
  std::string config_path;
  std::uint64_t seed = 1;
  int threads = 0;

  template <class T>
  void add(const std::string& name, T& target, const std::string& help) {
    app->add_option("--" + name, target, help)->capture_default_str();
    settings.emplace_back(name, [&target] {
      if constexpr (std::is_same_v<T, std::string>) {
        return target;
      } else if constexpr (std::is_floating_point_v<T>) {
        return num(target);
      } else {
        return std::to_string(target);
      }
    });
  }

  int worker_count() const { return threads > 0 ? threads : default_thread_count(); }
  fs::path path(const std::string& file) const { return fs::path(out_dir) / file; }

  std::string canonical() const {
    std::ostringstream os;
    os << app->get_name() << '\n' << "seed=" << seed << '\n';
    for (const auto& [name, value] : settings) os << name << '=' << value() << '\n';
    return os.str();
  }

  void write_manifest() const {
    fs::create_directories(out_dir);
    std::ofstream m(path("manifest.txt"));
    char id[17];
    std::snprintf(id, sizeof id, "%016llx", static_cast<unsigned long long>(fnv1a(canonical())));
    m << "subcommand=" << app->get_name() << '\n'
      << "config=" << config_path << '\n'
      << "out=" << out_dir << '\n'
      << "seed=" << seed << '\n'
      << "run_id=" << id << '\n';
    for (const auto& [name, value] : settings) m << name << '=' << value() << '\n';
  }
};

class Summary {
 public:
  explicit Summary(const Command& cmd) : path_(cmd.path("summary.txt")) {}
  ~Summary() {
    std::ofstream out(path_);
    out << text_.str();
  }
  template <class T>
  void put(const std::string& key, const T& value) {
    std::ostringstream line;
    if constexpr (std::is_floating_point_v<T>) {
      line << key << '=' << num(value);
    } else {
      line << key << '=' << value;
    }
    text_ << line.str() << '\n';
    std::cout << line.str() << '\n';
  }

 private:
  fs::path path_;
  std::ostringstream text_;
};

void check(bool ok, const std::string& what) {
  if (!ok) throw AssertionFailure(what);
}

// ---- model parameters shared by several subcommands ----

struct ModelOptions {
  std::string model = "gl1";
  double L = 0.0;
  double eps = 0.0;
  double a = 2.0;
  double beta_re = 1.0;
  double beta_im = 0.0;
  double gamma = 0.0;
  double omega = 0.0;

  void attach(Command& cmd) {
    cmd.add("model", model, "model name");
    cmd.add("L", L, "dispersion coefficient");
    cmd.add("eps", eps, "perturbation size (kdv-rescaled; otherwise 1/L)");
    cmd.add("a", a, "KS anti-diffusion");
    cmd.add("beta-re", beta_re, "Re beta");
    cmd.add("beta-im", beta_im, "Im beta");
    cmd.add("gamma", gamma, "GL1 diffusion phase");
    cmd.add("omega", omega, "cubic phase");
  }

  ModelSpec build() const {
    const auto kind = parse_model_kind(model);
    if (!kind) throw CLI::ValidationError("--model", "unknown model '" + model + "'");
    ModelSpec m{*kind, {}};
    m.params.gamma_diff = gamma;
    m.params.beta = cplx(beta_re, beta_im);
    m.params.omega = omega;
    m.params.a = a;
    if (*kind == ModelKind::KdVRescaled) {
      m.params.L = L;
      m.params.eps = eps;
    } else {
      m.params.with_L(L);
      if (eps != 0.0) m.params.eps = eps;
    }
    try {
      validate(m);
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError("model", e.what());
    }
    return m;
  }
};

// ---- subcommands ----

Command* make_oracle_check(CLI::App& root, std::vector<std::unique_ptr<Command>>& all) {
  auto& cmd = *all.emplace_back(std::make_unique<Command>());
  cmd.app = root.add_subcommand("oracle-check", "closed-form averages against trapezoid quadrature");
  struct Options {
    int trials = 100;
    int n_max = 8;
    double tolerance = 1e-10;
  };
  auto o = std::make_shared<Options>();
  cmd.add("trials", o->trials, "random fields per operator");
  cmd.add("N-max", o->n_max, "largest truncation (cycled 1..N-max)");
  cmd.add("tolerance", o->tolerance, "relative error bound");
  cmd.run = [o](const Command& c) {
    struct Errors {
      double n = 0, m = 0, k = 0;
    };
    const std::function<Errors(std::size_t)> job = [&](std::size_t t) {
      Rng rng(c.seed + t);
      const int N = 1 + static_cast<int>(t) % o->n_max;
      const SpectralField w = random_complex_field(N, rng);
      auto rel = [&](const SpectralField& closed, OscillatoryKind kind) {
        const SpectralField quad = quadrature_average(kind, w, quadrature_threshold(kind, N));
        const double scale = hs_norm(closed, 0.0);
        const double diff = hs_norm(closed - quad, 0.0);
        return scale > 0.0 ? diff / scale : diff;
      };
      return Errors{rel(averaged_N(w), OscillatoryKind::CubicAiry),
                    rel(averaged_M(w), OscillatoryKind::CubicSchrodinger),
                    rel(averaged_K(w), OscillatoryKind::BurgersAiry)};
    };
    const auto errs = parallel_map<Errors>(static_cast<std::size_t>(o->trials), c.worker_count(), job);
    Errors worst;
    for (const auto& e : errs) {
      worst.n = std::max(worst.n, e.n);
      worst.m = std::max(worst.m, e.m);
      worst.k = std::max(worst.k, e.k);
    }
    CsvWriter csv(c.path("oracle.csv"), "trials,max_err_N,max_err_M,max_err_K");
    csv.row(o->trials, worst.n, worst.m, worst.k);
    Summary s(c);
    s.put("max_err_N", worst.n);
    s.put("max_err_M", worst.m);
    s.put("max_err_K", worst.k);
    check(worst.n <= o->tolerance && worst.m <= o->tolerance && worst.k <= o->tolerance,
          "closed-form average disagrees with quadrature beyond " + num(o->tolerance));
    return kOk;
  };
  return &cmd;
}

Command* make_simulate(CLI::App& root, std::vector<std::unique_ptr<Command>>& all) {
  auto& cmd = *all.emplace_back(std::make_unique<Command>());
  cmd.app = root.add_subcommand("simulate", "single trajectory of any model");
  struct Options {
    ModelOptions model;
    int N = 0;
    int sample_every = 1;
    int snapshot_every = 0;
    double h = 1e-3;
    double T = 1.0;
    double amplitude = 1.0;
    double r0 = 0.5;
    double rho0 = 0.5;
    double eta0 = 1.0;
  };
  auto o = std::make_shared<Options>();
  o->model.attach(cmd);
  cmd.add("N", o->N, "truncation (0: 16, or the reduced default D)");
  cmd.add("h", o->h, "time step");
  cmd.add("T", o->T, "horizon");
  cmd.add("sample-every", o->sample_every, "steps between norm samples");
  cmd.add("snapshot-every", o->snapshot_every, "steps between snapshots (0: none)");
  cmd.add("amplitude", o->amplitude, "H norm of the random initial datum");
  cmd.add("r0", o->r0, "ode3 initial r");
  cmd.add("rho0", o->rho0, "ode3 initial rho");
  cmd.add("eta0", o->eta0, "ode3 initial eta");
  cmd.run = [o](const Command& c) {
    const ModelSpec model = o->model.build();
    if (model.kind == ModelKind::ODE3) {
      const ODE3Params p{o->model.beta_re, o->model.gamma, o->model.omega};
      const VectorRhs rhs = ode3_vector_rhs(p);
      CsvWriter csv(c.path("ode3_trajectory.csv"), "t,r,rho,eta");
      std::vector<double> x{o->r0, o->rho0, o->eta0};
      const long long steps = o->T == 0.0 ? 0 : static_cast<long long>(std::ceil(o->T / o->h - 1e-9));
      const double step = steps > 0 ? o->T / static_cast<double>(steps) : o->h;
      csv.row(0.0, x[0], x[1], x[2]);
      for (long long k = 1; k <= steps; ++k) {
        x = rk4_step(rhs, (k - 1) * step, step, x);
        if (k % std::max(1, o->sample_every) == 0 || k == steps) csv.row(k * step, x[0], x[1], x[2]);
      }
      return kOk;
    }
    const bool reduced = model.kind == ModelKind::GL2Reduced;
    const int truncation = o->N > 0 ? o->N : (reduced ? default_reduced_dimension(o->model.beta_re) : 16);
    Rng rng(c.seed);
    const bool real = family_of(model.kind) == Family::KS || model.kind == ModelKind::KdVRescaled;
    SpectralField w0 = real ? random_unit_real_field(truncation, rng) : random_complex_field(truncation, rng);
    w0 *= o->amplitude / hs_norm(w0, 0.0);
    if (reduced) w0 = w0.with_flags(false, false);

    SimConfig config;
    config.truncation = truncation;
    config.h = o->h;
    config.T = o->T;
    config.sample_every = o->sample_every;
    config.snapshot_every = o->snapshot_every;
    config.seed = c.seed;
    TrajectoryLog log;
    int status = kOk;
    try {
      log = integrate(model, config, w0);
    } catch (const BlowUp& e) {
      log = e.partial_log();
      std::cerr << "displab: " << e.what() << '\n';
      status = kBlowUp;
    }
    for (const auto& w : log.warnings) std::cerr << "warning: " << w << '\n';
    CsvWriter csv(c.path("trajectory.csv"), "t,h_norm,h1_norm,lyapunov");
    for (const auto& s : log.samples) csv.row(s.t, s.h_norm, s.h1_norm, s.lyapunov);
    if (!log.snapshots.empty()) {
      CsvWriter index(c.path("snapshot_times.csv"), "index,t");
      for (std::size_t k = 0; k < log.snapshots.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%05zu.csv", k);
        index.row(static_cast<long long>(k), log.snapshots[k].t);
        write_field(c.path(name), log.snapshots[k].field);
      }
    }
    return status;
  };
  return &cmd;
}

Command* make_averaging_rate(CLI::App& root, std::vector<std::unique_ptr<Command>>& all) {
  auto& cmd = *all.emplace_back(std::make_unique<Command>());
  cmd.app = root.add_subcommand("averaging-rate", "rotating vs averaged error against L");
  struct Options {
    std::string family = "gl2";
    std::string L_list = "50,100,200,400";
    int N = 32;
    double T = 1.0;
    double beta_re = 1.0;
    double beta_im = 0.5;
    double gamma = 0.5;
    double omega = 1.0;
    double steps_per_period = 256.0;
    double averaged_step = 2.5e-4;
    double slope_min = 0.8;
    double slope_max = 1.2;
  };
  auto o = std::make_shared<Options>();
  cmd.add("family", o->family, "gl1 or gl2");
  cmd.add("L-list", o->L_list, "comma-separated dispersion values");
  cmd.add("N", o->N, "truncation");
  cmd.add("T", o->T, "horizon");
  cmd.add("beta-re", o->beta_re, "Re beta");
  cmd.add("beta-im", o->beta_im, "Im beta");
  cmd.add("gamma", o->gamma, "GL1 diffusion phase");
  cmd.add("omega", o->omega, "cubic phase");
  cmd.add("steps-per-period", o->steps_per_period, "rotating-frame steps per 2pi/L");
  cmd.add("averaged-step", o->averaged_step, "step of the averaged run (and cap of the rotating one)");
  cmd.add("slope-min", o->slope_min, "lower slope bound (nan: no check)");
  cmd.add("slope-max", o->slope_max, "upper slope bound (nan: no check)");
  cmd.run = [o](const Command& c) {
    if (o->family != "gl1" && o->family != "gl2") throw CLI::ValidationError("--family", "expected gl1 or gl2");
    ModelParams p;
    p.beta = cplx(o->beta_re, o->beta_im);
    p.gamma_diff = o->gamma;
    p.omega = o->omega;
    RateOptions options;
    options.rotating_steps_per_period = o->steps_per_period;
    options.averaged_step = o->averaged_step;
    options.threads = c.worker_count();
    RateTable table;
    int status = kOk;
    try {
      table = averaging_rate_experiment(o->family == "gl1" ? Family::GL1 : Family::GL2, p,
                                        smooth_reference_field(o->N), o->T, parse_list(o->L_list), options);
    } catch (const RateAborted& e) {
      table = e.partial_table();
      std::cerr << "displab: " << e.what() << '\n';
      status = kBlowUp;
    }
    CsvWriter csv(c.path("rate.csv"), "L,eps,err_h1");
    for (const auto& r : table.rows) csv.row(r.L, r.eps, r.err_h1);
    if (status != kOk) return status;
    Summary s(c);
    s.put("slope", table.slope);
    if (!std::isnan(o->slope_min)) check(table.slope >= o->slope_min, "slope " + num(table.slope) + " below " + num(o->slope_min));
    if (!std::isnan(o->slope_max)) check(table.slope <= o->slope_max, "slope " + num(table.slope) + " above " + num(o->slope_max));
    return kOk;
  };
  return &cmd;
}

Command* make_attractor_scan(CLI::App& root, std::vector<std::unique_ptr<Command>>& all) {
  auto& cmd = *all.emplace_back(std::make_unique<Command>());
  cmd.app = root.add_subcommand("attractor-scan", "ensemble attractor statistic against L");
  struct Options {
    ModelOptions model;
    std::string L_list = "10,20,40,80";
    int ensemble = 8;
    int N = 64;
    int sample_every = 10;
    double T = 200.0;
    double burn_in = 100.0;
    double h_max = 4e-3;
    double h_scale = 0.025;
    double amplitude = 1.0;
    double slope_min = kNaN;
    double slope_max = kNaN;
    double max_spread = kNaN;
  };
  auto o = std::make_shared<Options>();
  o->model.model = "ks";
  o->model.attach(cmd);
  cmd.add("L-list", o->L_list, "comma-separated dispersion values");
  cmd.add("ensemble", o->ensemble, "members per L");
  cmd.add("N", o->N, "truncation");
  cmd.add("T", o->T, "horizon");
  cmd.add("burn-in", o->burn_in, "start of the averaging window");
  cmd.add("h-max", o->h_max, "largest step");
  cmd.add("h-scale", o->h_scale, "step is min(h-max, h-scale/L)");
  cmd.add("sample-every", o->sample_every, "steps between norm samples");
  cmd.add("amplitude", o->amplitude, "H norm of the initial data");
  cmd.add("slope-min", o->slope_min, "lower bound on the log-log slope (nan: no check)");
  cmd.add("slope-max", o->slope_max, "upper bound on the log-log slope (nan: no check)");
  cmd.add("max-spread", o->max_spread, "bound on (max-min)/min of the statistic over L (nan: no check)");
  cmd.run = [o](const Command& c) {
    ScanOptions options;
    options.truncation = o->N;
    options.h_max = o->h_max;
    options.h_scale = o->h_scale;
    options.sample_every = o->sample_every;
    options.initial_norm = o->amplitude;
    options.seed = c.seed;
    options.threads = c.worker_count();
    const ScanTable table = attractor_norm_scan(o->model.build(), parse_list(o->L_list), o->ensemble, o->T, o->burn_in, options);
    CsvWriter csv(c.path("scan.csv"), "L,seed,stat");
    int blown = 0;
    for (const auto& r : table.rows) {
      csv.row(r.L, r.seed, r.stat);
      blown += r.blew_up;
    }
    Summary s(c);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < table.L_values.size(); ++i) {
      s.put("stat_L" + num(table.L_values[i]), table.statistic[i]);
      lo = std::min(lo, table.statistic[i]);
      hi = std::max(hi, table.statistic[i]);
    }
    const double spread = (hi - lo) / lo;
    s.put("slope", table.slope);
    s.put("spread", spread);
    s.put("blow_ups", blown);
    if (blown > 0) return kBlowUp;
    if (!std::isnan(o->slope_min)) check(table.slope >= o->slope_min, "slope below " + num(o->slope_min));
    if (!std::isnan(o->slope_max)) check(table.slope <= o->slope_max, "slope above " + num(o->slope_max));
    if (!std::isnan(o->max_spread)) check(spread < o->max_spread, "spread " + num(spread) + " exceeds " + num(o->max_spread));
    return kOk;
  };
  return &cmd;
}

Command* make_equilibria(CLI::App& root, std::vector<std::unique_ptr<Command>>& all) {
  auto& cmd = *all.emplace_back(std::make_unique<Command>());
  cmd.app = root.add_subcommand("equilibria", "enumerate and classify reduced GL2 equilibria");
  struct Options {
    double alpha = 1.5;
    int D = 0;
  };
  auto o = std::make_shared<Options>();
  cmd.add("alpha", o->alpha, "Re beta");
  cmd.add("D", o->D, "reduced dimension (0: floor(sqrt(alpha)) + 1)");
  cmd.run = [o](const Command& c) {
    const int dim = o->D > 0 ? o->D : default_reduced_dimension(o->alpha);
    std::vector<EquilibriumRecord> records;
    try {
      records = enumerate_equilibria(o->alpha, dim);
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError("--D", e.what());
    }
    CsvWriter csv(c.path("equilibria.csv"), "support,n0,n2,norm_sq,stable,hyperbolic");
    CsvWriter spectrum(c.path("spectrum.csv"), "support,eigenvalue");
    bool consistent = true;
    double worst_residual = 0.0;
    for (const auto& r : records) {
      const bool stable = r.stability == Stability::Stable;
      csv.row(r.support_label(), r.n0, r.n2, r.norm_sq, stable, r.hyperbolic);
      const auto ev = linearization_spectrum(r, o->alpha, dim);
      for (double e : ev) spectrum.row(r.support_label(), e);
      if (r.hyperbolic) consistent = consistent && ((ev.back() < 0.0) == stable);
      worst_residual = std::max(worst_residual, equilibrium_residual(r, o->alpha, dim));
    }
    Summary s(c);
    s.put("records", records.size());
    s.put("max_residual", worst_residual);
    s.put("spectrum_consistent", consistent ? 1 : 0);
    check(worst_residual <= 1e-12, "equilibrium residual " + num(worst_residual) + " above 1e-12");
    check(consistent, "linearization sign pattern contradicts a stability verdict");
    return kOk;
  };
  return &cmd;
}

Command* make_gradient_run(CLI::App& root, std::vector<std::unique_ptr<Command>>& all) {
  auto& cmd = *all.emplace_back(std::make_unique<Command>());
  cmd.app = root.add_subcommand("gradient-run", "random reduced GL2 runs and their limiting tori");
  struct Options {
    double alpha = 1.5;
    double T = 200.0;
    double h = 1e-2;
    double tolerance = 1e-4;
    double rate_tolerance = 0.05;
    int D = 0;
    int ensemble = 20;
  };
  auto o = std::make_shared<Options>();
  cmd.add("alpha", o->alpha, "Re beta");
  cmd.add("D", o->D, "reduced dimension (0: default)");
  cmd.add("ensemble", o->ensemble, "number of runs");
  cmd.add("T", o->T, "horizon");
  cmd.add("h", o->h, "RK4 step");
  cmd.add("tolerance", o->tolerance, "torus distance counted as converged");
  cmd.add("rate-tolerance", o->rate_tolerance, "allowed relative dL/dt mismatch");
  cmd.run = [o](const Command& c) {
    GradientOptions options;
    options.D = o->D;
    options.h = o->h;
    options.tolerance = o->tolerance;
    options.seed = c.seed;
    options.threads = c.worker_count();
    const GradientReport report = gradient_convergence_experiment(o->alpha, o->ensemble, o->T, options);
    CsvWriter csv(c.path("gradient.csv"),
                  "seed,nearest_support,distance,converged,max_lyapunov_increase,max_rate_mismatch");
    for (const auto& m : report.members)
      csv.row(m.seed, report.equilibria[m.nearest].support_label(), m.distance, m.converged,
              m.max_lyapunov_increase, m.max_rate_mismatch);
    Summary s(c);
    s.put("all_converged", report.all_converged ? 1 : 0);
    s.put("monotone", report.monotone ? 1 : 0);
    s.put("max_rate_mismatch", report.max_rate_mismatch);
    check(report.all_converged, "a run did not reach a stable torus");
    check(report.monotone, "Lyapunov functional increased by more than 1e-8 in a step");
    check(report.max_rate_mismatch <= o->rate_tolerance, "dL/dt mismatch above " + num(o->rate_tolerance));
    return kOk;
  };
  return &cmd;
}

Command* make_wave(CLI::App& root, std::vector<std::unique_ptr<Command>>& all) {
  auto& cmd = *all.emplace_back(std::make_unique<Command>());
  cmd.app = root.add_subcommand("wave", "rotating waves of the rescaled KdV-KS equation");
  struct Options {
    double a = 2.0;
    double tolerance = 1e-10;
    std::string eps_list = "0.05,0.025,0.0125";
    int N = 32;
    int max_iterations = 60;
  };
  auto o = std::make_shared<Options>();
  cmd.add("a", o->a, "KS anti-diffusion");
  cmd.add("eps-list", o->eps_list, "comma-separated eps values, solved by continuation");
  cmd.add("N", o->N, "harmonics");
  cmd.add("tolerance", o->tolerance, "residual bound");
  cmd.add("max-iterations", o->max_iterations, "Newton iteration cap");
  cmd.run = [o](const Command& c) {
    WaveOptions options;
    options.truncation = o->N;
    options.tolerance = o->tolerance;
    options.max_iterations = o->max_iterations;
    std::vector<WaveRecord> waves;
    try {
      waves = wave_continuation(o->a, parse_list(o->eps_list), options);
    } catch (const NewtonDiverged& e) {
      throw AssertionFailure(std::string(e.what()) + " (last residual " + num(e.last_residual()) + ")");
    }
    CsvWriter csv(c.path("wave.csv"), "eps,c,residual");
    for (std::size_t k = 0; k < waves.size(); ++k) {
      csv.row(waves[k].eps, waves[k].c, waves[k].residual);
      char name[32];
      std::snprintf(name, sizeof name, "profile_%02zu.csv", k);
      write_field(c.path(name), waves[k].profile);
    }
    Summary s(c);
    bool decreasing = true;
    for (std::size_t k = 1; k < waves.size(); ++k) {
      const double gap = std::abs(waves[k].c - waves[k - 1].c);
      s.put("c_gap_" + std::to_string(k), gap);
      if (k >= 2) decreasing = decreasing && gap < std::abs(waves[k - 1].c - waves[k - 2].c);
    }
    s.put("gaps_decreasing", decreasing ? 1 : 0);
    check(decreasing, "speed differences are not strictly decreasing");
    return kOk;
  };
  return &cmd;
}

Command* make_ode3_scan(CLI::App& root, std::vector<std::unique_ptr<Command>>& all) {
  auto& cmd = *all.emplace_back(std::make_unique<Command>());
  cmd.app = root.add_subcommand("ode3-scan", "largest Lyapunov exponent of the 3D reduction over a grid");
  struct Options {
    std::string betas = "1,2,3";
    std::string gammas = "0,0.5,1";
    std::string omegas = "-2,0,2";
    double T = 500.0;
    double renorm = 1.0;
    double h = 1e-2;
    double transient = 50.0;
    double r0 = 0.5;
    double rho0 = 0.5;
    double eta0 = 1.0;
  };
  auto o = std::make_shared<Options>();
  cmd.add("beta-list", o->betas, "comma-separated beta values");
  cmd.add("gamma-list", o->gammas, "comma-separated gamma values");
  cmd.add("omega-list", o->omegas, "comma-separated omega values");
  cmd.add("T", o->T, "accumulation time");
  cmd.add("renorm-every", o->renorm, "renormalization interval");
  cmd.add("h", o->h, "RK4 step");
  cmd.add("transient", o->transient, "discarded initial time");
  cmd.add("r0", o->r0, "initial r");
  cmd.add("rho0", o->rho0, "initial rho");
  cmd.add("eta0", o->eta0, "initial eta");
  cmd.run = [o](const Command& c) {
    ExponentScanOptions options;
    options.start = {o->r0, o->rho0, o->eta0};
    options.T = o->T;
    options.renorm_every = o->renorm;
    options.integration.h = o->h;
    options.integration.transient = o->transient;
    options.threads = c.worker_count();
    const auto rows = ode3_exponent_scan(parse_list(o->betas), parse_list(o->gammas), parse_list(o->omegas), options);
    CsvWriter csv(c.path("ode3.csv"), "beta,gamma,omega,lambda1");
    for (const auto& r : rows) csv.row(r.beta, r.gamma, r.omega, r.lambda1);
    return kOk;
  };
  return &cmd;
}

Command* make_hd_check(CLI::App& root, std::vector<std::unique_ptr<Command>>& all) {
  auto& cmd = *all.emplace_back(std::make_unique<Command>());
  cmd.app = root.add_subcommand("hd-check", "invariance of H_D under the averaged GL2 flow");
  struct Options {
    double beta = 1.5;
    double beta_im = 0.0;
    double omega = 0.0;
    double T = 50.0;
    double h = 1e-2;
    int D = 2;
  };
  auto o = std::make_shared<Options>();
  cmd.add("beta-re", o->beta, "Re beta");
  cmd.add("beta-im", o->beta_im, "Im beta");
  cmd.add("omega", o->omega, "cubic phase");
  cmd.add("D", o->D, "subspace dimension");
  cmd.add("T", o->T, "horizon of the dynamic check");
  cmd.add("h", o->h, "time step");
  cmd.run = [o](const Command& c) {
    HdOptions options;
    options.beta_im = o->beta_im;
    options.omega = o->omega;
    options.h = o->h;
    options.seed = c.seed;
    const HdReport report = hd_invariance_check(o->beta, o->D, o->T, options);
    CsvWriter csv(c.path("hd.csv"), "beta,D,T,leakage,max_super_mode,passed");
    csv.row(o->beta, o->D, o->T, report.leakage, report.max_super_mode, report.passed);
    check(report.passed, "H_D invariance check failed");
    return kOk;
  };
  return &cmd;
}

std::vector<std::string> with_config(const std::vector<std::string>& args) {
  // Config entries go right after the subcommand name so that flags given on
  // the command line are parsed later and win.
  std::vector<std::string> out;
  std::vector<std::string> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = read_config(args[i + 1]);
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = read_config(args[i].substr(9));
    }
  }
  std::size_t insert_at = 0;
  while (insert_at < args.size() && args[insert_at].rfind("-", 0) == 0) ++insert_at;
  for (std::size_t i = 0; i < args.size(); ++i) {
    out.push_back(args[i]);
    if (i == insert_at) out.insert(out.end(), config.begin(), config.end());
  }
  return out;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App root{"Large-dispersion averaging laboratory"};
  root.name("displab");
  root.set_help_flag("--help", "print help and exit");
  root.require_subcommand(1);
  root.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::vector<std::unique_ptr<Command>> commands;
  for (auto factory : {make_oracle_check, make_simulate, make_averaging_rate, make_attractor_scan, make_equilibria,
                       make_gradient_run, make_wave, make_ode3_scan, make_hd_check}) {
    Command* c = factory(root, commands);
    c->app->add_option("--out", c->out_dir, "output directory")->capture_default_str();
    c->app->add_option("--config", c->config_path, "flat key=value config file");
    c->app->add_option("--seed", c->seed, "random seed")->capture_default_str();
    c->app->add_option("--threads", c->threads, "worker count (0: DISPLAB_THREADS or hardware)");
  }

  std::vector<std::string> argv;
  try {
    argv = with_config(args);
  } catch (const ConfigUnreadable& e) {
    std::cerr << "displab: " << e.what() << '\n';
    return kConfigUnreadable;
  } catch (const CLI::ParseError& e) {
    std::cerr << "displab: " << e.what() << '\n' << root.help();
    return kUsage;
  }
  std::reverse(argv.begin(), argv.end());

  try {
    root.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    return root.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return root.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "displab: " << e.what() << "\n\n" << root.help();
    return kUsage;
  }

  for (const auto& c : commands) {
    if (!c->app->parsed()) continue;
    try {
      c->write_manifest();
      return c->run(*c);
    } catch (const CLI::ParseError& e) {
      std::cerr << "displab: " << e.what() << '\n';
      return kUsage;
    } catch (const AssertionFailure& e) {
      std::cerr << "displab: assertion failed: " << e.what() << '\n';
      return kAssertionFailed;
    } catch (const BlowUp& e) {
      std::cerr << "displab: " << e.what() << '\n';
      return kBlowUp;
    }
  }
  return kUsage;
}

}  // namespace displab::cli
