#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "displab/cli.hpp"

namespace fs = std::filesystem;
using displab::cli::dispatch;

namespace {
fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("displab_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

int run(std::vector<std::string> args, const fs::path& out) {
  args.push_back("--out");
  args.push_back(out.string());
  args.push_back("--threads");
  args.push_back("2");
  return dispatch(args);
}
}  // namespace

TEST_CASE("usage errors") {
  CHECK(dispatch({}) == displab::cli::kUsage);
  CHECK(dispatch({"no-such-command"}) == displab::cli::kUsage);
  CHECK(dispatch({"equilibria", "--bogus", "1"}) == displab::cli::kUsage);
  CHECK(dispatch({"simulate", "--model", "nonsense", "--out", fresh_dir("bad").string()}) == displab::cli::kUsage);
  CHECK(dispatch({"equilibria", "--config", "/nonexistent/displab.cfg"}) == displab::cli::kConfigUnreadable);
}

TEST_CASE("equilibria table") {
  const auto dir = fresh_dir("eq");
  REQUIRE(run({"equilibria", "--alpha", "1.5", "--D", "2"}, dir) == displab::cli::kOk);
  const auto rows = lines(dir / "equilibria.csv");
  REQUIRE(rows.size() >= 4);
  CHECK(rows[0] == "support,n0,n2,norm_sq,stable,hyperbolic");
  CHECK(rows[1].rfind("{},0,0,0,", 0) == 0);
  int stable = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].find(",1,1") != std::string::npos && rows[i].rfind("{0},", 0) == 0) ++stable;
  CHECK(stable == 1);
  CHECK(fs::exists(dir / "manifest.txt"));
  const auto manifest = slurp(dir / "manifest.txt");
  CHECK(manifest.find("subcommand=equilibria") != std::string::npos);
  CHECK(manifest.find("run_id=") != std::string::npos);
}

TEST_CASE("simulate with zero horizon") {
  const auto dir = fresh_dir("sim0");
  REQUIRE(run({"simulate", "--model", "ks", "--L", "0", "--T", "0"}, dir) == displab::cli::kOk);
  const auto rows = lines(dir / "trajectory.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "t,h_norm,h1_norm,lyapunov");
  CHECK(rows[1].rfind("0,", 0) == 0);
}

TEST_CASE("snapshots and the three-dimensional model") {
  const auto dir = fresh_dir("snap");
  REQUIRE(run({"simulate", "--model", "gl2-averaged", "--beta-re", "1", "--N", "4", "--h", "0.01", "--T", "0.05",
               "--snapshot-every", "1"},
              dir) == displab::cli::kOk);
  CHECK(lines(dir / "snapshot_times.csv").size() == 7);
  const auto snap = lines(dir / "snapshot_00000.csv");
  CHECK(snap[0] == "n,re,im");
  CHECK(snap.size() == 10);

  const auto d3 = fresh_dir("ode3");
  REQUIRE(run({"simulate", "--model", "ode3", "--T", "0.1", "--h", "0.01"}, d3) == displab::cli::kOk);
  const auto rows = lines(d3 / "ode3_trajectory.csv");
  CHECK(rows[0] == "t,r,rho,eta");
  CHECK(rows.size() == 12);
}

TEST_CASE("oracle check") {
  const auto dir = fresh_dir("oracle");
  REQUIRE(run({"oracle-check", "--seed", "7", "--trials", "20", "--N-max", "4"}, dir) == displab::cli::kOk);
  const auto rows = lines(dir / "oracle.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "trials,max_err_N,max_err_M,max_err_K");
}

TEST_CASE("identical manifests give identical bytes") {
  const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
  const std::vector<std::string> args{"simulate", "--model", "gl1", "--L", "7", "--beta-re", "1.2", "--omega",
                                      "0.5", "--gamma", "0.3", "--N", "8", "--h", "0.01", "--T", "0.5",
                                      "--seed", "11"};
  REQUIRE(run(args, a) == displab::cli::kOk);
  REQUIRE(run(args, b) == displab::cli::kOk);
  CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));

  const auto c = fresh_dir("det_c"), d = fresh_dir("det_d");
  const std::vector<std::string> scan{"attractor-scan", "--model", "gl1", "--L-list", "2,4", "--ensemble", "2",
                                      "--N", "8", "--T", "1", "--burn-in", "0.5", "--beta-re", "2",
                                      "--gamma", "0.5", "--omega", "1", "--h-max", "0.01"};
  REQUIRE(run(scan, c) == displab::cli::kOk);
  REQUIRE(dispatch([&] {
            auto v = scan;
            v.insert(v.end(), {"--out", d.string(), "--threads", "1"});
            return v;
          }()) == displab::cli::kOk);
  CHECK(slurp(c / "scan.csv") == slurp(d / "scan.csv"));
  CHECK(lines(c / "scan.csv")[0] == "L,seed,stat");
  CHECK(lines(c / "scan.csv").size() == 5);
}

TEST_CASE("config file and flag precedence") {
  const auto dir = fresh_dir("cfg");
  fs::create_directories(dir);
  const auto cfg = dir / "run.cfg";
  {
    std::ofstream f(cfg);
    f << "# reduced equilibria\nalpha = 2.5\nD=1\n";
  }
  const auto out1 = dir / "file";
  REQUIRE(dispatch({"equilibria", "--config", cfg.string(), "--out", out1.string()}) == displab::cli::kOk);
  CHECK(slurp(out1 / "manifest.txt").find("alpha=2.5") != std::string::npos);
  const auto out2 = dir / "flag";
  REQUIRE(dispatch({"equilibria", "--config", cfg.string(), "--alpha", "0.5", "--out", out2.string()}) ==
          displab::cli::kOk);
  const auto manifest = slurp(out2 / "manifest.txt");
  CHECK(manifest.find("alpha=0.5") != std::string::npos);
  CHECK(manifest.find("D=1") != std::string::npos);
}

TEST_CASE("remaining table schemas") {
  const auto rate = fresh_dir("rate");
  REQUIRE(run({"averaging-rate", "--N", "8", "--L-list", "50,100,200", "--steps-per-period", "32",
               "--averaged-step", "1e-3"},
              rate) == displab::cli::kOk);
  CHECK(lines(rate / "rate.csv")[0] == "L,eps,err_h1");
  CHECK(lines(rate / "rate.csv").size() == 4);

  const auto wave = fresh_dir("wave");
  REQUIRE(run({"wave", "--a", "2", "--eps-list", "0.05,0.025,0.0125"}, wave) == displab::cli::kOk);
  CHECK(lines(wave / "wave.csv")[0] == "eps,c,residual");
  CHECK(lines(wave / "wave.csv").size() == 4);

  const auto ode3 = fresh_dir("ode3scan");
  REQUIRE(run({"ode3-scan", "--beta-list", "0.5,1", "--gamma-list", "0.2", "--omega-list", "1", "--T", "5"}, ode3) ==
          displab::cli::kOk);
  CHECK(lines(ode3 / "ode3.csv")[0] == "beta,gamma,omega,lambda1");
  CHECK(lines(ode3 / "ode3.csv").size() == 3);

  const auto hd = fresh_dir("hd");
  REQUIRE(run({"hd-check", "--beta-re", "1.5", "--D", "2", "--T", "50"}, hd) == displab::cli::kOk);
  CHECK(lines(hd / "hd.csv")[0] == "beta,D,T,leakage,max_super_mode,passed");

  const auto grad = fresh_dir("grad");
  REQUIRE(run({"gradient-run", "--alpha", "1.5", "--ensemble", "3", "--T", "200"}, grad) == displab::cli::kOk);
  CHECK(lines(grad / "gradient.csv")[0] ==
        "seed,nearest_support,distance,converged,max_lyapunov_increase,max_rate_mismatch");
}

TEST_CASE("numbers round-trip") {
  const auto dir = fresh_dir("digits");
  REQUIRE(run({"equilibria", "--alpha", "1.5", "--D", "1"}, dir) == displab::cli::kOk);
  const auto rows = lines(dir / "equilibria.csv");
  // {0}: norm_sq = 1.5 exactly; {1}: 0.5; {-1;1}: 1/6*2 = 0.33333333333333331
  bool saw_third = false;
  for (const auto& r : rows)
    if (r.find("0.33333333333333331") != std::string::npos) saw_third = true;
  CHECK(saw_third);
}
