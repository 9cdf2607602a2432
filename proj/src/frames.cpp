#include "displab/frames.hpp"

#include <cmath>

namespace displab {

namespace {

void require_snapshots(const TrajectoryLog& log) {
  if (log.snapshots.empty()) throw std::invalid_argument("trajectory carries no snapshots");
}

// Samples matching the snapshots, keeping any recorded Lyapunov values.
TrajectoryLog with_snapshots(const TrajectoryLog& source, std::vector<Snapshot> snapshots) {
  TrajectoryLog out;
  out.warnings = source.warnings;
  std::size_t cursor = 0;
  for (const auto& s : snapshots) {
    Sample sample{s.t, hs_norm(s.field, 0.0), hs_norm(s.field, 1.0)};
    while (cursor < source.samples.size() && source.samples[cursor].t < s.t) ++cursor;
    if (cursor < source.samples.size() && source.samples[cursor].t == s.t)
      sample.lyapunov = source.samples[cursor].lyapunov;
    out.samples.push_back(sample);
  }
  out.last_state = snapshots.back().field;
  out.snapshots = std::move(snapshots);
  return out;
}

}  // namespace

TrajectoryLog phase_reconstruction(const TrajectoryLog& v_trajectory, double gamma4, double omega) {
  require_snapshots(v_trajectory);
  const auto& snaps = v_trajectory.snapshots;
  const int N = snaps.front().field.truncation();
  auto rate = [&](const SpectralField& v, int n) {
    const double norm = hs_norm(v, 0.0);
    return gamma4 - 2.0 * omega * norm * norm + omega * std::norm(v[n]);
  };

  std::vector<double> phase(static_cast<std::size_t>(2 * N + 1), 0.0);
  std::vector<Snapshot> out;
  out.reserve(snaps.size());
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    const SpectralField& v = snaps[k].field;
    if (v.truncation() != N) throw std::invalid_argument("snapshot truncation changes along the trajectory");
    if (k > 0) {
      const SpectralField& prev = snaps[k - 1].field;
      const double dt = snaps[k].t - snaps[k - 1].t;
      for (int n = -N; n <= N; ++n) phase[n + N] += 0.5 * dt * (rate(prev, n) + rate(v, n));
    }
    SpectralField w(N);
    for (int n = -N; n <= N; ++n) w.mode(n) = std::polar(1.0, phase[n + N]) * v[n];
    out.push_back({snaps[k].t, std::move(w)});
  }
  return with_snapshots(v_trajectory, std::move(out));
}

TrajectoryLog frame_transform(const TrajectoryLog& u_trajectory, GroupKind kind, double L) {
  require_snapshots(u_trajectory);
  std::vector<Snapshot> out;
  out.reserve(u_trajectory.snapshots.size());
  for (const auto& s : u_trajectory.snapshots) out.push_back({s.t, apply_group(kind, L, -s.t, s.field)});
  return with_snapshots(u_trajectory, std::move(out));
}

}  // namespace displab
