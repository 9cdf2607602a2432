#pragma once

#include "displab/dispersion.hpp"
#include "displab/timestep.hpp"

namespace displab {

/// w_n(t) = exp(i A_n(t)) v_n(t) with
/// A_n(t) = int_0^t (gamma4 - 2 omega |v|^2 + omega |v_n|^2) ds by the
/// trapezoid rule over the snapshots. Norm samples are recomputed from the
/// rotated snapshots.
TrajectoryLog phase_reconstruction(const TrajectoryLog& v_trajectory, double gamma4, double omega);

/// Applies apply_group(kind, L, -t) to every snapshot (physical to rotating).
/// Pass -L for the inverse direction.
TrajectoryLog frame_transform(const TrajectoryLog& u_trajectory, GroupKind kind, double L);

}  // namespace displab
