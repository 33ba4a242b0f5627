#pragma once

#include <optional>

#include "spikesim/grid.hpp"

namespace spikesim {

enum class Orientation { Increasing, Decreasing };

/// Nonconstant steady state of the w equation with u = d1/((a1-d1) w)
/// eliminated; modes counts the monotone segments on [0,1].
struct SteadyProfile {
    Mesh1D mesh;
    Field w;
    Field u;
    int modes = 1;
    Orientation orientation = Orientation::Increasing;
    double d_w = 0.0;  // diffusion the profile solves the BVP for
};

/// Shooting for the strictly increasing solution of
///   d_w W'' = W + c^2/W - kappa1,  W'(0) = W'(1) = 0,  c = d1/(a1-d1).
/// Integrates with a classical 4th-order one-step method at fixed step
/// 1/n_grid, scans W(0) over (1e-6 w_minus, (1-1e-6) w_minus) at 64 points
/// and bisects on the terminal slope. Returns nullopt when no sign change
/// is bracketed (expected for large d_w).
std::optional<SteadyProfile> shoot_monotone(const ModelParams& p, int n_grid = 1 << 14);

/// One shot from W(0)=w0, W'(0)=0; nodal W values on the shooting grid,
/// empty when the trajectory fell into the W -> 0 singularity.
std::vector<double> integrate_shot(const ModelParams& p, double w0, int n_grid);

/// x -> 1-x reflection; flips the orientation.
SteadyProfile reflect(const SteadyProfile& profile);

/// n-mode profile on [0,1] by even-reflection concatenation of a monotone
/// base computed for diffusion d_w * n^2; the result solves the BVP for
/// base.d_w / n^2.
SteadyProfile periodic_profile(const SteadyProfile& base, int n);

/// Discrete sup norm of d_w W'' - W - c^2/W + kappa1 (interior central
/// differences) against the profile's own diffusion coefficient.
double profile_residual(const KineticParams& p, const SteadyProfile& profile);

}  // namespace spikesim
