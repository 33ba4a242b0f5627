#include "spikesim/steady_bvp.hpp"

#include <algorithm>
#include <cmath>

namespace spikesim {

namespace {

struct Shot {
    std::vector<double> w;  // nodal values, empty when aborted
    double v_end = 0.0;     // terminal slope, meaningful when !aborted
    bool aborted = false;
};

// Classical RK4 on W' = V, V' = (W + c^2/W - kappa1)/d_w with W'(0)=0.
// Aborts (overshoot) when W drops toward the c^2/W singularity.
Shot shoot(const ModelParams& p, double w0, int n_grid) {
    const double c = p.kinetics.d1 / (p.kinetics.a1 - p.kinetics.d1);
    const double c2 = c * c;
    const double kappa1 = p.kinetics.kappa1;
    const double d_w = p.d_w;
    const double h = 1.0 / n_grid;

    auto accel = [&](double w) { return (w + c2 / w - kappa1) / d_w; };

    Shot shot;
    shot.w.reserve(n_grid + 1);
    double w = w0, v = 0.0;
    shot.w.push_back(w);
    for (int i = 0; i < n_grid; ++i) {
        const double k1w = v, k1v = accel(w);
        const double k2w = v + 0.5 * h * k1v, k2v = accel(w + 0.5 * h * k1w);
        const double k3w = v + 0.5 * h * k2v, k3v = accel(w + 0.5 * h * k2w);
        const double k4w = v + h * k3v, k4v = accel(w + h * k3w);
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if (w < 1e-8) {
            shot.aborted = true;
            shot.w.clear();
            return shot;
        }
        shot.w.push_back(w);
    }
    shot.v_end = v;
    return shot;
}

// Does the trajectory launched at W(0)=w0 turn around (W' < 0) by x = 1?
// Starting below the positive steady state the trajectory
// rises first, so its first turning time is a monotone function of w0:
// it shrinks toward the small-oscillation half period as w0 approaches the
// steady state and diverges as w0 approaches the separatrix, below which the
// trajectory escapes and never turns.  The monotone profile is the unique w0
// whose first turning time is exactly 1.
bool turns_before_end(const ModelParams& p, double w0, int n_grid) {
    const double c = p.kinetics.d1 / (p.kinetics.a1 - p.kinetics.d1);
    const double c2 = c * c;
    const double kappa1 = p.kinetics.kappa1;
    const double d_w = p.d_w;
    const double h = 1.0 / n_grid;
    auto accel = [&](double w) { return (w + c2 / w - kappa1) / d_w; };

    double w = w0, v = 0.0;
    for (int i = 0; i < n_grid; ++i) {
        const double k1w = v, k1v = accel(w);
        const double k2w = v + 0.5 * h * k1v, k2v = accel(w + 0.5 * h * k1w);
        const double k3w = v + 0.5 * h * k2v, k3v = accel(w + 0.5 * h * k2w);
        const double k4w = v + h * k3v, k4v = accel(w + h * k3w);
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if (w < 1e-8) return false;  // escaped downward, no turn recorded
        if (v < 0.0) return true;
    }
    return false;
}

}  // namespace

std::vector<double> integrate_shot(const ModelParams& p, double w0, int n_grid) {
    return shoot(p, w0, n_grid).w;
}

std::optional<SteadyProfile> shoot_monotone(const ModelParams& p, int n_grid) {
    if (n_grid < 2) throw std::invalid_argument("shoot_monotone: n_grid too small");
    const auto states = constant_steady_states(p.kinetics);
    const ConstantSteadyState* minus = nullptr;
    for (const auto& s : states)
        if (s.branch == Branch::Minus) minus = &s;
    if (!minus)
        throw std::invalid_argument("shoot_monotone: kinetics have no positive steady states");
    const double w_minus = minus->w_bar;

    // Bisect on the first turning time of the trajectory. Near the steady
    // state it equals the small-oscillation half period (short when the
    // diffusion is small); toward the separatrix it diverges. The monotone
    // profile is the w0 where the first turn lands exactly at x = 1; if even
    // trajectories launched just below the steady state fail to turn inside
    // the domain, the diffusion is above the existence threshold.
    double hi = (1.0 - 1e-6) * w_minus;  // turns early when a profile exists
    double lo = 1e-6 * w_minus;          // escapes, never turns
    if (!turns_before_end(p, hi, n_grid) || turns_before_end(p, lo, n_grid))
        return std::nullopt;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (turns_before_end(p, mid, n_grid))
            hi = mid;
        else
            lo = mid;
    }
    // the lo side never turned inside the domain, so it is monotone on [0,1]
    const Shot shot = shoot(p, lo, n_grid);
    if (shot.aborted) return std::nullopt;
    bool monotone = true;
    for (size_t j = 1; j < shot.w.size() && monotone; ++j)
        monotone = shot.w[j] >= shot.w[j - 1] - 1e-13 * w_minus;
    if (!monotone || shot.w.back() - shot.w.front() < 0.1 * w_minus)
        return std::nullopt;

    SteadyProfile profile;
    profile.mesh = Mesh1D(n_grid);
    profile.w = Field(profile.mesh, shot.w);
    const double c = p.kinetics.d1 / (p.kinetics.a1 - p.kinetics.d1);
    std::vector<double> u(shot.w.size());
    for (size_t i = 0; i < u.size(); ++i) u[i] = c / shot.w[i];
    profile.u = Field(profile.mesh, u);
    profile.modes = 1;
    profile.orientation = Orientation::Increasing;
    profile.d_w = p.d_w;
    return profile;
}

SteadyProfile reflect(const SteadyProfile& profile) {
    SteadyProfile out = profile;
    std::reverse(out.w.values.begin(), out.w.values.end());
    std::reverse(out.u.values.begin(), out.u.values.end());
    out.orientation = profile.orientation == Orientation::Increasing
                          ? Orientation::Decreasing
                          : Orientation::Increasing;
    return out;
}

SteadyProfile periodic_profile(const SteadyProfile& base, int n) {
    if (n < 1) throw std::invalid_argument("periodic_profile: need n >= 1");
    if (base.modes != 1)
        throw std::invalid_argument("periodic_profile: base must be a single monotone piece");
    if (n == 1) return base;

    const int m = base.mesh.n_cells;
    SteadyProfile out;
    out.mesh = Mesh1D(n * m);
    std::vector<double> w(out.mesh.n_nodes()), u(out.mesh.n_nodes());
    for (int j = 0; j < n; ++j) {
        // segment j covers nodes j*m .. (j+1)*m; even segments copy the base,
        // odd segments copy its reflection, so seams share a nodal value
        for (int r = 0; r <= m; ++r) {
            const int src = (j % 2 == 0) ? r : m - r;
            w[j * m + r] = base.w.values[src];
            u[j * m + r] = base.u.values[src];
        }
    }
    out.w = Field(out.mesh, std::move(w));
    out.u = Field(out.mesh, std::move(u));
    out.modes = n;
    out.orientation = base.orientation;
    out.d_w = base.d_w / (static_cast<double>(n) * n);
    return out;
}

double profile_residual(const KineticParams& p, const SteadyProfile& profile) {
    const double c = p.d1 / (p.a1 - p.d1);
    const double c2 = c * c;
    const auto& w = profile.w.values;
    const double h = profile.mesh.h;
    // 4th-order stencil everywhere; the zero-slope ends admit an even ghost
    // extension (the autonomous ODE continues symmetrically across them)
    const long n = static_cast<long>(w.size());
    auto at = [&](long i) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * (n - 1) - i;
        return w[i];
    };
    double worst = 0.0;
    for (long i = 0; i < n; ++i) {
        const double lap = (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) +
                            16.0 * at(i + 1) - at(i + 2)) /
                           (12.0 * h * h);
        const double r = profile.d_w * lap - w[i] - c2 / w[i] + p.kappa1;
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

}  // namespace spikesim
