#include "spikesim/kinetics.hpp"

#include <cmath>
#include <cstdio>

namespace spikesim {

ReactionRate reaction_rhs(const KineticParams& p, double u, double w) {
    const double uw = u * w;
    const double du = (p.a1 * uw / (1.0 + uw) - p.d1) * u;
    const double dw = -w - u * u * w + p.kappa1;
    return {du, dw};
}

std::array<std::array<double, 2>, 2> kinetic_jacobian(const KineticParams& p,
                                                      double u, double w) {
    const double uw = u * w;
    const double den = 1.0 + uw;
    const double fu = p.a1 * uw * (2.0 + uw) / (den * den) - p.d1;
    const double fw = p.a1 * u * u / (den * den);
    const double gu = -2.0 * u * w;
    const double gw = -(1.0 + u * u);
    return {{{fu, fw}, {gu, gw}}};
}

ModelParams reduce_full_params(const FullModelParams& f) {
    const double sigma = f.sigma();
    const double a1 = f.a / f.d_g;
    const double d1 = f.d_c / f.d_g;
    const double kappa1 = f.kappa / std::sqrt(f.d_g * f.d_b * sigma);
    const double d_w = 1.0 / (f.gamma * f.d_g);
    return ModelParams(KineticParams(a1, d1, kappa1), d_w);
}

std::vector<ConstantSteadyState> constant_steady_states(const KineticParams& p) {
    std::vector<ConstantSteadyState> out;
    out.push_back({0.0, p.kappa1, Branch::Trivial});
    if (p.a1 <= p.d1) return out;

    const double c = p.branch_product();
    const double half = 0.5 * p.kappa1;
    const double disc = half * half - c * c;
    const double scale = half * half + c * c;
    if (disc < -1e-12 * scale) return out;

    if (disc <= 1e-12 * scale) {
        // degenerate double root: report the single positive state as Minus
        out.push_back({c / half, half, Branch::Minus});
        return out;
    }
    const double root = std::sqrt(disc);
    const double w_minus = half - root;
    const double w_plus = half + root;
    out.push_back({c / w_minus, w_minus, Branch::Minus});
    out.push_back({c / w_plus, w_plus, Branch::Plus});
    return out;
}

namespace {

bool minus_branch_stable_closed_form(const KineticParams& p) {
    const double a1 = p.a1, d1 = p.d1, k1 = p.kappa1;
    const bool cond1 = k1 * k1 > 2.0 * d1 * d1 * d1 / (a1 * (a1 - d1));
    bool cond2 = false;
    if (d1 > 1.0 && a1 > d1 * d1 / (d1 - 1.0)) {
        const double den = a1 - d1 * (a1 - d1);
        // den <= 0 makes the threshold negative, so kappa1^2 exceeds it trivially
        cond2 = den <= 0.0 || k1 * k1 > d1 * d1 * d1 * d1 / (a1 * den);
    }
    return cond1 || cond2;
}

}  // namespace

Stability classify_kinetic_stability(const KineticParams& p,
                                     const ConstantSteadyState& s) {
    const auto r = reaction_rhs(p, s.u_bar, s.w_bar);
    if (std::abs(r.du) > 1e-8 || std::abs(r.dw) > 1e-8)
        throw std::invalid_argument(
            "classify_kinetic_stability: state is not a steady state of these parameters");

    const auto J = kinetic_jacobian(p, s.u_bar, s.w_bar);
    const double tr = J[0][0] + J[1][1];
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (std::abs(tr) < 1e-12 || std::abs(det) < 1e-12) return Stability::Marginal;

    Stability by_eigen = (det > 0.0 && tr < 0.0) ? Stability::Stable : Stability::Unstable;

    switch (s.branch) {
        case Branch::Trivial:
            return Stability::Stable;
        case Branch::Plus:
            return Stability::Unstable;
        case Branch::Minus: {
            Stability by_conditions = minus_branch_stable_closed_form(p)
                                          ? Stability::Stable
                                          : Stability::Unstable;
            if (by_conditions != by_eigen)
                throw std::logic_error(
                    "classify_kinetic_stability: closed-form conditions disagree "
                    "with trace/determinant signs");
            return by_conditions;
        }
    }
    return by_eigen;
}

namespace {

void rk4_step(const KineticParams& p, double dt, double& u, double& w) {
    const auto k1 = reaction_rhs(p, u, w);
    const auto k2 = reaction_rhs(p, u + 0.5 * dt * k1.du, w + 0.5 * dt * k1.dw);
    const auto k3 = reaction_rhs(p, u + 0.5 * dt * k2.du, w + 0.5 * dt * k2.dw);
    const auto k4 = reaction_rhs(p, u + dt * k3.du, w + dt * k3.dw);
    u += dt / 6.0 * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du);
    w += dt / 6.0 * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);
}

// Implicit Euler via 2x2 Newton on (u,w) - u_n - dt*f = 0.
void implicit_euler_step(const KineticParams& p, double dt, double& u, double& w) {
    double v = u, z = w;
    for (int it = 0; it < 50; ++it) {
        const auto r = reaction_rhs(p, v, z);
        const double ru = v - u - dt * r.du;
        const double rw = z - w - dt * r.dw;
        const auto J = kinetic_jacobian(p, v, z);
        const double a = 1.0 - dt * J[0][0], b = -dt * J[0][1];
        const double c = -dt * J[1][0], d = 1.0 - dt * J[1][1];
        const double det = a * d - b * c;
        const double dv = (d * ru - b * rw) / det;
        const double dz = (a * rw - c * ru) / det;
        v -= dv;
        z -= dz;
        if (std::abs(dv) + std::abs(dz) < 1e-14 * (1.0 + std::abs(v) + std::abs(z)))
            break;
    }
    u = v;
    w = z;
}

}  // namespace

std::vector<KineticSample> integrate_kinetics(const KineticParams& p, double u0,
                                              double w0, double dt, double t_end,
                                              KineticScheme scheme) {
    if (!(u0 > 0.0) || !(w0 > 0.0))
        throw std::invalid_argument("integrate_kinetics: initial data must be positive");
    if (!(dt > 0.0) || !(t_end > 0.0) || dt > t_end)
        throw std::invalid_argument("integrate_kinetics: need 0 < dt <= t_end");

    std::vector<KineticSample> out;
    double t = 0.0, u = u0, w = w0;
    out.push_back({t, u, w});
    while (t < t_end - 1e-12 * t_end) {
        double step = std::min(dt, t_end - t);
        double un = u, wn = w;
        int halvings = 0;
        for (;;) {
            un = u;
            wn = w;
            if (scheme == KineticScheme::Rk4)
                rk4_step(p, step, un, wn);
            else
                implicit_euler_step(p, step, un, wn);
            if (un >= 0.0 && wn >= 0.0) break;
            if (++halvings > 20)
                throw std::runtime_error("integrate_kinetics: positivity lost after 20 halvings");
            step *= 0.5;
        }
        // substeps after halving re-cover the full dt
        u = un;
        w = wn;
        t += step;
        out.push_back({t, u, w});
    }
    return out;
}

}  // namespace spikesim
