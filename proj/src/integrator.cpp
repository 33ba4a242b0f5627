#include "spikesim/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace spikesim {

namespace {

// D_w*K + M + M*diag(u^2), the spatial operator of the w equation.
// (M*diag(d))_{ij} = M_{ij} d_j keeps the product tridiagonal.
Tridiag w_operator(const ModelParams& p, const FemMatrices& mats,
                   const std::vector<double>& u_sq, bool diffusion_only) {
    const int n = mats.mass.size();
    Tridiag L(n);
    for (int i = 0; i < n; ++i) {
        L.diag[i] = p.d_w * mats.stiffness.diag[i];
        if (i > 0) L.lower[i] = p.d_w * mats.stiffness.lower[i];
        if (i < n - 1) L.upper[i] = p.d_w * mats.stiffness.upper[i];
        if (!diffusion_only) {
            L.diag[i] += mats.mass.diag[i] * (1.0 + u_sq[i]);
            if (i > 0) L.lower[i] += mats.mass.lower[i] * (1.0 + u_sq[i - 1]);
            if (i < n - 1) L.upper[i] += mats.mass.upper[i] * (1.0 + u_sq[i + 1]);
        }
    }
    return L;
}

double theta_of(TimeScheme s) { return s == TimeScheme::ImplicitEuler ? 1.0 : 0.5; }

// Nodal implicit update: v = u_n + dt*[(1-theta) f(u_n,w_n) + theta f(v,w_new)].
double solve_nodal_u(const KineticParams& p, double u_n, double w_n, double w_new,
                     double dt, double theta) {
    if (u_n == 0.0) return 0.0;  // absorbing: f(0,w)=0
    const double explicit_part =
        theta < 1.0 ? (1.0 - theta) * reaction_rhs(p, u_n, w_n).du : 0.0;
    const double base = u_n + dt * explicit_part;

    double v = u_n;
    for (int it = 0; it < 30; ++it) {
        const double vw = v * w_new;
        const double den = 1.0 + vw;
        const double f = (p.a1 * vw / den - p.d1) * v;
        const double fu = p.a1 * vw * (2.0 + vw) / (den * den) - p.d1;
        const double g = v - base - dt * theta * f;
        const double gp = 1.0 - dt * theta * fu;
        const double dv = g / gp;
        v -= dv;
        if (v < 0.0) v = 0.0;
        if (std::abs(dv) < 1e-12 * (1.0 + std::abs(v))) return v;
    }
    // bisection fallback on [0, u_n*exp(a1*dt)], extended if the bracket misses
    auto g_of = [&](double v_) {
        const double vw = v_ * w_new;
        return v_ - base - dt * theta * (p.a1 * vw / (1.0 + vw) - p.d1) * v_;
    };
    double lo = 0.0, hi = u_n * std::exp(p.a1 * dt);
    int guard = 0;
    while (g_of(hi) < 0.0 && guard++ < 60) hi *= std::exp(p.a1 * dt);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g_of(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

State semi_implicit_step(const ModelParams& p, const FemMatrices& mats, const State& s,
                         const IntegratorConfig& cfg, double dt) {
    const KineticParams& kp = p.kinetics;
    const double theta = theta_of(cfg.scheme);
    const int n = mats.mass.size();

    std::vector<double> u_sq(n);
    for (int i = 0; i < n; ++i) u_sq[i] = s.u.values[i] * s.u.values[i];
    const Tridiag L = w_operator(p, mats, u_sq, cfg.diffusion_only);

    Tridiag A(n);
    for (int i = 0; i < n; ++i) {
        A.diag[i] = mats.mass.diag[i] + dt * theta * L.diag[i];
        if (i > 0) A.lower[i] = mats.mass.lower[i] + dt * theta * L.lower[i];
        if (i < n - 1) A.upper[i] = mats.mass.upper[i] + dt * theta * L.upper[i];
    }
    std::vector<double> rhs = mats.mass.multiply(s.w.values);
    if (theta < 1.0) {
        const auto Lw = L.multiply(s.w.values);
        for (int i = 0; i < n; ++i) rhs[i] -= dt * (1.0 - theta) * Lw[i];
    }
    if (!cfg.diffusion_only) {
        const auto m_ones = mats.mass.multiply(std::vector<double>(n, 1.0));
        for (int i = 0; i < n; ++i) rhs[i] += dt * kp.kappa1 * m_ones[i];
    }

    State next;
    next.t = s.t + dt;
    next.w = Field(s.w.mesh, A.solve(rhs));
    next.u = s.u;
    if (!cfg.diffusion_only) {
        for (int i = 0; i < n; ++i)
            next.u.values[i] = solve_nodal_u(kp, s.u.values[i], s.w.values[i],
                                             next.w.values[i], dt, theta);
    }
    return next;
}

// Fully coupled Newton on the 2(n+1) residual; the block system reduces to a
// single tridiagonal Schur solve because the u rows are diagonal.
State newton_step(const ModelParams& p, const FemMatrices& mats, const State& s,
                  const IntegratorConfig& cfg, double dt) {
    const KineticParams& kp = p.kinetics;
    const double theta = theta_of(cfg.scheme);
    const int n = mats.mass.size();

    State guess = semi_implicit_step(p, mats, s, cfg, dt);
    std::vector<double>& v = guess.u.values;
    std::vector<double>& z = guess.w.values;

    std::vector<double> f_old(n), g_old_mass(n);
    {
        std::vector<double> u_sq_old(n), g_old(n);
        for (int i = 0; i < n; ++i) u_sq_old[i] = s.u.values[i] * s.u.values[i];
        const Tridiag L_old = w_operator(p, mats, u_sq_old, false);
        g_old_mass = L_old.multiply(s.w.values);
        for (int i = 0; i < n; ++i) f_old[i] = reaction_rhs(kp, s.u.values[i], s.w.values[i]).du;
    }
    const auto m_ones = mats.mass.multiply(std::vector<double>(n, 1.0));
    const auto m_wn = mats.mass.multiply(s.w.values);

    for (int it = 0; it < cfg.newton_max_iter; ++it) {
        std::vector<double> u_sq(n);
        for (int i = 0; i < n; ++i) u_sq[i] = v[i] * v[i];
        const Tridiag L = w_operator(p, mats, u_sq, false);
        const auto Lz = L.multiply(z);
        const auto Mz = mats.mass.multiply(z);

        std::vector<double> r_u(n), r_w(n);
        for (int i = 0; i < n; ++i) {
            const double f_new = reaction_rhs(kp, v[i], z[i]).du;
            r_u[i] = v[i] - s.u.values[i] -
                     dt * (theta * f_new + (1.0 - theta) * f_old[i]);
            r_w[i] = Mz[i] - m_wn[i] +
                     dt * (theta * (Lz[i] - kp.kappa1 * m_ones[i]) +
                           (1.0 - theta) * (g_old_mass[i] - kp.kappa1 * m_ones[i]));
        }

        // Jacobian blocks: D1, D2 diagonal (u rows); T1, T2 tridiagonal (w rows)
        std::vector<double> d1(n), d2(n), two_vz(n);
        for (int i = 0; i < n; ++i) {
            const auto J = kinetic_jacobian(kp, v[i], z[i]);
            d1[i] = 1.0 - dt * theta * J[0][0];
            d2[i] = -dt * theta * J[0][1];
            two_vz[i] = 2.0 * v[i] * z[i];
        }
        Tridiag schur(n);
        for (int i = 0; i < n; ++i) {
            schur.diag[i] = mats.mass.diag[i] + dt * theta * L.diag[i] -
                            dt * theta * mats.mass.diag[i] * two_vz[i] * d2[i] / d1[i];
            if (i > 0)
                schur.lower[i] =
                    mats.mass.lower[i] + dt * theta * L.lower[i] -
                    dt * theta * mats.mass.lower[i] * two_vz[i - 1] * d2[i - 1] / d1[i - 1];
            if (i < n - 1)
                schur.upper[i] =
                    mats.mass.upper[i] + dt * theta * L.upper[i] -
                    dt * theta * mats.mass.upper[i] * two_vz[i + 1] * d2[i + 1] / d1[i + 1];
        }
        // rhs = -r_w + T2 * D1^{-1} r_u, with T2 = dt*theta*M*diag(2 v z)
        std::vector<double> scaled(n), rhs(n);
        for (int i = 0; i < n; ++i) scaled[i] = two_vz[i] * r_u[i] / d1[i];
        const auto t2r = mats.mass.multiply(scaled);
        for (int i = 0; i < n; ++i) rhs[i] = -r_w[i] + dt * theta * t2r[i];

        const auto dz = schur.solve(rhs);
        double max_delta = 0.0;
        for (int i = 0; i < n; ++i) {
            const double dv = (-r_u[i] - d2[i] * dz[i]) / d1[i];
            v[i] += dv;
            z[i] += dz[i];
            if (v[i] < 0.0 && s.u.values[i] > 0.0) v[i] = 0.0;
            max_delta = std::max(max_delta, std::max(std::abs(dv), std::abs(dz[i])));
        }
        if (max_delta < cfg.newton_tol) break;
    }
    return guess;
}

void enforce_positivity(State& s) {
    auto check = [&s](std::vector<double>& vals) {
        for (size_t i = 0; i < vals.size(); ++i) {
            if (vals[i] < -1e-12) throw PositivityFault(static_cast<int>(i), s.t);
            if (vals[i] < 0.0) vals[i] = 0.0;
        }
    };
    check(s.u.values);
    check(s.w.values);
}

}  // namespace

State step(const ModelParams& p, const FemMatrices& mats, const State& s,
           const IntegratorConfig& cfg) {
    cfg.validate();
    State next = (cfg.nonlinear_mode == NonlinearMode::Newton && !cfg.diffusion_only)
                     ? newton_step(p, mats, s, cfg, cfg.dt)
                     : semi_implicit_step(p, mats, s, cfg, cfg.dt);
    enforce_positivity(next);
    return next;
}

SimulationResult simulate_from(const ModelParams& p, State state,
                               const IntegratorConfig& cfg,
                               const SpikeCriteria& criteria) {
    cfg.validate();
    const FemMatrices mats = assemble_fem(state.u.mesh);
    const long n_steps = std::lround(cfg.t_end / cfg.dt);

    std::vector<long> snap_steps;
    snap_steps.push_back(0);
    for (double t : cfg.snapshot_times)
        snap_steps.push_back(std::clamp(std::lround(t / cfg.dt), 0L, n_steps));
    snap_steps.push_back(n_steps);
    std::sort(snap_steps.begin(), snap_steps.end());
    snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()), snap_steps.end());

    SimulationResult result;
    size_t next_snap = 0;
    auto record = [&](const State& s) {
        result.snapshots.push_back(s);
        result.diagnostics.rows.push_back(
            make_diagnostics_row(s.t, s.u, s.w, criteria));
    };
    if (snap_steps[next_snap] == 0) {
        record(state);
        ++next_snap;
    }
    for (long k = 1; k <= n_steps; ++k) {
        try {
            state = step(p, mats, state, cfg);
        } catch (const PositivityFault& fault) {
            result.aborted = true;
            result.fault_message = fault.what();
            return result;
        }
        state.t = k * cfg.dt;  // avoid accumulation drift in reported times
        if (next_snap < snap_steps.size() && k == snap_steps[next_snap]) {
            record(state);
            ++next_snap;
        }
    }
    return result;
}

SimulationResult simulate(const ModelParams& p, const Mesh1D& mesh,
                          const PerturbationSpec& ic, const IntegratorConfig& cfg) {
    return simulate_from(p, build_initial_state(p, mesh, ic), cfg,
                         SpikeCriteria::for_params(p.kinetics));
}

std::vector<State> simulate_linearized(const ModelParams& p, const Mesh1D& mesh,
                                       const ConstantSteadyState& s, const Field& phi0,
                                       const Field& psi0, const IntegratorConfig& cfg) {
    cfg.validate();
    if (s.branch == Branch::Trivial)
        throw std::invalid_argument("simulate_linearized: on-branch state required");
    const auto J = kinetic_jacobian(p.kinetics, s.u_bar, s.w_bar);
    const double a11 = J[0][0], a12 = J[0][1], a21 = J[1][0], a22 = J[1][1];
    const FemMatrices mats = assemble_fem(mesh);
    const int n = mesh.n_nodes();
    const double theta = theta_of(cfg.scheme);
    const double dt = cfg.dt;
    const double d1_scalar = 1.0 - dt * theta * a11;

    // Schur complement of the u rows: tridiagonal in psi
    Tridiag schur(n);
    const double mass_coef =
        1.0 - dt * theta * a22 - (dt * theta) * (dt * theta) * a12 * a21 / d1_scalar;
    for (int i = 0; i < n; ++i) {
        schur.diag[i] = mass_coef * mats.mass.diag[i] +
                        dt * theta * p.d_w * mats.stiffness.diag[i];
        if (i > 0)
            schur.lower[i] = mass_coef * mats.mass.lower[i] +
                             dt * theta * p.d_w * mats.stiffness.lower[i];
        if (i < n - 1)
            schur.upper[i] = mass_coef * mats.mass.upper[i] +
                             dt * theta * p.d_w * mats.stiffness.upper[i];
    }

    const long n_steps = std::lround(cfg.t_end / cfg.dt);
    std::vector<long> snap_steps{0};
    for (double t : cfg.snapshot_times)
        snap_steps.push_back(std::clamp(std::lround(t / cfg.dt), 0L, n_steps));
    snap_steps.push_back(n_steps);
    std::sort(snap_steps.begin(), snap_steps.end());
    snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()), snap_steps.end());

    std::vector<double> phi = phi0.values, psi = psi0.values;
    std::vector<State> out;
    auto record = [&](double t) {
        out.push_back({t, Field(mesh, phi), Field(mesh, psi)});
    };
    size_t next_snap = 0;
    if (snap_steps[next_snap] == 0) {
        record(0.0);
        ++next_snap;
    }
    for (long k = 1; k <= n_steps; ++k) {
        std::vector<double> b_u(n);
        for (int i = 0; i < n; ++i)
            b_u[i] = phi[i] + dt * (1.0 - theta) * (a11 * phi[i] + a12 * psi[i]);

        auto m_psi = mats.mass.multiply(psi);
        std::vector<double> b_w = m_psi;
        if (theta < 1.0) {
            const auto k_psi = mats.stiffness.multiply(psi);
            const auto m_phi = mats.mass.multiply(phi);
            for (int i = 0; i < n; ++i)
                b_w[i] += dt * (1.0 - theta) *
                          (-p.d_w * k_psi[i] + a21 * m_phi[i] + a22 * m_psi[i]);
        }
        const auto m_bu = mats.mass.multiply(b_u);
        std::vector<double> rhs(n);
        for (int i = 0; i < n; ++i)
            rhs[i] = b_w[i] + dt * theta * a21 / d1_scalar * m_bu[i];

        psi = schur.solve(rhs);
        for (int i = 0; i < n; ++i)
            phi[i] = (b_u[i] + dt * theta * a12 * psi[i]) / d1_scalar;

        if (next_snap < snap_steps.size() && k == snap_steps[next_snap]) {
            record(k * dt);
            ++next_snap;
        }
    }
    return out;
}

}  // namespace spikesim
