#pragma once

#include <array>
#include <stdexcept>
#include <vector>

namespace spikesim {

/// Parameters of the space-free (kinetic) subsystem
///   u' = (a1*u*w/(1+u*w) - d1)*u
///   w' = -w - u^2*w + kappa1.
struct KineticParams {
    double a1;
    double d1;
    double kappa1;

    KineticParams(double a1_, double d1_, double kappa1_)
        : a1(a1_), d1(d1_), kappa1(kappa1_) {
        if (!(a1 > 0.0) || !(d1 > 0.0) || !(kappa1 > 0.0))
            throw std::invalid_argument("KineticParams: a1, d1, kappa1 must be positive");
    }

    /// True iff the positive steady-state pair (minus/plus branch) exists:
    /// a1 > d1 and kappa1 > 2*d1/(a1-d1).
    bool has_positive_steady_states() const {
        return a1 > d1 && kappa1 > 2.0 * d1 / (a1 - d1);
    }

    /// d1/(a1-d1), the product u*w on the positive branches.
    double branch_product() const { return d1 / (a1 - d1); }
};

/// Kinetics plus the diffusion coefficient of w.
struct ModelParams {
    KineticParams kinetics;
    double d_w;

    ModelParams(KineticParams k, double d_w_) : kinetics(k), d_w(d_w_) {
        if (!(d_w > 0.0))
            throw std::invalid_argument("ModelParams: d_w must be positive");
    }
};

/// Rates of the three-equation receptor model before quasi-steady-state
/// reduction and time rescaling.
struct FullModelParams {
    double a;
    double d_c;
    double d_b;
    double d;
    double d_g;
    double alpha;
    double kappa;
    double gamma;

    FullModelParams(double a_, double d_c_, double d_b_, double d_, double d_g_,
                    double alpha_, double kappa_, double gamma_)
        : a(a_), d_c(d_c_), d_b(d_b_), d(d_), d_g(d_g_), alpha(alpha_),
          kappa(kappa_), gamma(gamma_) {
        for (double v : {a, d_c, d_b, d, d_g, alpha, kappa, gamma})
            if (!(v > 0.0))
                throw std::invalid_argument("FullModelParams: all rates must be positive");
    }

    /// (d_b + d) / alpha, the quasi-steady-state scale of the eliminated variable.
    double sigma() const { return (d_b + d) / alpha; }
};

enum class Branch { Trivial, Minus, Plus };

struct ConstantSteadyState {
    double u_bar;
    double w_bar;
    Branch branch;
};

enum class Stability { Stable, Unstable, Marginal };

enum class KineticScheme { Rk4, ImplicitEuler };

struct KineticSample {
    double t;
    double u;
    double w;
};

struct ReactionRate {
    double du;
    double dw;
};

/// Reaction terms of both components (the non-diffusive part of the w equation).
ReactionRate reaction_rhs(const KineticParams& p, double u, double w);

/// Analytic Jacobian of reaction_rhs, row-major [[du/du, du/dw], [dw/du, dw/dw]].
std::array<std::array<double, 2>, 2> kinetic_jacobian(const KineticParams& p,
                                                      double u, double w);

/// Quasi-steady-state elimination of the fast variable plus time rescaling,
/// mapping the three-equation rates onto (a1, d1, kappa1, D_w).
ModelParams reduce_full_params(const FullModelParams& f);

/// All spatially constant steady states. Always contains the trivial state
/// (0, kappa1); the Minus/Plus pair is present iff has_positive_steady_states().
/// A degenerate discriminant (|disc| < 1e-12 relative) yields a single
/// Minus-tagged state.
std::vector<ConstantSteadyState> constant_steady_states(const KineticParams& p);

/// Stability of a constant steady state under spatially homogeneous
/// perturbations, via the closed-form trace conditions, cross-checked against
/// the sign of trace/determinant of the kinetic Jacobian.
Stability classify_kinetic_stability(const KineticParams& p,
                                     const ConstantSteadyState& s);

/// Integrates the kinetic ODE system from (u0, w0). Positivity loss triggers
/// internal step halving (up to 20 times) before failing.
std::vector<KineticSample> integrate_kinetics(const KineticParams& p, double u0,
                                              double w0, double dt, double t_end,
                                              KineticScheme scheme = KineticScheme::Rk4);

}  // namespace spikesim
