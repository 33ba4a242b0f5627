#include "spikesim/stability.hpp"

#include <cmath>

namespace spikesim {

namespace {

constexpr double pi = 3.14159265358979323846;

struct KineticMatrix {
    double a11, a12, a21, a22, tr, det;
};

KineticMatrix on_branch_matrix(const ModelParams& p, const ConstantSteadyState& s) {
    if (s.branch == Branch::Trivial)
        throw std::invalid_argument(
            "dispersion analysis requires an on-branch positive steady state");
    const auto J = kinetic_jacobian(p.kinetics, s.u_bar, s.w_bar);
    KineticMatrix m{J[0][0], J[0][1], J[1][0], J[1][1], 0.0, 0.0};
    m.tr = m.a11 + m.a22;
    m.det = m.a11 * m.a22 - m.a12 * m.a21;
    return m;
}

}  // namespace

std::pair<std::complex<double>, std::complex<double>> lambda_pm_at(
    const ModelParams& p, const ConstantSteadyState& s, double mu) {
    const auto m = on_branch_matrix(p, s);
    const double half = 0.5 * (m.tr - mu * p.d_w);
    const std::complex<double> disc(half * half - m.det + mu * p.d_w * m.a11, 0.0);
    const std::complex<double> root = std::sqrt(disc);
    return {half + root, half - root};
}

DispersionSample lambda_pm(const ModelParams& p, const ConstantSteadyState& s, int k) {
    if (k < 0) throw std::invalid_argument("lambda_pm: mode number must be nonnegative");
    const double mu = (pi * k) * (pi * k);
    auto [lp, lm] = lambda_pm_at(p, s, mu);
    return {k, lp, lm};
}

std::complex<double> dispersion_det(const ModelParams& p, const ConstantSteadyState& s,
                                    std::complex<double> lambda, int k) {
    const auto m = on_branch_matrix(p, s);
    const double mu = (pi * k) * (pi * k);
    return (m.a11 - lambda) * (m.a22 - p.d_w * mu - lambda) - m.a12 * m.a21;
}

double critical_diffusion(const KineticParams& p, int k) {
    if (k < 1) throw std::invalid_argument("critical_diffusion: need k >= 1");
    if (!p.has_positive_steady_states())
        throw std::invalid_argument("critical_diffusion: kinetics have no positive steady states");
    ConstantSteadyState minus{0.0, 0.0, Branch::Trivial};
    for (const auto& s : constant_steady_states(p))
        if (s.branch == Branch::Minus) minus = s;

    const auto J = kinetic_jacobian(p, minus.u_bar, minus.w_bar);
    const double a11 = J[0][0];
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    const double by_definition = det / (a11 * k * k);

    const double a1 = p.a1, d1 = p.d1, k1 = p.kappa1;
    const double expanded =
        (-4.0 * d1 * d1 + (a1 - d1) * (a1 - d1) * k1 * k1 +
         k1 * (a1 - d1) * std::sqrt(k1 * k1 * (a1 - d1) * (a1 - d1) - 4.0 * d1 * d1)) /
        (2.0 * d1 * d1) / (k * k);
    if (std::abs(by_definition - expanded) > 1e-9 * std::abs(by_definition))
        throw std::logic_error("critical_diffusion: formula routes disagree");
    return by_definition;
}

std::vector<int> unstable_mode_range(const ModelParams& p, const ConstantSteadyState& s,
                                     int k_max) {
    std::vector<int> out;
    for (int k = 0; k <= k_max; ++k)
        if (lambda_pm(p, s, k).lambda_plus.real() > 0.0) out.push_back(k);
    return out;
}

EigenmodeIc eigenmode_ic(const ModelParams& p, const ConstantSteadyState& s, int k,
                         double amplitude) {
    if (k < 0) throw std::invalid_argument("eigenmode_ic: mode number must be nonnegative");
    const auto m = on_branch_matrix(p, s);
    const auto sample = lambda_pm(p, s, k);
    const double mu = (pi * k) * (pi * k);
    const double lam = sample.lambda_plus.real();
    const double ratio = m.a21 / (lam - m.a22 + p.d_w * mu);
    EigenmodeIc ic;
    ic.ratio = ratio;
    ic.growth_rate = lam;
    ic.phi = [k, amplitude](double x) { return amplitude * std::cos(pi * k * x); };
    ic.psi = [k, amplitude, ratio](double x) {
        return ratio * amplitude * std::cos(pi * k * x);
    };
    return ic;
}

DdiReport ddi_report(const ModelParams& p, int k_max) {
    DdiReport r;
    const auto states = constant_steady_states(p.kinetics);
    const ConstantSteadyState* minus = nullptr;
    for (const auto& s : states)
        if (s.branch == Branch::Minus) minus = &s;
    r.has_positive_states = (minus != nullptr);
    if (!minus) return r;

    r.steady_state = *minus;
    r.kinetically_stable =
        classify_kinetic_stability(p.kinetics, *minus) == Stability::Stable;
    const auto m = on_branch_matrix(p, *minus);
    r.lambda_limit = m.a11;
    r.unstable_modes = unstable_mode_range(p, *minus, k_max);
    for (int k : r.unstable_modes)
        if (k >= 1) {
            r.first_unstable_mode = k;
            break;
        }
    for (int k = 1; k <= 10; ++k)
        r.d_w_thresholds.emplace_back(k, critical_diffusion(p.kinetics, k));
    r.ddi = r.kinetically_stable && r.first_unstable_mode.has_value();
    return r;
}

}  // namespace spikesim
