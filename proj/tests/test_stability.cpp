#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spikesim/stability.hpp"

using namespace spikesim;

namespace {

constexpr double pi = 3.14159265358979323846;

ConstantSteadyState minus_state(const KineticParams& p) {
    for (const auto& s : constant_steady_states(p))
        if (s.branch == Branch::Minus) return s;
    throw std::logic_error("no minus branch");
}

}  // namespace

TEST_CASE("critical diffusion for the reference parameters") {
    const KineticParams p(2.0, 1.0, 3.0);
    const double dw1 = critical_diffusion(p, 1);
    CHECK(std::abs(dw1 - 5.8541) < 5e-5);

    // the growth rate of the critical wavenumber vanishes exactly there
    const ModelParams mp(p, dw1);
    const auto s = minus_state(p);
    const auto [lp, lm] = lambda_pm_at(mp, s, 1.0);
    CHECK(std::abs(lp.real()) < 1e-10);
    CHECK(std::abs(lp.imag()) < 1e-12);

    // 1/k^2 scaling of the thresholds
    for (int k = 2; k <= 6; ++k)
        CHECK(critical_diffusion(p, k) == doctest::Approx(dw1 / (k * k)).epsilon(1e-12));
}

TEST_CASE("critical diffusion input validation") {
    CHECK_THROWS_AS(critical_diffusion(KineticParams(2, 1, 3), 0), std::invalid_argument);
    CHECK_THROWS_AS(critical_diffusion(KineticParams(2, 1, 1.5), 1), std::invalid_argument);
}

TEST_CASE("dispersion relation limits") {
    const ModelParams p(KineticParams(2, 1, 3), 2.0);
    const auto s = minus_state(p.kinetics);

    // lambda_plus -> a11 = (a1-d1)d1/a1 = 0.5, lambda_minus -> -inf
    const auto tail = lambda_pm(p, s, 500);
    CHECK(std::abs(tail.lambda_plus.real() - 0.5) < 1e-3);
    CHECK(tail.lambda_minus.real() < -1e5);

    // mode 0 reduces to the kinetic eigenvalues; both negative (stable kinetics)
    const auto k0 = lambda_pm(p, s, 0);
    CHECK(k0.lambda_plus.real() < 0.0);
    CHECK(k0.lambda_minus.real() < 0.0);
    const auto J = kinetic_jacobian(p.kinetics, s.u_bar, s.w_bar);
    const double tr = J[0][0] + J[1][1];
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    CHECK(k0.lambda_plus.real() + k0.lambda_minus.real() == doctest::Approx(tr).epsilon(1e-12));
    CHECK(k0.lambda_plus.real() * k0.lambda_minus.real() == doctest::Approx(det).epsilon(1e-12));
}

TEST_CASE("lambda_pm are roots of the dispersion determinant") {
    const ModelParams p(KineticParams(2, 1, 3), 2.0);
    const auto s = minus_state(p.kinetics);
    for (int k : {0, 1, 3, 7, 20}) {
        // tolerance scales with the k^2 diffusion term entering the matrix
        const double scale = 1.0 + p.d_w * (pi * k) * (pi * k);
        const auto sample = lambda_pm(p, s, k);
        CHECK(std::abs(dispersion_det(p, s, sample.lambda_plus, k)) < 1e-12 * scale);
        CHECK(std::abs(dispersion_det(p, s, sample.lambda_minus, k)) < 1e-12 * scale);
    }
}

TEST_CASE("on-branch Jacobian closed forms") {
    const KineticParams p(2.0, 1.0, 3.0);
    const auto s = minus_state(p);
    const auto J = kinetic_jacobian(p, s.u_bar, s.w_bar);
    const double a1 = p.a1, d1 = p.d1, w = s.w_bar;
    CHECK(J[0][0] == doctest::Approx((a1 - d1) * d1 / a1).epsilon(1e-12));
    CHECK(J[0][1] == doctest::Approx(d1 * d1 / (a1 * w * w)).epsilon(1e-12));
    CHECK(J[1][0] == doctest::Approx(-2.0 * d1 / (a1 - d1)).epsilon(1e-12));
    const double q = d1 / ((a1 - d1) * w);
    CHECK(J[1][1] == doctest::Approx(-(1.0 + q * q)).epsilon(1e-12));
}

TEST_CASE("eigenmode initial condition") {
    const ModelParams p(KineticParams(2, 1, 3), 2.0);
    const auto s = minus_state(p.kinetics);
    const auto mode = eigenmode_ic(p, s, 3, 0.01);
    CHECK(mode.growth_rate == doctest::Approx(0.463144069743).epsilon(1e-9));

    const auto J = kinetic_jacobian(p.kinetics, s.u_bar, s.w_bar);
    const double mu = (pi * 3) * (pi * 3);
    const double expected_ratio = J[1][0] / (mode.growth_rate - J[1][1] + p.d_w * mu);
    CHECK(mode.ratio == doctest::Approx(expected_ratio).epsilon(1e-12));
    CHECK(mode.phi(0.0) == doctest::Approx(0.01));
    CHECK(mode.psi(0.0) == doctest::Approx(0.01 * mode.ratio));
    // zero-flux compatible
    CHECK(std::abs(mode.phi(0.0) - mode.phi(1e-8)) < 1e-12);
}

TEST_CASE("ddi report") {
    const DdiReport r = ddi_report(ModelParams(KineticParams(2, 1, 3), 6.0));
    CHECK(r.has_positive_states);
    CHECK(r.kinetically_stable);
    CHECK(r.ddi);
    REQUIRE(r.first_unstable_mode.has_value());
    CHECK(*r.first_unstable_mode == 1);
    CHECK(r.lambda_limit == doctest::Approx(0.5).epsilon(1e-12));
    // infinitely many unstable modes: every large k in range is unstable
    CHECK(r.unstable_modes.size() > 50);
    CHECK(r.d_w_thresholds.size() == 10);

    const DdiReport none = ddi_report(ModelParams(KineticParams(2, 1, 1.5), 6.0));
    CHECK_FALSE(none.has_positive_states);
    CHECK_FALSE(none.ddi);
}

TEST_CASE("unstable mode range shifts with diffusion") {
    const KineticParams p(2, 1, 3);
    const auto s = minus_state(p);
    // instability sets in where mu > det/(d_w a11): larger diffusion lowers
    // the first unstable physical mode
    const auto lo = unstable_mode_range(ModelParams(p, 0.1), s, 64);
    const auto hi = unstable_mode_range(ModelParams(p, 10.0), s, 64);
    REQUIRE(!lo.empty());
    REQUIRE(!hi.empty());
    CHECK(lo.front() >= hi.front());
    // growth rates increase toward the a11 limit in both cases
    CHECK(lambda_pm(ModelParams(p, 10.0), s, 64).lambda_plus.real() >
          lambda_pm(ModelParams(p, 10.0), s, hi.front()).lambda_plus.real() - 1e-12);
}
