#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spikesim/steady_bvp.hpp"

using namespace spikesim;

namespace {

const KineticParams kRef(2.0, 1.0, 3.0);

double w_minus() { return (3.0 - std::sqrt(5.0)) / 2.0; }

}  // namespace

TEST_CASE("constant shot stays at the constant steady state") {
    const ModelParams p(kRef, 0.05);
    const auto traj = integrate_shot(p, w_minus(), 1 << 10);
    REQUIRE(traj.size() == (1 << 10) + 1);
    for (double w : traj) CHECK(std::abs(w - w_minus()) < 1e-10);
}

TEST_CASE("monotone profile exists for small diffusion") {
    for (double d_w : {0.01, 0.05, 0.1}) {
        CAPTURE(d_w);
        const ModelParams p(kRef, d_w);
        const auto profile = shoot_monotone(p);
        REQUIRE(profile.has_value());
        CHECK(profile->modes == 1);
        CHECK(profile->orientation == Orientation::Increasing);
        CHECK(profile->d_w == d_w);

        // BVP residual and zero-slope ends. A raw one-sided difference at the
        // ends is dominated by the curvature term W'' h/2, so subtract it:
        // with zero slope, w[1]-w[0] = accel(w[0]) h^2/2 + O(h^4).
        CHECK(profile_residual(kRef, *profile) < 1e-6);
        const auto& w = profile->w.values;
        const double h = profile->mesh.h;
        const double c0 = kRef.branch_product();
        auto accel = [&](double v) { return (v + c0 * c0 / v - kRef.kappa1) / d_w; };
        CHECK(std::abs(w[1] - w[0] - 0.5 * accel(w[0]) * h * h) < 1e-8);
        CHECK(std::abs(w[w.size() - 2] - w.back() - 0.5 * accel(w.back()) * h * h) < 1e-8);

        // monotone increasing (nodally non-decreasing: the ends are flat to
        // rounding for small d_w) with a genuine overall rise, and
        // u w = d1/(a1-d1) nodally
        const double c = kRef.branch_product();
        CHECK(w.back() - w.front() > 0.1 * w_minus());
        for (size_t i = 0; i < w.size(); ++i) {
            if (i > 0) CHECK(w[i] >= w[i - 1] - 1e-13 * w_minus());
            CHECK(std::abs(profile->u.values[i] * w[i] - c) < 1e-12);
        }
    }
}

TEST_CASE("no monotone profile above the existence threshold") {
    CHECK_FALSE(shoot_monotone(ModelParams(kRef, 2.0), 1 << 12).has_value());
    CHECK_FALSE(shoot_monotone(ModelParams(kRef, 6.0), 1 << 12).has_value());
}

TEST_CASE("shooting rejects infeasible kinetics") {
    CHECK_THROWS_AS(shoot_monotone(ModelParams(KineticParams(2, 1, 1.5), 0.05)),
                    std::invalid_argument);
}

TEST_CASE("reflection mirrors the profile") {
    const auto inc = shoot_monotone(ModelParams(kRef, 0.05), 1 << 12);
    REQUIRE(inc.has_value());
    const auto dec = reflect(*inc);
    CHECK(dec.orientation == Orientation::Decreasing);
    const size_t n = inc->w.values.size();
    for (size_t i = 0; i < n; ++i) {
        CHECK(std::abs(dec.w.values[i] - inc->w.values[n - 1 - i]) < 1e-12);
        CHECK(std::abs(dec.u.values[i] - inc->u.values[n - 1 - i]) < 1e-12);
    }
}

TEST_CASE("shooting refinement converges at fourth order") {
    const ModelParams p(kRef, 0.05);
    auto diff = [&](int coarse_grid) {
        const auto a = shoot_monotone(p, coarse_grid);
        const auto b = shoot_monotone(p, 2 * coarse_grid);
        REQUIRE(a.has_value());
        REQUIRE(b.has_value());
        double worst = 0.0;
        for (size_t i = 0; i < a->w.values.size(); ++i)
            worst = std::max(worst, std::abs(a->w.values[i] - b->w.values[2 * i]));
        return worst;
    };
    const double d1 = diff(1 << 10);
    const double d2 = diff(1 << 11);
    CHECK(d1 / d2 >= 8.0);
}

TEST_CASE("periodic profiles") {
    // base piece for an n-mode state on [0,1] solves the BVP with d_w n^2
    const int n = 3;
    const double d_w = 0.05;
    const ModelParams scaled(kRef, d_w * n * n);
    const auto base = shoot_monotone(scaled);
    REQUIRE(base.has_value());

    SUBCASE("identity for n=1") {
        const auto same = periodic_profile(*base, 1);
        CHECK(same.modes == 1);
        CHECK(same.w.values == base->w.values);
    }
    SUBCASE("n=2 is symmetric about the midpoint") {
        const auto two = periodic_profile(*base, 2);
        const auto& w = two.w.values;
        const size_t m = w.size();
        for (size_t i = 0; i < m; ++i) CHECK(w[i] == doctest::Approx(w[m - 1 - i]).epsilon(1e-14));
    }
    SUBCASE("n=3 seams are continuous and C1") {
        const auto three = periodic_profile(*base, n);
        CHECK(three.modes == n);
        CHECK(three.d_w == doctest::Approx(d_w).epsilon(1e-14));
        const auto& w = three.w.values;
        const double h = three.mesh.h;
        const int seg = base->mesh.n_cells;
        for (int seam = seg; seam < 3 * seg; seam += seg) {
            const double left = (w[seam] - w[seam - 1]) / h;
            const double right = (w[seam + 1] - w[seam]) / h;
            // mirror construction makes the one-sided slopes exact negatives;
            // both must vanish in the limit (zero-slope turning point)
            CHECK(std::abs(left + right) < 1e-12);
            CHECK(std::abs(left) < 1e-2);
        }
        CHECK(profile_residual(kRef, three) < 1e-6);
    }
    SUBCASE("invalid pairings are rejected") {
        const auto two = periodic_profile(*base, 2);
        CHECK_THROWS_AS(periodic_profile(two, 2), std::invalid_argument);
        CHECK_THROWS_AS(periodic_profile(*base, 0), std::invalid_argument);
    }
}
