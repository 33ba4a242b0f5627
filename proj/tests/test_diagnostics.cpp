#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "spikesim/diagnostics.hpp"

using namespace spikesim;

namespace {

constexpr double pi = 3.14159265358979323846;

Field bumps(const Mesh1D& m, const std::vector<std::pair<double, double>>& centers,
            double width, double baseline) {
    std::vector<double> v(m.n_nodes(), baseline);
    for (int i = 0; i < m.n_nodes(); ++i)
        for (const auto& [c, height] : centers) {
            const double d = (m.nodes[i] - c) / width;
            v[i] += height * std::exp(-d * d);
        }
    return Field(m, v);
}

}  // namespace

TEST_CASE("spike detection") {
    const Mesh1D m(1 << 10);
    SpikeCriteria c;
    c.abs_floor = 1.0;
    c.rel_height = 0.1;
    c.min_separation = 0.02;

    SUBCASE("constant field has no spikes") {
        CHECK(detect_spikes(Field(m, 5.0), c).empty());
    }
    SUBCASE("well separated bumps are counted once each") {
        const Field f = bumps(m, {{0.25, 10.0}, {0.75, 6.0}}, 0.01, 0.1);
        const auto spikes = detect_spikes(f, c);
        REQUIRE(spikes.size() == 2);
        CHECK(std::abs(spikes[0] - 0.25) < 2 * m.h);
        CHECK(std::abs(spikes[1] - 0.75) < 2 * m.h);
    }
    SUBCASE("sub-threshold bumps are ignored") {
        const Field f = bumps(m, {{0.25, 10.0}, {0.75, 0.5}}, 0.01, 0.1);
        CHECK(detect_spikes(f, c).size() == 1);
    }
    SUBCASE("nearby maxima merge, keeping the taller") {
        const Field f = bumps(m, {{0.5, 10.0}, {0.508, 8.0}}, 0.003, 0.1);
        const auto spikes = detect_spikes(f, c);
        REQUIRE(spikes.size() == 1);
        CHECK(std::abs(spikes[0] - 0.5) < 2 * m.h);
    }
    SUBCASE("boundary maxima are found by the one-sided test") {
        const Field f = bumps(m, {{0.0, 10.0}}, 0.02, 0.1);
        const auto spikes = detect_spikes(f, c);
        REQUIRE(spikes.size() == 1);
        CHECK(spikes[0] == 0.0);
    }
    SUBCASE("scaling invariance when the floor scales with the field") {
        const Field f = bumps(m, {{0.3, 7.0}, {0.8, 3.0}}, 0.01, 0.2);
        Field g = f;
        for (auto& v : g.values) v *= 13.0;
        SpikeCriteria cs = c;
        cs.abs_floor = c.abs_floor * 13.0;
        CHECK(detect_spikes(f, c) == detect_spikes(g, cs));
    }
}

TEST_CASE("growth order") {
    const Mesh1D m(1 << 9);
    const double u_bar = 2.0;
    std::vector<double> base(m.n_nodes());
    for (int i = 0; i < m.n_nodes(); ++i)
        base[i] = u_bar - 0.05 * std::cos(4.0 * pi * m.nodes[i]);
    const Field u0(m, base);
    const std::vector<double> probes = {0.25, 0.5, 0.75};

    SUBCASE("identical fields give order zero") {
        for (const auto& po : growth_order(u0, u0, u_bar, 3.0, probes)) {
            CHECK(po.valid);
            CHECK(po.order == doctest::Approx(0.0).epsilon(1e-14));
        }
    }
    SUBCASE("exact exponential families recover their rate") {
        const double lambda = 0.37, t = 2.5;
        std::vector<double> grown(m.n_nodes());
        for (int i = 0; i < m.n_nodes(); ++i)
            grown[i] = u_bar + std::exp(lambda * t) * (base[i] - u_bar);
        const Field ut(m, grown);
        for (const auto& po : growth_order(ut, u0, u_bar, t, probes)) {
            CHECK(po.valid);
            CHECK(std::abs(po.order - lambda) < 1e-12);
        }
    }
    SUBCASE("unperturbed probes are flagged, not fatal") {
        const Field flat(m, u_bar);
        const auto orders = growth_order(u0, flat, u_bar, 1.0, {0.5});
        REQUIRE(orders.size() == 1);
        CHECK_FALSE(orders[0].valid);
    }
    SUBCASE("t must be positive") {
        CHECK_THROWS_AS(growth_order(u0, u0, u_bar, 0.0, probes), std::invalid_argument);
    }
}

TEST_CASE("finite Fourier transform") {
    auto one = [](double) { return 1.0; };
    SUBCASE("constant at omega 0") {
        const auto v = finite_fourier(one, 0.0);
        CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(v.imag()) < 1e-12);
    }
    SUBCASE("full period integrates to zero") {
        CHECK(std::abs(finite_fourier(one, 2.0)) < 1e-10);
    }
    SUBCASE("Fresnel-type value") {
        auto f = [](double x) { return std::cos(4.0 * pi * x * x); };
        const auto v = finite_fourier(f, 0.0, 1 << 14);
        CHECK(v.real() == doctest::Approx(0.175228024707).epsilon(1e-8));
    }
    SUBCASE("refinement is converged") {
        auto f = [](double x) { return std::cos(4.0 * pi * x * x); };
        for (double omega : {0.0, 1.0, 5.5, 12.0})
            CHECK(std::abs(finite_fourier(f, omega, 1 << 12) -
                           finite_fourier(f, omega, 1 << 13)) < 1e-6);
    }
    SUBCASE("conjugate flag flips the kernel") {
        auto f = [](double x) { return std::cos(4.0 * pi * x * x); };
        const auto a = finite_fourier(f, 3.0, 1 << 12, false);
        const auto b = finite_fourier(f, 3.0, 1 << 12, true);
        CHECK(a.real() == doctest::Approx(b.real()).epsilon(1e-12));
        CHECK(a.imag() == doctest::Approx(-b.imag()).epsilon(1e-12));
    }
    SUBCASE("linearity in the integrand") {
        std::mt19937 rng(31);
        std::uniform_real_distribution<double> dist(-2.0, 2.0);
        for (int trial = 0; trial < 5; ++trial) {
            const double a = dist(rng), b = dist(rng), omega = std::abs(dist(rng));
            auto f = [](double x) { return std::sin(3.0 * x) + 0.5 * x; };
            auto g = [](double x) { return std::exp(-x) * std::cos(7.0 * x); };
            auto combo = [&](double x) { return a * f(x) + b * g(x); };
            const auto lhs = finite_fourier(combo, omega, 1 << 12);
            const auto rhs = a * finite_fourier(f, omega, 1 << 12) +
                             b * finite_fourier(g, omega, 1 << 12);
            CHECK(std::abs(lhs - rhs) < 1e-12);
        }
    }
}

TEST_CASE("mass bound monitor") {
    const KineticParams p(2.0, 1.0, 3.0);
    SUBCASE("bound values") {
        RunDiagnostics d;
        d.rows.push_back({0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, {}, 0});
        const auto r = mass_bound_monitor(d, p, 1.0);
        CHECK(r.bound_combined == doctest::Approx(3.0));
        CHECK(r.bound_u == doctest::Approx(6.0));
        CHECK(r.bound_w == doctest::Approx(3.0));
        // all-zero run trivially satisfies everything
        CHECK(r.combined_ok);
        CHECK(r.u_ok);
        CHECK(r.w_ok);
        CHECK(r.min_l1_u == 0.0);
    }
    SUBCASE("violations are reported") {
        RunDiagnostics d;
        d.rows.push_back({0.0, 100.0, 50.0, 0.0, 0.0, 0.0, 0.0, {}, 0});
        const auto r = mass_bound_monitor(d, p, 1.0);
        CHECK_FALSE(r.combined_ok);
        CHECK_FALSE(r.u_ok);
        CHECK_FALSE(r.w_ok);
    }
    SUBCASE("tail fraction is validated") {
        RunDiagnostics d;
        d.rows.push_back({0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, {}, 0});
        CHECK_THROWS_AS(mass_bound_monitor(d, p, 0.0), std::invalid_argument);
    }
}

TEST_CASE("diagnostics CSV format") {
    RunDiagnostics d;
    d.rows.push_back({0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 0.25, {0.25}, 1});
    d.rows.push_back({1.5, 1.0, 2.0, 3.0, 4.0, 5.0, 0.25, {0.25, 0.75}, 2});
    const std::string path = "diag_format.tmp";
    write_diagnostics_csv(d, path);
    std::ifstream in(path);
    std::string header, row1, row2;
    std::getline(in, header);
    std::getline(in, row1);
    std::getline(in, row2);
    in.close();
    std::remove(path.c_str());

    CHECK(header == "t,l1_u,l1_w,l2_u,l2_w,max_u,argmax_u,spike_count,spike_positions");
    CHECK(row1 == "0,1,2,3,4,5,0.25,1,\"0.25\"");
    CHECK(row2 == "1.5,1,2,3,4,5,0.25,2,\"0.25;0.75\"");
}
