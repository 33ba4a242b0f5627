#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "spikesim/convergence.hpp"

using namespace spikesim;

namespace {

constexpr double pi = 3.14159265358979323846;

const ModelParams kRef(KineticParams(2, 1, 3), 6.0);

}  // namespace

TEST_CASE("restriction to coarser dyadic meshes") {
    const Mesh1D fine(64), coarse(16);

    SUBCASE("identity on the same mesh") {
        std::vector<double> v(fine.n_nodes());
        for (int i = 0; i < fine.n_nodes(); ++i) v[i] = std::sin(3.0 * fine.nodes[i]);
        const Field f(fine, v);
        CHECK(restrict_to(fine, f).values == f.values);
    }
    SUBCASE("constants and linears restrict exactly") {
        CHECK(restrict_to(coarse, Field(fine, 4.5)).values ==
              std::vector<double>(coarse.n_nodes(), 4.5));
        std::vector<double> lin(fine.n_nodes());
        for (int i = 0; i < fine.n_nodes(); ++i) lin[i] = fine.nodes[i];
        const Field r = restrict_to(coarse, Field(fine, lin));
        for (int i = 0; i < coarse.n_nodes(); ++i)
            CHECK(r.values[i] == doctest::Approx(coarse.nodes[i]).epsilon(1e-15));
    }
    SUBCASE("non-nested meshes are rejected") {
        CHECK_THROWS_AS(restrict_to(Mesh1D(24), Field(fine, 1.0)), std::invalid_argument);
        CHECK_THROWS_AS(restrict_to(Mesh1D(128), Field(fine, 1.0)), std::invalid_argument);
    }
}

TEST_CASE("zero error when coarse equals the reference") {
    // one simulation restricted to its own mesh reproduces itself exactly
    const Mesh1D mesh(1 << 5);
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.5;
    const auto run = simulate(kRef, mesh, PerturbationSpec::spline(0.4, 0.1, 0.05), cfg);
    const Field r = restrict_to(mesh, run.snapshots.back().u);
    std::vector<double> diff(mesh.n_nodes());
    for (int i = 0; i < mesh.n_nodes(); ++i)
        diff[i] = run.snapshots.back().u.values[i] - r.values[i];
    CHECK(l2_norm(Field(mesh, diff)) == 0.0);
}

TEST_CASE("pure diffusion recovers second order against the closed form") {
    // w(t,x) = 1.5 + e^{-pi^2 d_w t} cos(pi x) solves the diffusion equation
    // with Neumann ends; the constant offset keeps the data positive
    const double d_w = 1.0, T = 0.05;
    const ModelParams p(KineticParams(2, 1, 3), d_w);
    IntegratorConfig cfg;
    cfg.scheme = TimeScheme::CrankNicolson;
    cfg.dt = 1e-5;
    cfg.t_end = T;
    cfg.diffusion_only = true;

    const Mesh1D eval(1 << 10);  // measure the interpolant error on a fine mesh
    const double decay = std::exp(-pi * pi * d_w * T);
    std::vector<double> errors;
    for (int level : {3, 4, 5, 6}) {
        const Mesh1D mesh(1 << level);
        State s0;
        s0.t = 0.0;
        s0.u = Field(mesh, 1.0);
        std::vector<double> w0(mesh.n_nodes());
        for (int i = 0; i < mesh.n_nodes(); ++i)
            w0[i] = 1.5 + std::cos(pi * mesh.nodes[i]);
        s0.w = Field(mesh, w0);
        const auto run = simulate_from(p, s0, cfg, SpikeCriteria{});
        REQUIRE_FALSE(run.aborted);
        const Field& wh = run.snapshots.back().w;
        std::vector<double> diff(eval.n_nodes());
        for (int i = 0; i < eval.n_nodes(); ++i)
            diff[i] = wh(eval.nodes[i]) - (1.5 + decay * std::cos(pi * eval.nodes[i]));
        errors.push_back(l2_norm(Field(eval, diff)));
    }
    for (size_t i = 0; i + 1 < errors.size(); ++i) {
        const double order = std::log2(errors[i] / errors[i + 1]);
        CHECK(order == doctest::Approx(2.0).epsilon(0.05));
    }
}

TEST_CASE("study on a short smooth window") {
    IntegratorConfig cfg;
    cfg.dt = 5e-3;
    const auto study = run_study(kRef, PerturbationSpec::spline(0.4, 0.1, 0.05),
                                 {4, 5, 6}, 9, cfg, {1.0, 2.0, 5.0});
    CHECK(study.levels == std::vector<int>{4, 5, 6});
    CHECK(study.ref_level == 9);
    REQUIRE(study.errors.size() == 9);
    REQUIRE(study.orders.size() == 6);

    // errors decrease monotonically in h at every sample time (smooth phase)
    const size_t nt = 3;
    for (size_t ti = 0; ti < nt; ++ti) {
        CHECK(study.errors[0 * nt + ti].e_l2_u > study.errors[1 * nt + ti].e_l2_u);
        CHECK(study.errors[1 * nt + ti].e_l2_u > study.errors[2 * nt + ti].e_l2_u);
        CHECK(study.errors[0 * nt + ti].e_l2_w > study.errors[1 * nt + ti].e_l2_w);
    }
    // order estimates are pure error ratios, so rescaling leaves them alone
    for (const auto& row : study.orders) {
        CHECK(row.valid);
        CHECK(row.order_l2_u > 0.5);
    }

    SUBCASE("CSV serialization") {
        write_study_csv(study, "conv_err.tmp", "conv_ord.tmp");
        std::ifstream err("conv_err.tmp"), ord("conv_ord.tmp");
        std::string line;
        std::getline(err, line);
        CHECK(line == "h,t,e_l1_u,e_l2_u,e_l1_w,e_l2_w");
        std::getline(ord, line);
        CHECK(line == "h,t,order_l2_u,order_l2_w");
        int rows = 0;
        while (std::getline(err, line)) ++rows;
        CHECK(rows == 9);
        err.close();
        ord.close();
        std::remove("conv_err.tmp");
        std::remove("conv_ord.tmp");
    }
}

TEST_CASE("study input validation") {
    IntegratorConfig cfg;
    cfg.dt = 1e-2;
    CHECK_THROWS_AS(run_study(kRef, PerturbationSpec::spline(0.4, 0.1, 0.05), {}, 9, cfg),
                    std::invalid_argument);
    // reference must exceed the finest level by at least 3
    CHECK_THROWS_AS(
        run_study(kRef, PerturbationSpec::spline(0.4, 0.1, 0.05), {4, 5, 6}, 8, cfg),
        std::invalid_argument);
}
