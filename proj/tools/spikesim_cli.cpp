// Command-line front end: stability analysis, simulations, kinetic ODE runs,
// steady-state shooting, convergence studies, and canned scenario presets.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "spikesim/convergence.hpp"
#include "spikesim/harness.hpp"
#include "spikesim/steady_bvp.hpp"

using namespace spikesim;

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int cmd_analyze(double a1, double d1, double kappa1, double d_w,
                const std::string& out_dir) {
    const ModelParams p(KineticParams(a1, d1, kappa1), d_w);
    const DdiReport report = ddi_report(p);
    if (!report.has_positive_states) {
        std::cout << "no positive steady states for a1=" << a1 << " d1=" << d1
                  << " kappa1=" << kappa1 << "\n";
        return 0;
    }
    std::cout << "minus-branch steady state: u=" << fmt17(report.steady_state.u_bar)
              << " w=" << fmt17(report.steady_state.w_bar) << "\n";
    std::cout << "kinetically stable: " << (report.kinetically_stable ? "yes" : "no")
              << "\n";
    std::cout << "diffusion-driven instability: " << (report.ddi ? "yes" : "no") << "\n";
    std::cout << "lambda_plus limit (k -> inf): " << fmt17(report.lambda_limit) << "\n";
    if (report.first_unstable_mode)
        std::cout << "first unstable mode: k=" << *report.first_unstable_mode << "\n";
    std::cout << "critical diffusion thresholds (k, d_w):\n";
    for (const auto& [k, dw] : report.d_w_thresholds)
        std::cout << "  " << k << " " << fmt17(dw) << "\n";
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream csv(out_dir + "/dispersion.csv");
        csv << "k,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus\n";
        for (int k = 0; k <= 64; ++k) {
            const auto s = lambda_pm(p, report.steady_state, k);
            csv << k << ',' << fmt17(s.lambda_plus.real()) << ','
                << fmt17(s.lambda_plus.imag()) << ',' << fmt17(s.lambda_minus.real())
                << ',' << fmt17(s.lambda_minus.imag()) << "\n";
        }
        std::cout << "wrote " << out_dir << "/dispersion.csv\n";
    }
    return 0;
}

int cmd_steady(double a1, double d1, double kappa1, double d_w, int n_grid,
               int modes, const std::string& out_dir) {
    // the base piece of an n-mode profile solves the unit-interval BVP for
    // diffusion d_w * modes^2
    const ModelParams p(KineticParams(a1, d1, kappa1),
                        d_w * static_cast<double>(modes) * modes);
    const auto base = shoot_monotone(p, n_grid);
    if (!base) {
        std::cout << "no monotone steady profile found for d_w=" << d_w
                  << " (scanned W(0) over (0, w_minus))\n";
        return 0;
    }
    const SteadyProfile profile = periodic_profile(*base, modes);
    std::cout << "profile found: modes=" << profile.modes
              << " residual=" << fmt17(profile_residual(p.kinetics, profile)) << "\n";
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        State s;
        s.t = 0.0;
        s.u = profile.u;
        s.w = profile.w;
        write_snapshot(s, out_dir + "/steady_profile.snap");
        std::cout << "wrote " << out_dir << "/steady_profile.snap\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spike-pattern simulator for a 1D reaction-diffusion-ODE model"};
    app.require_subcommand(1);

    double a1 = 2.0, d1 = 1.0, kappa1 = 3.0, d_w = 6.0;
    std::string config_path, out_dir, preset_arg;
    int threads = 0;

    auto add_params = [&](CLI::App* sub) {
        sub->add_option("--a1", a1, "growth coefficient a1");
        sub->add_option("--d1", d1, "death coefficient d1");
        sub->add_option("--kappa1", kappa1, "source coefficient kappa1");
        sub->add_option("--d_w", d_w, "diffusion coefficient of w");
    };

    auto* analyze = app.add_subcommand("analyze", "steady states, stability, dispersion");
    add_params(analyze);
    analyze->add_option("--out", out_dir, "output directory for dispersion.csv");

    auto* simulate_cmd = app.add_subcommand("simulate", "run a configured simulation");
    simulate_cmd->add_option("--config", config_path, "key=value scenario file")
        ->required();
    simulate_cmd->add_option("--out", out_dir, "output directory")->required();

    double u0 = 1.0, w0 = 1.0, kin_dt = 1e-3, kin_t_end = 10.0;
    std::string kin_scheme = "rk4";
    auto* kinetics_cmd = app.add_subcommand("kinetics", "space-free ODE trajectory");
    add_params(kinetics_cmd);
    kinetics_cmd->add_option("--u0", u0, "initial u");
    kinetics_cmd->add_option("--w0", w0, "initial w");
    kinetics_cmd->add_option("--dt", kin_dt, "time step");
    kinetics_cmd->add_option("--t-end", kin_t_end, "final time");
    kinetics_cmd->add_option("--scheme", kin_scheme, "rk4|implicit_euler");
    kinetics_cmd->add_option("--out", out_dir, "output directory");

    int n_grid = 1 << 14, modes = 1;
    auto* steady_cmd = app.add_subcommand("steady", "monotone steady profile by shooting");
    add_params(steady_cmd);
    steady_cmd->add_option("--n-grid", n_grid, "shooting grid cells");
    steady_cmd->add_option("--modes", modes, "monotone segments of the profile");
    steady_cmd->add_option("--out", out_dir, "output directory");

    std::vector<int> levels = {7, 8, 9, 10};
    int ref_level = 13;
    double conv_dt = 0.01;
    auto* converge_cmd = app.add_subcommand("converge", "mesh convergence study");
    converge_cmd->add_option("--config", config_path, "key=value scenario file");
    converge_cmd->add_option("--levels", levels, "dyadic mesh levels");
    converge_cmd->add_option("--ref-level", ref_level, "reference mesh level");
    converge_cmd->add_option("--dt", conv_dt, "time step for all levels");
    converge_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
    converge_cmd->add_option("--out", out_dir, "output directory")->required();

    auto* preset_cmd = app.add_subcommand("preset", "run a canned scenario end-to-end");
    preset_cmd->add_option("name", preset_arg, "preset name")->required();
    preset_cmd->add_option("--out", out_dir, "output directory")->required();
    preset_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return cmd_analyze(a1, d1, kappa1, d_w, out_dir);

        if (simulate_cmd->parsed()) {
            const ScenarioConfig cfg = load_config(config_path);
            const auto result = run_scenario(cfg, out_dir, "run");
            if (result.aborted) {
                std::cerr << "numerical fault: " << result.fault_message << "\n";
                return 2;
            }
            std::cout << "wrote " << out_dir << "/run_diagnostics.csv and "
                      << result.snapshots.size() << " snapshots\n";
            return 0;
        }

        if (kinetics_cmd->parsed()) {
            const KineticParams p(a1, d1, kappa1);
            const KineticScheme scheme = kin_scheme == "implicit_euler"
                                             ? KineticScheme::ImplicitEuler
                                             : KineticScheme::Rk4;
            if (kin_scheme != "rk4" && kin_scheme != "implicit_euler")
                throw std::invalid_argument("kinetics: --scheme expects rk4|implicit_euler");
            const auto samples = integrate_kinetics(p, u0, w0, kin_dt, kin_t_end, scheme);
            std::ostream* out = &std::cout;
            std::ofstream file;
            if (!out_dir.empty()) {
                std::filesystem::create_directories(out_dir);
                file.open(out_dir + "/kinetics.csv");
                out = &file;
            }
            *out << "t,u,w\n";
            for (const auto& s : samples)
                *out << fmt17(s.t) << ',' << fmt17(s.u) << ',' << fmt17(s.w) << "\n";
            return 0;
        }

        if (steady_cmd->parsed())
            return cmd_steady(a1, d1, kappa1, d_w, n_grid, modes, out_dir);

        if (converge_cmd->parsed()) {
            ScenarioConfig cfg;
            if (!config_path.empty()) cfg = load_config(config_path);
            IntegratorConfig icfg = cfg.integrator;
            icfg.dt = conv_dt;
            icfg.t_end = 25.0;
            icfg.snapshot_times.clear();
            const auto study = run_study(cfg.params, cfg.ic, levels, ref_level, icfg,
                                         {1, 5, 10, 15, 20, 25}, threads);
            std::filesystem::create_directories(out_dir);
            write_study_csv(study, out_dir + "/convergence_errors.csv",
                            out_dir + "/convergence_orders.csv");
            std::cout << "wrote convergence CSVs to " << out_dir << "\n";
            return 0;
        }

        if (preset_cmd->parsed()) {
            const auto preset = preset_from_name(preset_arg);
            if (!preset) {
                std::cerr << "unknown preset: " << preset_arg << "\n";
                return 1;
            }
            const int rc = run_preset(*preset, out_dir, threads);
            if (rc == 0)
                std::cout << "preset " << preset_arg << " written to " << out_dir << "\n";
            else
                std::cerr << "preset " << preset_arg << " hit a numerical fault\n";
            return rc;
        }
    } catch (const PositivityFault& e) {
        std::cerr << "numerical fault: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
