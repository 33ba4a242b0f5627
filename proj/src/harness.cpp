#include "spikesim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "spikesim/diagnostics.hpp"
#include "spikesim/stability.hpp"

namespace spikesim {

namespace {

const std::vector<std::pair<Preset, const char*>> kPresetNames = {
    {Preset::Fig1s, "Fig1s"},
    {Preset::MultiSpikeDw1, "MultiSpikeDw1"},
    {Preset::Cos, "Cos"},
    {Preset::CosXX, "CosXX"},
    {Preset::TrivStab, "TrivStab"},
    {Preset::NewParams, "NewParams"},
    {Preset::TableSpikePositions, "TableSpikePositions"},
    {Preset::TableSpikeCounts, "TableSpikeCounts"},
    {Preset::ConvergenceSisp, "ConvergenceSisp"},
    {Preset::DispersionPlot, "DispersionPlot"},
};

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void parallel_for(int n_jobs, int threads, const std::function<void(int)>& fn) {
    unsigned n_workers = threads > 0 ? threads : std::thread::hardware_concurrency();
    if (n_workers == 0) n_workers = 1;
    std::atomic<int> next{0};
    std::vector<std::string> faults(n_jobs);
    auto worker = [&]() {
        for (int j = next++; j < n_jobs; j = next++) {
            try {
                fn(j);
            } catch (const std::exception& e) {
                faults[j] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < std::min<unsigned>(n_workers, n_jobs); ++i)
        pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (const auto& f : faults)
        if (!f.empty()) throw std::runtime_error(f);
}

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value, int line) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("line " + std::to_string(line) + ": " + key +
                          ": not a number: '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value, int line) {
    try {
        size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("line " + std::to_string(line) + ": " + key +
                          ": not an integer: '" + value + "'");
    }
}

}  // namespace

std::optional<Preset> preset_from_name(const std::string& name) {
    for (const auto& [p, n] : kPresetNames)
        if (name == n) return p;
    return std::nullopt;
}

std::string preset_name(Preset p) {
    for (const auto& [q, n] : kPresetNames)
        if (q == p) return n;
    throw std::logic_error("preset_name: unknown preset");
}

std::vector<Preset> all_presets() {
    std::vector<Preset> out;
    for (const auto& [p, n] : kPresetNames) out.push_back(p);
    return out;
}

ScenarioConfig parse_config(const std::string& text) {
    struct Entry {
        std::string value;
        int line;
    };
    std::map<std::string, Entry> kv;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (kv.count(key))
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key " + key);
        kv[key] = {value, line_no};
    }

    bool full_model = false;
    if (auto it = kv.find("full_model"); it != kv.end()) {
        if (it->second.value == "true")
            full_model = true;
        else if (it->second.value != "false")
            throw ConfigError("line " + std::to_string(it->second.line) +
                              ": full_model: expected true or false");
        kv.erase(it);
    }

    const std::vector<std::string> common = {
        "ic.kind", "ic.s",   "ic.eps", "ic.eps1",        "ic.k",
        "ic.amplitude", "mesh_level", "scheme", "nonlinear_mode", "dt",
        "t_end", "snapshot_times"};
    std::vector<std::string> allowed = common;
    if (full_model)
        allowed.insert(allowed.end(), {"a", "d_c", "d_b", "d", "d_g", "alpha", "kappa", "gamma"});
    else
        allowed.insert(allowed.end(), {"a1", "d1", "kappa1", "d_w"});
    for (const auto& [key, entry] : kv)
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("line " + std::to_string(entry.line) + ": unknown key " + key);

    auto get = [&](const std::string& key) -> const Entry* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    auto num = [&](const std::string& key, double fallback) {
        const Entry* e = get(key);
        return e ? parse_double(key, e->value, e->line) : fallback;
    };

    ScenarioConfig cfg;
    try {
        if (full_model) {
            FullModelParams full(num("a", 1.0), num("d_c", 1.0), num("d_b", 1.0),
                                 num("d", 1.0), num("d_g", 1.0), num("alpha", 1.0),
                                 num("kappa", 1.0), num("gamma", 1.0));
            cfg.full_model = full;
            cfg.params = reduce_full_params(full);
        } else {
            cfg.params = ModelParams(
                KineticParams(num("a1", 2.0), num("d1", 1.0), num("kappa1", 3.0)),
                num("d_w", 6.0));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("constraint violation: ") + e.what());
    }

    if (const Entry* e = get("ic.kind")) {
        if (e->value == "spline")
            cfg.ic.kind = PerturbationSpec::Kind::Spline;
        else if (e->value == "cos")
            cfg.ic.kind = PerturbationSpec::Kind::CosineLinear;
        else if (e->value == "cosxx")
            cfg.ic.kind = PerturbationSpec::Kind::CosineQuadratic;
        else if (e->value == "eigenmode")
            cfg.ic.kind = PerturbationSpec::Kind::Eigenmode;
        else
            throw ConfigError("line " + std::to_string(e->line) +
                              ": ic.kind: expected spline|cos|cosxx|eigenmode");
    }
    cfg.ic.s = num("ic.s", cfg.ic.s);
    cfg.ic.eps = num("ic.eps", cfg.ic.eps);
    cfg.ic.eps1 = num("ic.eps1", cfg.ic.eps1);
    cfg.ic.amplitude = num("ic.amplitude", cfg.ic.amplitude);
    if (const Entry* e = get("ic.k")) cfg.ic.k = parse_int("ic.k", e->value, e->line);
    if (cfg.ic.kind == PerturbationSpec::Kind::Spline &&
        !(cfg.ic.s - cfg.ic.eps > 0.0 && cfg.ic.s + cfg.ic.eps < 1.0))
        throw ConfigError("ic.s/ic.eps: spline support must stay inside (0,1)");

    if (const Entry* e = get("mesh_level")) {
        cfg.mesh_level = parse_int("mesh_level", e->value, e->line);
        if (cfg.mesh_level < 1 || cfg.mesh_level > 20)
            throw ConfigError("mesh_level: expected 1..20");
    }
    if (const Entry* e = get("scheme")) {
        if (e->value == "implicit_euler")
            cfg.integrator.scheme = TimeScheme::ImplicitEuler;
        else if (e->value == "crank_nicolson")
            cfg.integrator.scheme = TimeScheme::CrankNicolson;
        else
            throw ConfigError("line " + std::to_string(e->line) +
                              ": scheme: expected implicit_euler|crank_nicolson");
    }
    if (const Entry* e = get("nonlinear_mode")) {
        if (e->value == "semi_implicit")
            cfg.integrator.nonlinear_mode = NonlinearMode::SemiImplicit;
        else if (e->value == "newton")
            cfg.integrator.nonlinear_mode = NonlinearMode::Newton;
        else
            throw ConfigError("line " + std::to_string(e->line) +
                              ": nonlinear_mode: expected semi_implicit|newton");
    }
    cfg.integrator.dt = num("dt", cfg.integrator.dt);
    cfg.integrator.t_end = num("t_end", cfg.integrator.t_end);
    if (const Entry* e = get("snapshot_times")) {
        cfg.integrator.snapshot_times.clear();
        std::istringstream list(e->value);
        std::string item;
        while (std::getline(list, item, ',')) {
            item = trim(item);
            if (!item.empty())
                cfg.integrator.snapshot_times.push_back(
                    parse_double("snapshot_times", item, e->line));
        }
    }
    try {
        cfg.integrator.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("constraint violation: ") + e.what());
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    if (cfg.full_model) {
        const FullModelParams& f = *cfg.full_model;
        out << "full_model=true\n";
        out << "a=" << fmt17(f.a) << "\nd_c=" << fmt17(f.d_c) << "\nd_b=" << fmt17(f.d_b)
            << "\nd=" << fmt17(f.d) << "\nd_g=" << fmt17(f.d_g)
            << "\nalpha=" << fmt17(f.alpha) << "\nkappa=" << fmt17(f.kappa)
            << "\ngamma=" << fmt17(f.gamma) << "\n";
    } else {
        out << "a1=" << fmt17(cfg.params.kinetics.a1) << "\nd1="
            << fmt17(cfg.params.kinetics.d1) << "\nkappa1="
            << fmt17(cfg.params.kinetics.kappa1) << "\nd_w=" << fmt17(cfg.params.d_w)
            << "\n";
    }
    const char* kind = "spline";
    switch (cfg.ic.kind) {
        case PerturbationSpec::Kind::Spline: kind = "spline"; break;
        case PerturbationSpec::Kind::CosineLinear: kind = "cos"; break;
        case PerturbationSpec::Kind::CosineQuadratic: kind = "cosxx"; break;
        case PerturbationSpec::Kind::Eigenmode: kind = "eigenmode"; break;
    }
    out << "ic.kind=" << kind << "\nic.s=" << fmt17(cfg.ic.s) << "\nic.eps="
        << fmt17(cfg.ic.eps) << "\nic.eps1=" << fmt17(cfg.ic.eps1) << "\nic.k="
        << cfg.ic.k << "\nic.amplitude=" << fmt17(cfg.ic.amplitude) << "\n";
    out << "mesh_level=" << cfg.mesh_level << "\n";
    out << "scheme="
        << (cfg.integrator.scheme == TimeScheme::ImplicitEuler ? "implicit_euler"
                                                               : "crank_nicolson")
        << "\n";
    out << "nonlinear_mode="
        << (cfg.integrator.nonlinear_mode == NonlinearMode::SemiImplicit
                ? "semi_implicit"
                : "newton")
        << "\n";
    out << "dt=" << fmt17(cfg.integrator.dt) << "\nt_end=" << fmt17(cfg.integrator.t_end)
        << "\n";
    out << "snapshot_times=";
    for (size_t i = 0; i < cfg.integrator.snapshot_times.size(); ++i) {
        if (i) out << ',';
        out << fmt17(cfg.integrator.snapshot_times[i]);
    }
    out << "\n";
    return out.str();
}

ScenarioConfig preset_config(Preset p) {
    const KineticParams base(2.0, 1.0, 3.0);
    const KineticParams alt(2.5, 1.5, 4.0);
    ScenarioConfig cfg;
    cfg.preset = p;
    cfg.mesh_level = 10;
    cfg.integrator.dt = 2.5e-4;
    switch (p) {
        case Preset::Fig1s:
            cfg.params = ModelParams(base, 6.0);
            cfg.ic = PerturbationSpec::spline(0.4, 0.1, 0.05);
            cfg.integrator.t_end = 30.0;
            cfg.integrator.snapshot_times = {5, 10, 15, 20, 25};
            break;
        case Preset::MultiSpikeDw1:
            cfg.params = ModelParams(base, 1.0);
            cfg.ic = PerturbationSpec::spline(0.4, 0.1, 0.05);
            cfg.integrator.t_end = 25.0;
            cfg.integrator.snapshot_times = {5, 10, 15, 20};
            break;
        case Preset::Cos:
            cfg.params = ModelParams(base, 2.0);
            cfg.ic = PerturbationSpec::cosine(0.05);
            cfg.integrator.t_end = 25.0;
            cfg.integrator.snapshot_times = {5, 10, 15, 20};
            break;
        case Preset::CosXX:
            cfg.params = ModelParams(base, 2.0);
            cfg.ic = PerturbationSpec::cosine(0.05, /*quadratic_frequency=*/true);
            cfg.integrator.t_end = 10.0;
            cfg.integrator.snapshot_times = {2, 3, 4, 5, 6, 7, 8, 9};
            break;
        case Preset::TrivStab:
            // decay to the trivial state; the initial bump is built in run_preset
            cfg.params = ModelParams(alt, 6.0);
            cfg.ic = PerturbationSpec::spline(0.4, 0.1, 0.05);
            cfg.integrator.t_end = 25.0;
            cfg.integrator.snapshot_times = {5, 10, 15, 20};
            break;
        case Preset::NewParams:
            cfg.params = ModelParams(alt, 5.8541);
            cfg.ic = PerturbationSpec::spline(0.4, 0.05, 0.1);
            cfg.integrator.t_end = 25.0;
            cfg.integrator.snapshot_times = {5, 10, 15, 20};
            break;
        default:
            throw std::invalid_argument("preset_config: " + preset_name(p) +
                                        " is a sweep preset with no single scenario");
    }
    return cfg;
}

namespace {

State trivial_bump_state(const ModelParams& p, const Mesh1D& mesh) {
    constexpr double pi = 3.14159265358979323846;
    State s;
    s.t = 0.0;
    s.u = Field(mesh, 0.0);
    s.w = Field(mesh, p.kinetics.kappa1);
    for (int i = 0; i < mesh.n_nodes(); ++i) {
        const double c = std::cos(pi * mesh.nodes[i]);
        s.u.values[i] = 0.2 * c * c;  // Neumann-compatible bump, max 0.2
    }
    return s;
}

void write_run_outputs(const SimulationResult& result, const std::string& out_dir,
                       const std::string& stem) {
    std::filesystem::create_directories(out_dir);
    write_diagnostics_csv(result.diagnostics,
                          out_dir + "/" + stem + "_diagnostics.csv");
    for (size_t i = 0; i < result.snapshots.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "%s_snap%03zu.snap", stem.c_str(), i);
        write_snapshot(result.snapshots[i], out_dir + "/" + name);
    }
}

}  // namespace

SimulationResult run_scenario(const ScenarioConfig& cfg, const std::string& out_dir,
                              const std::string& stem) {
    const Mesh1D mesh(1 << cfg.mesh_level);
    SimulationResult result;
    if (cfg.preset == Preset::TrivStab)
        result = simulate_from(cfg.params, trivial_bump_state(cfg.params, mesh),
                               cfg.integrator, SpikeCriteria::for_params(cfg.params.kinetics));
    else
        result = simulate(cfg.params, mesh, cfg.ic, cfg.integrator);
    write_run_outputs(result, out_dir, stem);
    return result;
}

int run_preset(Preset p, const std::string& out_dir, int threads) {
    std::filesystem::create_directories(out_dir);
    const KineticParams base(2.0, 1.0, 3.0);

    switch (p) {
        case Preset::Fig1s:
        case Preset::MultiSpikeDw1:
        case Preset::Cos:
        case Preset::TrivStab:
        case Preset::NewParams: {
            const auto result = run_scenario(preset_config(p), out_dir, preset_name(p));
            return result.aborted ? 2 : 0;
        }
        case Preset::CosXX: {
            const ScenarioConfig cfg = preset_config(p);
            const auto result = run_scenario(cfg, out_dir, preset_name(p));
            if (result.aborted) return 2;
            // growth orders at the maxima of the initial perturbation
            const std::vector<double> probes = {0.250092, 0.5, 0.866028};
            const auto states = constant_steady_states(cfg.params.kinetics);
            double u_bar = 0.0;
            for (const auto& s : states)
                if (s.branch == Branch::Minus) u_bar = s.u_bar;
            std::ofstream rep(out_dir + "/CosXX_growth_orders.csv");
            rep << "t,order_x0,order_x1,order_x2\n";
            const State& first = result.snapshots.front();
            for (const auto& s : result.snapshots) {
                if (s.t <= 0.0) continue;
                const auto orders = growth_order(s.u, first.u, u_bar, s.t, probes);
                rep << fmt17(s.t);
                for (const auto& o : orders) rep << ',' << fmt17(o.order);
                rep << "\n";
            }
            return 0;
        }
        case Preset::TableSpikePositions: {
            const std::vector<double> shifts = {0.2, 0.4, 0.5, 0.7, 0.85};
            std::vector<SimulationResult> runs(shifts.size());
            IntegratorConfig icfg;
            icfg.dt = 2.5e-4;
            icfg.t_end = 25.0;
            const ModelParams mp(base, 6.0);
            parallel_for(static_cast<int>(shifts.size()), threads, [&](int j) {
                runs[j] = simulate(mp, Mesh1D(1 << 10),
                                   PerturbationSpec::spline(shifts[j], 0.1, 0.05), icfg);
            });
            std::ofstream csv(out_dir + "/table_spike_positions.csv");
            csv << "s,x_t0_max,x_final_max\n";
            bool fault = false;
            for (size_t j = 0; j < shifts.size(); ++j) {
                if (runs[j].aborted) {
                    fault = true;
                    continue;
                }
                csv << fmt17(shifts[j]) << ','
                    << fmt17(runs[j].diagnostics.rows.front().argmax_u) << ','
                    << fmt17(runs[j].diagnostics.rows.back().argmax_u) << "\n";
            }
            return fault ? 2 : 0;
        }
        case Preset::TableSpikeCounts: {
            const double dw1 = critical_diffusion(base, 1);
            const std::vector<int> divisors = {1, 4, 9, 16, 25, 36};
            std::vector<SimulationResult> runs(divisors.size());
            IntegratorConfig icfg;
            icfg.dt = 2.5e-4;
            icfg.t_end = 25.0;
            parallel_for(static_cast<int>(divisors.size()), threads, [&](int j) {
                const ModelParams mp(base, dw1 / divisors[j]);
                runs[j] = simulate(mp, Mesh1D(1 << 10),
                                   PerturbationSpec::spline(0.4, 0.1, 0.05), icfg);
            });
            std::ofstream csv(out_dir + "/table_spike_counts.csv");
            csv << "d_w,spike_count\n";
            bool fault = false;
            for (size_t j = 0; j < divisors.size(); ++j) {
                if (runs[j].aborted) {
                    fault = true;
                    continue;
                }
                csv << fmt17(dw1 / divisors[j]) << ','
                    << runs[j].diagnostics.rows.back().spike_count << "\n";
            }
            return fault ? 2 : 0;
        }
        case Preset::ConvergenceSisp: {
            IntegratorConfig icfg;
            icfg.dt = 0.01;
            icfg.t_end = 25.0;
            const auto study = run_study(ModelParams(base, 6.0),
                                         PerturbationSpec::spline(0.4, 0.1, 0.05),
                                         {7, 8, 9, 10}, 13, icfg,
                                         {1, 5, 10, 15, 20, 25}, threads);
            write_study_csv(study, out_dir + "/convergence_errors.csv",
                            out_dir + "/convergence_orders.csv");
            return 0;
        }
        case Preset::DispersionPlot: {
            const ModelParams mp(base, 6.0);
            const auto states = constant_steady_states(base);
            const ConstantSteadyState* minus = nullptr;
            for (const auto& s : states)
                if (s.branch == Branch::Minus) minus = &s;
            std::ofstream csv(out_dir + "/dispersion.csv");
            csv << "k,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus\n";
            for (int k = 0; k <= 64; ++k) {
                const auto s = lambda_pm(mp, *minus, k);
                csv << k << ',' << fmt17(s.lambda_plus.real()) << ','
                    << fmt17(s.lambda_plus.imag()) << ',' << fmt17(s.lambda_minus.real())
                    << ',' << fmt17(s.lambda_minus.imag()) << "\n";
            }
            return 0;
        }
    }
    throw std::logic_error("run_preset: unhandled preset");
}

}  // namespace spikesim
