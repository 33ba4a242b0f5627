#pragma once

#include <optional>
#include <string>

#include "spikesim/convergence.hpp"
#include "spikesim/integrator.hpp"

namespace spikesim {

/// Canned scenarios reproducing the reference datasets (single-spike run,
/// multi-spike run, cosine perturbations, trivial-state decay, alternative
/// parameter set, the two sweep tables, the convergence study, and the
/// dispersion-curve export).
enum class Preset {
    Fig1s,
    MultiSpikeDw1,
    Cos,
    CosXX,
    TrivStab,
    NewParams,
    TableSpikePositions,
    TableSpikeCounts,
    ConvergenceSisp,
    DispersionPlot,
};

std::optional<Preset> preset_from_name(const std::string& name);
std::string preset_name(Preset p);
std::vector<Preset> all_presets();

struct OutputPaths {
    std::string csv_path;
    std::string snapshot_dir;
    std::string report_path;
};

struct ScenarioConfig {
    ModelParams params{KineticParams(2.0, 1.0, 3.0), 6.0};
    std::optional<FullModelParams> full_model;  // set when loaded with full_model=true
    PerturbationSpec ic;
    int mesh_level = 10;
    IntegratorConfig integrator;
    OutputPaths outputs;
    std::optional<Preset> preset;
};

/// Flat key=value configuration ('#' comments). Recognized keys:
/// a1,d1,kappa1,d_w,ic.kind,ic.s,ic.eps,ic.eps1,ic.k,ic.amplitude,mesh_level,
/// scheme,nonlinear_mode,dt,t_end,snapshot_times; with full_model=true instead
/// the rate keys a,d_c,d_b,d,d_g,alpha,kappa,gamma (reduced on load).
/// Unknown keys and constraint violations throw with the offending line/field.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& text);
std::string serialize_config(const ScenarioConfig& cfg);

/// Fully determined configuration of a single-run preset; throws for the
/// sweep presets (tables, convergence, dispersion), which have no single
/// scenario.
ScenarioConfig preset_config(Preset p);

/// Runs a scenario and writes diagnostics CSV plus per-snapshot files under
/// out_dir (created if absent). Returns the in-memory result as well.
SimulationResult run_scenario(const ScenarioConfig& cfg, const std::string& out_dir,
                              const std::string& stem);

/// Executes a preset end-to-end into out_dir; sweep presets fan out over a
/// worker pool (threads = 0 picks the hardware concurrency) and collect
/// results in deterministic order. Returns 0 on success, 2 on numerical fault.
int run_preset(Preset p, const std::string& out_dir, int threads = 0);

}  // namespace spikesim
