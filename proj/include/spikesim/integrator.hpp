#pragma once

#include <stdexcept>
#include <vector>

#include "spikesim/diagnostics.hpp"
#include "spikesim/grid.hpp"
#include "spikesim/kinetics.hpp"
#include "spikesim/stability.hpp"

namespace spikesim {

enum class TimeScheme { ImplicitEuler, CrankNicolson };

/// Default is the semi-implicit splitting (tridiagonal w solve with lagged
/// u^2, then a nodal implicit u update); Newton solves the fully coupled
/// residual.
enum class NonlinearMode { SemiImplicit, Newton };

struct IntegratorConfig {
    TimeScheme scheme = TimeScheme::ImplicitEuler;
    NonlinearMode nonlinear_mode = NonlinearMode::SemiImplicit;
    double newton_tol = 1e-10;
    int newton_max_iter = 25;
    double dt = 2.5e-4;
    double t_end = 25.0;
    std::vector<double> snapshot_times;
    /// Test mode: pure diffusion of w (no reactions, no source), u frozen.
    bool diffusion_only = false;

    void validate() const {
        if (!(dt > 0.0) || !(t_end > 0.0) || dt > t_end)
            throw std::invalid_argument("IntegratorConfig: need 0 < dt <= t_end");
        for (double t : snapshot_times)
            if (t < 0.0 || t > t_end + 1e-12)
                throw std::invalid_argument("IntegratorConfig: snapshot time outside [0, t_end]");
    }
};

struct PositivityFault : std::runtime_error {
    int node;
    double time;
    PositivityFault(int node_, double time_)
        : std::runtime_error("positivity fault at node " + std::to_string(node_) +
                             ", t=" + std::to_string(time_)),
          node(node_), time(time_) {}
};

/// Advances the coupled semi-discrete system by one time step.
State step(const ModelParams& p, const FemMatrices& mats, const State& s,
           const IntegratorConfig& cfg);

struct SimulationResult {
    std::vector<State> snapshots;
    RunDiagnostics diagnostics;
    bool aborted = false;     // positivity fault; diagnostics up to the fault are kept
    std::string fault_message;
};

SimulationResult simulate(const ModelParams& p, const Mesh1D& mesh,
                          const PerturbationSpec& ic, const IntegratorConfig& cfg);

/// As simulate, but from an explicit initial state (e.g. perturbations of the
/// trivial steady state).
SimulationResult simulate_from(const ModelParams& p, State initial,
                               const IntegratorConfig& cfg,
                               const SpikeCriteria& criteria);

/// Evolves the frozen-coefficient linearization at a constant steady state:
/// d(phi)/dt = a11 phi + a12 psi, M d(psi)/dt = -D_w K psi + a21 M phi + a22 M psi.
/// States carry the perturbation fields, not the full solution.
std::vector<State> simulate_linearized(const ModelParams& p, const Mesh1D& mesh,
                                       const ConstantSteadyState& s,
                                       const Field& phi0, const Field& psi0,
                                       const IntegratorConfig& cfg);

}  // namespace spikesim
