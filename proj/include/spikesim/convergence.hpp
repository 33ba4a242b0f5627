#pragma once

#include <string>
#include <vector>

#include "spikesim/integrator.hpp"

namespace spikesim {

/// Nodal extraction onto a coarser dyadic mesh (coarse nodes must be a
/// subset of the fine nodes).
Field restrict_to(const Mesh1D& coarse_mesh, const Field& fine);

struct ErrorRow {
    double h, t;
    double e_l1_u, e_l2_u, e_l1_w, e_l2_w;
};

/// order at level h against level h/2; valid only when both errors exceed
/// the noise floor 1e-14.
struct OrderRow {
    double h, t;
    double order_l2_u, order_l2_w;
    bool valid;
};

struct ConvergenceStudy {
    std::string scenario;
    std::vector<int> levels;   // dyadic mesh levels, h = 2^-level
    int ref_level = 0;
    double dt = 0.0;
    std::vector<double> sample_times;
    std::vector<ErrorRow> errors;
    std::vector<OrderRow> orders;
};

/// Simulates each level plus the reference, restricts the reference to the
/// coarse meshes at the sample times, and tabulates exact-interpolant errors
/// and dyadic order estimates. Levels run in parallel on `threads` workers
/// (0 = hardware concurrency).
ConvergenceStudy run_study(const ModelParams& p, const PerturbationSpec& ic,
                           const std::vector<int>& levels, int ref_level,
                           const IntegratorConfig& cfg,
                           const std::vector<double>& sample_times = {1, 5, 10, 15, 20, 25},
                           int threads = 0);

/// `h,t,e_l1_u,e_l2_u,e_l1_w,e_l2_w` and companion `h,t,order_l2_u,order_l2_w`.
void write_study_csv(const ConvergenceStudy& study, const std::string& errors_path,
                     const std::string& orders_path);

}  // namespace spikesim
