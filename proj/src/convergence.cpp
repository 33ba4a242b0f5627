#include "spikesim/convergence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

namespace spikesim {

Field restrict_to(const Mesh1D& coarse_mesh, const Field& fine) {
    const int cf = fine.mesh.n_cells;
    const int cc = coarse_mesh.n_cells;
    if (cc > cf || cf % cc != 0)
        throw std::invalid_argument("restrict_to: meshes are not nested");
    const int stride = cf / cc;
    std::vector<double> v(coarse_mesh.n_nodes());
    for (int i = 0; i < coarse_mesh.n_nodes(); ++i) v[i] = fine.values[i * stride];
    return Field(coarse_mesh, std::move(v));
}

namespace {

// index of the snapshot taken at time t (simulate records them in order)
const State& snapshot_at(const SimulationResult& run, double t) {
    for (const auto& s : run.snapshots)
        if (std::abs(s.t - t) < 1e-9) return s;
    throw std::logic_error("run_study: missing snapshot");
}

}  // namespace

ConvergenceStudy run_study(const ModelParams& p, const PerturbationSpec& ic,
                           const std::vector<int>& levels, int ref_level,
                           const IntegratorConfig& cfg,
                           const std::vector<double>& sample_times, int threads) {
    if (levels.empty()) throw std::invalid_argument("run_study: no levels");
    std::vector<int> sorted = levels;
    std::sort(sorted.begin(), sorted.end());
    if (ref_level < sorted.back() + 3)
        throw std::invalid_argument("run_study: reference level must exceed max(levels) by >= 3");

    IntegratorConfig run_cfg = cfg;
    run_cfg.snapshot_times = sample_times;
    run_cfg.t_end = *std::max_element(sample_times.begin(), sample_times.end());
    run_cfg.validate();

    const int n_jobs = static_cast<int>(sorted.size()) + 1;
    std::vector<SimulationResult> results(n_jobs);
    unsigned n_workers = threads > 0 ? threads : std::thread::hardware_concurrency();
    if (n_workers == 0) n_workers = 1;
    std::atomic<int> next_job{0};
    auto worker = [&]() {
        for (int j = next_job++; j < n_jobs; j = next_job++) {
            const int level = j < n_jobs - 1 ? sorted[j] : ref_level;
            results[j] = simulate(p, Mesh1D(1 << level), ic, run_cfg);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < std::min<unsigned>(n_workers, n_jobs); ++i)
        pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (const auto& r : results)
        if (r.aborted) throw std::runtime_error("run_study: simulation fault: " + r.fault_message);

    const SimulationResult& ref = results.back();
    ConvergenceStudy study;
    study.levels = sorted;
    study.ref_level = ref_level;
    study.dt = cfg.dt;
    study.sample_times = sample_times;

    for (size_t li = 0; li < sorted.size(); ++li) {
        const Mesh1D coarse(1 << sorted[li]);
        for (double t : sample_times) {
            const State& s = snapshot_at(results[li], t);
            const State& r = snapshot_at(ref, t);
            const Field ru = restrict_to(coarse, r.u);
            const Field rw = restrict_to(coarse, r.w);
            std::vector<double> du(coarse.n_nodes()), dw(coarse.n_nodes());
            for (int i = 0; i < coarse.n_nodes(); ++i) {
                du[i] = s.u.values[i] - ru.values[i];
                dw[i] = s.w.values[i] - rw.values[i];
            }
            const Field eu(coarse, std::move(du)), ew(coarse, std::move(dw));
            study.errors.push_back({coarse.h, t, l1_norm(eu), l2_norm(eu),
                                    l1_norm(ew), l2_norm(ew)});
        }
    }

    const size_t nt = sample_times.size();
    for (size_t li = 0; li + 1 < sorted.size(); ++li) {
        if (sorted[li + 1] != sorted[li] + 1) continue;  // orders need dyadic neighbours
        for (size_t ti = 0; ti < nt; ++ti) {
            const ErrorRow& eh = study.errors[li * nt + ti];
            const ErrorRow& eh2 = study.errors[(li + 1) * nt + ti];
            OrderRow row{eh.h, eh.t, 0.0, 0.0, false};
            if (eh.e_l2_u > 1e-14 && eh2.e_l2_u > 1e-14 && eh.e_l2_w > 1e-14 &&
                eh2.e_l2_w > 1e-14) {
                row.order_l2_u = std::log2(eh.e_l2_u / eh2.e_l2_u);
                row.order_l2_w = std::log2(eh.e_l2_w / eh2.e_l2_w);
                row.valid = true;
            }
            study.orders.push_back(row);
        }
    }
    return study;
}

void write_study_csv(const ConvergenceStudy& study, const std::string& errors_path,
                     const std::string& orders_path) {
    char buf[64];
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    std::ofstream err(errors_path);
    if (!err) throw std::runtime_error("write_study_csv: cannot open " + errors_path);
    err << "h,t,e_l1_u,e_l2_u,e_l1_w,e_l2_w\n";
    for (const auto& r : study.errors)
        err << fmt(r.h) << ',' << fmt(r.t) << ',' << fmt(r.e_l1_u) << ','
            << fmt(r.e_l2_u) << ',' << fmt(r.e_l1_w) << ',' << fmt(r.e_l2_w) << '\n';

    std::ofstream ord(orders_path);
    if (!ord) throw std::runtime_error("write_study_csv: cannot open " + orders_path);
    ord << "h,t,order_l2_u,order_l2_w\n";
    for (const auto& r : study.orders) {
        if (!r.valid) continue;
        ord << fmt(r.h) << ',' << fmt(r.t) << ',' << fmt(r.order_l2_u) << ','
            << fmt(r.order_l2_w) << '\n';
    }
}

}  // namespace spikesim
