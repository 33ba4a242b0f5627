#include "spikesim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace spikesim {

SpikeCriteria SpikeCriteria::for_params(const KineticParams& p) {
    SpikeCriteria c;
    for (const auto& s : constant_steady_states(p))
        if (s.branch == Branch::Minus) c.abs_floor = 2.0 * s.u_bar;
    return c;
}

std::vector<double> detect_spikes(const Field& u, const SpikeCriteria& c) {
    const auto& v = u.values;
    const int n = static_cast<int>(v.size());
    const double global_max = *std::max_element(v.begin(), v.end());
    const double threshold = std::max(c.abs_floor, c.rel_height * global_max);

    std::vector<std::pair<double, double>> peaks;  // (x, height)
    for (int i = 0; i < n; ++i) {
        if (v[i] < threshold) continue;
        bool is_max;
        if (i == 0)
            is_max = n > 1 && v[0] > v[1];
        else if (i == n - 1)
            is_max = v[n - 1] > v[n - 2];
        else
            is_max = v[i] > v[i - 1] && v[i] > v[i + 1];
        if (is_max) peaks.emplace_back(u.mesh.nodes[i], v[i]);
    }

    std::vector<std::pair<double, double>> merged;
    for (const auto& p : peaks) {
        if (!merged.empty() && p.first - merged.back().first < c.min_separation) {
            if (p.second > merged.back().second) merged.back() = p;
        } else {
            merged.push_back(p);
        }
    }
    std::vector<double> positions;
    positions.reserve(merged.size());
    for (const auto& p : merged) positions.push_back(p.first);
    return positions;
}

DiagnosticsRow make_diagnostics_row(double t, const Field& u, const Field& w,
                                    const SpikeCriteria& c) {
    DiagnosticsRow row;
    row.t = t;
    row.l1_u = l1_norm(u);
    row.l1_w = l1_norm(w);
    row.l2_u = l2_norm(u);
    row.l2_w = l2_norm(w);
    const auto it = std::max_element(u.values.begin(), u.values.end());
    row.max_u = *it;
    row.argmax_u = u.mesh.nodes[it - u.values.begin()];
    row.spike_positions = detect_spikes(u, c);
    row.spike_count = static_cast<int>(row.spike_positions.size());
    return row;
}

std::vector<ProbeOrder> growth_order(const Field& u_t, const Field& u_0, double u_bar,
                                     double t, const std::vector<double>& probes) {
    if (!(t > 0.0)) throw std::invalid_argument("growth_order: need t > 0");
    std::vector<ProbeOrder> out;
    out.reserve(probes.size());
    for (double x : probes) {
        const double base = u_0(x) - u_bar;
        const double now = u_t(x) - u_bar;
        ProbeOrder po{x, 0.0, false};
        if (std::abs(base) > 1e-14 && now / base > 0.0) {
            po.order = std::log(now / base) / t;
            po.valid = true;
        }
        out.push_back(po);
    }
    return out;
}

std::complex<double> finite_fourier(const std::function<double(double)>& f, double omega,
                                    int resolution, bool conjugate) {
    constexpr double pi = 3.14159265358979323846;
    const double sign = conjugate ? -1.0 : 1.0;
    std::complex<double> sum = 0.0;
    const double h = 1.0 / resolution;
    for (int i = 0; i <= resolution; ++i) {
        const double x = i * h;
        const double weight = (i == 0 || i == resolution) ? 0.5 : 1.0;
        sum += weight * f(x) * std::exp(std::complex<double>(0.0, sign * pi * omega * x));
    }
    return sum * h;
}

MassBoundReport mass_bound_monitor(const RunDiagnostics& d, const KineticParams& p,
                                   double tail_fraction) {
    if (!(tail_fraction > 0.0) || tail_fraction > 1.0)
        throw std::invalid_argument("mass_bound_monitor: tail_fraction in (0,1]");
    MassBoundReport r{};
    const double md = std::min(p.d1, 1.0);
    r.bound_combined = p.kappa1 / md;
    r.bound_u = p.a1 * p.kappa1 / md;
    r.bound_w = p.kappa1;
    r.tol = 1e-3;

    const size_t n = d.rows.size();
    const size_t start = n - std::max<size_t>(1, static_cast<size_t>(tail_fraction * n));
    r.max_combined = r.max_l1_u = r.max_l1_w = 0.0;
    r.min_l1_u = std::numeric_limits<double>::infinity();
    for (size_t i = start; i < n; ++i) {
        const auto& row = d.rows[i];
        r.max_combined = std::max(r.max_combined, row.l1_u / p.a1 + row.l1_w);
        r.max_l1_u = std::max(r.max_l1_u, row.l1_u);
        r.max_l1_w = std::max(r.max_l1_w, row.l1_w);
        r.min_l1_u = std::min(r.min_l1_u, row.l1_u);
    }
    r.combined_ok = r.max_combined <= r.bound_combined + r.tol;
    r.u_ok = r.max_l1_u <= r.bound_u + r.tol;
    r.w_ok = r.max_l1_w <= r.bound_w + r.tol;
    return r;
}

void write_diagnostics_csv(const RunDiagnostics& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_diagnostics_csv: cannot open " + path);
    out << "t,l1_u,l1_w,l2_u,l2_w,max_u,argmax_u,spike_count,spike_positions\n";
    char buf[64];
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const auto& row : d.rows) {
        out << fmt(row.t) << ',' << fmt(row.l1_u) << ',' << fmt(row.l1_w) << ','
            << fmt(row.l2_u) << ',' << fmt(row.l2_w) << ',' << fmt(row.max_u) << ','
            << fmt(row.argmax_u) << ',' << row.spike_count << ",\"";
        for (size_t i = 0; i < row.spike_positions.size(); ++i) {
            if (i) out << ';';
            out << fmt(row.spike_positions[i]);
        }
        out << "\"\n";
    }
}

}  // namespace spikesim
