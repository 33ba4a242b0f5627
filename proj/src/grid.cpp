#include "spikesim/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spikesim/stability.hpp"

namespace spikesim {

double Field::operator()(double x) const {
    if (x <= 0.0) return values.front();
    if (x >= 1.0) return values.back();
    const double pos = x / mesh.h;
    int i = static_cast<int>(pos);
    if (i >= mesh.n_cells) i = mesh.n_cells - 1;
    const double frac = pos - i;
    return values[i] * (1.0 - frac) + values[i + 1] * frac;
}

std::vector<double> Tridiag::multiply(const std::vector<double>& x) const {
    const int n = size();
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
        double v = diag[i] * x[i];
        if (i > 0) v += lower[i] * x[i - 1];
        if (i < n - 1) v += upper[i] * x[i + 1];
        y[i] = v;
    }
    return y;
}

std::vector<double> Tridiag::solve(const std::vector<double>& rhs) const {
    const int n = size();
    std::vector<double> c_star(n), d_star(n), x(n);
    c_star[0] = upper[0] / diag[0];
    d_star[0] = rhs[0] / diag[0];
    for (int i = 1; i < n; ++i) {
        const double m = diag[i] - lower[i] * c_star[i - 1];
        c_star[i] = upper[i] / m;
        d_star[i] = (rhs[i] - lower[i] * d_star[i - 1]) / m;
    }
    x[n - 1] = d_star[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = d_star[i] - c_star[i] * x[i + 1];
    return x;
}

FemMatrices assemble_fem(const Mesh1D& mesh) {
    const int n = mesh.n_nodes();
    const double h = mesh.h;
    FemMatrices m{Tridiag(n), Tridiag(n)};
    for (int i = 0; i < n; ++i) {
        const bool boundary = (i == 0 || i == n - 1);
        m.mass.diag[i] = boundary ? h / 3.0 : 2.0 * h / 3.0;
        m.stiffness.diag[i] = boundary ? 1.0 / h : 2.0 / h;
        if (i > 0) {
            m.mass.lower[i] = h / 6.0;
            m.stiffness.lower[i] = -1.0 / h;
        }
        if (i < n - 1) {
            m.mass.upper[i] = h / 6.0;
            m.stiffness.upper[i] = -1.0 / h;
        }
    }
    return m;
}

double l1_norm(const Field& f) {
    const double h = f.mesh.h;
    double total = 0.0;
    for (int i = 0; i < f.mesh.n_cells; ++i) {
        const double a = f.values[i], b = f.values[i + 1];
        if (a * b >= 0.0) {
            total += 0.5 * h * (std::abs(a) + std::abs(b));
        } else {
            // linear segment crosses zero: split the element there
            total += 0.5 * h * (a * a + b * b) / std::abs(a - b);
        }
    }
    return total;
}

double l2_norm(const Field& f) {
    const double h = f.mesh.h;
    double total = 0.0;
    for (int i = 0; i < f.mesh.n_cells; ++i) {
        const double a = f.values[i], b = f.values[i + 1];
        total += h / 3.0 * (a * a + a * b + b * b);
    }
    return std::sqrt(total);
}

std::function<double(double)> spline_perturbation(double s, double eps) {
    if (!(eps > 0.0) || !(s - eps > 0.0) || !(s + eps < 1.0))
        throw std::invalid_argument("spline_perturbation: need 0 < s-eps and s+eps < 1");
    const double d = -2.0 * s + 2.0 * s * s - eps;
    return [s, eps, d](double x) {
        if (x < s - eps) {
            return 4.0 * (-1.0 + s - eps) / ((s - eps) * d) * x * x - 1.0;
        }
        if (x <= s + eps) {
            return (2.0 * (1.0 + 2.0 * eps) * x * x - 4.0 * (s + eps) * x +
                    2.0 * s * s + 2.0 * s * eps - 2.0 * s * s * eps - eps * eps) /
                   (eps * d);
        }
        return (2.0 * s + 4.0 * s * s - 2.0 * s * s * s + 3.0 * eps + 3.0 * s * eps -
                2.0 * s * s * eps + eps * eps - 8.0 * x * (s + eps) +
                4.0 * x * x * (s + eps)) /
               (d * (-1.0 + s + eps));
    };
}

State build_initial_state(const ModelParams& p, const Mesh1D& mesh,
                          const PerturbationSpec& spec) {
    const auto states = constant_steady_states(p.kinetics);
    const ConstantSteadyState* minus = nullptr;
    for (const auto& s : states)
        if (s.branch == Branch::Minus) minus = &s;
    if (!minus)
        throw std::invalid_argument("build_initial_state: no positive steady state for these kinetics");

    State out;
    out.t = 0.0;
    out.u = Field(mesh, minus->u_bar);
    out.w = Field(mesh, minus->w_bar);

    constexpr double pi = 3.14159265358979323846;
    switch (spec.kind) {
        case PerturbationSpec::Kind::Spline: {
            auto bump = spline_perturbation(spec.s, spec.eps);
            for (int i = 0; i < mesh.n_nodes(); ++i)
                out.u.values[i] += spec.eps1 * bump(mesh.nodes[i]);
            break;
        }
        case PerturbationSpec::Kind::CosineLinear:
            for (int i = 0; i < mesh.n_nodes(); ++i)
                out.u.values[i] -= spec.amplitude * std::cos(4.0 * pi * mesh.nodes[i]);
            break;
        case PerturbationSpec::Kind::CosineQuadratic:
            for (int i = 0; i < mesh.n_nodes(); ++i) {
                const double x = mesh.nodes[i];
                out.u.values[i] -= spec.amplitude * std::cos(4.0 * pi * x * x);
            }
            break;
        case PerturbationSpec::Kind::Eigenmode: {
            auto mode = eigenmode_ic(p, *minus, spec.k, spec.amplitude);
            for (int i = 0; i < mesh.n_nodes(); ++i) {
                out.u.values[i] += mode.phi(mesh.nodes[i]);
                out.w.values[i] += mode.psi(mesh.nodes[i]);
            }
            break;
        }
    }
    return out;
}

void write_snapshot(const State& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_snapshot: cannot open " + path);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "# t=%.17g\n", s.t);
    out << buf;
    for (int i = 0; i < s.u.mesh.n_nodes(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", s.u.mesh.nodes[i],
                      s.u.values[i], s.w.values[i]);
        out << buf;
    }
}

State read_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_snapshot: cannot open " + path);
    std::string header;
    std::getline(in, header);
    double t = 0.0;
    if (std::sscanf(header.c_str(), "# t=%lf", &t) != 1)
        throw std::runtime_error("read_snapshot: malformed header in " + path);
    std::vector<double> xs, us, ws;
    double x, u, w;
    while (in >> x >> u >> w) {
        xs.push_back(x);
        us.push_back(u);
        ws.push_back(w);
    }
    if (xs.size() < 2) throw std::runtime_error("read_snapshot: too few nodes in " + path);
    Mesh1D mesh(static_cast<int>(xs.size()) - 1);
    State s;
    s.t = t;
    s.u = Field(mesh, std::move(us));
    s.w = Field(mesh, std::move(ws));
    return s;
}

}  // namespace spikesim
