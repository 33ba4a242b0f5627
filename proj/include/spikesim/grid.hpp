#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spikesim/kinetics.hpp"

namespace spikesim {

/// Uniform mesh of [0,1] with n_cells elements.
struct Mesh1D {
    int n_cells = 0;
    double h = 0.0;
    std::vector<double> nodes;

    Mesh1D() = default;
    explicit Mesh1D(int n_cells_) : n_cells(n_cells_) {
        if (n_cells < 1) throw std::invalid_argument("Mesh1D: need at least one cell");
        h = 1.0 / n_cells;
        nodes.resize(n_cells + 1);
        for (int i = 0; i <= n_cells; ++i) nodes[i] = i * h;
        nodes.back() = 1.0;
    }

    int n_nodes() const { return n_cells + 1; }
};

/// Nodal values of a piecewise-linear function on a mesh.
struct Field {
    Mesh1D mesh;
    std::vector<double> values;

    Field() = default;
    Field(Mesh1D m, std::vector<double> v) : mesh(std::move(m)), values(std::move(v)) {
        if (static_cast<int>(values.size()) != mesh.n_nodes())
            throw std::invalid_argument("Field: value count must match node count");
    }
    Field(const Mesh1D& m, double constant)
        : mesh(m), values(m.n_nodes(), constant) {}

    /// Linear interpolation at x in [0,1].
    double operator()(double x) const;
};

/// Symmetric tridiagonal matrix stored by diagonals; lower[0] and
/// upper[n-1] are unused.
struct Tridiag {
    std::vector<double> lower, diag, upper;

    explicit Tridiag(int n = 0) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}
    int size() const { return static_cast<int>(diag.size()); }

    std::vector<double> multiply(const std::vector<double>& x) const;

    /// Thomas algorithm. The caller guarantees the system is well conditioned
    /// (the time-stepping matrices are strictly diagonally dominant).
    std::vector<double> solve(const std::vector<double>& rhs) const;
};

/// Consistent mass and stiffness matrices of the P1 FEM with natural
/// Neumann boundary.
struct FemMatrices {
    Tridiag mass;
    Tridiag stiffness;
};

FemMatrices assemble_fem(const Mesh1D& mesh);

/// Exact L1 norm of the piecewise-linear interpolant (sign changes split
/// per element).
double l1_norm(const Field& f);

/// Exact L2 norm of the piecewise-linear interpolant.
double l2_norm(const Field& f);

/// The C1 piecewise-quadratic bump with p(0)=p(1)=-1, p(s)=1, p'(0)=p'(1)=0,
/// quadratic on (0,s-eps), (s-eps,s+eps), (s+eps,1). Requires 0 < s-eps and
/// s+eps < 1.
std::function<double(double)> spline_perturbation(double s, double eps);

struct PerturbationSpec {
    enum class Kind { Spline, CosineLinear, CosineQuadratic, Eigenmode };
    Kind kind = Kind::Spline;
    // Spline
    double s = 0.4;
    double eps = 0.1;
    double eps1 = 0.05;
    // Cosine amplitude / eigenmode amplitude
    double amplitude = 0.05;
    // Eigenmode
    int k = 1;

    static PerturbationSpec spline(double s, double eps, double eps1) {
        PerturbationSpec p;
        p.kind = Kind::Spline;
        p.s = s;
        p.eps = eps;
        p.eps1 = eps1;
        return p;
    }
    static PerturbationSpec cosine(double amplitude, bool quadratic_frequency = false) {
        PerturbationSpec p;
        p.kind = quadratic_frequency ? Kind::CosineQuadratic : Kind::CosineLinear;
        p.amplitude = amplitude;
        return p;
    }
    static PerturbationSpec eigenmode(int k, double amplitude) {
        PerturbationSpec p;
        p.kind = Kind::Eigenmode;
        p.k = k;
        p.amplitude = amplitude;
        return p;
    }
};

/// Time plus the two nodal fields.
struct State {
    double t = 0.0;
    Field u;
    Field w;
};

/// Samples the perturbed minus-branch steady state on the mesh. Spline and
/// cosine variants perturb u only; the eigenmode variant perturbs both
/// components with the linearized eigenvector ratio.
State build_initial_state(const ModelParams& p, const Mesh1D& mesh,
                          const PerturbationSpec& spec);

/// Plain-text snapshot: header "# t=<time>", then "x u w" per node at
/// 17 significant digits.
void write_snapshot(const State& s, const std::string& path);
State read_snapshot(const std::string& path);

}  // namespace spikesim
