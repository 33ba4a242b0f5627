#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "spikesim/kinetics.hpp"

namespace spikesim {

/// Eigenvalue pair of the linearization restricted to Fourier mode k
/// (Laplacian eigenvalue (pi*k)^2).
struct DispersionSample {
    int k;
    std::complex<double> lambda_plus;
    std::complex<double> lambda_minus;
};

struct DdiReport {
    ConstantSteadyState steady_state{0.0, 0.0, Branch::Trivial};
    bool has_positive_states = false;
    bool kinetically_stable = false;
    bool ddi = false;
    std::optional<int> first_unstable_mode;
    double lambda_limit = 0.0;  // a11, the tail limit of Re lambda_plus
    std::vector<int> unstable_modes;
    std::vector<std::pair<int, double>> d_w_thresholds;  // (k, D_{w,k})
};

/// Eigenvalue pair at an arbitrary Laplacian eigenvalue mu >= 0.
std::pair<std::complex<double>, std::complex<double>> lambda_pm_at(
    const ModelParams& p, const ConstantSteadyState& s, double mu);

/// Closed-form roots at integer mode k, Laplacian eigenvalue (pi*k)^2.
DispersionSample lambda_pm(const ModelParams& p, const ConstantSteadyState& s, int k);

/// Determinant of [[a11-l, a12],[a21, a22 - D_w (pi k)^2 - l]]; vanishes at
/// the lambda_pm roots. Rejects the trivial branch.
std::complex<double> dispersion_det(const ModelParams& p, const ConstantSteadyState& s,
                                    std::complex<double> lambda, int k);

/// Critical diffusion coefficient of mode k in the tabulated normalization
/// (Laplacian eigenvalue k^2): D_{w,k} = |A|/(a11 k^2).
/// Evaluates both the definitional and the expanded closed form and checks
/// their agreement; lambda_plus vanishes at Laplacian eigenvalue k^2 when
/// D_w = D_{w,k}.
double critical_diffusion(const KineticParams& p, int k);

/// Modes k in [0, k_max] with Re lambda_plus > 0.
std::vector<int> unstable_mode_range(const ModelParams& p, const ConstantSteadyState& s,
                                     int k_max);

struct EigenmodeIc {
    std::function<double(double)> phi;  // u perturbation
    std::function<double(double)> psi;  // w perturbation
    double ratio;                       // psi = ratio * phi
    double growth_rate;                 // Re lambda_plus((pi k)^2)
};

/// Initial data (phi_k, a21/(lambda_+ - a22 + D_w pi^2 k^2) phi_k) that the
/// linearized flow amplifies as exp(lambda_+ t), phi_k(x) = amplitude*cos(pi k x).
EigenmodeIc eigenmode_ic(const ModelParams& p, const ConstantSteadyState& s, int k,
                         double amplitude);

/// Aggregate diffusion-driven-instability analysis at the minus branch.
DdiReport ddi_report(const ModelParams& p, int k_max = 64);

}  // namespace spikesim
