#pragma once

#include "phaselab/data_model.hpp"
#include "phaselab/stat_checks.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace phaselab {

struct Blowup : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// c_ij = E_P[h_i(v.x / sigma_C) h_j(u.x / sigma_B)] for i + j = 4; all lower
// orders vanish except c00 = 1.
struct LikelihoodCoeffs {
    double c40 = 0, c04 = 0, c22 = 0, c31 = 0, c13 = 0;

    double operator()(int i, int j) const;
};

// Exact values: c40 = c04 = J4(4 eps), c22 = -J4(4 eps).
LikelihoodCoeffs likelihood_coeffs(double epsilon, double lambda_k0, int n);
// Doubled alternative c40 = c04 = 2 J4(4 eps), c22 = -c40 / 2; sampling rejects it.
LikelihoodCoeffs likelihood_coeffs_doubled(double epsilon);

struct LikelihoodMc {
    // Indexed [i][j] for i + j <= 4.
    double mean[5][5] = {};
    double se[5][5] = {};
};
LikelihoodMc likelihood_coeffs_mc(const CirculantSpectrum& spec, const PlantSpec& plant, const McOptions& mc);

// sum_i c_{i,4-i} a_v^i a_u^{4-i} / (i! (4-i)!)
double quartic_form(double au, double av, const LikelihoodCoeffs& like);
// Partial derivatives of quartic_form in a_u and a_v.
double quartic_form_du(double au, double av, const LikelihoodCoeffs& like);
double quartic_form_dv(double au, double av, const LikelihoodCoeffs& like);

struct OverlapState {
    double alpha_u = 0, alpha_v = 0;
    std::vector<double> alpha_um, alpha_vm;
    double omega_perp = 0;

    std::size_t modes() const { return alpha_um.size(); }
    double norm_sq() const;
    double phase_norm() const;
    double principal_norm() const;

    // Layout: u, v, (u_m)_m, (v_m)_m, omega.
    std::vector<double> flatten() const;
    static OverlapState unflatten(std::span<const double> v, std::size_t modes);
};

struct DriftParams {
    double lambda_k0 = 1;
    std::vector<double> lambda_m;
    double c4 = 24, c6 = 0;
    LikelihoodCoeffs like;
    double beta = 0;
};

// (lambda_k0 - 1)(a_u^2 + a_v^2) + sum_m (lambda_m - 1)(a_um^2 + a_vm^2)
double sigma_sq_minus_one(const OverlapState& s, const DriftParams& p);
// 1 - (1/2) lambda_k0^2 quartic_form [c4 + c6 (sigma^2 - 1) / 2]
double population_loss_leading(const OverlapState& s, const DriftParams& p);
// population_loss_leading + beta |w|^4
double penalized_loss_leading(const OverlapState& s, const DriftParams& p);
// Gradient of penalized_loss_leading in the overlaps, penalty term 4 beta |w|^2 alpha.
OverlapState population_drift(const OverlapState& s, const DriftParams& p);

// Limits lambda_k0 / sqrt(N) -> a_k0 and lambda_m / N -> gamma_m.
struct ExtensiveParams {
    double a_k0 = 1;
    std::vector<double> gamma_m;
    double c4 = 24, c6 = 0;
    LikelihoodCoeffs like;
    double beta = 0;

    // lambda_k0 = a0 N^p0, lambda_m = b_m N^{p_m}. Sub-critical exponents give
    // vanishing limits; super-critical ones make the rescaled drift diverge.
    static ExtensiveParams from_scalings(double a0, double p0, std::span<const double> b, std::span<const double> p,
                                         double c4, double c6, const LikelihoodCoeffs& like, double beta);
};

// Drift of m = (sqrt(N) alpha, omega) as N -> infinity; |w|^2 -> omega^2.
OverlapState rescaled_drift(const OverlapState& m, const ExtensiveParams& p);
// sqrt(N) times the finite-N population drift at alpha = m / sqrt(N).
OverlapState rescaled_drift_finite(const OverlapState& m, int n, const DriftParams& p);

struct Trajectory {
    std::vector<double> t;
    std::vector<std::vector<double>> states;
};
using DriftFn = std::function<std::vector<double>(const std::vector<double>&)>;

// Fixed-step RK4 for dm/dt = -A(m), sampled every sample_every steps and at the end.
Trajectory integrate_ode(const DriftFn& drift, std::vector<double> m0, double dt, long steps, long sample_every = 1);

}  // namespace phaselab
