#pragma once

#include "phaselab/data_model.hpp"
#include "phaselab/parallel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace phaselab {

struct CheckResult {
    std::string name;
    double estimate = 0;
    double se = 0;
    double expected = 0;
    double threshold = 0;  // bound on |estimate - expected| / se, or the test's critical value
    bool pass = false;
    bool expect_pass = true;
    std::string detail;

    bool as_expected() const { return pass == expect_pass; }
    std::string status() const;
};

struct McOptions {
    std::size_t n = 1'000'000;
    std::uint64_t seed = 1;
    Exec exec = Exec::parallel;
};

// Entrywise planted-vs-baseline sample covariance; passes if at least 99% of
// the N(N+1)/2 entries agree within 3 standard errors.
CheckResult covariance_check(const CirculantSpectrum& spec, const PlantSpec& plant, const McOptions& mc);
// Entrywise baseline sample covariance against Sigma.
CheckResult covariance_vs_sigma_check(const CirculantSpectrum& spec, const McOptions& mc);
// Largest |mean| / SE over coordinates of both classes against 3 standard errors.
CheckResult mean_check(const CirculantSpectrum& spec, const PlantSpec& plant, const McOptions& mc);

// E[(w.x)^3] for w in {u, v, random} on planted samples and u on baseline samples.
std::vector<CheckResult> third_moment_check(const CirculantSpectrum& spec, const PlantSpec& plant, const McOptions& mc);

CheckResult fourth_moment_check(const CirculantSpectrum& spec, const PlantSpec& plant, std::span<const double> w,
                                const std::string& label, const McOptions& mc);
// Unit vector orthogonal to u, v of mode k0, drawn from the seed.
std::vector<double> random_orthogonal_direction(int n, int k0, std::uint64_t seed);

// Returns (corrector disabled, corrector enabled). The disabled case passes
// when |E[X_k0^2]| > 5 SE, the enabled one when it is below 3 SE.
std::pair<CheckResult, CheckResult> corrector_ablation_check(const CirculantSpectrum& spec, const PlantSpec& plant,
                                                             const McOptions& mc);

struct UniformityResult {
    double distance = 0;
    double critical = 0;
    std::size_t n = 0;
    bool pass = false;
};
// One-sample Kolmogorov distance to Uniform[-pi, pi) at the 1% level.
UniformityResult phase_uniformity_check(std::vector<double> phases);
// Phases arg X_k of n samples, planted when plant is set, baseline otherwise.
std::vector<double> collect_phases(const CirculantSpectrum& spec, const std::optional<PlantSpec>& plant, int k,
                                   const McOptions& mc);

// E[rho_k], E[rho_k^2], E[rho_k^4] of baseline samples against the Rayleigh moments.
std::vector<CheckResult> rayleigh_check(const CirculantSpectrum& spec, int k, const McOptions& mc);

}  // namespace phaselab
