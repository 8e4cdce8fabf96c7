#pragma once

#include "phaselab/fourier.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace phaselab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { isotropic_sweep, powerlaw_sweep, landscape, ode_compare, surgery, texture_train, validate_stats };

const char* kind_name(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

// How the circulant spectrum is built:
//   isotropic                    identity
//   extensive                    lambda_k = N^{p/2} at extensive_modes with extensive_exponents, 1 elsewhere
//   powerlaw(exponent, top)      lambda_k ~ min(k, N-k)^{-exponent}, unit mean; the top lowest
//                                frequencies other than k0 are tracked as principal modes
//   explicit                     eigenvalues = [lambda_0, ..., lambda_{N-1}]
struct SpectrumSpec {
    std::string kind = "isotropic";
    double exponent = 1.0;
    int top_modes = 0;
    std::vector<int> modes;
    std::vector<double> exponents;
    std::vector<double> eigenvalues;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::validate_stats;
    int n = 64;
    double epsilon = 1.2;
    int k0 = 6;
    bool corrector = true;
    SpectrumSpec spectrum;
    std::string activation = "hermite4";

    // SGD
    std::string variant = "spherical";
    double delta_scale = 1e-3;
    double beta = 0;
    long steps = -1;           // -1 derives the budget from cubic_factor
    double cubic_factor = 8;   // budget cubic_factor * N^3
    long record_every = 0;
    double eta = 0.25;
    bool ascent = false;
    std::vector<int> principal_modes;
    int seeds = 1;
    std::uint64_t seed_base = 1;

    // Landscape and Monte Carlo
    int grid = 41;
    long n_mc = 1'000'000;
    double uniformity_fail_epsilon = 2.5;

    // ODE comparison
    std::string regime = "extensive";
    double a_k0 = 1.0;
    double dt = 0.01;

    // Surgery and texture training
    std::string corpus = "synthetic";
    int synth_length = 16;
    int synth_per_class = 10'000;
    double synth_exponent = 2.0;
    std::string hidden_activation = "relu";
    int hidden = 30;
    double lr = 1e-3;
    int epochs = 12;
    int eval_points = 40;

    // All fields in canonical key=value form; parse_config(echo()) reproduces the config.
    std::string echo() const;
    void validate() const;

    long budget() const;
    CirculantSpectrum make_spectrum() const;
    // principal_modes if set, otherwise the modes implied by the spectrum.
    std::vector<int> tracked_modes() const;
};

// Flat key=value text with [a, b, c] arrays and # comments.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::filesystem::path& path);
// Defaults for an experiment kind, mirroring the documented parameter tables.
ExperimentConfig default_config(ExperimentKind kind);

}  // namespace phaselab
