#pragma once

#include "phaselab/data_model.hpp"
#include "phaselab/parallel.hpp"
#include "phaselab/special_math.hpp"
#include "phaselab/theory.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

namespace phaselab {

struct ZeroNorm : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SgdVariant { spherical, penalized };

struct SgdConfig {
    SgdVariant variant = SgdVariant::spherical;
    double delta_scale = 1e-3;
    std::optional<double> delta_override;
    double beta = 0;
    long steps = 1;
    // 0 selects log-spaced snapshots (16 per decade).
    long record_every = 0;
    // Extra snapshot steps merged into the schedule.
    std::vector<long> checkpoints;
    double eta_threshold = 0.25;
    // Steps per empirical-loss window.
    long loss_window = 10'000;
    // Flip to w + delta grad L for comparison with the ascent reading of the update.
    bool ascent = false;
    // Companion frequencies tracked as the principal subspace.
    std::vector<int> principal_modes;
    bool pixel_fast_path = false;

    double delta(int n) const { return delta_override ? *delta_override : delta_scale / n; }
    // delta_scale > 0 and steps >= 0.
    void validate() const;
    // Snapshot steps in [0, steps], sorted and unique.
    std::vector<long> schedule() const;
};

// 1 / (N^2 log^2 N) < delta < 1 / (N log N).
struct RateWindow {
    double lower = 0, upper = 0, delta = 0;
    bool within() const { return lower < delta && delta < upper; }
};
RateWindow learning_rate_window(int n, double delta);

struct RunTrace {
    std::uint64_t seed = 0;
    std::vector<long> steps;
    std::vector<OverlapState> stats;
    // Mean and SE of the last completed loss window at each snapshot; NaN before the first.
    std::vector<double> loss_window, loss_window_se;
    std::vector<double> final_w;
};

// grad_w (1 - y sigma(w.x)) = -y sigma'(w.x) x
std::vector<double> pointwise_gradient(std::span<const double> w, std::span<const double> x, int y,
                                       const Activation& sigma);

// (I - w w^T) g
std::vector<double> project_tangent(std::span<const double> w, std::span<const double> g);

// w <- normalize(w - delta (I - w w^T) g); sign = -1 for the ascent variant.
void spherical_step(std::span<double> w, std::span<const double> g, double delta, double sign = 1.0);
void spherical_step(std::span<double> w, std::span<const double> x, int y, const Activation& sigma, double delta,
                    double sign = 1.0);
// w <- w - delta (g + 4 beta |w|^2 w)
void penalized_step(std::span<double> w, std::span<const double> g, double delta, double beta, double sign = 1.0);
void penalized_step(std::span<double> w, std::span<const double> x, int y, const Activation& sigma, double delta,
                    double beta, double sign = 1.0);

// Overlaps of w with (u, v) at k0 and (u_m, v_m) at each principal mode; omega_perp is the residual norm.
OverlapState overlaps(std::span<const double> w, const DftBasis& basis, int k0, std::span<const int> modes);

RunTrace run_online(const CirculantSpectrum& spec, const PlantSpec& plant, const Activation& sigma,
                    const SgdConfig& cfg, std::uint64_t seed);

// Independent runs with seeds derive_seed(seed_base, i); the parallel path runs seeds concurrently.
std::vector<RunTrace> run_seeds(const CirculantSpectrum& spec, const PlantSpec& plant, const Activation& sigma,
                                const SgdConfig& cfg, std::uint64_t seed_base, int n_seeds, Exec exec);

struct Quantiles {
    double q25 = 0, median = 0, q75 = 0;
};
Quantiles quantiles(std::vector<double> v);

struct RecoveryRow {
    long step = 0;
    Quantiles abs_u, abs_v, phase, principal;
    double frac_recovered = 0;  // fraction of seeds with phase norm >= eta
};
struct RecoveryReport {
    double eta = 0;
    std::vector<RecoveryRow> rows;

    // First row whose median phase norm reaches the level, or -1.
    long first_step_phase_above(double level) const;
};
// Traces must share the snapshot schedule.
RecoveryReport recovery_summary(const std::vector<RunTrace>& traces, double eta = 0.25);

void write_trace_csv(std::ostream& os, const RunTrace& trace, bool header = true);
void write_recovery_csv(std::ostream& os, const RecoveryReport& rep);

}  // namespace phaselab
