#pragma once

#include "phaselab/config.hpp"
#include "phaselab/parallel.hpp"
#include "phaselab/sgd.hpp"
#include "phaselab/shallow_net.hpp"
#include "phaselab/stat_checks.hpp"
#include "phaselab/surgery.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace phaselab {

struct RunOptions {
    std::filesystem::path out = "results";
    int jobs = 0;  // 0 keeps the OpenMP default
    std::optional<std::uint64_t> seed_base;
    bool plots = false;

    Exec exec() const { return jobs == 1 ? Exec::serial : Exec::parallel; }
};

struct ResultBundle {
    std::filesystem::path dir;
    std::vector<std::filesystem::path> files;  // relative to dir
    std::string config_echo;
    // Git blob SHA-1 of the config echo and any input corpus files.
    std::string input_hash;
    bool battery_passed = true;

    void add(const std::filesystem::path& rel) { files.push_back(rel); }
    std::filesystem::path path(const std::filesystem::path& rel) const { return dir / rel; }
};

// SHA-1 of "blob <size>\0<content>", as git hashes a file.
std::string git_blob_hash(const std::string& content);

// Applies seed_base and jobs from the options, validates, and dispatches on cfg.kind.
ResultBundle run_experiment(ExperimentConfig cfg, const RunOptions& opt);

ResultBundle run_validate_stats(const ExperimentConfig& cfg, const RunOptions& opt);
ResultBundle run_isotropic_sweep(const ExperimentConfig& cfg, const RunOptions& opt);
ResultBundle run_powerlaw_sweep(const ExperimentConfig& cfg, const RunOptions& opt);
ResultBundle run_landscape(const ExperimentConfig& cfg, const RunOptions& opt);
ResultBundle run_ode_compare(const ExperimentConfig& cfg, const RunOptions& opt);
ResultBundle run_surgery(const ExperimentConfig& cfg, const RunOptions& opt);
ResultBundle run_texture_train(const ExperimentConfig& cfg, const RunOptions& opt);

// The full Monte Carlo battery; FAIL-as-expected entries count as passing.
std::vector<CheckResult> validation_battery(const ExperimentConfig& cfg, Exec exec);

struct SweepResult {
    std::vector<RunTrace> traces;
    RecoveryReport report;
};
SgdConfig sgd_config(const ExperimentConfig& cfg);
SweepResult run_sweep(const ExperimentConfig& cfg, Exec exec);

struct OrderingDiagnostics {
    long principal_rise_step = -1;  // first step with median principal norm above rise_level
    long principal_peak_step = -1;
    double principal_peak = 0;
    long phase_cross_step = -1;     // first step with median phase norm above cross_level
    double principal_final = 0;
    bool peak_before_cross = false;
    // Final median principal norm below decay_fraction of its peak.
    bool decays_after = false;
};
OrderingDiagnostics ordering_diagnostics(const RecoveryReport& rep, double rise_level = 0.3, double cross_level = 0.5,
                                         double decay_fraction = 0.75);

struct TTest {
    double mean = 0, se = 0, t = 0, p = 1;
    int n = 0;
};
// Two-sided when one_sided is false, otherwise H1: mean > 0.
TTest one_sample_t(const std::vector<double>& v, bool one_sided);

// 1-D Fourier-data-model signals: class "planted" and class "baseline" share a power-law spectrum.
Corpus synthetic_phase_corpus(const ExperimentConfig& cfg, std::uint64_t seed);

struct SignatureReport {
    std::map<DatasetVariant, std::vector<TrainReport>> runs;
    // Per-seed mean swapped-minus-original test loss over the first and last tenth of the records (original variant).
    std::vector<double> gap_first, gap_last;
    TTest first, last;
    // Per-seed loss-drop steps; runs that never reach the level report steps + 1.
    std::map<DatasetVariant, std::vector<long>> onset;
    std::map<DatasetVariant, double> onset_median;
};
// Loss-drop level per seed: halfway from the chance loss 1 down to the lowest original-variant test loss.
SignatureReport analyze_signature(std::map<DatasetVariant, std::vector<TrainReport>> runs);
SignatureReport train_variants(const Corpus& corpus, const ExperimentConfig& cfg, Exec exec);

}  // namespace phaselab
