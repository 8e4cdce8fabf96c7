#include "phaselab/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace phaselab;

int main(int argc, char** argv) {
    CLI::App app{"phaselab: Fourier data model experiments"};
    app.require_subcommand(1);

    std::string config_path;
    RunOptions opt;
    std::uint64_t seed_base = 0;

    const std::pair<const char*, ExperimentKind> commands[] = {
        {"validate-stats", ExperimentKind::validate_stats},   {"isotropic-sweep", ExperimentKind::isotropic_sweep},
        {"powerlaw-sweep", ExperimentKind::powerlaw_sweep},   {"landscape", ExperimentKind::landscape},
        {"ode-compare", ExperimentKind::ode_compare},         {"surgery", ExperimentKind::surgery},
        {"texture-train", ExperimentKind::texture_train},
    };
    std::vector<std::pair<CLI::App*, ExperimentKind>> subs;
    for (const auto& [name, kind] : commands) {
        auto* sub = app.add_subcommand(name, std::string("run the ") + kind_name(kind) + " experiment");
        sub->add_option("--config", config_path, "config file (key = value)")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output directory")->capture_default_str();
        sub->add_option("--jobs", opt.jobs, "worker threads; 0 uses all cores")->check(CLI::NonNegativeNumber);
        sub->add_option("--seed-base", seed_base, "override the config seed_base");
        sub->add_flag("--plots", opt.plots, "also write SVG plots");
        subs.emplace_back(sub, kind);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        ExperimentKind kind{};
        CLI::App* sub = nullptr;
        for (const auto& [s, k] : subs)
            if (s->parsed()) sub = s, kind = k;
        ExperimentConfig cfg = config_path.empty() ? default_config(kind) : load_config(config_path);
        if (cfg.kind != kind)
            throw ConfigError(std::string("config kind ") + kind_name(cfg.kind) + " does not match subcommand " +
                              sub->get_name());
        if (sub->count("--seed-base")) opt.seed_base = seed_base;
        const auto bundle = run_experiment(cfg, opt);
        std::cout << "input_hash " << bundle.input_hash << "\n";
        for (const auto& f : bundle.files) std::cout << (bundle.dir / f).string() << "\n";
        if (!bundle.battery_passed) {
            std::cerr << "validation battery: unexpected results, see " << (bundle.dir / "validation.csv").string() << "\n";
            return 2;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
