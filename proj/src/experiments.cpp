#include "phaselab/experiments.hpp"

#include "phaselab/landscape.hpp"
#include "phaselab/svg.hpp"
#include "phaselab/theory.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace phaselab {

namespace fs = std::filesystem;

std::string git_blob_hash(const std::string& content) {
    const std::string data = "blob " + std::to_string(content.size()) + '\0' + content;
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha1(), nullptr) != 1)
        throw std::runtime_error("git_blob_hash: digest failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

namespace {

std::ofstream open_out(const ResultBundle& b, const fs::path& rel) {
    std::ofstream os(b.path(rel));
    if (!os) throw CorpusIoError("cannot write " + b.path(rel).string());
    return os;
}

ResultBundle start_bundle(const ExperimentConfig& cfg, const RunOptions& opt, const std::string& extra_inputs = {}) {
    ResultBundle b;
    b.dir = opt.out;
    fs::create_directories(b.dir);
    b.config_echo = cfg.echo();
    b.input_hash = git_blob_hash(b.config_echo + extra_inputs);
    {
        auto os = open_out(b, "config.echo");
        os << b.config_echo;
    }
    b.add("config.echo");
    return b;
}

void finish_bundle(ResultBundle& b) {
    auto os = open_out(b, "bundle.txt");
    os << "input_hash = " << b.input_hash << "\nbattery_passed = " << (b.battery_passed ? "true" : "false") << "\n";
    for (const auto& f : b.files) os << "file = " << f.string() << "\n";
}

PlantSpec plant_of(const ExperimentConfig& cfg) { return PlantSpec::sine(cfg.epsilon, cfg.k0, cfg.corrector); }

McOptions mc_of(const ExperimentConfig& cfg, Exec exec) {
    return {static_cast<std::size_t>(cfg.n_mc), cfg.seed_base, exec};
}

void write_checks_csv(std::ostream& os, const std::vector<CheckResult>& checks) {
    os << "name,estimate,se,expected,threshold,status,detail\n" << std::setprecision(10);
    for (const auto& c : checks)
        os << '"' << c.name << "\"," << c.estimate << ',' << c.se << ',' << c.expected << ',' << c.threshold << ','
           << c.status() << ",\"" << c.detail << "\"\n";
}

}  // namespace

std::vector<CheckResult> validation_battery(const ExperimentConfig& cfg, Exec exec) {
    const auto spec = cfg.make_spectrum();
    const auto plant = plant_of(cfg);
    auto mc = mc_of(cfg, exec);
    std::vector<CheckResult> out;
    auto next = [&](std::uint64_t stream) {
        McOptions m = mc;
        m.seed = derive_seed(mc.seed, stream);
        return m;
    };

    out.push_back(covariance_check(spec, plant, next(1)));
    out.push_back(covariance_vs_sigma_check(spec, next(2)));
    out.push_back(mean_check(spec, plant, next(3)));
    for (auto& c : third_moment_check(spec, plant, next(4))) out.push_back(c);

    const DftBasis basis(cfg.n);
    const auto u = basis.cosine(cfg.k0), v = basis.sine(cfg.k0);
    const std::pair<const char*, double> angles[] = {{"theta=0", 0.0}, {"theta=pi/8", std::numbers::pi / 8}, {"theta=pi/4", std::numbers::pi / 4}};
    std::uint64_t stream = 10;
    for (const auto& [label, th] : angles) {
        std::vector<double> w(u.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::cos(th) * u[i] + std::sin(th) * v[i];
        out.push_back(fourth_moment_check(spec, plant, w, label, next(stream++)));
    }
    out.push_back(fourth_moment_check(spec, plant, random_orthogonal_direction(cfg.n, cfg.k0, derive_seed(mc.seed, 20)),
                                      "w orthogonal to u, v", next(21)));

    auto [off, on] = corrector_ablation_check(spec, plant, next(22));
    off.expect_pass = cfg.epsilon > 0;
    CheckResult ti = off;
    ti.name = "translation invariance without corrector";
    ti.expected = 0.0;
    ti.threshold = 3.0;
    ti.pass = off.estimate < 3.0 * off.se;
    ti.expect_pass = !(cfg.epsilon > 0);
    ti.detail = "E[X_k0^2] = 0 requires the corrector";
    out.push_back(off);
    out.push_back(ti);
    out.push_back(on);

    auto uniformity = [&](const std::string& name, const std::optional<PlantSpec>& p, int k, bool expect,
                          std::uint64_t s) {
        const auto r = phase_uniformity_check(collect_phases(spec, p, k, next(s)));
        CheckResult c;
        c.name = name;
        c.estimate = r.distance;
        c.threshold = r.critical;
        c.pass = r.pass;
        c.expect_pass = expect;
        c.detail = "KS distance against Uniform[-pi, pi)";
        out.push_back(c);
    };
    const int other = cfg.k0 + 1 < (cfg.n + 1) / 2 ? cfg.k0 + 1 : cfg.k0 - 1;
    uniformity("phase uniformity, unmodified mode " + std::to_string(other), plant, other, true, 23);
    uniformity("phase uniformity, mode k0 at epsilon=" + std::to_string(cfg.uniformity_fail_epsilon),
               PlantSpec::sine(cfg.uniformity_fail_epsilon, cfg.k0, cfg.corrector), cfg.k0,
               !(cfg.uniformity_fail_epsilon > 0), 24);

    for (auto& c : rayleigh_check(spec, cfg.k0, next(25))) out.push_back(c);

    const auto lmc = likelihood_coeffs_mc(spec, plant, next(26));
    const auto exact = likelihood_coeffs(cfg.epsilon, spec.eigenvalue(cfg.k0), cfg.n);
    const auto doubled = likelihood_coeffs_doubled(cfg.epsilon);
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; i + j <= 4; ++j) {
            CheckResult c;
            c.name = "likelihood c" + std::to_string(i) + std::to_string(j);
            c.estimate = lmc.mean[i][j];
            c.se = lmc.se[i][j];
            c.expected = exact(i, j);
            c.threshold = 3.0;
            c.pass = std::abs(c.estimate - c.expected) <= 3.0 * std::max(c.se, 1e-15);
            out.push_back(c);
        }
    for (auto [i, j] : {std::pair{4, 0}, std::pair{0, 4}, std::pair{2, 2}}) {
        CheckResult c;
        c.name = "likelihood c" + std::to_string(i) + std::to_string(j) + " doubled form";
        c.estimate = lmc.mean[i][j];
        c.se = lmc.se[i][j];
        c.expected = doubled(i, j);
        c.threshold = 3.0;
        c.pass = std::abs(c.estimate - c.expected) <= 3.0 * c.se;
        c.expect_pass = std::abs(doubled(i, j) - exact(i, j)) <= 3.0 * c.se;
        c.detail = "2 J4(4 eps) and -c40/2";
        out.push_back(c);
    }
    return out;
}

ResultBundle run_validate_stats(const ExperimentConfig& cfg, const RunOptions& opt) {
    auto b = start_bundle(cfg, opt);
    const auto checks = validation_battery(cfg, opt.exec());
    {
        auto os = open_out(b, "validation.csv");
        write_checks_csv(os, checks);
    }
    b.add("validation.csv");
    b.battery_passed = std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.as_expected(); });
    finish_bundle(b);
    return b;
}

SgdConfig sgd_config(const ExperimentConfig& cfg) {
    SgdConfig s;
    s.variant = cfg.variant == "penalized" ? SgdVariant::penalized : SgdVariant::spherical;
    s.delta_scale = cfg.delta_scale;
    s.beta = cfg.beta;
    s.steps = cfg.budget();
    s.record_every = cfg.record_every;
    s.eta_threshold = cfg.eta;
    s.ascent = cfg.ascent;
    s.principal_modes = cfg.tracked_modes();
    const long n = cfg.n;
    const double l = std::log(static_cast<double>(n));
    s.checkpoints = {n, n * n, n * n * n, std::lround(50.0 * n * l * l)};
    return s;
}

SweepResult run_sweep(const ExperimentConfig& cfg, Exec exec) {
    const auto spec = cfg.make_spectrum();
    const auto sgd = sgd_config(cfg);
    SweepResult r;
    r.traces = run_seeds(spec, plant_of(cfg), Activation::from_name(cfg.activation), sgd, cfg.seed_base, cfg.seeds, exec);
    r.report = recovery_summary(r.traces, cfg.eta);
    return r;
}

namespace {

void write_sweep(ResultBundle& b, const SweepResult& r, const RunOptions& opt, const std::string& title,
                 bool principal) {
    {
        auto os = open_out(b, "traces.csv");
        bool header = true;
        for (const auto& t : r.traces) {
            write_trace_csv(os, t, header);
            header = false;
        }
    }
    b.add("traces.csv");
    {
        auto os = open_out(b, "recovery.csv");
        write_recovery_csv(os, r.report);
    }
    b.add("recovery.csv");
    if (opt.plots) {
        Series ph{"phase median", {}, {}}, pr{"principal median", {}, {}, true};
        for (const auto& row : r.report.rows) {
            ph.x.push_back(static_cast<double>(row.step));
            ph.y.push_back(row.phase.median);
            pr.x.push_back(static_cast<double>(row.step));
            pr.y.push_back(row.principal.median);
        }
        std::vector<Series> s{ph};
        if (principal) s.push_back(pr);
        write_line_chart(b.path("overlaps.svg"), {title, "SGD steps", "overlap norm", true}, s);
        b.add("overlaps.svg");
    }
}

}  // namespace

ResultBundle run_isotropic_sweep(const ExperimentConfig& cfg, const RunOptions& opt) {
    if (cfg.spectrum.kind != "isotropic") throw ConfigError("isotropic_sweep: spectrum must be isotropic");
    auto b = start_bundle(cfg, opt);
    const auto r = run_sweep(cfg, opt.exec());
    write_sweep(b, r, opt, "Isotropic spectrum", false);
    {
        auto os = open_out(b, "budgets.csv");
        os << "budget,step,phase_median,phase_q25,phase_q75,frac_recovered\n" << std::setprecision(10);
        const long n = cfg.n;
        const std::pair<const char*, long> budgets[] = {{"N", n}, {"N^2", n * n}, {"cN^3", cfg.budget()}};
        for (const auto& [name, step] : budgets)
            for (const auto& row : r.report.rows)
                if (row.step == step)
                    os << name << ',' << step << ',' << row.phase.median << ',' << row.phase.q25 << ',' << row.phase.q75
                       << ',' << row.frac_recovered << "\n";
    }
    b.add("budgets.csv");
    finish_bundle(b);
    return b;
}

OrderingDiagnostics ordering_diagnostics(const RecoveryReport& rep, double rise_level, double cross_level,
                                         double decay_fraction) {
    OrderingDiagnostics d;
    for (const auto& row : rep.rows) {
        if (d.principal_rise_step < 0 && row.principal.median > rise_level) d.principal_rise_step = row.step;
        if (d.phase_cross_step < 0 && row.phase.median > cross_level) d.phase_cross_step = row.step;
    }
    // Peak of the principal median up to the phase crossing, or over the whole run if it never crosses.
    for (const auto& row : rep.rows) {
        if (d.phase_cross_step >= 0 && row.step > d.phase_cross_step) break;
        if (row.principal.median > d.principal_peak) {
            d.principal_peak = row.principal.median;
            d.principal_peak_step = row.step;
        }
    }
    if (!rep.rows.empty()) d.principal_final = rep.rows.back().principal.median;
    d.peak_before_cross = d.phase_cross_step >= 0 && d.principal_peak_step >= 0 && d.principal_peak_step < d.phase_cross_step;
    d.decays_after = d.phase_cross_step >= 0 && d.principal_final < decay_fraction * d.principal_peak;
    return d;
}

ResultBundle run_powerlaw_sweep(const ExperimentConfig& cfg, const RunOptions& opt) {
    if (cfg.spectrum.kind == "isotropic") throw ConfigError("powerlaw_sweep: spectrum must not be isotropic");
    auto b = start_bundle(cfg, opt);
    const auto r = run_sweep(cfg, opt.exec());
    write_sweep(b, r, opt, "Power-law spectrum", true);
    const auto d = ordering_diagnostics(r.report);
    {
        auto os = open_out(b, "ordering.csv");
        os << "principal_rise_step,principal_peak_step,principal_peak,phase_cross_step,principal_final,"
              "peak_before_cross,decays_after\n"
           << std::setprecision(10) << d.principal_rise_step << ',' << d.principal_peak_step << ',' << d.principal_peak
           << ',' << d.phase_cross_step << ',' << d.principal_final << ',' << d.peak_before_cross << ','
           << d.decays_after << "\n";
    }
    b.add("ordering.csv");
    finish_bundle(b);
    return b;
}

ResultBundle run_landscape(const ExperimentConfig& cfg, const RunOptions& opt) {
    auto b = start_bundle(cfg, opt);
    const auto sigma = Activation::from_name(cfg.activation);
    const auto land = empirical_landscape(cfg.make_spectrum(), plant_of(cfg), sigma, cfg.grid,
                                          static_cast<std::size_t>(cfg.n_mc), cfg.seed_base, opt.exec());
    {
        auto os = open_out(b, "landscape.csv");
        write_landscape_csv(os, land);
    }
    b.add("landscape.csv");
    {
        auto os = open_out(b, "minima.csv");
        os << "expected_theta,alpha_u,alpha_v,loss,cell_offset\n" << std::setprecision(10);
        for (const auto& m : sector_minima(land))
            os << m.expected_theta << ',' << m.alpha_u << ',' << m.alpha_v << ',' << m.loss << ',' << m.cell_offset << "\n";
    }
    b.add("minima.csv");
    {
        const auto sym = four_fold_symmetry(land, sigma, opt.exec());
        auto os = open_out(b, "symmetry.csv");
        os << "pairs,fraction_within_3se,max_z,family_critical_z\n" << std::setprecision(10) << sym.pairs << ','
           << sym.fraction_within << ',' << sym.max_z << ',' << sym.family_critical << "\n";
    }
    b.add("symmetry.csv");
    if (opt.plots) {
        std::vector<double> vals;
        for (const auto& c : land.cells) vals.push_back(c.loss_mean);
        write_heatmap(b.path("landscape.svg"), "Empirical loss over (alpha_u, alpha_v)", cfg.grid, cfg.grid, vals, -1, 1,
                      -1, 1);
        b.add("landscape.svg");
    }
    finish_bundle(b);
    return b;
}

namespace {

struct OdeSetup {
    DriftFn drift;
    std::size_t modes = 0;
};

OdeSetup ode_setup(const ExperimentConfig& cfg) {
    const auto spec = cfg.make_spectrum();
    const auto sigma = Activation::from_name(cfg.activation);
    const auto hc = hermite_coeffs(sigma, 6);
    const auto modes = cfg.tracked_modes();
    const double n = cfg.n;
    ExtensiveParams p;
    p.c4 = hc[4];
    p.c6 = hc[6];
    p.like = likelihood_coeffs(cfg.epsilon, spec.eigenvalue(cfg.k0), cfg.n);
    p.beta = cfg.beta;
    if (cfg.regime == "beta_only") {
        p.a_k0 = 0;
        p.gamma_m.assign(modes.size(), 0.0);
    } else {
        std::vector<double> b, e;
        for (int m : modes) {
            b.push_back(spec.eigenvalue(m) / n);
            e.push_back(1.0);
        }
        const double a0 = spec.eigenvalue(cfg.k0) / std::sqrt(n);
        if (cfg.regime == "near_isotropic") {
            p = ExtensiveParams::from_scalings(a0, 0.0, b, std::vector<double>(b.size(), 0.0), p.c4, p.c6, p.like, p.beta);
        } else {
            p.a_k0 = a0;
            p.gamma_m = b;
        }
    }
    OdeSetup s;
    s.modes = modes.size();
    s.drift = [p, k = modes.size()](const std::vector<double>& m) {
        return rescaled_drift(OverlapState::unflatten(m, k), p).flatten();
    };
    return s;
}

}  // namespace

ResultBundle run_ode_compare(const ExperimentConfig& cfg, const RunOptions& opt) {
    auto b = start_bundle(cfg, opt);
    const auto sweep = run_sweep(cfg, opt.exec());
    const double delta = sgd_config(cfg).delta(cfg.n);
    const double root_n = std::sqrt(static_cast<double>(cfg.n));
    const auto setup = ode_setup(cfg);

    // Empirical medians of |m| per snapshot.
    const auto& steps = sweep.traces.front().steps;
    std::vector<std::vector<double>> med(steps.size());
    for (std::size_t j = 0; j < steps.size(); ++j) {
        const std::size_t d = 2 * setup.modes + 3;
        for (std::size_t c = 0; c < d; ++c) {
            std::vector<double> vals;
            for (const auto& t : sweep.traces) {
                const auto f = t.stats[j].flatten();
                vals.push_back(c + 1 == d ? std::abs(f[c]) : root_n * std::abs(f[c]));
            }
            med[j].push_back(quantiles(vals).median);
        }
    }

    // ODE from the empirical initial medians, integrated segment by segment to the snapshot times.
    std::vector<std::vector<double>> ode(steps.size());
    std::vector<double> m = med.front();
    ode[0] = m;
    bool blew_up = false;
    for (std::size_t j = 1; j < steps.size(); ++j) {
        if (!blew_up) {
            const double span = static_cast<double>(steps[j] - steps[j - 1]) * delta;
            const long k = std::max(1L, static_cast<long>(std::ceil(span / cfg.dt)));
            try {
                m = integrate_ode(setup.drift, m, span / static_cast<double>(k), k, k).states.back();
            } catch (const Blowup&) {
                blew_up = true;
            }
        }
        ode[j] = blew_up ? std::vector<double>(m.size(), std::numeric_limits<double>::quiet_NaN()) : m;
    }

    {
        auto os = open_out(b, "ode_compare.csv");
        os << "step,t,emp_m_u,emp_m_v,emp_m_principal,emp_omega,ode_m_u,ode_m_v,ode_m_principal,ode_omega\n"
           << std::setprecision(10);
        auto principal = [&](const std::vector<double>& f) {
            double s = 0;
            for (std::size_t i = 2; i + 1 < f.size(); ++i) s += f[i] * f[i];
            return std::sqrt(s);
        };
        for (std::size_t j = 0; j < steps.size(); ++j) {
            const auto& e = med[j];
            const auto& o = ode[j];
            os << steps[j] << ',' << static_cast<double>(steps[j]) * delta << ',' << e[0] << ',' << e[1] << ','
               << principal(e) << ',' << e.back() << ',' << std::abs(o[0]) << ',' << std::abs(o[1]) << ','
               << principal(o) << ',' << std::abs(o.back()) << "\n";
        }
    }
    b.add("ode_compare.csv");
    if (opt.plots) {
        Series eu{"SGD |m_u| median", {}, {}}, ou{"ODE |m_u|", {}, {}, true}, ew{"SGD omega median", {}, {}},
            ow{"ODE omega", {}, {}, true};
        for (std::size_t j = 1; j < steps.size(); ++j) {
            const double t = static_cast<double>(steps[j]) * delta;
            eu.x.push_back(t), eu.y.push_back(med[j][0]);
            ou.x.push_back(t), ou.y.push_back(std::abs(ode[j][0]));
            ew.x.push_back(t), ew.y.push_back(med[j].back());
            ow.x.push_back(t), ow.y.push_back(std::abs(ode[j].back()));
        }
        write_line_chart(b.path("ode_compare.svg"), {"Rescaled statistics: SGD vs ODE", "t = steps * delta", "m", true},
                         {eu, ou, ew, ow});
        b.add("ode_compare.svg");
    }
    finish_bundle(b);
    return b;
}

Corpus synthetic_phase_corpus(const ExperimentConfig& cfg, std::uint64_t seed) {
    RngStream rng(seed);
    const auto spec = power_law_spectrum(cfg.synth_length, cfg.synth_exponent);
    return {{"planted", "baseline"},
            phase_corpus(cfg.synth_per_class, spec, PlantSpec::sine(cfg.epsilon, cfg.k0, cfg.corrector), rng)};
}

namespace {

struct LoadedCorpus {
    Corpus corpus;
    std::string bytes;  // raw input files, hashed with the config
};

LoadedCorpus load_corpus(const ExperimentConfig& cfg) {
    if (cfg.corpus == "synthetic") return {synthetic_phase_corpus(cfg, derive_seed(cfg.seed_base, 1000)), {}};
    const fs::path root = cfg.corpus;
    LoadedCorpus lc{read_corpus(root), {}};
    std::vector<fs::path> files{root / "manifest.txt"};
    for (const auto& name : lc.corpus.class_names)
        for (const auto& e : fs::directory_iterator(root / name))
            if (e.path().extension() == ".pgm") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        std::ifstream is(f, std::ios::binary);
        lc.bytes += f.lexically_relative(root).string() + '\n';
        lc.bytes.append(std::istreambuf_iterator<char>(is), {});
    }
    return lc;
}

constexpr DatasetVariant all_variants[] = {DatasetVariant::original, DatasetVariant::flattened,
                                           DatasetVariant::transplanted};

}  // namespace

ResultBundle run_surgery(const ExperimentConfig& cfg, const RunOptions& opt) {
    const auto lc = load_corpus(cfg);
    auto b = start_bundle(cfg, opt, lc.bytes);
    std::vector<Series> curves;
    for (auto v : all_variants) {
        const auto c = make_variant(lc.corpus, v, derive_seed(cfg.seed_base, 2000));
        write_corpus(b.path(variant_name(v)), c);
        b.add(fs::path(variant_name(v)) / "manifest.txt");
        const auto prof = radial_spectrum(c.patches);
        const auto csv = std::string("spectrum_") + variant_name(v) + ".csv";
        {
            auto os = open_out(b, csv);
            write_profile_csv(os, prof);
        }
        b.add(csv);
        Series s{variant_name(v), {}, {}};
        for (std::size_t i = 0; i < prof.bins.size(); ++i)
            if (prof.bins[i] > 0) s.x.push_back(prof.bins[i]), s.y.push_back(std::log10(prof.mean_sq_amplitude[i]));
        curves.push_back(s);
    }
    if (opt.plots) {
        write_line_chart(b.path("spectrum.svg"), {"Radial spectrum", "|k|", "log10 mean |X|^2", true}, curves);
        b.add("spectrum.svg");
    }
    finish_bundle(b);
    return b;
}

TTest one_sample_t(const std::vector<double>& v, bool one_sided) {
    TTest r;
    r.n = static_cast<int>(v.size());
    if (r.n < 2) return r;
    MeanAccumulator acc;
    for (double x : v) acc.add(x);
    r.mean = acc.mean();
    r.se = acc.sem();
    if (r.se <= 0) {
        r.t = r.mean == 0 ? 0 : std::copysign(INFINITY, r.mean);
        r.p = r.mean > 0 || (!one_sided && r.mean != 0) ? 0.0 : 1.0;
        return r;
    }
    r.t = r.mean / r.se;
    boost::math::students_t dist(r.n - 1);
    r.p = one_sided ? boost::math::cdf(boost::math::complement(dist, r.t))
                    : 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
    return r;
}

SignatureReport analyze_signature(std::map<DatasetVariant, std::vector<TrainReport>> runs) {
    SignatureReport s;
    s.runs = std::move(runs);
    const auto& orig = s.runs.at(DatasetVariant::original);
    std::vector<double> level;
    for (const auto& rep : orig) {
        const long total = rep.records.back().step;
        MeanAccumulator first, last;
        double best = INFINITY;
        for (const auto& r : rep.records) {
            const double gap = r.eval.swapped.loss - r.eval.original.loss;
            if (10 * r.step <= total) first.add(gap);
            if (10 * r.step >= 9 * total) last.add(gap);
            best = std::min(best, r.eval.original.loss);
        }
        s.gap_first.push_back(first.mean());
        s.gap_last.push_back(last.mean());
        level.push_back(1.0 - 0.5 * (1.0 - best));
    }
    s.first = one_sample_t(s.gap_first, false);
    s.last = one_sample_t(s.gap_last, true);
    for (const auto& [v, reps] : s.runs) {
        std::vector<double> steps;
        for (std::size_t i = 0; i < reps.size(); ++i) {
            long hit = reps[i].records.back().step + 1;
            for (const auto& r : reps[i].records)
                if (r.eval.original.loss <= level.at(i)) {
                    hit = r.step;
                    break;
                }
            s.onset[v].push_back(hit);
            steps.push_back(static_cast<double>(hit));
        }
        s.onset_median[v] = quantiles(steps).median;
    }
    return s;
}

SignatureReport train_variants(const Corpus& corpus, const ExperimentConfig& cfg, Exec exec) {
    TrainOptions topt;
    topt.lr = cfg.lr;
    topt.epochs = cfg.epochs;
    topt.hidden = cfg.hidden;
    topt.act = Activation::from_name(cfg.hidden_activation);
    const std::size_t n_train = static_cast<std::size_t>(
        std::lround(static_cast<double>(corpus.patches.size()) * (1.0 - topt.test_fraction)));
    topt.eval_every = std::max<long>(1, static_cast<long>(n_train) * cfg.epochs / cfg.eval_points);

    std::vector<Corpus> variants;
    for (auto v : all_variants) variants.push_back(make_variant(corpus, v, derive_seed(cfg.seed_base, 2000)));
    const std::size_t seeds = static_cast<std::size_t>(cfg.seeds);
    std::vector<TrainReport> reps(std::size(all_variants) * seeds);
    parallel_for(reps.size(), exec, [&](std::size_t j) {
        reps[j] = train_seed(variants[j / seeds].patches, topt, derive_seed(cfg.seed_base, 3000 + j % seeds));
    });
    std::map<DatasetVariant, std::vector<TrainReport>> runs;
    for (std::size_t j = 0; j < reps.size(); ++j) runs[all_variants[j / seeds]].push_back(std::move(reps[j]));
    return analyze_signature(std::move(runs));
}

ResultBundle run_texture_train(const ExperimentConfig& cfg, const RunOptions& opt) {
    const auto lc = load_corpus(cfg);
    auto b = start_bundle(cfg, opt, lc.bytes);
    const auto sig = train_variants(lc.corpus, cfg, opt.exec());
    std::vector<Series> curves;
    for (const auto& [v, reps] : sig.runs) {
        const auto csv = std::string("train_") + variant_name(v) + ".csv";
        {
            auto os = open_out(b, csv);
            bool header = true;
            for (const auto& r : reps) {
                write_train_csv(os, r, header);
                header = false;
            }
        }
        b.add(csv);
        Series o{std::string(variant_name(v)), {}, {}}, w{std::string(variant_name(v)) + " swapped", {}, {}, true};
        for (std::size_t j = 0; j < reps.front().records.size(); ++j) {
            std::vector<double> lo, ls;
            for (const auto& r : reps) lo.push_back(r.records[j].eval.original.loss), ls.push_back(r.records[j].eval.swapped.loss);
            const double step = static_cast<double>(reps.front().records[j].step);
            o.x.push_back(step), o.y.push_back(quantiles(lo).median);
            w.x.push_back(step), w.y.push_back(quantiles(ls).median);
        }
        curves.push_back(o);
        curves.push_back(w);
    }
    {
        auto os = open_out(b, "signature.csv");
        os << "quantity,value\n" << std::setprecision(10);
        os << "gap_first_mean," << sig.first.mean << "\ngap_first_p_two_sided," << sig.first.p << "\ngap_last_mean,"
           << sig.last.mean << "\ngap_last_p_one_sided," << sig.last.p << "\n";
        for (const auto& [v, med] : sig.onset_median) os << "onset_median_" << variant_name(v) << ',' << med << "\n";
    }
    b.add("signature.csv");
    if (opt.plots) {
        write_line_chart(b.path("test_loss.svg"), {"Median test loss", "SGD steps", "MSE", false}, curves);
        b.add("test_loss.svg");
    }
    finish_bundle(b);
    return b;
}

ResultBundle run_experiment(ExperimentConfig cfg, const RunOptions& opt) {
    if (opt.seed_base) cfg.seed_base = *opt.seed_base;
    if (opt.jobs > 0) set_thread_count(opt.jobs);
    cfg.validate();
    switch (cfg.kind) {
        case ExperimentKind::validate_stats: return run_validate_stats(cfg, opt);
        case ExperimentKind::isotropic_sweep: return run_isotropic_sweep(cfg, opt);
        case ExperimentKind::powerlaw_sweep: return run_powerlaw_sweep(cfg, opt);
        case ExperimentKind::landscape: return run_landscape(cfg, opt);
        case ExperimentKind::ode_compare: return run_ode_compare(cfg, opt);
        case ExperimentKind::surgery: return run_surgery(cfg, opt);
        case ExperimentKind::texture_train: return run_texture_train(cfg, opt);
    }
    throw ConfigError("unknown experiment kind");
}

}  // namespace phaselab
