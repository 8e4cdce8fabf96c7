// Acceptance suite: one PASS/FAIL line per criterion, with the measured numbers underneath.

#include "phaselab/experiments.hpp"
#include "phaselab/landscape.hpp"
#include "phaselab/special_math.hpp"
#include "phaselab/theory.hpp"

#include <CLI11.hpp>
#include <boost/math/quadrature/trapezoidal.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace phaselab;

namespace {

struct Outcome {
    bool pass = false;
    std::string summary;
};

void detail(const char* fmt, auto... args) {
    std::printf("    ");
    std::printf(fmt, args...);
    std::printf("\n");
    std::fflush(stdout);
}

const RecoveryRow* row_at(const RecoveryReport& rep, long step) {
    for (const auto& r : rep.rows)
        if (r.step == step) return &r;
    return nullptr;
}

Outcome ac1() {
    const auto cfg = default_config(ExperimentKind::isotropic_sweep);
    const long n = cfg.n;
    const auto sweep = run_sweep(cfg, Exec::parallel);
    const auto* quad = row_at(sweep.report, n * n);
    const auto* cubic = row_at(sweep.report, cfg.budget());
    if (!quad || !cubic) return {false, "snapshot schedule lacks the N^2 or 8N^3 step"};
    detail("N=%ld seeds=%d delta=%.3g budget=%ld", n, cfg.seeds, sgd_config(cfg).delta(cfg.n), cfg.budget());
    for (long step : {n, n * n, n * n * n, 2 * n * n * n, 4 * n * n * n, cfg.budget()})
        if (const auto* r = row_at(sweep.report, step))
            detail("step %9ld: phase median %.4f (q25 %.4f, q75 %.4f), fraction >= eta %.3f", step, r->phase.median,
                   r->phase.q25, r->phase.q75, r->frac_recovered);
    const bool a = quad->phase.median < 0.2, b = cubic->phase.median > 0.5;
    detail("(a) median at N^2 < 0.2: %s; (b) median at 8 N^3 > 0.5: %s", a ? "yes" : "no", b ? "yes" : "no");
    char buf[160];
    std::snprintf(buf, sizeof buf, "median phase norm %.3f at N^2, %.3f at 8N^3", quad->phase.median, cubic->phase.median);
    return {a && b, buf};
}

Outcome ac2() {
    const auto cfg = default_config(ExperimentKind::powerlaw_sweep);
    const double n = cfg.n, l = std::log(n);
    const long early = std::lround(50 * n * l * l), cubic = std::lround(n * n * n);
    const auto sweep = run_sweep(cfg, Exec::parallel);
    const auto& rep = sweep.report;
    detail("N=%d seeds=%d activation=%s delta=%.3g budget=%ld", cfg.n, cfg.seeds, cfg.activation.c_str(),
           sgd_config(cfg).delta(cfg.n), cfg.budget());
    double best_principal = 0, best_phase = 0;
    for (const auto& r : rep.rows) {
        if (r.step <= early) best_principal = std::max(best_principal, r.principal.median);
        if (r.step <= cubic) best_phase = std::max(best_phase, r.phase.median);
    }
    for (std::size_t i = 0; i < rep.rows.size(); i += 8)
        detail("step %9ld: principal median %.4f, phase median %.4f", rep.rows[i].step, rep.rows[i].principal.median,
               rep.rows[i].phase.median);
    const auto d = ordering_diagnostics(rep);
    detail("principal rise step %ld, peak %.4f at %ld, phase crosses 0.5 at %ld, final principal %.4f",
           d.principal_rise_step, d.principal_peak, d.principal_peak_step, d.phase_cross_step, d.principal_final);
    const bool a = best_principal > 0.3, b = best_phase > 0.5, c = d.peak_before_cross && d.decays_after;
    detail("(a) principal > 0.3 by %ld steps: %s (max median %.4f)", early, a ? "yes" : "no", best_principal);
    detail("(b) phase > 0.5 by N^3 = %ld steps: %s (max median %.4f)", cubic, b ? "yes" : "no", best_phase);
    detail("(c) principal peaks before the phase crossing and decays below 0.75 of the peak: %s", c ? "yes" : "no");
    char buf[160];
    std::snprintf(buf, sizeof buf, "(a) %s, (b) %s, (c) %s", a ? "pass" : "fail", b ? "pass" : "fail", c ? "pass" : "fail");
    return {a && b && c, buf};
}

Outcome ac3() {
    auto cfg = default_config(ExperimentKind::validate_stats);
    cfg.n_mc = 1'000'000;
    const auto checks = validation_battery(cfg, Exec::parallel);
    int used = 0, ok = 0;
    for (const auto& c : checks) {
        if (c.name.rfind("likelihood", 0) == 0) continue;  // reported under AC-6
        ++used;
        ok += c.as_expected();
        detail("%-55s estimate %-12.6g se %-10.3g expected %-10.6g %s", c.name.c_str(), c.estimate, c.se, c.expected,
               c.status().c_str());
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d/%d battery entries as expected at 1e6 samples", ok, used);
    return {ok == used, buf};
}

Outcome ac4() {
    auto cfg = default_config(ExperimentKind::landscape);
    const auto sigma = Activation::from_name(cfg.activation);
    const auto land = empirical_landscape(cfg.make_spectrum(), PlantSpec::sine(cfg.epsilon, cfg.k0, cfg.corrector), sigma,
                                          cfg.grid, static_cast<std::size_t>(cfg.n_mc), cfg.seed_base);
    bool minima_ok = true;
    for (const auto& m : sector_minima(land)) {
        detail("theta %.4f: minimum at (%.3f, %.3f), loss %.4f, %d cells from the unit circle point",
               m.expected_theta, m.alpha_u, m.alpha_v, m.loss, m.cell_offset);
        minima_ok = minima_ok && m.cell_offset <= 1;
    }
    const auto sym = four_fold_symmetry(land, sigma);
    detail("symmetry pairs %zu, fraction with |z| <= 3: %.4f (pairs share one pool, so their z are correlated)",
           sym.pairs, sym.fraction_within);
    detail("max |z| %.3f against the 1%% family-wise Bonferroni bound %.3f", sym.max_z, sym.family_critical);
    const bool sym_ok = sym.family_pass();
    char buf[160];
    std::snprintf(buf, sizeof buf, "four minima within one cell: %s; max symmetric-pair |z| %.2f <= %.2f: %s",
                  minima_ok ? "yes" : "no", sym.max_z, sym.family_critical, sym_ok ? "yes" : "no");
    return {minima_ok && sym_ok, buf};
}

Outcome ac5() {
    // (i) Drift vs central differences of the Monte Carlo population loss, with common random numbers.
    const int n = 64, k0 = 6;
    const auto spec = CirculantSpectrum::identity(n);
    const auto plant = PlantSpec::sine(1.2, k0);
    const auto sigma = Activation::hermite4();
    const auto perp = random_orthogonal_direction(n, k0, 101);
    const auto pool = draw_projection_pool(spec, plant, perp, 1'000'000, 102, Exec::parallel);
    DriftParams p;
    p.like = likelihood_coeffs(1.2, 1.0, n);
    bool fd_ok = true;
    const double h = 0.01;
    for (auto [au, av] : {std::pair{0.6, 0.1}, std::pair{0.5, 0.5}, std::pair{0.2, 0.7}}) {
        const double om = std::sqrt(1 - au * au - av * av);
        OverlapState s;
        s.alpha_u = au;
        s.alpha_v = av;
        s.omega_perp = om;
        const auto drift = population_drift(s, p);
        for (int comp = 0; comp < 2; ++comp) {
            MeanAccumulator acc;
            for (std::size_t i = 0; i < pool.size(); ++i) {
                const double base = au * pool.a[i] + av * pool.b[i] + om * pool.c[i];
                const double dir = comp == 0 ? pool.a[i] : pool.b[i];
                acc.add(-pool.y[i] * (sigma(base + h * dir) - sigma(base - h * dir)) / (2 * h));
            }
            const double a = comp == 0 ? drift.alpha_u : drift.alpha_v;
            const double tol = std::max(3 * acc.sem(), 0.25 * std::abs(a));
            const bool ok = std::abs(acc.mean() - a) <= tol;
            fd_ok = fd_ok && ok;
            detail("(%.1f, %.1f) d/dalpha_%c: drift %.5f, MC difference %.5f +- %.5f, tolerance %.5f %s", au, av,
                   comp == 0 ? 'u' : 'v', a, acc.mean(), acc.sem(), tol, ok ? "ok" : "MISMATCH");
        }
    }

    // (ii) Rescaled drift below the extensive scalings vanishes identically.
    const std::vector<double> b{2.0, 0.5, 1.5}, pe{0.9, 0.5, 0.99};
    const auto hc = hermite_coeffs(Activation::logcosh(), 6);
    const auto near = ExtensiveParams::from_scalings(1.0, 0.4, b, pe, hc[4], hc[6], p.like, 0.0);
    RngStream rng(103);
    double worst = 0;
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> m(2 * 3 + 3);
        for (auto& v : m) v = 3 * rng.gaussian();
        for (double v : rescaled_drift(OverlapState::unflatten(m, 3), near).flatten()) worst = std::max(worst, std::abs(v));
    }
    detail("near-isotropic rescaled drift: max |A_m| over 1000 random states = %g", worst);

    // (iii) RK4 step halving on the extensive system.
    ExtensiveParams ext;
    ext.a_k0 = 1.0;
    ext.gamma_m = {1.0, 0.5};
    ext.c4 = hc[4];
    ext.c6 = hc[6];
    ext.like = p.like;
    ext.beta = 0.1;
    const DriftFn f = [&](const std::vector<double>& m) { return rescaled_drift(OverlapState::unflatten(m, 2), ext).flatten(); };
    const std::vector<double> m0{1.5, 0.8, 0.6, -0.4, 0.3, 0.2, 1.0};
    const auto coarse = integrate_ode(f, m0, 0.01, 500, 500).states.back();
    const auto fine = integrate_ode(f, m0, 0.005, 1000, 1000).states.back();
    double halving = 0;
    for (std::size_t i = 0; i < m0.size(); ++i) halving = std::max(halving, std::abs(coarse[i] - fine[i]));
    detail("RK4 endpoint change under step halving (t = 5): %.3g", halving);

    char buf[160];
    std::snprintf(buf, sizeof buf, "finite differences %s, near-isotropic drift max %g, step-halving drift %.2g",
                  fd_ok ? "agree" : "disagree", worst, halving);
    return {fd_ok && worst == 0.0 && halving < 1e-6, buf};
}

Outcome ac6() {
    const int n = 64;
    const auto spec = CirculantSpectrum::identity(n);
    const auto plant = PlantSpec::sine(1.2, 6);
    const auto mc = likelihood_coeffs_mc(spec, plant, {1'000'000, 104, Exec::parallel});
    const auto exact = likelihood_coeffs(1.2, 1.0, n);
    const auto doubled = likelihood_coeffs_doubled(1.2);
    bool ok = true;
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; i + j <= 4; ++j) {
            const double z = mc.se[i][j] > 0 ? std::abs(mc.mean[i][j] - exact(i, j)) / mc.se[i][j] : 0.0;
            const bool pass = z <= 3.0;
            ok = ok && pass;
            detail("c%d%d: MC %9.5f +- %.5f, oracle %9.5f, |z| %.2f %s", i, j, mc.mean[i][j], mc.se[i][j], exact(i, j), z,
                   pass ? "ok" : "MISMATCH");
        }
    for (auto [i, j] : {std::pair{4, 0}, std::pair{0, 4}, std::pair{2, 2}}) {
        const double z = std::abs(mc.mean[i][j] - doubled(i, j)) / mc.se[i][j];
        detail("doubled c%d%d = %.5f (2 J4 form): |z| %.1f %s", i, j, doubled(i, j), z, z <= 3 ? "PASS" : "FAIL-as-expected");
    }
    // Isotropic h4 loss along u: 1 - J4/2 from the quartic term with coefficient c4 J4 / 48.
    const double j4 = bessel_j(4, 4.8);
    DriftParams p;
    p.like = exact;
    OverlapState s;
    s.alpha_u = 1;
    const double loss_u = population_loss_leading(s, p);
    detail("isotropic h4 loss along u: %.6f; 1 - c4 J4/48 = %.6f; 1 - c4 J4/24 = %.6f", loss_u, 1 - 24 * j4 / 48,
           1 - 24 * j4 / 24);
    char buf[160];
    std::snprintf(buf, sizeof buf, "all c_ij (i+j <= 4) within 3 SE of the oracle: %s; constant resolved as 1/48",
                  ok ? "yes" : "no");
    return {ok && std::abs(loss_u - (1 - j4 / 2)) < 1e-12, buf};
}

Outcome ac7() {
    const auto cfg = default_config(ExperimentKind::texture_train);
    const auto corpus = synthetic_phase_corpus(cfg, derive_seed(cfg.seed_base, 1000));
    const auto sig = train_variants(corpus, cfg, Exec::parallel);
    detail("N=%d, %d per class, exponent %.1f, eps %.1f, k0 %d, %d seeds, %d epochs, lr %.3g, %s hidden x %d",
           cfg.synth_length, cfg.synth_per_class, cfg.synth_exponent, cfg.epsilon, cfg.k0, cfg.seeds, cfg.epochs, cfg.lr,
           cfg.hidden_activation.c_str(), cfg.hidden);
    detail("swapped-minus-original gap, first decile: mean %.5f, t %.3f, two-sided p %.4f", sig.first.mean, sig.first.t,
           sig.first.p);
    detail("swapped-minus-original gap, last decile:  mean %.5f, t %.3f, one-sided p %.4g", sig.last.mean, sig.last.t,
           sig.last.p);
    for (const auto& [v, med] : sig.onset_median) detail("50%% loss-drop step, median over seeds, %s: %.0f", variant_name(v), med);
    const double o = sig.onset_median.at(DatasetVariant::original), f = sig.onset_median.at(DatasetVariant::flattened),
                 t = sig.onset_median.at(DatasetVariant::transplanted);
    const bool a = sig.first.p > 0.05 && sig.last.p < 0.05, b = f > o && f > t;
    char buf[160];
    std::snprintf(buf, sizeof buf, "(a) gap first p=%.3f last p=%.2g: %s; (b) onset orig %.0f transpl %.0f flat %.0f: %s",
                  sig.first.p, sig.last.p, a ? "pass" : "fail", o, t, f, b ? "pass" : "fail");
    return {a && b, buf};
}

Outcome ac8() {
    int failures = 0;
    auto check = [&](bool ok, const char* what, double value) {
        if (!ok) ++failures;
        detail("%-45s %-12.3g %s", what, value, ok ? "ok" : "FAILED");
    };
    RngStream rng(105);
    // Fourier round trips on power-of-two and other sizes.
    double rt = 0;
    for (int n : {7, 15, 60, 64, 128}) {
        std::vector<double> x(static_cast<std::size_t>(n));
        for (auto& v : x) v = rng.gaussian();
        const auto y = idft(dft(x));
        for (int i = 0; i < n; ++i) rt = std::max(rt, std::abs(x[i] - y[i]));
    }
    check(rt < 1e-10, "Fourier round trip max error", rt);
    // Basis orthonormality.
    double ortho = 0;
    for (int n : {15, 64}) {
        const DftBasis basis(n);
        const auto vs = basis.all_vectors();
        for (std::size_t i = 0; i < vs.size(); ++i)
            for (std::size_t j = 0; j < vs.size(); ++j) {
                double d = 0;
                for (int t = 0; t < n; ++t) d += vs[i][t] * vs[j][t];
                ortho = std::max(ortho, std::abs(d - (i == j)));
            }
    }
    check(ortho < 1e-10, "basis orthonormality max defect", ortho);
    // Circulant diagonalization.
    {
        const int n = 32;
        std::vector<double> row(n);
        for (int t = 0; t < n; ++t) row[t] = std::exp(-std::min(t, n - t) / 3.0);
        const auto spec = CirculantSpectrum::from_first_row(row);
        const auto dense = spec.dense();
        const DftBasis b(n);
        double err = 0;
        for (int k = 1; k <= b.max_frequency(); ++k)
            for (auto vec : {b.cosine(k), b.sine(k)})
                for (int i = 0; i < n; ++i) {
                    double s = 0;
                    for (int j = 0; j < n; ++j) s += dense[static_cast<std::size_t>(i) * n + j] * vec[j];
                    err = std::max(err, std::abs(s - spec.eigenvalue(k) * vec[i]));
                }
        check(err < 1e-10, "circulant diagonalization max residual", err);
    }
    // Hermite orthogonality by Monte Carlo.
    {
        const int m = 500000;
        double s[5][5] = {}, s2[5][5] = {};
        for (int i = 0; i < m; ++i) {
            const auto hz = hermite_all(4, rng.gaussian());
            for (int j = 0; j <= 4; ++j)
                for (int k = 0; k <= 4; ++k) s[j][k] += hz[j] * hz[k], s2[j][k] += hz[j] * hz[j] * hz[k] * hz[k];
        }
        double zmax = 0;
        const double fact[] = {1, 1, 2, 6, 24};
        for (int j = 0; j <= 4; ++j)
            for (int k = 0; k <= 4; ++k) {
                const double mean = s[j][k] / m, se = std::sqrt((s2[j][k] / m - mean * mean) / m);
                if (se > 0) zmax = std::max(zmax, std::abs(mean - (j == k ? fact[k] : 0.0)) / se);
            }
        check(zmax < 4.0, "Hermite orthogonality MC max |z|", zmax);
    }
    // Bessel series against the integral definition.
    {
        double err = 0;
        for (int mo = 0; mo <= 6; ++mo)
            for (double z = 0; z <= 10.0; z += 0.5) {
                auto f = [&](double t) { return std::cos(mo * t - z * std::sin(t)); };
                const double integral =
                    boost::math::quadrature::trapezoidal(f, 0.0, 2 * std::numbers::pi, 1e-14) / (2 * std::numbers::pi);
                err = std::max(err, std::abs(bessel_j(mo, z) - integral));
            }
        check(err < 1e-10, "Bessel series vs integral max error", err);
    }
    // Spherical step norm preservation.
    {
        const int n = 64;
        std::vector<double> w(n, 1.0 / 8.0), x(n);
        double drift = 0;
        const auto a = Activation::hermite4();
        for (int s = 0; s < 10000; ++s) {
            for (auto& v : x) v = rng.gaussian();
            spherical_step(w, x, rng.coin() ? 1 : -1, a, 1e-3 / n);
            double nn = 0;
            for (double v : w) nn += v * v;
            drift = std::max(drift, std::abs(std::sqrt(nn) - 1));
        }
        check(drift < 1e-12, "spherical step norm drift", drift);
    }
    // Gradients against finite differences.
    {
        const int n = 16;
        std::vector<double> w(n), x(n);
        for (auto& v : w) v = rng.gaussian() / 4;
        for (auto& v : x) v = rng.gaussian();
        const auto a = Activation::logcosh();
        const auto g = pointwise_gradient(w, x, 1, a);
        double err = 0;
        for (int i = 0; i < n; ++i) {
            auto loss = [&](double d) {
                double pr = 0;
                for (int j = 0; j < n; ++j) pr += (w[j] + (j == i ? d : 0)) * x[j];
                return 1 - a(pr);
            };
            err = std::max(err, std::abs(g[i] - (loss(1e-6) - loss(-1e-6)) / 2e-6));
        }
        check(err < 1e-6, "SGD gradient vs finite differences", err);

        auto net = TwoLayerNet::random(n, 8, Activation::from_name("tanh"), rng);
        const auto p0 = net.parameters();
        const auto gn = mse_gradient(net, x, 1.0);
        double nerr = 0;
        for (std::size_t i = 0; i < p0.size(); ++i) {
            auto pp = p0, pm = p0;
            pp[i] += 1e-6;
            pm[i] -= 1e-6;
            TwoLayerNet np = net, nm = net;
            np.set_parameters(pp);
            nm.set_parameters(pm);
            nerr = std::max(nerr, std::abs(gn[i] - (mse_loss(np, x, 1.0) - mse_loss(nm, x, 1.0)) / 2e-6));
        }
        check(nerr < 1e-5, "network gradient vs finite differences", nerr);
    }
    return {failures == 0, std::to_string(failures) + " property failures"};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<std::string> only;
    app.add_option("--only", only, "run only these criteria, e.g. AC-3");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> all{
        {"AC-1", ac1}, {"AC-2", ac2}, {"AC-3", ac3}, {"AC-4", ac4},
        {"AC-5", ac5}, {"AC-6", ac6}, {"AC-7", ac7}, {"AC-8", ac8},
    };
    int failed = 0, ran = 0;
    for (const auto& [id, fn] : all) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        std::printf("%s running\n", id.c_str());
        std::fflush(stdout);
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %s: %s [%.1f s]\n", id.c_str(), o.pass ? "PASS" : "FAIL", o.summary.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    if (ran == 0) {
        std::fprintf(stderr, "no criteria selected\n");
        return 1;
    }
    return failed == 0 ? 0 : 1;
}
