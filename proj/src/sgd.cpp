#include "phaselab/sgd.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace phaselab {

namespace {

double dotp(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void check_dims(std::span<const double> a, std::span<const double> b, const char* where) {
    if (a.size() != b.size()) throw DimensionMismatch(std::string(where) + ": dimension mismatch");
}

}  // namespace

void SgdConfig::validate() const {
    if (!(delta_scale > 0) && !delta_override) throw std::invalid_argument("SgdConfig: delta_scale must be positive");
    if (delta_override && !(*delta_override >= 0)) throw std::invalid_argument("SgdConfig: delta must be non-negative");
    if (steps < 0) throw std::invalid_argument("SgdConfig: steps must be non-negative");
    if (record_every < 0) throw std::invalid_argument("SgdConfig: record_every must be non-negative");
    if (loss_window < 1) throw std::invalid_argument("SgdConfig: loss_window must be positive");
    if (beta < 0) throw std::invalid_argument("SgdConfig: beta must be non-negative");
}

std::vector<long> SgdConfig::schedule() const {
    std::vector<long> s{0};
    if (record_every > 0) {
        for (long t = record_every; t <= steps; t += record_every) s.push_back(t);
    } else {
        for (int j = 0;; ++j) {
            long t = std::lround(std::pow(10.0, j / 16.0));
            if (t > steps) break;
            s.push_back(t);
        }
    }
    for (long c : checkpoints)
        if (c >= 0 && c <= steps) s.push_back(c);
    s.push_back(steps);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

RateWindow learning_rate_window(int n, double delta) {
    const double l = std::log(static_cast<double>(n));
    return {1.0 / (static_cast<double>(n) * n * l * l), 1.0 / (n * l), delta};
}

std::vector<double> pointwise_gradient(std::span<const double> w, std::span<const double> x, int y,
                                       const Activation& sigma) {
    check_dims(w, x, "pointwise_gradient");
    const double c = -y * sigma.derivative(dotp(w, x));
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = c * x[i];
    return g;
}

std::vector<double> project_tangent(std::span<const double> w, std::span<const double> g) {
    check_dims(w, g, "project_tangent");
    const double p = dotp(w, g);
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i] - p * w[i];
    return out;
}

namespace {

void renormalize(std::span<double> w) {
    const double nrm = std::sqrt(dotp(w, w));
    if (nrm < 1e-12) throw ZeroNorm("spherical_step: updated weight has zero norm");
    for (double& a : w) a /= nrm;
}

}  // namespace

void spherical_step(std::span<double> w, std::span<const double> g, double delta, double sign) {
    check_dims(w, g, "spherical_step");
    const double p = dotp(w, g);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= sign * delta * (g[i] - p * w[i]);
    renormalize(w);
}

void spherical_step(std::span<double> w, std::span<const double> x, int y, const Activation& sigma, double delta,
                    double sign) {
    check_dims(w, x, "spherical_step");
    const double p = dotp(w, x);
    const double c = sign * delta * (-y * sigma.derivative(p));
    // (I - w w^T) x = x - p w for unit w
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * (x[i] - p * w[i]);
    renormalize(w);
}

void penalized_step(std::span<double> w, std::span<const double> g, double delta, double beta, double sign) {
    check_dims(w, g, "penalized_step");
    const double pen = 4.0 * beta * dotp(w, w);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= sign * delta * (g[i] + pen * w[i]);
}

void penalized_step(std::span<double> w, std::span<const double> x, int y, const Activation& sigma, double delta,
                    double beta, double sign) {
    check_dims(w, x, "penalized_step");
    const double c = -y * sigma.derivative(dotp(w, x));
    const double pen = 4.0 * beta * dotp(w, w);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= sign * delta * (c * x[i] + pen * w[i]);
}

OverlapState overlaps(std::span<const double> w, const DftBasis& basis, int k0, std::span<const int> modes) {
    OverlapState s;
    s.alpha_u = dotp(basis.cosine(k0), w);
    s.alpha_v = dotp(basis.sine(k0), w);
    for (int m : modes) {
        s.alpha_um.push_back(dotp(basis.cosine(m), w));
        s.alpha_vm.push_back(dotp(basis.sine(m), w));
    }
    double rest = dotp(w, w) - s.alpha_u * s.alpha_u - s.alpha_v * s.alpha_v;
    for (std::size_t i = 0; i < modes.size(); ++i) rest -= s.alpha_um[i] * s.alpha_um[i] + s.alpha_vm[i] * s.alpha_vm[i];
    s.omega_perp = std::sqrt(std::max(0.0, rest));
    return s;
}

RunTrace run_online(const CirculantSpectrum& spec, const PlantSpec& plant, const Activation& sigma,
                    const SgdConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const int n = spec.size();
    plant.validate(n);
    for (int m : cfg.principal_modes)
        if (m < 1 || 2 * m >= n || m == plant.k0) throw std::invalid_argument("run_online: invalid principal mode");

    RngStream init_rng(derive_seed(seed, 0));
    RngStream data_rng(derive_seed(seed, 1));
    FourierSampler sampler(spec, plant, FourierSampler::Options{cfg.pixel_fast_path});
    const DftBasis basis(n);
    const double delta = cfg.delta(n);
    const double sign = cfg.ascent ? -1.0 : 1.0;
    const bool spherical = cfg.variant == SgdVariant::spherical;

    std::vector<double> w(static_cast<std::size_t>(n)), x(static_cast<std::size_t>(n));
    for (double& a : w) a = init_rng.gaussian();
    if (spherical) {
        renormalize(w);
    } else {
        const double s = 1.0 / std::sqrt(static_cast<double>(n));
        for (double& a : w) a *= s;
    }

    RunTrace tr;
    tr.seed = seed;
    const auto sched = cfg.schedule();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    double last_mean = nan, last_se = nan;
    MeanAccumulator window;
    auto record = [&](long t) {
        tr.steps.push_back(t);
        tr.stats.push_back(overlaps(w, basis, plant.k0, cfg.principal_modes));
        tr.loss_window.push_back(last_mean);
        tr.loss_window_se.push_back(last_se);
    };

    std::size_t next = 0;
    if (sched[next] == 0) record(0), ++next;
    for (long t = 1; t <= cfg.steps; ++t) {
        const int y = sampler.sample_labeled(data_rng, x);
        const double p = dotp(w, x);
        window.add(1.0 - y * sigma(p));
        const double c = -y * sigma.derivative(p);
        if (spherical) {
            const double a = sign * delta * c;
            for (int i = 0; i < n; ++i) w[i] -= a * (x[i] - p * w[i]);
            renormalize(w);
        } else {
            const double pen = 4.0 * cfg.beta * dotp(w, w);
            for (int i = 0; i < n; ++i) w[i] -= sign * delta * (c * x[i] + pen * w[i]);
        }
        if (static_cast<long>(window.n) == cfg.loss_window) {
            last_mean = window.mean();
            last_se = window.sem();
            window = {};
        }
        if (next < sched.size() && sched[next] == t) record(t), ++next;
    }
    tr.final_w = std::move(w);
    return tr;
}

std::vector<RunTrace> run_seeds(const CirculantSpectrum& spec, const PlantSpec& plant, const Activation& sigma,
                                const SgdConfig& cfg, std::uint64_t seed_base, int n_seeds, Exec exec) {
    std::vector<RunTrace> out(static_cast<std::size_t>(std::max(0, n_seeds)));
    parallel_for(out.size(), exec,
                 [&](std::size_t i) { out[i] = run_online(spec, plant, sigma, cfg, derive_seed(seed_base, i)); });
    return out;
}

Quantiles quantiles(std::vector<double> v) {
    if (v.empty()) return {};
    std::sort(v.begin(), v.end());
    auto q = [&](double p) {
        const double pos = p * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    return {q(0.25), q(0.5), q(0.75)};
}

long RecoveryReport::first_step_phase_above(double level) const {
    for (const auto& r : rows)
        if (r.phase.median > level) return r.step;
    return -1;
}

RecoveryReport recovery_summary(const std::vector<RunTrace>& traces, double eta) {
    RecoveryReport rep;
    rep.eta = eta;
    if (traces.empty()) return rep;
    const auto& ref = traces.front().steps;
    for (const auto& t : traces)
        if (t.steps != ref) throw std::invalid_argument("recovery_summary: traces have different schedules");
    for (std::size_t j = 0; j < ref.size(); ++j) {
        std::vector<double> au, av, ph, pr;
        std::size_t hit = 0;
        for (const auto& t : traces) {
            const auto& s = t.stats[j];
            au.push_back(std::abs(s.alpha_u));
            av.push_back(std::abs(s.alpha_v));
            ph.push_back(s.phase_norm());
            pr.push_back(s.principal_norm());
            hit += s.phase_norm() >= eta;
        }
        rep.rows.push_back({ref[j], quantiles(au), quantiles(av), quantiles(ph), quantiles(pr),
                            static_cast<double>(hit) / static_cast<double>(traces.size())});
    }
    return rep;
}

void write_trace_csv(std::ostream& os, const RunTrace& trace, bool header) {
    if (header) os << "step,seed,alpha_u,alpha_v,phase_norm,principal_norm,omega_perp,loss_window\n";
    os << std::setprecision(10);
    for (std::size_t j = 0; j < trace.steps.size(); ++j) {
        const auto& s = trace.stats[j];
        os << trace.steps[j] << ',' << trace.seed << ',' << s.alpha_u << ',' << s.alpha_v << ',' << s.phase_norm()
           << ',' << s.principal_norm() << ',' << s.omega_perp << ',' << trace.loss_window[j] << "\n";
    }
}

void write_recovery_csv(std::ostream& os, const RecoveryReport& rep) {
    os << "step,abs_u_median,abs_v_median,phase_q25,phase_median,phase_q75,principal_q25,principal_median,"
          "principal_q75,frac_recovered\n"
       << std::setprecision(10);
    for (const auto& r : rep.rows)
        os << r.step << ',' << r.abs_u.median << ',' << r.abs_v.median << ',' << r.phase.q25 << ',' << r.phase.median
           << ',' << r.phase.q75 << ',' << r.principal.q25 << ',' << r.principal.median << ',' << r.principal.q75
           << ',' << r.frac_recovered << "\n";
}

}  // namespace phaselab
