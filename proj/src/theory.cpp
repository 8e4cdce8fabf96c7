#include "phaselab/theory.hpp"

#include "phaselab/monte_carlo.hpp"
#include "phaselab/special_math.hpp"

#include <cmath>

namespace phaselab {

double LikelihoodCoeffs::operator()(int i, int j) const {
    if (i == 0 && j == 0) return 1.0;
    if (i + j != 4) return 0.0;
    switch (i) {
        case 0: return c04;
        case 1: return c13;
        case 2: return c22;
        case 3: return c31;
        default: return c40;
    }
}

LikelihoodCoeffs likelihood_coeffs(double epsilon, double lambda_k0, int n) {
    LikelihoodCoeffs c;
    if (lambda_k0 <= 0) return c;
    const double rho4 = rayleigh_moment(std::sqrt(lambda_k0 * n / 2.0), 4);
    c.c40 = c.c04 = bessel_j(4, 4.0 * epsilon) * rho4 / (2.0 * lambda_k0 * lambda_k0 * double(n) * n);
    c.c22 = -c.c40;
    return c;
}

LikelihoodCoeffs likelihood_coeffs_doubled(double epsilon) {
    LikelihoodCoeffs c;
    c.c40 = c.c04 = 2.0 * bessel_j(4, 4.0 * epsilon);
    c.c22 = -c.c40 / 2.0;
    return c;
}

LikelihoodMc likelihood_coeffs_mc(const CirculantSpectrum& spec, const PlantSpec& plant, const McOptions& mc) {
    DftBasis basis(spec.size());
    const auto u = basis.cosine(plant.k0), v = basis.sine(plant.k0);
    const double sd = std::sqrt(spec.eigenvalue(plant.k0));
    auto acc = monte_carlo(spec, std::optional<PlantSpec>(plant), mc.n, mc.seed, mc.exec, AccumulatorSet(25),
                           [&](FourierSampler& s, RngStream& rng, std::vector<double>& x, AccumulatorSet& a) {
                               s.sample_planted(rng, x);
                               auto hu = hermite_all(4, dot(u, x) / sd);
                               auto hv = hermite_all(4, dot(v, x) / sd);
                               for (int i = 0; i <= 4; ++i)
                                   for (int j = 0; i + j <= 4; ++j) a[i * 5 + j].add(hv[i] * hu[j]);
                           });
    LikelihoodMc out;
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; i + j <= 4; ++j) {
            out.mean[i][j] = acc[i * 5 + j].mean();
            out.se[i][j] = acc[i * 5 + j].sem();
        }
    return out;
}

namespace {
constexpr double inv_fact[] = {1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0};
}

double quartic_form(double au, double av, const LikelihoodCoeffs& like) {
    double s = 0.0;
    for (int i = 0; i <= 4; ++i) s += like(i, 4 - i) * inv_fact[i] * inv_fact[4 - i] * std::pow(av, i) * std::pow(au, 4 - i);
    return s;
}

double quartic_form_du(double au, double av, const LikelihoodCoeffs& like) {
    double s = 0.0;
    for (int i = 0; i <= 3; ++i)
        s += like(i, 4 - i) * inv_fact[i] * inv_fact[4 - i] * (4 - i) * std::pow(av, i) * std::pow(au, 3 - i);
    return s;
}

double quartic_form_dv(double au, double av, const LikelihoodCoeffs& like) {
    double s = 0.0;
    for (int i = 1; i <= 4; ++i)
        s += like(i, 4 - i) * inv_fact[i] * inv_fact[4 - i] * i * std::pow(av, i - 1) * std::pow(au, 4 - i);
    return s;
}

double OverlapState::norm_sq() const {
    double r = alpha_u * alpha_u + alpha_v * alpha_v + omega_perp * omega_perp;
    for (double a : alpha_um) r += a * a;
    for (double a : alpha_vm) r += a * a;
    return r;
}

double OverlapState::phase_norm() const { return std::hypot(alpha_u, alpha_v); }

double OverlapState::principal_norm() const {
    double r = 0.0;
    for (double a : alpha_um) r += a * a;
    for (double a : alpha_vm) r += a * a;
    return std::sqrt(r);
}

std::vector<double> OverlapState::flatten() const {
    std::vector<double> v{alpha_u, alpha_v};
    v.insert(v.end(), alpha_um.begin(), alpha_um.end());
    v.insert(v.end(), alpha_vm.begin(), alpha_vm.end());
    v.push_back(omega_perp);
    return v;
}

OverlapState OverlapState::unflatten(std::span<const double> v, std::size_t modes) {
    if (v.size() != 2 * modes + 3) throw DimensionMismatch("OverlapState::unflatten: wrong length");
    OverlapState s;
    s.alpha_u = v[0];
    s.alpha_v = v[1];
    s.alpha_um.assign(v.begin() + 2, v.begin() + 2 + static_cast<long>(modes));
    s.alpha_vm.assign(v.begin() + 2 + static_cast<long>(modes), v.begin() + 2 + 2 * static_cast<long>(modes));
    s.omega_perp = v.back();
    return s;
}

double sigma_sq_minus_one(const OverlapState& s, const DriftParams& p) {
    if (p.lambda_m.size() != s.modes()) throw DimensionMismatch("sigma_sq_minus_one: mode count differs");
    double r = (p.lambda_k0 - 1.0) * (s.alpha_u * s.alpha_u + s.alpha_v * s.alpha_v);
    for (std::size_t m = 0; m < s.modes(); ++m)
        r += (p.lambda_m[m] - 1.0) * (s.alpha_um[m] * s.alpha_um[m] + s.alpha_vm[m] * s.alpha_vm[m]);
    return r;
}

double population_loss_leading(const OverlapState& s, const DriftParams& p) {
    const double q = quartic_form(s.alpha_u, s.alpha_v, p.like);
    return 1.0 - 0.5 * p.lambda_k0 * p.lambda_k0 * q * (p.c4 + p.c6 * sigma_sq_minus_one(s, p) / 2.0);
}

double penalized_loss_leading(const OverlapState& s, const DriftParams& p) {
    const double r = s.norm_sq();
    return population_loss_leading(s, p) + p.beta * r * r;
}

OverlapState population_drift(const OverlapState& s, const DriftParams& p) {
    const double l2 = p.lambda_k0 * p.lambda_k0;
    const double q = quartic_form(s.alpha_u, s.alpha_v, p.like);
    const double bracket = p.c4 + p.c6 * sigma_sq_minus_one(s, p) / 2.0;
    const double pen = 4.0 * p.beta * s.norm_sq();
    const double coupling = p.c6 * q * (p.lambda_k0 - 1.0);

    OverlapState a;
    a.alpha_u = -0.5 * l2 * (quartic_form_du(s.alpha_u, s.alpha_v, p.like) * bracket + coupling * s.alpha_u) + pen * s.alpha_u;
    a.alpha_v = -0.5 * l2 * (quartic_form_dv(s.alpha_u, s.alpha_v, p.like) * bracket + coupling * s.alpha_v) + pen * s.alpha_v;
    a.alpha_um.resize(s.modes());
    a.alpha_vm.resize(s.modes());
    for (std::size_t m = 0; m < s.modes(); ++m) {
        const double k = -0.5 * l2 * p.c6 * q * (p.lambda_m[m] - 1.0);
        a.alpha_um[m] = k * s.alpha_um[m] + pen * s.alpha_um[m];
        a.alpha_vm[m] = k * s.alpha_vm[m] + pen * s.alpha_vm[m];
    }
    a.omega_perp = pen * s.omega_perp;
    return a;
}

ExtensiveParams ExtensiveParams::from_scalings(double a0, double p0, std::span<const double> b,
                                               std::span<const double> p, double c4, double c6,
                                               const LikelihoodCoeffs& like, double beta) {
    if (b.size() != p.size()) throw DimensionMismatch("from_scalings: prefactor and exponent lists differ");
    constexpr double tol = 1e-12;
    ExtensiveParams e;
    if (p0 > 0.5 + tol) throw std::invalid_argument("from_scalings: lambda_k0 grows faster than sqrt(N); the rescaled drift diverges");
    e.a_k0 = p0 >= 0.5 - tol ? a0 : 0.0;
    for (std::size_t m = 0; m < b.size(); ++m) {
        if (p[m] > 1.0 + tol) throw std::invalid_argument("from_scalings: lambda_m grows faster than N; the rescaled drift diverges");
        e.gamma_m.push_back(p[m] >= 1.0 - tol ? b[m] : 0.0);
    }
    e.c4 = c4;
    e.c6 = c6;
    e.like = like;
    e.beta = beta;
    return e;
}

OverlapState rescaled_drift(const OverlapState& m, const ExtensiveParams& p) {
    if (p.gamma_m.size() != m.modes()) throw DimensionMismatch("rescaled_drift: mode count differs");
    const double a2 = p.a_k0 * p.a_k0;
    double principal = 0.0;
    for (std::size_t k = 0; k < m.modes(); ++k)
        principal += p.gamma_m[k] * (m.alpha_um[k] * m.alpha_um[k] + m.alpha_vm[k] * m.alpha_vm[k]);
    const double bracket = p.c4 + p.c6 * principal / 2.0;
    const double q = quartic_form(m.alpha_u, m.alpha_v, p.like);
    const double pen = 4.0 * p.beta * m.omega_perp * m.omega_perp;

    OverlapState a;
    a.alpha_u = -0.5 * a2 * quartic_form_du(m.alpha_u, m.alpha_v, p.like) * bracket + pen * m.alpha_u;
    a.alpha_v = -0.5 * a2 * quartic_form_dv(m.alpha_u, m.alpha_v, p.like) * bracket + pen * m.alpha_v;
    a.alpha_um.resize(m.modes());
    a.alpha_vm.resize(m.modes());
    for (std::size_t k = 0; k < m.modes(); ++k) {
        const double c = -0.5 * a2 * p.c6 * p.gamma_m[k] * q;
        a.alpha_um[k] = c * m.alpha_um[k] + pen * m.alpha_um[k];
        a.alpha_vm[k] = c * m.alpha_vm[k] + pen * m.alpha_vm[k];
    }
    a.omega_perp = pen * m.omega_perp;
    return a;
}

OverlapState rescaled_drift_finite(const OverlapState& m, int n, const DriftParams& p) {
    const double s = std::sqrt(static_cast<double>(n));
    OverlapState alpha = m;
    alpha.alpha_u /= s;
    alpha.alpha_v /= s;
    for (auto& a : alpha.alpha_um) a /= s;
    for (auto& a : alpha.alpha_vm) a /= s;
    OverlapState d = population_drift(alpha, p);
    d.alpha_u *= s;
    d.alpha_v *= s;
    for (auto& a : d.alpha_um) a *= s;
    for (auto& a : d.alpha_vm) a *= s;
    return d;
}

Trajectory integrate_ode(const DriftFn& drift, std::vector<double> m0, double dt, long steps, long sample_every) {
    if (!(dt > 0)) throw std::invalid_argument("integrate_ode: dt must be positive");
    if (sample_every < 1) sample_every = 1;
    const std::size_t d = m0.size();
    auto rhs = [&](const std::vector<double>& m) {
        auto a = drift(m);
        for (auto& v : a) v = -v;
        return a;
    };
    auto shifted = [d](const std::vector<double>& m, const std::vector<double>& k, double h) {
        std::vector<double> r(d);
        for (std::size_t i = 0; i < d; ++i) r[i] = m[i] + h * k[i];
        return r;
    };

    Trajectory tr;
    tr.t.push_back(0.0);
    tr.states.push_back(m0);
    std::vector<double> m = std::move(m0);
    for (long step = 1; step <= steps; ++step) {
        auto k1 = rhs(m);
        auto k2 = rhs(shifted(m, k1, dt / 2));
        auto k3 = rhs(shifted(m, k2, dt / 2));
        auto k4 = rhs(shifted(m, k3, dt));
        for (std::size_t i = 0; i < d; ++i) {
            m[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!(std::abs(m[i]) <= 1e6))
                throw Blowup("integrate_ode: component " + std::to_string(i) + " left [-1e6, 1e6] at step " + std::to_string(step));
        }
        if (step % sample_every == 0 || step == steps) {
            tr.t.push_back(static_cast<double>(step) * dt);
            tr.states.push_back(m);
        }
    }
    return tr;
}

}  // namespace phaselab
