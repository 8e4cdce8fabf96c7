#include "phaselab/data_model.hpp"

#include "phaselab/special_math.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

namespace phaselab {

namespace {
constexpr double half_pi = std::numbers::pi / 2.0;
}

PlantSpec PlantSpec::sine(double epsilon, int k0, bool use_corrector) {
    PlantSpec p;
    p.epsilon = epsilon;
    p.k0 = k0;
    p.use_corrector = use_corrector;
    return p;
}

PlantSpec PlantSpec::custom(double epsilon, int k0, std::string name, std::function<double(double)> f,
                            bool use_corrector) {
    PlantSpec p = sine(epsilon, k0, use_corrector);
    p.f_kind = std::move(name);
    p.f = std::move(f);
    return p;
}

void PlantSpec::validate(int n) const {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("PlantSpec: epsilon must be finite and >= 0");
    if (k0 < 1 || 2 * k0 >= n)
        throw std::invalid_argument("PlantSpec: k0=" + std::to_string(k0) + " must lie in [1, N/2) for N=" + std::to_string(n));
}

FourierSampler::FourierSampler(const CirculantSpectrum& spec, std::optional<PlantSpec> plant, Options opts)
    : n_(spec.size()), plant_(std::move(plant)), opts_(opts), work_(static_cast<std::size_t>(n_)) {
    if (plant_) plant_->validate(n_);
    scale_.resize(static_cast<std::size_t>(n_));
    for (int k = 0; k < n_; ++k) {
        double l = spec.eigenvalue(k);
        bool self_conjugate = (k == 0) || (2 * k == n_);
        scale_[k] = std::sqrt(self_conjugate ? n_ * l : n_ * l / 2.0);
    }
    if (opts_.pixel_fast_path) {
        if (!spec.is_identity()) throw std::invalid_argument("FourierSampler: pixel fast path needs an identity spectrum");
        if (!plant_) throw std::invalid_argument("FourierSampler: pixel fast path needs a plant");
        cos_k0_.resize(static_cast<std::size_t>(n_));
        sin_k0_.resize(static_cast<std::size_t>(n_));
        for (int t = 0; t < n_; ++t) {
            long long m = (static_cast<long long>(plant_->k0) * t) % n_;
            double a = 2.0 * std::numbers::pi * static_cast<double>(m) / n_;
            cos_k0_[t] = std::cos(a);
            sin_k0_[t] = std::sin(a);
        }
    }
}

void FourierSampler::baseline_modes(RngStream& rng, std::span<cplx> Z) const {
    const int half = n_ / 2;
    Z[0] = {scale_[0] * rng.gaussian(), 0.0};
    for (int k = 1; k <= half; ++k) {
        if (2 * k == n_) {
            Z[k] = {scale_[k] * rng.gaussian(), 0.0};
        } else {
            double re = scale_[k] * rng.gaussian();
            double im = scale_[k] * rng.gaussian();
            Z[k] = {re, im};
            Z[n_ - k] = {re, -im};
        }
    }
}

void FourierSampler::modes_to_signal(std::span<double> out) {
    transform(work_, true);
    const double inv = 1.0 / n_;
    for (int t = 0; t < n_; ++t) out[t] = work_[t].real() * inv;
}

void FourierSampler::sample_baseline(RngStream& rng, std::span<double> out) {
    if (opts_.pixel_fast_path) {
        for (int t = 0; t < n_; ++t) out[t] = rng.gaussian();
        return;
    }
    baseline_modes(rng, work_);
    modes_to_signal(out);
}

double FourierSampler::draw_corrector(RngStream& rng) const {
    return plant_->use_corrector ? half_pi * rng.uniform_int(4) : 0.0;
}

Latent FourierSampler::sample_planted(RngStream& rng, std::span<double> out) {
    if (!plant_) throw std::logic_error("FourierSampler: no plant configured");
    if (opts_.pixel_fast_path) return planted_pixel(rng, out);
    baseline_modes(rng, work_);
    const int k0 = plant_->k0;
    cplx z = work_[k0];
    Latent lat{std::abs(z), std::arg(z), 0.0};
    lat.U = draw_corrector(rng);
    double shift = plant_->epsilon * plant_->perturb(lat.phi) + lat.U;
    cplx x = z * cplx(std::cos(shift), std::sin(shift));
    work_[k0] = x;
    work_[n_ - k0] = std::conj(x);
    modes_to_signal(out);
    return lat;
}

Latent FourierSampler::planted_pixel(RngStream& rng, std::span<double> out) {
    double re = 0.0, im = 0.0;
    for (int t = 0; t < n_; ++t) {
        double g = rng.gaussian();
        out[t] = g;
        re += g * cos_k0_[t];
        im -= g * sin_k0_[t];
    }
    cplx z(re, im);
    Latent lat{std::abs(z), std::arg(z), 0.0};
    lat.U = draw_corrector(rng);
    double shift = plant_->epsilon * plant_->perturb(lat.phi) + lat.U;
    cplx d = z * cplx(std::cos(shift), std::sin(shift)) - z;
    const double a = 2.0 * d.real() / n_, b = 2.0 * d.imag() / n_;
    for (int t = 0; t < n_; ++t) out[t] += a * cos_k0_[t] - b * sin_k0_[t];
    return lat;
}

int FourierSampler::sample_labeled(RngStream& rng, std::span<double> out, Latent* latent) {
    if (rng.coin()) {
        Latent lat = sample_planted(rng, out);
        if (latent) *latent = lat;
        return +1;
    }
    sample_baseline(rng, out);
    return -1;
}

RealSignal sample_baseline(const CirculantSpectrum& spec, RngStream& rng) {
    FourierSampler s(spec, std::nullopt);
    RealSignal x(static_cast<std::size_t>(spec.size()));
    s.sample_baseline(rng, x);
    return x;
}

LabeledSample sample_planted(const CirculantSpectrum& spec, const PlantSpec& plant, RngStream& rng) {
    FourierSampler s(spec, plant);
    LabeledSample out;
    out.x.resize(static_cast<std::size_t>(spec.size()));
    out.latent = s.sample_planted(rng, out.x);
    out.y = +1;
    return out;
}

SampleBatch sample_labeled_batch(const CirculantSpectrum& spec, const PlantSpec& plant, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_labeled_batch: n must be positive");
    FourierSampler s(spec, plant);
    RngStream rng(seed);
    SampleBatch batch{spec.size(), seed, {}};
    batch.samples.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        LabeledSample ls;
        ls.x.resize(static_cast<std::size_t>(spec.size()));
        Latent lat;
        ls.y = s.sample_labeled(rng, ls.x, &lat);
        if (ls.y == +1) ls.latent = lat;
        batch.samples.push_back(std::move(ls));
    }
    return batch;
}

RealSignal pixel_space_planted(std::span<const double> z, const Latent& latent, const PlantSpec& plant) {
    const int n = static_cast<int>(z.size());
    const double psi = latent.phi + plant.epsilon * plant.perturb(latent.phi) + latent.U;
    RealSignal x(z.begin(), z.end());
    for (int t = 0; t < n; ++t) {
        long long m = (static_cast<long long>(plant.k0) * t) % n;
        double theta = 2.0 * std::numbers::pi * static_cast<double>(m) / n;
        x[t] += 2.0 * latent.rho / n * (std::cos(theta + psi) - std::cos(theta + latent.phi));
    }
    return x;
}

double fourth_moment_oracle(const CirculantSpectrum& spec, const PlantSpec& plant, std::span<const double> w) {
    const int n = spec.size();
    plant.validate(n);
    const double q = spec.quadratic_form(w);
    const double lambda = spec.eigenvalue(plant.k0);
    const double rho4 = lambda > 0 ? rayleigh_moment(std::sqrt(lambda * n / 2.0), 4) : 0.0;
    cplx wk = normalized_mode_projection(w, plant.k0);
    cplx w4 = wk * wk * wk * wk;
    return 3.0 * q * q + 2.0 * bessel_j(4, 4.0 * plant.epsilon) / (double(n) * n) * rho4 * w4.real();
}

void write_batch_csv(std::ostream& os, const SampleBatch& batch) {
    os << "# seed=" << batch.seed << "\n";
    os << "sample_id,label";
    for (int t = 0; t < batch.n_dim; ++t) os << ",x_" << t;
    os << "\n" << std::setprecision(17);
    for (std::size_t i = 0; i < batch.samples.size(); ++i) {
        const auto& s = batch.samples[i];
        os << i << ',' << s.y;
        for (double v : s.x) os << ',' << v;
        os << "\n";
    }
}

}  // namespace phaselab
