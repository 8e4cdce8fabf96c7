#pragma once

#include "phaselab/fourier.hpp"
#include "phaselab/rng.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace phaselab {

struct PlantSpec {
    double epsilon = 1.2;
    int k0 = 6;
    std::string f_kind = "sine";
    std::function<double(double)> f;  // empty means sin
    bool use_corrector = true;

    static PlantSpec sine(double epsilon, int k0, bool use_corrector = true);
    static PlantSpec custom(double epsilon, int k0, std::string name, std::function<double(double)> f,
                            bool use_corrector = true);

    double perturb(double phi) const { return f ? f(phi) : std::sin(phi); }
    // k0 in [1, N/2) and epsilon >= 0 (epsilon = 0 is the Gaussian control).
    void validate(int n) const;
};

struct Latent {
    double rho = 0;
    double phi = 0;
    double U = 0;
};

struct LabeledSample {
    RealSignal x;
    int y = -1;
    std::optional<Latent> latent;
};

struct SampleBatch {
    int n_dim = 0;
    std::uint64_t seed = 0;
    std::vector<LabeledSample> samples;
};

// Owns FFT scratch, so one instance per worker.
class FourierSampler {
public:
    struct Options {
        // Isotropic only: draw z in pixel space and correct mode k0 in closed form.
        bool pixel_fast_path = false;
    };

    FourierSampler(const CirculantSpectrum& spec, std::optional<PlantSpec> plant, Options opts);
    FourierSampler(const CirculantSpectrum& spec, std::optional<PlantSpec> plant)
        : FourierSampler(spec, std::move(plant), Options{}) {}

    int dim() const { return n_; }
    const std::optional<PlantSpec>& plant() const { return plant_; }

    // Conjugate-symmetric Fourier coefficients of a N(0, Sigma) draw.
    void baseline_modes(RngStream& rng, std::span<cplx> Z) const;

    void sample_baseline(RngStream& rng, std::span<double> out);
    Latent sample_planted(RngStream& rng, std::span<double> out);
    // Fair coin between the two classes; returns the label.
    int sample_labeled(RngStream& rng, std::span<double> out, Latent* latent = nullptr);

private:
    double draw_corrector(RngStream& rng) const;
    void modes_to_signal(std::span<double> out);
    Latent planted_pixel(RngStream& rng, std::span<double> out);

    int n_;
    std::vector<double> scale_;  // per-mode standard deviations
    std::optional<PlantSpec> plant_;
    Options opts_;
    std::vector<cplx> work_;
    std::vector<double> cos_k0_, sin_k0_;
};

RealSignal sample_baseline(const CirculantSpectrum& spec, RngStream& rng);
LabeledSample sample_planted(const CirculantSpectrum& spec, const PlantSpec& plant, RngStream& rng);
SampleBatch sample_labeled_batch(const CirculantSpectrum& spec, const PlantSpec& plant, int n, std::uint64_t seed);

// x = z + (2 rho / N) [cos(2 pi t k0 / N + phi + eps f(phi) + U) - cos(2 pi t k0 / N + phi)].
RealSignal pixel_space_planted(std::span<const double> z, const Latent& latent, const PlantSpec& plant);

// E[(w.x)^4] under the planted model for unit w.
double fourth_moment_oracle(const CirculantSpectrum& spec, const PlantSpec& plant, std::span<const double> w);

void write_batch_csv(std::ostream& os, const SampleBatch& batch);

}  // namespace phaselab
