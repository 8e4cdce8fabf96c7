#pragma once

#include "phaselab/fourier.hpp"
#include "phaselab/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace phaselab {

struct PairingExhausted : std::out_of_range {
    using std::out_of_range::out_of_range;
};
struct ConstantPatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct CorpusIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Row-major grayscale patch. H = 1 holds a 1-D signal.
struct ImagePatch {
    int h = 0, w = 0;
    std::vector<double> pixels;
    int class_label = 0;
    // Mean removed and scale applied by the last normalization.
    double norm_mean = 0, norm_scale = 1;

    ImagePatch() = default;
    ImagePatch(int h, int w, int label = 0);
    ImagePatch(int h, int w, std::vector<double> px, int label = 0);

    std::size_t size() const { return pixels.size(); }
    double& operator()(int y, int x) { return pixels[static_cast<std::size_t>(y) * w + x]; }
    double operator()(int y, int x) const { return pixels[static_cast<std::size_t>(y) * w + x]; }
    double norm() const;
    double mean() const;
    // H >= 1, W >= 4, finite pixels.
    void validate() const;
};

struct Spectrum2 {
    int h = 0, w = 0;
    std::vector<cplx> data;

    cplx& operator()(int ky, int kx) { return data[static_cast<std::size_t>(ky) * w + kx]; }
    const cplx& operator()(int ky, int kx) const { return data[static_cast<std::size_t>(ky) * w + kx]; }
    // Largest |X(k) - conj(X(-k))| scaled by max(1, max|X|).
    double symmetry_defect() const;
};

Spectrum2 dft2(const ImagePatch& p);
ImagePatch idft2(const Spectrum2& s, double tol = 1e-8);

// (|A| e^{i arg B}, |B| e^{i arg A}); each output keeps the label of its amplitude source.
std::pair<ImagePatch, ImagePatch> phase_swap(const ImagePatch& a, const ImagePatch& b);

// Unit amplitude on every mode except DC, which is set to 0. Phases are kept;
// zero-amplitude modes take phase 0. No renormalization.
ImagePatch flatten_amplitudes(const ImagePatch& p);

// Amplitudes of source[pairing] with the phases of target; DC set to 0.
ImagePatch transplant_amplitudes(const std::vector<ImagePatch>& source, const ImagePatch& target, std::size_t pairing);

struct SpectrumProfile {
    std::vector<double> bins;
    std::vector<double> mean_sq_amplitude;
    std::vector<std::size_t> count;
};
// Mean |X(k)|^2 per integer-rounded |k| over signed wave vectors, averaged over the corpus.
SpectrumProfile radial_spectrum(const std::vector<ImagePatch>& patches);

struct SlopeFit {
    double slope = 0, intercept = 0, slope_se = 0;
};
// Least squares of log(mean_sq) on log(k) over bins in [k_min, k_max].
SlopeFit fit_loglog_slope(const SpectrumProfile& prof, double k_min, double k_max);

// Subtracts each patch mean and rescales to a common norm, sqrt(H W) when target_norm <= 0.
std::vector<ImagePatch> normalize_corpus(std::vector<ImagePatch> patches, double target_norm = 0);

// Gaussian random field with amplitude |k|^{-exponent} (DC zero) and uniform phases.
ImagePatch power_law_field(int h, int w, double exponent, RngStream& rng, int label = 0);

struct Corpus {
    std::vector<std::string> class_names;
    std::vector<ImagePatch> patches;

    std::vector<ImagePatch> of_class(int label) const;
};

enum class DatasetVariant { original, flattened, transplanted };
const char* variant_name(DatasetVariant v);

// Mean-subtract and normalize, apply the variant, normalize again. The
// transplant gives every class-1 patch the amplitudes of a class-0 patch,
// paired in an order shuffled by the seed.
Corpus make_variant(const Corpus& corpus, DatasetVariant v, std::uint64_t seed);

void write_profile_csv(std::ostream& os, const SpectrumProfile& prof);

// Binary PGM (P5, 8 or 16 bit). P6 input is converted by averaging channels.
// Reading scales to [0, 1]; writing maps [min, max] linearly onto 16 bits.
ImagePatch read_pgm(const std::filesystem::path& path, int label = 0);
void write_pgm(const std::filesystem::path& path, const ImagePatch& p);

// <root>/manifest.txt lists class names; patches live in <root>/<class>/*.pgm.
Corpus read_corpus(const std::filesystem::path& root);
void write_corpus(const std::filesystem::path& root, const Corpus& corpus);

}  // namespace phaselab
