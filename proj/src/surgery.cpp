#include "phaselab/surgery.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>

namespace phaselab {

ImagePatch::ImagePatch(int h_, int w_, int label)
    : h(h_), w(w_), pixels(static_cast<std::size_t>(h_) * static_cast<std::size_t>(w_), 0.0), class_label(label) {}

ImagePatch::ImagePatch(int h_, int w_, std::vector<double> px, int label)
    : h(h_), w(w_), pixels(std::move(px)), class_label(label) {
    if (pixels.size() != static_cast<std::size_t>(h) * static_cast<std::size_t>(w))
        throw DimensionMismatch("ImagePatch: pixel count does not match H x W");
}

double ImagePatch::norm() const { return std::sqrt(std::inner_product(pixels.begin(), pixels.end(), pixels.begin(), 0.0)); }

double ImagePatch::mean() const {
    return pixels.empty() ? 0.0 : std::accumulate(pixels.begin(), pixels.end(), 0.0) / static_cast<double>(size());
}

void ImagePatch::validate() const {
    if (h < 1 || w < 4) throw std::invalid_argument("ImagePatch: need H >= 1 and W >= 4");
    if (pixels.size() != static_cast<std::size_t>(h) * static_cast<std::size_t>(w))
        throw DimensionMismatch("ImagePatch: pixel count does not match H x W");
    for (double v : pixels)
        if (!std::isfinite(v)) throw std::invalid_argument("ImagePatch: non-finite pixel");
}

double Spectrum2::symmetry_defect() const {
    double scale = 1.0;
    for (const auto& v : data) scale = std::max(scale, std::abs(v));
    double worst = 0.0;
    for (int ky = 0; ky < h; ++ky)
        for (int kx = 0; kx < w; ++kx)
            worst = std::max(worst, std::abs((*this)(ky, kx) - std::conj((*this)((h - ky) % h, (w - kx) % w))));
    return worst / scale;
}

namespace {

void transform2(Spectrum2& s, bool inverse) {
    std::vector<cplx> buf;
    for (int y = 0; y < s.h; ++y) transform(std::span<cplx>(s.data.data() + static_cast<std::size_t>(y) * s.w, s.w), inverse);
    buf.resize(static_cast<std::size_t>(s.h));
    for (int x = 0; x < s.w; ++x) {
        for (int y = 0; y < s.h; ++y) buf[y] = s(y, x);
        transform(buf, inverse);
        for (int y = 0; y < s.h; ++y) s(y, x) = buf[y];
    }
}

void require_same_shape(const ImagePatch& a, const ImagePatch& b, const char* where) {
    if (a.h != b.h || a.w != b.w) throw DimensionMismatch(std::string(where) + ": patch dimensions differ");
}

ImagePatch with_label(ImagePatch p, int label) {
    p.class_label = label;
    return p;
}

// Signed frequency of index k on an axis of length n.
int signed_freq(int k, int n) { return 2 * k <= n ? k : k - n; }

}  // namespace

Spectrum2 dft2(const ImagePatch& p) {
    p.validate();
    Spectrum2 s{p.h, p.w, std::vector<cplx>(p.pixels.begin(), p.pixels.end())};
    transform2(s, false);
    return s;
}

ImagePatch idft2(const Spectrum2& s, double tol) {
    if (double d = s.symmetry_defect(); d > tol)
        throw SymmetryViolation("idft2: spectrum is not conjugate symmetric (defect " + std::to_string(d) + ")");
    Spectrum2 t = s;
    transform2(t, true);
    ImagePatch out(s.h, s.w);
    const double inv = 1.0 / static_cast<double>(t.data.size());
    for (std::size_t i = 0; i < t.data.size(); ++i) out.pixels[i] = t.data[i].real() * inv;
    return out;
}

std::pair<ImagePatch, ImagePatch> phase_swap(const ImagePatch& a, const ImagePatch& b) {
    require_same_shape(a, b, "phase_swap");
    const auto A = dft2(a), B = dft2(b);
    Spectrum2 ab = A, ba = B;
    for (std::size_t i = 0; i < A.data.size(); ++i) {
        ab.data[i] = std::polar(std::abs(A.data[i]), std::arg(B.data[i]));
        ba.data[i] = std::polar(std::abs(B.data[i]), std::arg(A.data[i]));
    }
    return {with_label(idft2(ab), a.class_label), with_label(idft2(ba), b.class_label)};
}

ImagePatch flatten_amplitudes(const ImagePatch& p) {
    auto S = dft2(p);
    for (auto& v : S.data) v = std::polar(1.0, std::arg(v));
    S.data[0] = 0.0;
    return with_label(idft2(S), p.class_label);
}

ImagePatch transplant_amplitudes(const std::vector<ImagePatch>& source, const ImagePatch& target, std::size_t pairing) {
    if (pairing >= source.size())
        throw PairingExhausted("transplant_amplitudes: no source patch at index " + std::to_string(pairing));
    const auto& src = source[pairing];
    require_same_shape(src, target, "transplant_amplitudes");
    const auto A = dft2(src);
    auto T = dft2(target);
    for (std::size_t i = 0; i < T.data.size(); ++i) T.data[i] = std::polar(std::abs(A.data[i]), std::arg(T.data[i]));
    T.data[0] = 0.0;
    return with_label(idft2(T), target.class_label);
}

SpectrumProfile radial_spectrum(const std::vector<ImagePatch>& patches) {
    if (patches.empty()) throw std::invalid_argument("radial_spectrum: empty corpus");
    std::map<long, std::pair<double, std::size_t>> acc;
    for (const auto& p : patches) {
        require_same_shape(p, patches.front(), "radial_spectrum");
        const auto S = dft2(p);
        for (int ky = 0; ky < S.h; ++ky)
            for (int kx = 0; kx < S.w; ++kx) {
                const double k = std::hypot(signed_freq(ky, S.h), signed_freq(kx, S.w));
                auto& slot = acc[std::lround(k)];
                slot.first += std::norm(S(ky, kx));
                slot.second += 1;
            }
    }
    SpectrumProfile prof;
    for (const auto& [k, v] : acc) {
        prof.bins.push_back(static_cast<double>(k));
        prof.mean_sq_amplitude.push_back(v.first / static_cast<double>(v.second));
        prof.count.push_back(v.second);
    }
    return prof;
}

SlopeFit fit_loglog_slope(const SpectrumProfile& prof, double k_min, double k_max) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < prof.bins.size(); ++i)
        if (prof.bins[i] >= k_min && prof.bins[i] <= k_max && prof.bins[i] > 0 && prof.mean_sq_amplitude[i] > 0) {
            xs.push_back(std::log(prof.bins[i]));
            ys.push_back(std::log(prof.mean_sq_amplitude[i]));
        }
    if (xs.size() < 3) throw std::invalid_argument("fit_loglog_slope: fewer than 3 bins in range");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - f.intercept - f.slope * xs[i];
        rss += r * r;
    }
    f.slope_se = std::sqrt(rss / (n - 2) / sxx);
    return f;
}

std::vector<ImagePatch> normalize_corpus(std::vector<ImagePatch> patches, double target_norm) {
    for (auto& p : patches) {
        p.validate();
        const double m = p.mean();
        for (double& v : p.pixels) v -= m;
        const double nrm = p.norm();
        if (nrm < 1e-12) throw ConstantPatch("normalize_corpus: constant patch cannot be normalized");
        const double target = target_norm > 0 ? target_norm : std::sqrt(static_cast<double>(p.size()));
        const double s = target / nrm;
        for (double& v : p.pixels) v *= s;
        p.norm_mean = m;
        p.norm_scale = s;
    }
    return patches;
}

ImagePatch power_law_field(int h, int w, double exponent, RngStream& rng, int label) {
    ImagePatch noise(h, w, label);
    for (double& v : noise.pixels) v = rng.gaussian();
    auto S = dft2(noise);
    for (int ky = 0; ky < h; ++ky)
        for (int kx = 0; kx < w; ++kx) {
            const double k = std::hypot(signed_freq(ky, h), signed_freq(kx, w));
            S(ky, kx) *= k > 0 ? std::pow(k, -exponent) : 0.0;
        }
    return with_label(idft2(S), label);
}

std::vector<ImagePatch> Corpus::of_class(int label) const {
    std::vector<ImagePatch> out;
    for (const auto& p : patches)
        if (p.class_label == label) out.push_back(p);
    return out;
}

const char* variant_name(DatasetVariant v) {
    switch (v) {
        case DatasetVariant::original: return "original";
        case DatasetVariant::flattened: return "flattened";
        case DatasetVariant::transplanted: return "transplanted";
    }
    return "unknown";
}

Corpus make_variant(const Corpus& corpus, DatasetVariant v, std::uint64_t seed) {
    Corpus out{corpus.class_names, normalize_corpus(corpus.patches)};
    if (v == DatasetVariant::flattened) {
        for (auto& p : out.patches) p = flatten_amplitudes(p);
    } else if (v == DatasetVariant::transplanted) {
        auto source = out.of_class(0);
        RngStream rng(seed);
        std::shuffle(source.begin(), source.end(), rng.engine());
        std::map<int, std::size_t> next;
        for (auto& p : out.patches)
            if (p.class_label != 0) p = transplant_amplitudes(source, p, next[p.class_label]++);
    }
    if (v != DatasetVariant::original) out.patches = normalize_corpus(std::move(out.patches));
    return out;
}

void write_profile_csv(std::ostream& os, const SpectrumProfile& prof) {
    os << "k_abs,mean_sq_amplitude,count\n" << std::setprecision(10);
    for (std::size_t i = 0; i < prof.bins.size(); ++i)
        os << prof.bins[i] << ',' << prof.mean_sq_amplitude[i] << ',' << prof.count[i] << "\n";
}

}  // namespace phaselab
