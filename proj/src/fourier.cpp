#include "phaselab/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace phaselab {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

const std::vector<cplx>& twiddles(std::size_t n) {
    thread_local std::unordered_map<std::size_t, std::vector<cplx>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<cplx> t(n / 2);
    for (std::size_t j = 0; j < t.size(); ++j) {
        double a = -two_pi * static_cast<double>(j) / static_cast<double>(n);
        t[j] = {std::cos(a), std::sin(a)};
    }
    return cache.emplace(n, std::move(t)).first->second;
}

// exp(sign * 2 pi i * m / n) with m reduced first so large products stay exact.
cplx unit_root(long long m, long long n, bool inverse) {
    m %= n;
    double a = two_pi * static_cast<double>(m) / static_cast<double>(n);
    return {std::cos(a), inverse ? std::sin(a) : -std::sin(a)};
}

}  // namespace

void fft_radix2(std::span<cplx> a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) throw std::invalid_argument("fft_radix2: length must be a power of two");
    if (n == 1) return;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const auto& tw = twiddles(n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t j = 0; j < half; ++j) {
                cplx w = tw[j * stride];
                if (inverse) w = std::conj(w);
                cplx t = w * a[start + j + half];
                a[start + j + half] = a[start + j] - t;
                a[start + j] += t;
            }
        }
    }
}

void dft_direct(std::span<const cplx> in, std::span<cplx> out, bool inverse) {
    const long long n = static_cast<long long>(in.size());
    if (out.size() != in.size()) throw DimensionMismatch("dft_direct: output length differs");
    for (long long k = 0; k < n; ++k) {
        cplx acc{0.0, 0.0};
        for (long long t = 0; t < n; ++t) acc += in[static_cast<std::size_t>(t)] * unit_root(k * t, n, inverse);
        out[static_cast<std::size_t>(k)] = acc;
    }
}

void transform(std::span<cplx> a, bool inverse) {
    if (is_power_of_two(a.size())) {
        fft_radix2(a, inverse);
        return;
    }
    std::vector<cplx> tmp(a.begin(), a.end());
    dft_direct(tmp, a, inverse);
}

FourierSignal dft(std::span<const double> x) {
    FourierSignal X(x.begin(), x.end());
    transform(X, false);
    return X;
}

FourierSignal dft_complex(std::span<const cplx> x) {
    FourierSignal X(x.begin(), x.end());
    transform(X, false);
    return X;
}

std::vector<cplx> idft_complex(std::span<const cplx> X) {
    std::vector<cplx> x(X.begin(), X.end());
    transform(x, true);
    const double inv = 1.0 / static_cast<double>(x.size());
    for (auto& v : x) v *= inv;
    return x;
}

double symmetry_defect(std::span<const cplx> X) {
    const std::size_t n = X.size();
    double scale = 1.0;
    for (const auto& v : X) scale = std::max(scale, std::abs(v));
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const cplx& mirror = X[(n - k) % n];
        worst = std::max(worst, std::abs(X[k] - std::conj(mirror)));
    }
    return worst / scale;
}

RealSignal idft(std::span<const cplx> X, double tol) {
    if (double d = symmetry_defect(X); d > tol)
        throw SymmetryViolation("idft: input is not conjugate symmetric (defect " + std::to_string(d) + ")");
    auto x = idft_complex(X);
    RealSignal out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i].real();
    return out;
}

cplx normalized_mode_projection(std::span<const double> w, int k) {
    const long long n = static_cast<long long>(w.size());
    cplx acc{0.0, 0.0};
    for (long long t = 0; t < n; ++t) acc += w[static_cast<std::size_t>(t)] * unit_root(k * t, n, true);
    return acc / std::sqrt(static_cast<double>(n));
}

DftBasis::DftBasis(int n) : n_(n) {
    if (n < 4) throw std::invalid_argument("DftBasis: N must be at least 4");
    const int kmax = max_frequency();
    const double amp = std::sqrt(2.0 / n);
    cos_.resize(static_cast<std::size_t>(kmax) * n);
    sin_.resize(static_cast<std::size_t>(kmax) * n);
    for (int k = 1; k <= kmax; ++k) {
        for (int t = 0; t < n; ++t) {
            cplx r = unit_root(static_cast<long long>(k) * t, n, true);
            cos_[static_cast<std::size_t>(k - 1) * n + t] = amp * r.real();
            sin_[static_cast<std::size_t>(k - 1) * n + t] = amp * r.imag();
        }
    }
    dc_.assign(static_cast<std::size_t>(n), 1.0 / std::sqrt(n));
    if (n % 2 == 0) {
        nyquist_.resize(static_cast<std::size_t>(n));
        for (int t = 0; t < n; ++t) nyquist_[t] = (t % 2 ? -1.0 : 1.0) / std::sqrt(n);
    }
}

std::span<const double> DftBasis::cosine(int k) const {
    if (k < 1 || k > max_frequency()) throw std::out_of_range("DftBasis::cosine: frequency out of range");
    return {cos_.data() + static_cast<std::size_t>(k - 1) * n_, static_cast<std::size_t>(n_)};
}

std::span<const double> DftBasis::sine(int k) const {
    if (k < 1 || k > max_frequency()) throw std::out_of_range("DftBasis::sine: frequency out of range");
    return {sin_.data() + static_cast<std::size_t>(k - 1) * n_, static_cast<std::size_t>(n_)};
}

std::vector<std::span<const double>> DftBasis::all_vectors() const {
    std::vector<std::span<const double>> v{constant()};
    for (int k = 1; k <= max_frequency(); ++k) {
        v.push_back(cosine(k));
        v.push_back(sine(k));
    }
    if (!nyquist_.empty()) v.push_back(alternating());
    return v;
}

CirculantSpectrum CirculantSpectrum::from_first_row(std::vector<double> c) {
    const std::size_t n = c.size();
    if (n < 4) throw std::invalid_argument("CirculantSpectrum: N must be at least 4");
    for (std::size_t t = 1; t < n; ++t) {
        double s = std::max({1.0, std::abs(c[t]), std::abs(c[n - t])});
        if (std::abs(c[t] - c[n - t]) > 1e-12 * s)
            throw std::invalid_argument("CirculantSpectrum: first row is not symmetric");
    }
    auto X = dft(c);
    double scale = 1.0;
    for (const auto& v : X) scale = std::max(scale, std::abs(v));
    CirculantSpectrum s;
    s.lambda_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(X[k].imag()) > 1e-10 * scale)
            throw std::invalid_argument("CirculantSpectrum: complex eigenvalue");
        double l = X[k].real();
        if (l < -1e-10) throw NegativeEigenvalue("CirculantSpectrum: eigenvalue " + std::to_string(l) + " at k=" + std::to_string(k));
        s.lambda_[k] = std::max(l, 0.0);
    }
    s.row_ = std::move(c);
    return s;
}

CirculantSpectrum CirculantSpectrum::from_eigenvalues(std::vector<double> lambda) {
    const std::size_t n = lambda.size();
    if (n < 4) throw std::invalid_argument("CirculantSpectrum: N must be at least 4");
    for (std::size_t k = 0; k < n; ++k) {
        if (lambda[k] < 0.0) throw NegativeEigenvalue("CirculantSpectrum: negative eigenvalue at k=" + std::to_string(k));
        double s = std::max({1.0, lambda[k], lambda[(n - k) % n]});
        if (std::abs(lambda[k] - lambda[(n - k) % n]) > 1e-12 * s)
            throw AsymmetricSpectrum("CirculantSpectrum: lambda_k != lambda_{N-k} at k=" + std::to_string(k));
    }
    std::vector<cplx> L(lambda.begin(), lambda.end());
    auto r = idft(L);
    CirculantSpectrum s;
    s.row_ = std::move(r);
    s.lambda_ = std::move(lambda);
    return s;
}

CirculantSpectrum CirculantSpectrum::identity(int n) {
    return from_eigenvalues(std::vector<double>(static_cast<std::size_t>(n), 1.0));
}

CirculantSpectrum CirculantSpectrum::with_modes(int n, std::span<const int> ks, std::span<const double> lambdas) {
    if (ks.size() != lambdas.size()) throw DimensionMismatch("with_modes: frequency and eigenvalue lists differ in length");
    std::vector<double> l(static_cast<std::size_t>(n), 1.0);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        int k = ks[i];
        if (k < 0 || k >= n) throw std::out_of_range("with_modes: frequency out of range");
        l[static_cast<std::size_t>(k)] = lambdas[i];
        l[static_cast<std::size_t>((n - k) % n)] = lambdas[i];
    }
    return from_eigenvalues(std::move(l));
}

double CirculantSpectrum::trace() const {
    double t = 0.0;
    for (double l : lambda_) t += l;
    return t;
}

bool CirculantSpectrum::is_identity(double tol) const {
    return std::all_of(lambda_.begin(), lambda_.end(), [tol](double l) { return std::abs(l - 1.0) <= tol; });
}

double CirculantSpectrum::quadratic_form(std::span<const double> w) const {
    if (w.size() != lambda_.size()) throw DimensionMismatch("quadratic_form: dimension mismatch");
    auto W = dft(w);
    double acc = 0.0;
    for (std::size_t k = 0; k < W.size(); ++k) acc += lambda_[k] * std::norm(W[k]);
    return acc / static_cast<double>(W.size());
}

std::vector<double> CirculantSpectrum::apply(std::span<const double> w) const {
    if (w.size() != lambda_.size()) throw DimensionMismatch("apply: dimension mismatch");
    auto W = dft(w);
    for (std::size_t k = 0; k < W.size(); ++k) W[k] *= lambda_[k];
    return idft(W, 1e-6);
}

std::vector<double> CirculantSpectrum::dense() const {
    const std::size_t n = row_.size();
    std::vector<double> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i * n + j] = row_[(j + n - i) % n];
    return m;
}

}  // namespace phaselab
