#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace phaselab {

using cplx = std::complex<double>;
using RealSignal = std::vector<double>;
using FourierSignal = std::vector<cplx>;

struct SymmetryViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NegativeEigenvalue : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct AsymmetricSpectrum : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place unnormalized transform. Forward uses e^{-2 pi i k n / N}; inverse
// uses the conjugate kernel and does not divide by N.
void fft_radix2(std::span<cplx> a, bool inverse);
void dft_direct(std::span<const cplx> in, std::span<cplx> out, bool inverse);

// Dispatches to radix-2 for powers of two, direct otherwise. Unnormalized.
void transform(std::span<cplx> a, bool inverse);

FourierSignal dft(std::span<const double> x);
FourierSignal dft_complex(std::span<const cplx> x);
std::vector<cplx> idft_complex(std::span<const cplx> X);

// Largest |X_k - conj(X_{N-k})| scaled by max(1, max|X|).
double symmetry_defect(std::span<const cplx> X);

RealSignal idft(std::span<const cplx> X, double tol = 1e-8);

// Normalized projection (1/sqrt(N)) sum_t w_t e^{+2 pi i k t / N}.
cplx normalized_mode_projection(std::span<const double> w, int k);

class DftBasis {
public:
    explicit DftBasis(int n);

    int size() const { return n_; }
    int max_frequency() const { return (n_ - 1) / 2; }
    std::span<const double> cosine(int k) const;
    std::span<const double> sine(int k) const;
    std::span<const double> constant() const { return dc_; }
    // Empty for odd N.
    std::span<const double> alternating() const { return nyquist_; }

    // Every basis vector in order psi0, (u1, v1), ..., psi_{N/2}.
    std::vector<std::span<const double>> all_vectors() const;

private:
    int n_;
    std::vector<double> cos_, sin_;
    std::vector<double> dc_, nyquist_;
};

inline DftBasis build_basis(int n) { return DftBasis(n); }

class CirculantSpectrum {
public:
    static CirculantSpectrum from_first_row(std::vector<double> c);
    static CirculantSpectrum from_eigenvalues(std::vector<double> lambda);
    static CirculantSpectrum identity(int n);
    // Ones everywhere except the listed frequencies (and their mirrors).
    static CirculantSpectrum with_modes(int n, std::span<const int> ks, std::span<const double> lambdas);

    int size() const { return static_cast<int>(lambda_.size()); }
    const std::vector<double>& first_row() const { return row_; }
    const std::vector<double>& eigenvalues() const { return lambda_; }
    double eigenvalue(int k) const { return lambda_[static_cast<std::size_t>(k)]; }
    double trace() const;
    bool is_identity(double tol = 1e-12) const;

    double quadratic_form(std::span<const double> w) const;
    std::vector<double> apply(std::span<const double> w) const;
    std::vector<double> dense() const;

private:
    std::vector<double> row_;
    std::vector<double> lambda_;
};

inline CirculantSpectrum spectrum_from_first_row(std::vector<double> c) {
    return CirculantSpectrum::from_first_row(std::move(c));
}
inline CirculantSpectrum spectrum_from_eigenvalues(std::vector<double> lambda) {
    return CirculantSpectrum::from_eigenvalues(std::move(lambda));
}
inline double quadratic_form(const CirculantSpectrum& s, std::span<const double> w) {
    return s.quadratic_form(w);
}

}  // namespace phaselab
