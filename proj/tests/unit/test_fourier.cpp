#include "phaselab/fourier.hpp"
#include "phaselab/rng.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace phaselab;

namespace {

std::vector<double> gaussian_vector(int n, std::uint64_t seed) {
    RngStream rng(seed);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = rng.gaussian();
    return x;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

class RoundTrip : public ::testing::TestWithParam<int> {};

TEST_P(RoundTrip, RealSignal) {
    const auto x = gaussian_vector(GetParam(), 11);
    const auto back = idft(dft(x));
    EXPECT_LT(max_abs_diff(x, back), 1e-10);
}

TEST_P(RoundTrip, ComplexSignal) {
    const int n = GetParam();
    RngStream rng(5);
    std::vector<cplx> z(static_cast<std::size_t>(n));
    for (auto& v : z) v = {rng.gaussian(), rng.gaussian()};
    const auto back = idft_complex(dft_complex(z));
    for (int i = 0; i < n; ++i) EXPECT_LT(std::abs(back[i] - z[i]), 1e-10);
}

TEST_P(RoundTrip, RealInputHasHermitianSpectrum) {
    const auto X = dft(gaussian_vector(GetParam(), 3));
    EXPECT_LT(symmetry_defect(X), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Sizes, RoundTrip, ::testing::Values(1, 2, 7, 8, 15, 60, 64, 100, 128));

TEST(Transform, RadixTwoMatchesDirect) {
    for (int n : {2, 4, 16, 256}) {
        RngStream rng(n);
        std::vector<cplx> a(static_cast<std::size_t>(n)), ref(a.size());
        for (auto& v : a) v = {rng.gaussian(), rng.gaussian()};
        for (bool inverse : {false, true}) {
            auto b = a;
            fft_radix2(b, inverse);
            dft_direct(a, ref, inverse);
            for (int i = 0; i < n; ++i) EXPECT_LT(std::abs(b[i] - ref[i]), 1e-10 * n);
        }
    }
}

TEST(Transform, ForwardConvention) {
    // A pure cosine at frequency k puts N/2 on bins k and N-k.
    const int n = 16, k = 3;
    std::vector<double> x(n);
    for (int t = 0; t < n; ++t) x[t] = std::cos(2 * std::numbers::pi * k * t / n);
    const auto X = dft(x);
    EXPECT_NEAR(X[k].real(), n / 2.0, 1e-12);
    EXPECT_NEAR(X[n - k].real(), n / 2.0, 1e-12);
    EXPECT_NEAR(std::abs(X[0]), 0.0, 1e-12);
}

TEST(Transform, IdftRejectsAsymmetricSpectrum) {
    std::vector<cplx> X(8, 0.0);
    X[1] = {1.0, 0.5};
    EXPECT_THROW(idft(X), SymmetryViolation);
}

TEST(Transform, EmptyInput) {
    EXPECT_TRUE(dft(std::vector<double>{}).empty());
}

class Basis : public ::testing::TestWithParam<int> {};

TEST_P(Basis, Orthonormal) {
    const DftBasis b(GetParam());
    const auto vs = b.all_vectors();
    ASSERT_EQ(static_cast<int>(vs.size()), GetParam());
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = 0; j < vs.size(); ++j) {
            double d = 0;
            for (int t = 0; t < GetParam(); ++t) d += vs[i][t] * vs[j][t];
            EXPECT_NEAR(d, i == j ? 1.0 : 0.0, 1e-10) << i << "," << j;
        }
}

TEST_P(Basis, ClosedForm) {
    const int n = GetParam();
    const DftBasis b(n);
    for (int k = 1; k <= b.max_frequency(); ++k)
        for (int t = 0; t < n; ++t) {
            EXPECT_NEAR(b.cosine(k)[t], std::sqrt(2.0 / n) * std::cos(2 * std::numbers::pi * k * t / n), 1e-12);
            EXPECT_NEAR(b.sine(k)[t], std::sqrt(2.0 / n) * std::sin(2 * std::numbers::pi * k * t / n), 1e-12);
        }
    if (n % 2 == 0)
        for (int t = 0; t < n; ++t) EXPECT_NEAR(b.alternating()[t], (t % 2 ? -1.0 : 1.0) / std::sqrt(n), 1e-12);
    else
        EXPECT_TRUE(b.alternating().empty());
}

INSTANTIATE_TEST_SUITE_P(Sizes, Basis, ::testing::Values(4, 5, 8, 15, 64));

TEST(ModeProjection, MatchesBasisOverlaps) {
    const int n = 32, k = 5;
    const DftBasis b(n);
    const auto w = gaussian_vector(n, 9);
    double au = 0, av = 0;
    for (int t = 0; t < n; ++t) au += w[t] * b.cosine(k)[t], av += w[t] * b.sine(k)[t];
    const cplx p = normalized_mode_projection(w, k);
    EXPECT_NEAR(p.real(), au / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(p.imag(), av / std::sqrt(2.0), 1e-12);
}

class Circulant : public ::testing::TestWithParam<int> {};

TEST_P(Circulant, DftBasisDiagonalizesDenseMatrix) {
    const int n = GetParam();
    // Symmetric first row c_t = c_{N-t} with a positive spectrum.
    std::vector<double> row(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) row[t] = std::exp(-std::min(t, n - t) / 2.0);
    const auto spec = CirculantSpectrum::from_first_row(row);
    const auto dense = spec.dense();
    Eigen::MatrixXd C = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(dense.data(), n, n);
    const DftBasis b(n);
    for (int k = 1; k <= b.max_frequency(); ++k)
        for (auto vec : {b.cosine(k), b.sine(k)}) {
            Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(vec.data(), n);
            EXPECT_LT((C * v - spec.eigenvalue(k) * v).norm(), 1e-10);
        }
    Eigen::VectorXd dc = Eigen::Map<const Eigen::VectorXd>(b.constant().data(), n);
    EXPECT_LT((C * dc - spec.eigenvalue(0) * dc).norm(), 1e-10);

    // Independent eigensolver agrees with the spectrum.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    std::vector<double> ours = spec.eigenvalues();
    std::sort(ours.begin(), ours.end());
    for (int i = 0; i < n; ++i) EXPECT_NEAR(es.eigenvalues()[i], ours[i], 1e-10);
    EXPECT_NEAR(spec.trace(), C.trace(), 1e-10);
}

TEST_P(Circulant, ApplyAndQuadraticFormMatchDense) {
    const int n = GetParam();
    std::vector<double> lambda(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) lambda[k] = 1.0 + std::min(k, n - k);
    const auto spec = CirculantSpectrum::from_eigenvalues(lambda);
    const auto dense = spec.dense();
    const auto w = gaussian_vector(n, 4);
    const auto cw = spec.apply(w);
    double q = 0;
    for (int i = 0; i < n; ++i) {
        double s = 0;
        for (int j = 0; j < n; ++j) s += dense[static_cast<std::size_t>(i) * n + j] * w[j];
        EXPECT_NEAR(cw[i], s, 1e-10);
        q += w[i] * s;
    }
    EXPECT_NEAR(spec.quadratic_form(w), q, 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Sizes, Circulant, ::testing::Values(6, 9, 16, 31));

TEST(CirculantSpectrum, IdentityAndModes) {
    EXPECT_TRUE(CirculantSpectrum::identity(16).is_identity());
    const int ks[] = {3};
    const double ls[] = {4.0};
    const auto s = CirculantSpectrum::with_modes(16, ks, ls);
    EXPECT_DOUBLE_EQ(s.eigenvalue(3), 4.0);
    EXPECT_DOUBLE_EQ(s.eigenvalue(13), 4.0);
    EXPECT_DOUBLE_EQ(s.eigenvalue(4), 1.0);
    EXPECT_FALSE(s.is_identity());
}

TEST(CirculantSpectrum, RejectsInvalidSpectra) {
    EXPECT_THROW(CirculantSpectrum::from_eigenvalues({1.0, -0.5, 1.0, -0.5}), NegativeEigenvalue);
    EXPECT_THROW(CirculantSpectrum::from_eigenvalues({1.0, 2.0, 3.0, 4.0}), AsymmetricSpectrum);
}
