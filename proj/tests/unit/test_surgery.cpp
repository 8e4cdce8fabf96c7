#include "phaselab/surgery.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace phaselab;
namespace fs = std::filesystem;

namespace {

ImagePatch random_patch(int h, int w, std::uint64_t seed, int label = 0) {
    RngStream rng(seed);
    ImagePatch p(h, w, label);
    for (auto& v : p.pixels) v = rng.gaussian();
    return p;
}

double amplitude(const Spectrum2& s, int ky, int kx) { return std::abs(s(ky, kx)); }

fs::path temp_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("phaselab_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST(Dft2, RoundTrip) {
    for (auto [h, w] : {std::pair{1, 16}, std::pair{8, 8}, std::pair{6, 10}}) {
        const auto p = random_patch(h, w, 1);
        const auto s = dft2(p);
        EXPECT_LT(s.symmetry_defect(), 1e-12);
        const auto q = idft2(s);
        for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(q.pixels[i], p.pixels[i], 1e-10);
    }
}

TEST(Dft2, RejectsAsymmetricSpectrum) {
    auto s = dft2(random_patch(4, 4, 2));
    s(1, 1) += cplx(0, 1);
    EXPECT_THROW(idft2(s), SymmetryViolation);
}

TEST(PhaseSwap, ExchangesPhasesKeepsAmplitudes) {
    const auto a = random_patch(8, 8, 3, 0), b = random_patch(8, 8, 4, 1);
    const auto [ab, ba] = phase_swap(a, b);
    const auto A = dft2(a), B = dft2(b), AB = dft2(ab), BA = dft2(ba);
    for (int ky = 0; ky < 8; ++ky)
        for (int kx = 0; kx < 8; ++kx) {
            EXPECT_NEAR(amplitude(AB, ky, kx), amplitude(A, ky, kx), 1e-9);
            EXPECT_NEAR(amplitude(BA, ky, kx), amplitude(B, ky, kx), 1e-9);
            if (amplitude(B, ky, kx) > 1e-8 && amplitude(A, ky, kx) > 1e-8) {
                EXPECT_NEAR(std::abs(AB(ky, kx) / std::abs(AB(ky, kx)) - B(ky, kx) / std::abs(B(ky, kx))), 0.0, 1e-9);
            }
        }
    EXPECT_EQ(ab.class_label, 0);
    EXPECT_EQ(ba.class_label, 1);
    // Swapping twice restores both inputs.
    const auto [a2, b2] = phase_swap(ab, ba);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(a2.pixels[i], a.pixels[i], 1e-9);
        EXPECT_NEAR(b2.pixels[i], b.pixels[i], 1e-9);
    }
}

TEST(PhaseSwap, ShapeMismatchThrows) {
    EXPECT_THROW(phase_swap(random_patch(4, 4, 1), random_patch(4, 8, 2)), std::invalid_argument);
}

TEST(Flatten, UnitAmplitudesZeroDcSamePhases) {
    const auto p = random_patch(6, 8, 5);
    const auto f = flatten_amplitudes(p);
    const auto P = dft2(p), F = dft2(f);
    for (int ky = 0; ky < 6; ++ky)
        for (int kx = 0; kx < 8; ++kx) {
            if (ky == 0 && kx == 0) {
                EXPECT_NEAR(amplitude(F, 0, 0), 0.0, 1e-10);
                continue;
            }
            EXPECT_NEAR(amplitude(F, ky, kx), 1.0, 1e-10);
            EXPECT_NEAR(std::abs(F(ky, kx) - P(ky, kx) / std::abs(P(ky, kx))), 0.0, 1e-9);
        }
}

TEST(Transplant, AmplitudesFromSourcePhasesFromTarget) {
    const std::vector<ImagePatch> src{random_patch(1, 16, 6), random_patch(1, 16, 7)};
    const auto target = random_patch(1, 16, 8, 1);
    const auto t = transplant_amplitudes(src, target, 1);
    const auto S = dft2(src[1]), T = dft2(target), X = dft2(t);
    for (int k = 1; k < 16; ++k) {
        EXPECT_NEAR(amplitude(X, 0, k), amplitude(S, 0, k), 1e-9);
        EXPECT_NEAR(std::arg(X(0, k) / T(0, k)), 0.0, 1e-9);
    }
    EXPECT_NEAR(amplitude(X, 0, 0), 0.0, 1e-10);
    EXPECT_EQ(t.class_label, 1);
    EXPECT_THROW(transplant_amplitudes(src, target, 2), PairingExhausted);
}

TEST(Normalize, MeanZeroCommonNorm) {
    std::vector<ImagePatch> ps{random_patch(4, 4, 1), random_patch(4, 4, 2)};
    for (auto& v : ps[1].pixels) v = 3 * v + 5;
    const auto out = normalize_corpus(ps);
    for (const auto& p : out) {
        EXPECT_NEAR(p.mean(), 0.0, 1e-12);
        EXPECT_NEAR(p.norm(), 4.0, 1e-12);
    }
    EXPECT_NEAR(normalize_corpus(ps, 2.5)[0].norm(), 2.5, 1e-12);
    ImagePatch flat(4, 4);
    std::fill(flat.pixels.begin(), flat.pixels.end(), 1.0);
    EXPECT_THROW(normalize_corpus({flat}), ConstantPatch);
}

TEST(Patch, ValidateShape) {
    EXPECT_THROW(ImagePatch(1, 3).validate(), std::invalid_argument);
    EXPECT_NO_THROW(ImagePatch(1, 4).validate());
}

TEST(RadialSpectrum, RecoversPowerLawSlope) {
    RngStream rng(9);
    std::vector<ImagePatch> ps;
    for (int i = 0; i < 50; ++i) ps.push_back(power_law_field(32, 32, 1.0, rng));
    const auto prof = radial_spectrum(ps);
    const auto fit = fit_loglog_slope(prof, 2, 12);
    // Amplitude ~ |k|^-1 gives mean squared amplitude ~ |k|^-2.
    EXPECT_NEAR(fit.slope, -2.0, 0.15);
    EXPECT_GT(fit.slope_se, 0.0);
}

TEST(RadialSpectrum, FlattenedIsFlat) {
    RngStream rng(10);
    std::vector<ImagePatch> ps;
    for (int i = 0; i < 10; ++i) ps.push_back(flatten_amplitudes(power_law_field(16, 16, 1.5, rng)));
    const auto prof = radial_spectrum(ps);
    for (std::size_t i = 0; i < prof.bins.size(); ++i)
        if (prof.bins[i] > 0) {
            EXPECT_NEAR(prof.mean_sq_amplitude[i], 1.0, 1e-9);
        }
    std::ostringstream os;
    write_profile_csv(os, prof);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "k_abs,mean_sq_amplitude,count");
}

TEST(Variants, LabelsPreservedAndAmplitudesCorrect) {
    RngStream rng(11);
    Corpus c{{"a", "b"}, {}};
    for (int i = 0; i < 6; ++i) {
        c.patches.push_back(power_law_field(1, 16, 1.0, rng, 0));
        c.patches.push_back(power_law_field(1, 16, 0.0, rng, 1));
    }
    for (auto v : {DatasetVariant::original, DatasetVariant::flattened, DatasetVariant::transplanted}) {
        const auto out = make_variant(c, v, 3);
        ASSERT_EQ(out.patches.size(), c.patches.size());
        for (std::size_t i = 0; i < out.patches.size(); ++i) {
            EXPECT_EQ(out.patches[i].class_label, c.patches[i].class_label);
            EXPECT_NEAR(out.patches[i].mean(), 0.0, 1e-12);
            EXPECT_NEAR(out.patches[i].norm(), 4.0, 1e-9);
        }
        EXPECT_EQ(make_variant(c, v, 3).patches[5].pixels, out.patches[5].pixels);
    }
    // After transplanting, every class-1 amplitude profile is a class-0 profile.
    const auto norm0 = make_variant(c, DatasetVariant::original, 3).of_class(0);
    for (const auto& p : make_variant(c, DatasetVariant::transplanted, 3).of_class(1)) {
        const auto P = dft2(p);
        bool found = false;
        for (const auto& q : norm0) {
            const auto Q = dft2(q);
            double d = 0;
            for (int k = 1; k < 16; ++k) d = std::max(d, std::abs(amplitude(P, 0, k) - amplitude(Q, 0, k)));
            found = found || d < 1e-9;
        }
        EXPECT_TRUE(found);
    }
}

TEST(Pgm, RoundTripPreservesShapeAndOrdering) {
    const auto dir = temp_dir("pgm");
    auto p = random_patch(5, 7, 12);
    write_pgm(dir / "a.pgm", p);
    const auto q = read_pgm(dir / "a.pgm");
    ASSERT_EQ(q.h, 5);
    ASSERT_EQ(q.w, 7);
    // 16-bit quantization of the [min, max] range.
    double lo = *std::min_element(p.pixels.begin(), p.pixels.end()), hi = *std::max_element(p.pixels.begin(), p.pixels.end());
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(q.pixels[i], (p.pixels[i] - lo) / (hi - lo), 1e-4);
    fs::remove_all(dir);
}

TEST(Pgm, ReadsEightBitWithComments) {
    const auto dir = temp_dir("pgm8");
    {
        std::ofstream os(dir / "b.pgm", std::ios::binary);
        os << "P5\n# a comment\n4 1\n255\n";
        const unsigned char px[] = {0, 51, 204, 255};
        os.write(reinterpret_cast<const char*>(px), 4);
    }
    const auto q = read_pgm(dir / "b.pgm", 1);
    EXPECT_EQ(q.class_label, 1);
    EXPECT_NEAR(q.pixels[1], 0.2, 1e-12);
    EXPECT_NEAR(q.pixels[3], 1.0, 1e-12);
    {
        std::ofstream os(dir / "bad.pgm", std::ios::binary);
        os << "P2\n4 1\n255\n0 1 2 3\n";
    }
    EXPECT_THROW(read_pgm(dir / "bad.pgm"), CorpusIoError);
    EXPECT_THROW(read_pgm(dir / "missing.pgm"), CorpusIoError);
    fs::remove_all(dir);
}

TEST(Pgm, CorpusRoundTrip) {
    const auto dir = temp_dir("corpus");
    RngStream rng(13);
    Corpus c{{"cats", "dogs"}, {}};
    for (int i = 0; i < 3; ++i) {
        c.patches.push_back(power_law_field(4, 6, 1.0, rng, 0));
        c.patches.push_back(power_law_field(4, 6, 1.0, rng, 1));
    }
    write_corpus(dir, c);
    const auto back = read_corpus(dir);
    EXPECT_EQ(back.class_names, c.class_names);
    EXPECT_EQ(back.patches.size(), 6u);
    EXPECT_EQ(back.of_class(1).size(), 3u);
    EXPECT_THROW(read_corpus(dir / "nowhere"), CorpusIoError);
    fs::remove_all(dir);
}
