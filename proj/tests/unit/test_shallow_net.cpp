#include "phaselab/shallow_net.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace phaselab;

namespace {

std::vector<double> gaussian_vector(int n, std::uint64_t seed) {
    RngStream rng(seed);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = rng.gaussian();
    return x;
}

}  // namespace

TEST(TwoLayerNet, ForwardMatchesDefinition) {
    RngStream rng(1);
    const auto net = TwoLayerNet::random(6, 4, Activation::from_name("tanh"), rng);
    const auto x = gaussian_vector(6, 2);
    double f = net.b2;
    for (int i = 0; i < 4; ++i) {
        double pre = net.b1[i];
        for (int j = 0; j < 6; ++j) pre += net.w1[i * 6 + j] * x[j];
        f += net.w2[i] * std::tanh(pre);
    }
    EXPECT_NEAR(forward(net, x), f, 1e-12);
    EXPECT_NEAR(mse_loss(net, x, 1.0), (f - 1) * (f - 1), 1e-12);
}

TEST(TwoLayerNet, ParameterRoundTrip) {
    RngStream rng(3);
    auto net = TwoLayerNet::random(5, 3, Activation::from_name("relu"), rng);
    auto p = net.parameters();
    ASSERT_EQ(p.size(), net.parameter_count());
    ASSERT_EQ(p.size(), 5u * 3 + 3 + 3 + 1);
    p.back() = 0.25;
    net.set_parameters(p);
    EXPECT_EQ(net.b2, 0.25);
    EXPECT_EQ(net.parameters(), p);
}

TEST(TwoLayerNet, GradientMatchesFiniteDifferences) {
    for (const char* act : {"tanh", "logcosh", "relu"}) {
        RngStream rng(4);
        auto net = TwoLayerNet::random(7, 5, Activation::from_name(act), rng);
        auto p0 = net.parameters();
        for (auto& v : p0) v += 0.1 * rng.gaussian();  // non-zero biases
        net.set_parameters(p0);
        const auto x = gaussian_vector(7, 5);
        const auto g = mse_gradient(net, x, -1.0);
        const double h = 1e-6;
        for (std::size_t i = 0; i < p0.size(); ++i) {
            auto pp = p0, pm = p0;
            pp[i] += h;
            pm[i] -= h;
            TwoLayerNet a = net, b = net;
            a.set_parameters(pp);
            b.set_parameters(pm);
            const double fd = (mse_loss(a, x, -1.0) - mse_loss(b, x, -1.0)) / (2 * h);
            EXPECT_NEAR(g[i], fd, 1e-5) << act << " parameter " << i;
        }
    }
}

TEST(TwoLayerNet, SgdStepFollowsGradient) {
    RngStream rng(6);
    auto net = TwoLayerNet::random(4, 3, Activation::from_name("tanh"), rng);
    const auto x = gaussian_vector(4, 7);
    const auto p = net.parameters();
    const auto g = mse_gradient(net, x, 1.0);
    const double before = mse_loss(net, x, 1.0);
    EXPECT_DOUBLE_EQ(sgd_step(net, x, 1.0, 0.01), before);
    const auto q = net.parameters();
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(q[i], p[i] - 0.01 * g[i], 1e-14);
    EXPECT_LT(mse_loss(net, x, 1.0), before);
}

TEST(TwoLayerNet, InitScales) {
    RngStream rng(8);
    const auto net = TwoLayerNet::random(400, 200, Activation::from_name("relu"), rng);
    double s1 = 0, s2 = 0;
    for (double v : net.w1) s1 += v * v;
    for (double v : net.w2) s2 += v * v;
    EXPECT_NEAR(s1 / net.w1.size(), 1.0 / 400, 0.05 / 400);
    EXPECT_NEAR(s2 / net.w2.size(), 1.0 / 200, 0.25 / 200);
}

TEST(Training, SeparableBlobsAreLearned) {
    RngStream rng(9);
    const auto corpus = two_gaussian_corpus(300, 4, 4.0, rng);
    TrainOptions opt;
    opt.lr = 0.01;
    opt.epochs = 5;
    const auto rep = train_seed(corpus, opt, 1);
    EXPECT_EQ(rep.n_train + rep.n_test, corpus.size());
    EXPECT_EQ(rep.records.front().step, 0);
    EXPECT_GT(rep.records.back().eval.original.accuracy, 0.95);
    EXPECT_LT(rep.records.back().eval.original.loss, 0.5 * rep.records.front().eval.original.loss);
    EXPECT_GT(rep.loss_drop_step(0.5), 0);
}

TEST(Training, DeterministicPerSeed) {
    RngStream rng(10);
    const auto corpus = two_gaussian_corpus(50, 4, 2.0, rng);
    TrainOptions opt;
    opt.epochs = 2;
    const auto a = train_seed(corpus, opt, 5), b = train_seed(corpus, opt, 5), c = train_seed(corpus, opt, 6);
    EXPECT_EQ(a.records.back().eval.original.loss, b.records.back().eval.original.loss);
    EXPECT_NE(a.records.back().eval.original.loss, c.records.back().eval.original.loss);
}

TEST(Training, EmptyClassRejected) {
    RngStream rng(11);
    auto corpus = two_gaussian_corpus(20, 4, 2.0, rng);
    std::erase_if(corpus, [](const ImagePatch& p) { return p.class_label == 1; });
    EXPECT_THROW(train_seed(corpus, TrainOptions{}, 1), EmptyClass);
}

TEST(Swapped, AmplitudeOnlyClassifierIsUnaffectedBySwap) {
    // Classes differ only in the amplitude of one mode; swapping phases keeps the amplitude label.
    RngStream rng(12);
    const auto corpus = amplitude_corpus(400, 16, 3, 6.0, rng);
    TrainOptions opt;
    opt.lr = 0.005;
    opt.epochs = 15;
    const auto rep = train_seed(corpus, opt, 2);
    const auto& last = rep.records.back().eval;
    EXPECT_GT(last.original.accuracy, 0.8);
    EXPECT_NEAR(last.swapped.accuracy, last.original.accuracy, 0.1);
}

TEST(Swapped, SetPairsClassesAndKeepsLabels) {
    RngStream rng(13);
    const auto corpus = amplitude_corpus(5, 8, 2, 2.0, rng);
    const auto sw = phase_swapped_set(corpus);
    ASSERT_EQ(sw.size(), 10u);
    int c0 = 0;
    for (const auto& p : sw) c0 += p.class_label == 0;
    EXPECT_EQ(c0, 5);
}

TEST(Corpora, PowerLawSpectrumUnitMean) {
    const auto s = power_law_spectrum(16, 2.0);
    EXPECT_NEAR(s.trace() / 16, 1.0, 1e-12);
    EXPECT_NEAR(s.eigenvalue(1) / s.eigenvalue(2), 4.0, 1e-12);
    EXPECT_NEAR(s.eigenvalue(0), s.eigenvalue(1), 1e-12);
    EXPECT_NEAR(s.eigenvalue(15), s.eigenvalue(1), 1e-12);
}

TEST(Corpora, PhaseCorpusClassesShareSecondOrderStatistics) {
    RngStream rng(14);
    const auto spec = power_law_spectrum(16, 2.0);
    const auto corpus = phase_corpus(20000, spec, PlantSpec::sine(1.2, 1), rng);
    double var[2][16] = {};
    for (const auto& p : corpus)
        for (int t = 0; t < 16; ++t) var[p.class_label][t] += p.pixels[t] * p.pixels[t] / 20000;
    for (int t = 0; t < 16; ++t) EXPECT_NEAR(var[0][t], var[1][t], 0.05 * spec.first_row()[0]);
}

TEST(TrainCsv, Header) {
    RngStream rng(15);
    TrainOptions opt;
    opt.epochs = 1;
    const auto rep = train_seed(two_gaussian_corpus(20, 4, 2.0, rng), opt, 1);
    std::ostringstream os;
    write_train_csv(os, rep);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')),
              "epoch,seed,step,train_loss,loss_orig,loss_swapped,acc,acc_swapped,mean_label_class0_orig,"
              "mean_label_class1_orig,mean_label_class0_swapped,mean_label_class1_swapped");
}
