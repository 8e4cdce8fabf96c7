#pragma once

#include "phaselab/data_model.hpp"
#include "phaselab/special_math.hpp"
#include "phaselab/surgery.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace phaselab {

struct EmptyClass : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// f(x) = sum_i w2_i sigma(w1_i . x + b1_i) + b2
struct TwoLayerNet {
    int n = 0, k = 30;
    std::vector<double> w1;  // k x n, row-major
    std::vector<double> b1, w2;
    double b2 = 0;
    Activation act = Activation::from_name("relu");

    TwoLayerNet() = default;
    TwoLayerNet(int n, int k, Activation act);

    // w1 ~ N(0, 1/n), w2 ~ N(0, 1/k), biases zero.
    static TwoLayerNet random(int n, int k, Activation act, RngStream& rng);

    std::size_t parameter_count() const { return w1.size() + b1.size() + w2.size() + 1; }
    // Layout: w1, b1, w2, b2.
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> p);
};

double forward(const TwoLayerNet& net, std::span<const double> x);
// (f(x) - y)^2
double mse_loss(const TwoLayerNet& net, std::span<const double> x, double y);
// Gradient of mse_loss in the parameters() layout.
std::vector<double> mse_gradient(const TwoLayerNet& net, std::span<const double> x, double y);
// One SGD step on (f(x) - y)^2; returns the loss before the step.
double sgd_step(TwoLayerNet& net, std::span<const double> x, double y, double lr);

// Class 0 maps to y = +1, every other class to y = -1.
inline double target_of(int class_label) { return class_label == 0 ? 1.0 : -1.0; }

struct EvalResult {
    double loss = 0, accuracy = 0;
    double mean_label[2] = {0, 0};  // mean prediction on class 0 and class 1
    std::vector<double> per_sample_loss;
};
EvalResult evaluate(const TwoLayerNet& net, const std::vector<ImagePatch>& set);

// Pairs the i-th class-0 patch with the i-th class-1 patch and swaps their phases;
// labels follow the amplitude source.
std::vector<ImagePatch> phase_swapped_set(const std::vector<ImagePatch>& test);

struct SwapEval {
    EvalResult original, swapped;
};
SwapEval evaluate_swapped(const TwoLayerNet& net, const std::vector<ImagePatch>& test);

struct TrainOptions {
    double lr = 1e-3;
    int epochs = 10;
    // Steps between evaluations; 0 evaluates once per epoch.
    long eval_every = 0;
    double test_fraction = 0.2;
    int hidden = 30;
    Activation act = Activation::from_name("relu");
};

struct TrainRecord {
    long step = 0;
    double epoch = 0;
    double train_loss = 0;  // mean per-example loss since the previous record
    SwapEval eval;
};

struct TrainReport {
    std::uint64_t seed = 0;
    std::string init = "w1 ~ N(0, 1/N), w2 ~ N(0, 1/k), zero biases";
    std::size_t n_train = 0, n_test = 0;
    std::vector<TrainRecord> records;  // records[0] is the untrained net

    // First step with test loss at most frac times the initial test loss, or -1.
    long loss_drop_step(double frac = 0.5) const;
};

// Stratified 80/20 split, then per-example SGD on the training part in a reshuffled order each epoch.
TrainReport train(TwoLayerNet& net, const std::vector<ImagePatch>& corpus, const TrainOptions& opt, RngStream& rng);
// Builds a random net of the configured width and trains it with the given seed.
TrainReport train_seed(const std::vector<ImagePatch>& corpus, const TrainOptions& opt, std::uint64_t seed);

void write_train_csv(std::ostream& os, const TrainReport& rep, bool header = true);

// Two isotropic Gaussian blobs at +-separation/2 along the first axis.
std::vector<ImagePatch> two_gaussian_corpus(int n_per_class, int dim, double separation, RngStream& rng);
// White-noise 1-D signals; class 1 has the amplitude of mode k multiplied by gain.
std::vector<ImagePatch> amplitude_corpus(int n_per_class, int dim, int k, double gain, RngStream& rng);
// 1-D Fourier-data-model signals: class 0 planted, class 1 baseline, sharing the spectrum.
std::vector<ImagePatch> phase_corpus(int n_per_class, const CirculantSpectrum& spec, const PlantSpec& plant,
                                     RngStream& rng);
// Eigenvalues proportional to min(k, N - k)^{-exponent} with unit mean, DC included at the k = 1 level.
CirculantSpectrum power_law_spectrum(int n, double exponent);

}  // namespace phaselab
