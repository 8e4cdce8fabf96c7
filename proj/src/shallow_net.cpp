#include "phaselab/shallow_net.hpp"

#include "phaselab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

namespace phaselab {

TwoLayerNet::TwoLayerNet(int n_, int k_, Activation a)
    : n(n_),
      k(k_),
      w1(static_cast<std::size_t>(n_) * static_cast<std::size_t>(k_), 0.0),
      b1(static_cast<std::size_t>(k_), 0.0),
      w2(static_cast<std::size_t>(k_), 0.0),
      act(std::move(a)) {
    if (n < 1 || k < 1) throw std::invalid_argument("TwoLayerNet: sizes must be positive");
}

TwoLayerNet TwoLayerNet::random(int n, int k, Activation act, RngStream& rng) {
    TwoLayerNet net(n, k, std::move(act));
    const double s1 = 1.0 / std::sqrt(static_cast<double>(n)), s2 = 1.0 / std::sqrt(static_cast<double>(k));
    for (double& v : net.w1) v = s1 * rng.gaussian();
    for (double& v : net.w2) v = s2 * rng.gaussian();
    return net;
}

std::vector<double> TwoLayerNet::parameters() const {
    std::vector<double> p(w1);
    p.insert(p.end(), b1.begin(), b1.end());
    p.insert(p.end(), w2.begin(), w2.end());
    p.push_back(b2);
    return p;
}

void TwoLayerNet::set_parameters(std::span<const double> p) {
    if (p.size() != parameter_count()) throw DimensionMismatch("TwoLayerNet::set_parameters: wrong length");
    auto it = p.begin();
    std::copy_n(it, w1.size(), w1.begin());
    it += static_cast<long>(w1.size());
    std::copy_n(it, b1.size(), b1.begin());
    it += static_cast<long>(b1.size());
    std::copy_n(it, w2.size(), w2.begin());
    it += static_cast<long>(w2.size());
    b2 = *it;
}

namespace {

double pre_activation(const TwoLayerNet& net, std::span<const double> x, int i) {
    const double* row = net.w1.data() + static_cast<std::size_t>(i) * net.n;
    double h = net.b1[i];
    for (int j = 0; j < net.n; ++j) h += row[j] * x[j];
    return h;
}

void check_input(const TwoLayerNet& net, std::span<const double> x) {
    if (static_cast<int>(x.size()) != net.n) throw DimensionMismatch("TwoLayerNet: input dimension mismatch");
}

}  // namespace

double forward(const TwoLayerNet& net, std::span<const double> x) {
    check_input(net, x);
    double f = net.b2;
    for (int i = 0; i < net.k; ++i) f += net.w2[i] * net.act(pre_activation(net, x, i));
    return f;
}

double mse_loss(const TwoLayerNet& net, std::span<const double> x, double y) {
    const double r = forward(net, x) - y;
    return r * r;
}

std::vector<double> mse_gradient(const TwoLayerNet& net, std::span<const double> x, double y) {
    check_input(net, x);
    std::vector<double> h(static_cast<std::size_t>(net.k));
    double f = net.b2;
    for (int i = 0; i < net.k; ++i) {
        h[i] = pre_activation(net, x, i);
        f += net.w2[i] * net.act(h[i]);
    }
    const double d = 2.0 * (f - y);
    std::vector<double> g(net.parameter_count());
    const std::size_t ob1 = net.w1.size(), ow2 = ob1 + net.b1.size();
    for (int i = 0; i < net.k; ++i) {
        const double dh = d * net.w2[i] * net.act.derivative(h[i]);
        for (int j = 0; j < net.n; ++j) g[static_cast<std::size_t>(i) * net.n + j] = dh * x[j];
        g[ob1 + i] = dh;
        g[ow2 + i] = d * net.act(h[i]);
    }
    g.back() = d;
    return g;
}

double sgd_step(TwoLayerNet& net, std::span<const double> x, double y, double lr) {
    check_input(net, x);
    thread_local std::vector<double> h;
    h.resize(static_cast<std::size_t>(net.k));
    double f = net.b2;
    for (int i = 0; i < net.k; ++i) {
        h[i] = pre_activation(net, x, i);
        f += net.w2[i] * net.act(h[i]);
    }
    const double r = f - y;
    const double d = 2.0 * r;
    for (int i = 0; i < net.k; ++i) {
        const double dh = d * net.w2[i] * net.act.derivative(h[i]);
        double* row = net.w1.data() + static_cast<std::size_t>(i) * net.n;
        for (int j = 0; j < net.n; ++j) row[j] -= lr * dh * x[j];
        net.b1[i] -= lr * dh;
        net.w2[i] -= lr * d * net.act(h[i]);
    }
    net.b2 -= lr * d;
    return r * r;
}

EvalResult evaluate(const TwoLayerNet& net, const std::vector<ImagePatch>& set) {
    EvalResult r;
    double sum_label[2] = {0, 0}, count[2] = {0, 0};
    std::size_t correct = 0;
    for (const auto& p : set) {
        const double y = target_of(p.class_label);
        const double f = forward(net, p.pixels);
        const double l = (f - y) * (f - y);
        r.per_sample_loss.push_back(l);
        r.loss += l;
        correct += (f >= 0) == (y > 0);
        const int c = p.class_label == 0 ? 0 : 1;
        sum_label[c] += f;
        count[c] += 1;
    }
    if (!set.empty()) {
        r.loss /= static_cast<double>(set.size());
        r.accuracy = static_cast<double>(correct) / static_cast<double>(set.size());
    }
    for (int c = 0; c < 2; ++c) r.mean_label[c] = count[c] > 0 ? sum_label[c] / count[c] : 0.0;
    return r;
}

std::vector<ImagePatch> phase_swapped_set(const std::vector<ImagePatch>& test) {
    std::vector<const ImagePatch*> a, b;
    for (const auto& p : test) (p.class_label == 0 ? a : b).push_back(&p);
    const std::size_t pairs = std::min(a.size(), b.size());
    if (pairs == 0) throw PairingExhausted("phase_swapped_set: a class has no test patches to pair");
    std::vector<ImagePatch> out;
    for (std::size_t i = 0; i < pairs; ++i) {
        auto [ab, ba] = phase_swap(*a[i], *b[i]);
        out.push_back(std::move(ab));
        out.push_back(std::move(ba));
    }
    return out;
}

SwapEval evaluate_swapped(const TwoLayerNet& net, const std::vector<ImagePatch>& test) {
    return {evaluate(net, test), evaluate(net, phase_swapped_set(test))};
}

long TrainReport::loss_drop_step(double frac) const {
    if (records.empty()) return -1;
    const double target = frac * records.front().eval.original.loss;
    for (const auto& r : records)
        if (r.eval.original.loss <= target) return r.step;
    return -1;
}

namespace {

struct Split {
    std::vector<ImagePatch> train, test;
};

// Pairs of test patches are kept in matching class order so the swap is well defined.
Split stratified_split(const std::vector<ImagePatch>& corpus, double test_fraction, RngStream& rng) {
    std::vector<std::size_t> idx[2];
    for (std::size_t i = 0; i < corpus.size(); ++i) idx[corpus[i].class_label == 0 ? 0 : 1].push_back(i);
    if (idx[0].empty() || idx[1].empty()) throw EmptyClass("train: corpus needs both classes");
    Split s;
    std::vector<ImagePatch> test_by_class[2];
    for (int c = 0; c < 2; ++c) {
        std::shuffle(idx[c].begin(), idx[c].end(), rng.engine());
        const auto n_test = static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(idx[c].size())));
        if (n_test == 0 || n_test >= idx[c].size())
            throw EmptyClass("train: split leaves a class without training or test patches");
        for (std::size_t i = 0; i < idx[c].size(); ++i)
            (i < n_test ? test_by_class[c] : s.train).push_back(corpus[idx[c][i]]);
    }
    for (int c = 0; c < 2; ++c) s.test.insert(s.test.end(), test_by_class[c].begin(), test_by_class[c].end());
    return s;
}

}  // namespace

TrainReport train(TwoLayerNet& net, const std::vector<ImagePatch>& corpus, const TrainOptions& opt, RngStream& rng) {
    if (opt.lr < 0 || opt.epochs < 0) throw std::invalid_argument("train: lr and epochs must be non-negative");
    auto split = stratified_split(corpus, opt.test_fraction, rng);
    const auto swapped = phase_swapped_set(split.test);
    TrainReport rep;
    rep.seed = rng.seed();
    rep.n_train = split.train.size();
    rep.n_test = split.test.size();
    const long per_epoch = static_cast<long>(split.train.size());
    const long every = opt.eval_every > 0 ? opt.eval_every : per_epoch;

    MeanAccumulator window;
    auto record = [&](long step) {
        TrainRecord r;
        r.step = step;
        r.epoch = static_cast<double>(step) / static_cast<double>(per_epoch);
        r.train_loss = window.n > 0 ? window.mean() : 0.0;
        r.eval = {evaluate(net, split.test), evaluate(net, swapped)};
        rep.records.push_back(std::move(r));
        window = {};
    };
    record(0);
    std::vector<std::size_t> order(split.train.size());
    std::iota(order.begin(), order.end(), 0);
    long step = 0;
    for (int e = 0; e < opt.epochs; ++e) {
        std::shuffle(order.begin(), order.end(), rng.engine());
        for (std::size_t i : order) {
            const auto& p = split.train[i];
            window.add(sgd_step(net, p.pixels, target_of(p.class_label), opt.lr));
            if (++step % every == 0) record(step);
        }
    }
    if (rep.records.back().step != step) record(step);
    return rep;
}

TrainReport train_seed(const std::vector<ImagePatch>& corpus, const TrainOptions& opt, std::uint64_t seed) {
    if (corpus.empty()) throw EmptyClass("train: empty corpus");
    RngStream rng(seed);
    RngStream init = rng.split(0);
    auto net = TwoLayerNet::random(static_cast<int>(corpus.front().size()), opt.hidden, opt.act, init);
    return train(net, corpus, opt, rng);
}

void write_train_csv(std::ostream& os, const TrainReport& rep, bool header) {
    if (header)
        os << "epoch,seed,step,train_loss,loss_orig,loss_swapped,acc,acc_swapped,mean_label_class0_orig,"
              "mean_label_class1_orig,mean_label_class0_swapped,mean_label_class1_swapped\n";
    os << std::setprecision(10);
    for (const auto& r : rep.records) {
        const auto& o = r.eval.original;
        const auto& s = r.eval.swapped;
        os << r.epoch << ',' << rep.seed << ',' << r.step << ',' << r.train_loss << ',' << o.loss << ',' << s.loss << ','
           << o.accuracy << ',' << s.accuracy << ',' << o.mean_label[0] << ',' << o.mean_label[1] << ','
           << s.mean_label[0] << ',' << s.mean_label[1] << "\n";
    }
}

std::vector<ImagePatch> two_gaussian_corpus(int n_per_class, int dim, double separation, RngStream& rng) {
    std::vector<ImagePatch> out;
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < n_per_class; ++i) {
            ImagePatch p(1, dim, c);
            for (double& v : p.pixels) v = rng.gaussian();
            p.pixels[0] += (c == 0 ? 0.5 : -0.5) * separation;
            out.push_back(std::move(p));
        }
    return out;
}

std::vector<ImagePatch> amplitude_corpus(int n_per_class, int dim, int k, double gain, RngStream& rng) {
    std::vector<ImagePatch> out;
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < n_per_class; ++i) {
            ImagePatch p(1, dim, c);
            for (double& v : p.pixels) v = rng.gaussian();
            if (c == 1) {
                auto S = dft2(p);
                S(0, k) *= gain;
                S(0, dim - k) *= gain;
                p = idft2(S);
                p.class_label = 1;
            }
            out.push_back(std::move(p));
        }
    return out;
}

std::vector<ImagePatch> phase_corpus(int n_per_class, const CirculantSpectrum& spec, const PlantSpec& plant,
                                     RngStream& rng) {
    FourierSampler sampler(spec, plant);
    std::vector<ImagePatch> out;
    std::vector<double> x(static_cast<std::size_t>(spec.size()));
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < n_per_class; ++i) {
            if (c == 0)
                sampler.sample_planted(rng, x);
            else
                sampler.sample_baseline(rng, x);
            out.emplace_back(1, spec.size(), x, c);
        }
    return out;
}

CirculantSpectrum power_law_spectrum(int n, double exponent) {
    std::vector<double> lam(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) lam[k] = std::pow(std::max(1, std::min(k, n - k)), -exponent);
    const double mean = std::accumulate(lam.begin(), lam.end(), 0.0) / n;
    for (double& l : lam) l /= mean;
    return CirculantSpectrum::from_eigenvalues(std::move(lam));
}

}  // namespace phaselab
