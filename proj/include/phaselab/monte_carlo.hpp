#pragma once

#include "phaselab/data_model.hpp"
#include "phaselab/parallel.hpp"

#include <optional>
#include <vector>

namespace phaselab {

inline constexpr std::size_t mc_chunk = 8192;

struct AccumulatorSet {
    std::vector<MeanAccumulator> acc;

    AccumulatorSet() = default;
    explicit AccumulatorSet(std::size_t n) : acc(n) {}
    MeanAccumulator& operator[](std::size_t i) { return acc[i]; }
    const MeanAccumulator& operator[](std::size_t i) const { return acc[i]; }
    AccumulatorSet& operator+=(const AccumulatorSet& o) {
        if (acc.size() < o.acc.size()) acc.resize(o.acc.size());
        for (std::size_t i = 0; i < o.acc.size(); ++i) acc[i] += o.acc[i];
        return *this;
    }
};

// Runs fn(sampler, rng, x_scratch, acc) n times. Chunk c draws from the stream
// derive_seed(seed, c), so the result does not depend on the execution mode.
template <class Acc, class Fn>
Acc monte_carlo(const CirculantSpectrum& spec, const std::optional<PlantSpec>& plant, std::size_t n,
                std::uint64_t seed, Exec exec, const Acc& zero, Fn&& fn) {
    const auto sizes = chunk_sizes(n, mc_chunk);
    return chunked_reduce(sizes.size(), exec, zero, [&](std::size_t c) {
        FourierSampler sampler(spec, plant);
        RngStream rng(derive_seed(seed, c));
        std::vector<double> x(static_cast<std::size_t>(spec.size()));
        Acc acc = zero;
        for (std::size_t i = 0; i < sizes[c]; ++i) fn(sampler, rng, x, acc);
        return acc;
    });
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace phaselab
