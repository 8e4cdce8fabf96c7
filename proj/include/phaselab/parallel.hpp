#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace phaselab {

// Serial is the reference path. Parallel splits the same deterministic chunks
// across OpenMP threads and combines them in chunk order, so both paths return
// bit-identical results.
enum class Exec { serial, parallel };

void set_thread_count(int n);
int thread_count();

template <class Fn>
void parallel_for(std::size_t n, Exec exec, Fn&& fn) {
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const long long m = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < m; ++i) fn(static_cast<std::size_t>(i));
}

template <class Acc, class ChunkFn>
Acc chunked_reduce(std::size_t n_chunks, Exec exec, Acc init, ChunkFn&& chunk) {
    std::vector<Acc> parts(n_chunks, init);
    parallel_for(n_chunks, exec, [&](std::size_t c) { parts[c] = chunk(c); });
    for (auto& p : parts) init += p;
    return init;
}

struct MeanAccumulator {
    double n = 0, sum = 0, sumsq = 0;

    void add(double v) {
        n += 1;
        sum += v;
        sumsq += v * v;
    }
    MeanAccumulator& operator+=(const MeanAccumulator& o) {
        n += o.n;
        sum += o.sum;
        sumsq += o.sumsq;
        return *this;
    }
    double mean() const { return n > 0 ? sum / n : 0.0; }
    double variance() const {
        if (n < 2) return 0.0;
        double m = mean();
        return std::max(0.0, (sumsq - n * m * m) / (n - 1));
    }
    double sem() const { return n > 0 ? std::sqrt(variance() / n) : 0.0; }
};

// Splits n samples into chunks of at most chunk_size, returning chunk sizes.
std::vector<std::size_t> chunk_sizes(std::size_t n, std::size_t chunk_size);

}  // namespace phaselab
