#pragma once

#include <cstdint>
#include <random>

namespace phaselab {

// SplitMix64 finalizer, used to derive independent child seeds.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }
    RngStream split(std::uint64_t stream) const { return RngStream(derive_seed(seed_, stream)); }

    double gaussian() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    // Uniform integer in [0, n).
    int uniform_int(int n) { return static_cast<int>(engine_() % static_cast<std::uint64_t>(n)); }
    bool coin() { return (engine_() >> 63) != 0; }
    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace phaselab
