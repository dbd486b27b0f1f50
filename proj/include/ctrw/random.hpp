#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ctrw {

// SplitMix64 finalizer; used to turn (master seed, stream, index) into
// decorrelated engine seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed for replicate `index` of stream `stream`. Depends only on its
// arguments, so results never depend on scheduling or worker count.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t index) noexcept {
    return mix64(mix64(master ^ mix64(stream + 0x632be59bd9b4e019ULL)) + index);
}

// Named stream tags for derive_seed.
namespace streams {
inline constexpr std::uint64_t functional = 1;
inline constexpr std::uint64_t limit = 2;
inline constexpr std::uint64_t environment = 3;
inline constexpr std::uint64_t calibration = 4;
inline constexpr std::uint64_t calibration_reference = 5;
}  // namespace streams

// Single-owner random source. Not thread safe; give each worker its own.
class RandomSource {
public:
    using engine_type = std::mt19937_64;

    explicit RandomSource(std::uint64_t seed) : engine_(mix64(seed)) {}

    RandomSource(const RandomSource&) = delete;
    RandomSource& operator=(const RandomSource&) = delete;
    RandomSource(RandomSource&&) = default;
    RandomSource& operator=(RandomSource&&) = default;

    // Uniform on the open interval (0, 1).
    double uniform() {
        for (;;) {
            const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
            if (u > 0.0) return u;
        }
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double exponential() { return -std::log(uniform()); }

    double normal() { return normal_(engine_); }

    double gamma(double shape, double scale) {
        return std::gamma_distribution<double>(shape, scale)(engine_);
    }

    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        return std::poisson_distribution<std::uint64_t>(mean)(engine_);
    }

    // Uniform index in [0, n).
    std::uint64_t index(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    engine_type& engine() noexcept { return engine_; }

private:
    engine_type engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ctrw
