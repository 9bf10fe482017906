#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

namespace gausscomb {

/// SplitMix64 (Steele, Lea & Flood). Used for per-point seeds and pump phases
/// so results do not depend on the standard library's distributions.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Seed of sweep point `index` under `master`: the (index + 1)-th output of a
/// SplitMix64 stream started at `master`.
inline std::uint64_t point_seed(std::uint64_t master, std::uint64_t index) {
    SplitMix64 g(master + index * 0x9E3779B97F4A7C15ull);
    return g.next();
}

/// `count` phases uniform on [0, 2π).
inline std::vector<double> random_phases(std::uint64_t seed, std::size_t count) {
    SplitMix64 g(seed);
    std::vector<double> phases(count);
    for (auto& p : phases) p = 2.0 * std::numbers::pi * g.uniform();
    return phases;
}

}  // namespace gausscomb
