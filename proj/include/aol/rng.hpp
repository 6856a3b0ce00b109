#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace aol {

// Deterministic random stream. mt19937_64 is fully specified by the standard;
// the transforms below are explicit so that draws are bit-identical across
// standard library implementations (std::*_distribution is not portable).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Disjoint per-episode stream: seed and episode index mixed through
    // splitmix64 so neighboring episodes do not correlate.
    static Rng for_episode(std::uint64_t seed, std::uint64_t episode) {
        return Rng(mix(seed + 0x9e3779b97f4a7c15ULL * (episode + 1)));
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Modulo bias is < 2^-50 for the menu/CQI
    // sizes used here; determinism matters more than the last ulp of bias.
    std::uint32_t uniform_int(std::uint32_t n) {
        return static_cast<std::uint32_t>(gen_() % n);
    }

    // Standard normal via Box-Muller; stateless (two fresh uniforms per draw).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 gen_;
};

}  // namespace aol
