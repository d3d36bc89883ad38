#pragma once

#include <cstdint>
#include <span>

namespace tri {

/// SplitMix64 stream. Used everywhere randomness is needed so that fixed
/// seeds reproduce bit-identical results independently of the standard
/// library implementation.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool next_bernoulli(double p) { return next_double() < p; }

    /// Inverse-CDF draw from unnormalized non-negative weights.
    int next_discrete(std::span<double const> weights) {
        double total = 0;
        for (double w : weights) total += w;
        double u = next_double() * total;
        double acc = 0;
        for (size_t i = 0; i < weights.size(); i++) {
            acc += weights[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

    /// Independent stream for a work item, derived from a master seed.
    static Rng derive(uint64_t master_seed, uint64_t task_index) {
        Rng mix(master_seed ^ (0x517cc1b727220a95ULL * (task_index + 1)));
        return Rng(mix.next_u64());
    }

  private:
    uint64_t state_;
};

}  // namespace tri
