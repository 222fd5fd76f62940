#pragma once

#include <cstdint>

namespace diqkd {

// Counter-based 64-bit generator. Each output is a stateless hash of
// (seed, stream, counter), so any (seed, stream) pair names an independent
// reproducible stream and parallel workers can split streams without
// coordination. The mixer is the splitmix64 finalizer applied twice.
class CounterRng {
  public:
    explicit CounterRng(uint64_t seed, uint64_t stream = 0)
        : key_(mix(mix(seed + 0x9e3779b97f4a7c15ull) ^ mix(stream + 0xbf58476d1ce4e5b9ull))),
          counter_(0) {}

    uint64_t next_u64() { return mix(key_ ^ mix(counter_++ + 0x94d049bb133111ebull)); }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Bernoulli draw.
    bool next_bool(double p) { return next_double() < p; }

    // Uniform in [lo, hi).
    double next_range(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    static uint64_t mix(uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

  private:
    uint64_t key_;
    uint64_t counter_;
};

}  // namespace diqkd
