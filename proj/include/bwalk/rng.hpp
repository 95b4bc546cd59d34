#pragma once

#include <cstdint>
#include <string>

namespace bwalk {

// Counter-based generator built on the splitmix64 mixing function.
// Output at counter c for stream s is mix(key(seed, s) + c * GAMMA), so any
// draw is addressable and independent chains get disjoint streams.
class CounterRng {
  public:
    static constexpr const char* kAlgorithm = "splitmix64-counter";

    explicit CounterRng(uint64_t seed, uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))), counter_(0) {}

    uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    // Uniform in [0,1).
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    uint64_t next_below(uint64_t n) {
        // Rejection to kill modulo bias.
        uint64_t threshold = (~n + 1) % n;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    bool next_bool() { return (next_u64() >> 63) != 0; }

    uint64_t counter() const { return counter_; }

  private:
    static uint64_t mix(uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t key_;
    uint64_t counter_;
};

}  // namespace bwalk
