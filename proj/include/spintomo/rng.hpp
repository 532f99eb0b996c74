#pragma once

#include <cstdint>

namespace spintomo {

// Counter-based stream: SplitMix64 over a mixed key. Used wherever sampling
// must be reproducible and schedule-independent (per-sample streams derived
// from (seed, index...) rather than a shared sequential generator).
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return (next() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) {
    SplitMix64 s(a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2)));
    s.next();
    return s.next() ^ b;
}

inline SplitMix64 derived_stream(std::uint64_t seed, std::uint64_t i0, std::uint64_t i1 = 0, std::uint64_t i2 = 0) {
    return SplitMix64(mix_key(mix_key(mix_key(seed, i0), i1), i2));
}

}  // namespace spintomo
