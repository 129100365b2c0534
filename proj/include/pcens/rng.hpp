#ifndef PCENS_RNG_HPP
#define PCENS_RNG_HPP

// Seedable, splittable randomness for the simulation paths. Sample i of a
// run always draws from substream(master_seed, i), so results are identical
// no matter how samples are distributed over workers, and any single sample
// can be replayed in isolation.

#include <cstdint>

namespace pcens {

inline constexpr const char* kRngTag = "splitmix64-substreams-v1";

// Finalizer from SplitMix64; full-period bijection on 64-bit values.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, bound) without modulo bias (rejection on the tail).
    std::uint32_t below(std::uint32_t bound) {
        const std::uint64_t b = bound;
        const std::uint64_t limit = ~0ULL - ~0ULL % b;
        std::uint64_t r = next();
        while (r >= limit) r = next();
        return static_cast<std::uint32_t>(r % b);
    }

  private:
    std::uint64_t state_;
};

inline SplitMix64 substream(std::uint64_t master_seed, std::uint64_t index) {
    return SplitMix64(mix64(master_seed ^ mix64(index * 0xd2b74407b1ce6e93ULL + 0x8cb92ba72f3d8dd7ULL)));
}

}  // namespace pcens

#endif
