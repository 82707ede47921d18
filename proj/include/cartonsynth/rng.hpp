#pragma once

#include <cstdint>

namespace cartonsynth {

// splitmix64 step; also used as the stream-derivation mix.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic counter-based random stream. Child streams are derived as
// mix(seed, index) so the draw sequence is independent of scheduling order.
// Results are identical across platforms (no std::uniform_* involved).
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : state_(seed) {
        // warm up so nearby seeds decorrelate
        splitmix64(state_);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n); n >= 1. Rejection-free multiply-shift
    // (bias < 2^-64, irrelevant at these subset sizes).
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Derivation rule: child_seed = splitmix64(parent ^ odd_const * (index+1)).
    static std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
        std::uint64_t s = parent ^ (0xd1342543de82ef95ULL * (index + 1));
        return splitmix64(s);
    }

    // Derive an independent child stream, e.g. per image or per instance.
    RandomStream derive(std::uint64_t index) const { return RandomStream(derive_seed(state_, index)); }

  private:
    std::uint64_t state_;
};

}  // namespace cartonsynth
