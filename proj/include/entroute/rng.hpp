#pragma once

#include <array>
#include <cstdint>

namespace entroute {

// splitmix64 finalizer (Steele, Lea, Flood / Vigna). Bijective on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// xoshiro256** seeded through a splitmix64 expansion of a 64-bit key.
// All randomness in the project flows through this engine; std:: distributions
// are avoided on purpose so that results are reproducible across compilers.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t key) noexcept {
    std::uint64_t s = key;
    for (auto& w : state_) {
      s += 0x9e3779b97f4a7c15ull;
      std::uint64_t z = s;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      w = z ^ (z >> 31);
    }
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53 mantissa bits.
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Bernoulli(p); p outside [0,1] saturates.
  bool bernoulli(double p) noexcept { return uniform01() < p; }

  // Uniform integer in [0, n), unbiased via rejection. n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = (*this)();
      if (r >= threshold) return r % n;
    }
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_;
};

// Domain tags keep the key spaces of unrelated stream families disjoint
// (cycle streams vs. topology generation vs. pair sampling).
enum class StreamDomain : std::uint64_t {
  kCycle = 0x63796c65,     // per-sample routing-cycle randomness
  kTopology = 0x746f706f,  // random physical-topology generation
  kPairs = 0x70616972,     // node-pair sampling
  kGeneric = 0x67656e72,
};

inline std::uint64_t derive_key(std::uint64_t master_seed, StreamDomain domain, std::uint64_t i0,
                                std::uint64_t i1, std::uint64_t i2) noexcept {
  std::uint64_t h = mix64(master_seed ^ 0x243f6a8885a308d3ull);
  h = mix64(h ^ static_cast<std::uint64_t>(domain));
  h = mix64(h ^ i0);
  h = mix64(h ^ i1);
  h = mix64(h ^ i2);
  return h;
}

// Index-addressable stream derivation: distinct index tuples yield
// statistically independent, reproducible streams, so parallel and serial
// reductions see identical randomness. The third index is the cycle (sample)
// counter; all strategies and q values replay the same cycle streams, which
// makes paired strategy comparisons exact.
inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t topology_index,
                               std::uint64_t pair_index, std::uint64_t cycle_index) noexcept {
  return RngStream(derive_key(master_seed, StreamDomain::kCycle, topology_index, pair_index,
                              cycle_index));
}

}  // namespace entroute
