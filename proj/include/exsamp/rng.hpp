#pragma once

#include <cstdint>

// Counter-based pseudorandom streams.  Every draw is a pure function of
// (seed, time index, id, stream), so any participant can regenerate any
// portion of the shared randomness at any later point and obtain the
// identical value.

namespace exsamp::rng {

enum class Stream : std::uint64_t {
  Mark = 1,       // per-vertex activation bit
  Proposal = 2,   // per-vertex label proposal
  Threshold = 3,  // per-constraint filter uniform
  SeqVertex = 4,  // single-site chain: vertex pick
  SeqCoin = 5,    // single-site chain: coin flip
  GraphGen = 6,   // graph generators
};

inline constexpr std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline constexpr std::uint64_t at(std::uint64_t seed, std::int64_t t,
                                  std::uint64_t id, Stream s) {
  std::uint64_t h = mix(seed ^ 0x6a09e667f3bcc909ULL);
  h = mix(h ^ (0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(t)));
  h = mix(h ^ (0xd1b54a32d192ed03ULL + id));
  h = mix(h ^ (0x8bb84b93962eacc9ULL + static_cast<std::uint64_t>(s)));
  return h;
}

// Uniform in [0, 1) with 53 random bits.
inline constexpr double unit(std::uint64_t seed, std::int64_t t,
                             std::uint64_t id, Stream s) {
  return static_cast<double>(at(seed, t, id, s) >> 11) * 0x1.0p-53;
}

// Sequential generator for utility randomness (graph generation).
class SmallRng {
 public:
  explicit SmallRng(std::uint64_t seed) : state_(mix(seed ^ 0x2545f4914f6cdd1dULL)) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Unbiased draw in [0, n).
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace exsamp::rng
