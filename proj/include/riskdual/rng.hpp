#pragma once

#include <cstdint>
#include <vector>

// Small deterministic PRNG (splitmix64). Every sampler in the library takes
// one of these explicitly; there is no ambient randomness anywhere, so a
// (config, seed) pair pins the whole run. fork() derives an independent
// stream, which is how parallel loops stay deterministic: sample i always
// uses rng.fork(i) regardless of which thread runs it.

namespace riskdual {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // inclusive bounds
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    bool coin() { return (next_u64() & 1u) != 0; }

    Rng fork(std::uint64_t salt) const {
        std::uint64_t z = state_ ^ (0xd1342543de82ef95ULL * (salt + 0x632be59bd9b4e019ULL));
        z = (z ^ (z >> 29)) * 0xff51afd7ed558ccdULL;
        return Rng(z ^ (z >> 32));
    }

  private:
    std::uint64_t state_;
};

}  // namespace riskdual
