// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>

namespace folq {

/// splitmix64-based generator.  Deliberately not std::uniform_real_distribution:
/// report output must be byte-identical across standard libraries, and the
/// std distributions are implementation-defined.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : s_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [a, b), 53-bit resolution.
    double uniform(double a, double b) {
        return a + (b - a) * ((next() >> 11) * 0x1.0p-53);
    }

    /// Uniform integer in [a, b] inclusive.
    int uniform_int(int a, int b) {
        return a + static_cast<int>(next() % static_cast<std::uint64_t>(b - a + 1));
    }

    /// Split off an independent stream (for per-instance reproducibility).
    Rng fork() { return Rng(next() ^ 0xd1b54a32d192ed03ull); }

  private:
    std::uint64_t s_;
};

}  // namespace folq
