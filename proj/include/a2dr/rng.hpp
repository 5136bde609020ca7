#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace a2dr {

// Seedable generator for problem generation. Stream splitting: each matrix
// or vector of an instance draws from its own stream, keyed by (seed, tag),
// so changing how many values one matrix consumes never perturbs the others.
// The tag is FNV-1a hashed and mixed with the seed through SplitMix64 before
// seeding a mt19937_64. Normals use the Marsaglia polar method rather than
// std::normal_distribution, whose output is not pinned by the standard.
class Rng {
  public:
    Rng(std::uint64_t seed, std::string_view tag);

    double uniform();                       // [0, 1)
    double uniform(double a, double b);     // [a, b)
    double normal();                        // N(0, 1)
    std::uint64_t integer(std::uint64_t n); // {0, ..., n-1}

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace a2dr
