#pragma once

#include <cstdint>
#include <random>

namespace mcsc {

// Simulation random source. Every consumer (medium, each node, each adversary)
// gets its own stream via split(), so adding draws in one place never shifts
// another consumer's sequence.
class Rng
{
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    Rng split(std::uint64_t child) const
    {
        // Children are keyed by (seed, parent stream, child) so that sibling
        // streams of different parents never coincide.
        return Rng(seed_ ^ (stream_ * 0x9e3779b97f4a7c15ULL), child + 1);
    }

    // Uniform in [0, n). n must be >= 1.
    std::uint64_t uniformIndex(std::uint64_t n)
    {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    bool bernoulli(double p)
    {
        if (p <= 0.0)
            return false;
        if (p >= 1.0)
            return true;
        return uniform01() < p;
    }

    std::uint64_t next() { return engine_(); }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

} // namespace mcsc
