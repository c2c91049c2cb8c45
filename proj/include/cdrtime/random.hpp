#pragma once

#include <cstdint>

namespace cdrtime {

/// xoshiro256** seeded through SplitMix64. Every derived variate is defined
/// here rather than through <random> distributions, whose algorithms differ
/// between standard libraries:
///   uniform()       (next() >> 11) * 2^-53, in [0, 1)
///   uniform_open()  ((next() >> 11) + 0.5) * 2^-53, in (0, 1)
///   normal()        Box-Muller, cosine branch only: sqrt(-2 ln u1) cos(2 pi u2)
///   exponential(m)  -m ln(uniform_open())
///   below(n)        Lemire multiply-shift with rejection
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next();
    double uniform();
    double uniform_open();
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }
    double exponential(double mean);
    std::uint64_t below(std::uint64_t n);
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t s_[4];
};

}  // namespace cdrtime
