// Counter-based random numbers for reproducible (and trivially parallel)
// Monte Carlo. Every draw is a pure function of (seed, stream, counter), so
// sample s of a run can be regenerated in isolation: stream ids are derived
// from the sample index and never shared across threads.
#pragma once

#include <cstdint>

#include "reot/dist.hpp"

namespace reot {

// Stateless generator built from the SplitMix64 finalizer. bits(stream, k)
// hashes the 192-bit tuple (seed, stream, k) through three finalizer rounds;
// the avalanche of the finalizer gives independent-looking 64-bit words for
// distinct counters. Not cryptographic; intended for simulation.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const;

    // Uniform on (0, 1): 53-bit mantissa, zero excluded so logs are safe.
    double uniform01(std::uint64_t stream, std::uint64_t counter) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

// Sequential view of one stream: hands out uniform01 draws with an advancing
// counter. Rejection samplers may consume a variable number of draws; that
// stays reproducible because each sample owns its stream.
class SampleStream {
public:
    SampleStream(const CounterRng& rng, std::uint64_t stream)
        : rng_(&rng), stream_(stream) {}

    double next_uniform() { return rng_->uniform01(stream_, counter_++); }

private:
    const CounterRng* rng_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

// One draw from d consuming the stream. Inverse-cdf for the closed-form
// families, Box-Muller for lognormal, Marsaglia-Tsang for gamma.
double sample(const ContinuousDistribution& d, SampleStream& s);

}  // namespace reot
