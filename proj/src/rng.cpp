#include "reot/rng.hpp"

#include <cmath>

namespace reot {

namespace {

inline std::uint64_t mix64(std::uint64_t z) {
    // SplitMix64 finalizer (Steele, Lea, Flood 2014).
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t stream, std::uint64_t counter) const {
    return mix64(counter ^ mix64(stream ^ mix64(seed_)));
}

double CounterRng::uniform01(std::uint64_t stream, std::uint64_t counter) const {
    const std::uint64_t word = bits(stream, counter) >> 11;  // top 53 bits
    return (static_cast<double>(word) + 0.5) * 0x1.0p-53;
}

namespace {

double sample_normal(SampleStream& s) {
    // Box-Muller; fixed consumption of two uniforms.
    const double u1 = s.next_uniform();
    const double u2 = s.next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Marsaglia-Tsang squeeze for shape >= 1; shapes below one are boosted via
// Gamma(shape + 1) * U^(1/shape).
double sample_gamma(double shape, double rate, SampleStream& s) {
    double boost = 1.0;
    double a = shape;
    if (a < 1.0) {
        boost = std::pow(s.next_uniform(), 1.0 / a);
        a += 1.0;
    }
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = sample_normal(s);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = s.next_uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return boost * d * v / rate;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return boost * d * v / rate;
    }
}

}  // namespace

double sample(const ContinuousDistribution& d, SampleStream& s) {
    if (const auto* f = std::get_if<GammaDist>(&d.family())) {
        return sample_gamma(f->shape, f->rate, s);
    }
    if (const auto* f = std::get_if<LognormalDist>(&d.family())) {
        return std::exp(f->log_mean + f->log_sd * sample_normal(s));
    }
    // Closed-form inverse cdf covers the remaining families.
    return d.quantile(s.next_uniform());
}

}  // namespace reot
