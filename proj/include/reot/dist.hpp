// Claim-size distributions: continuous parametric families, finite grid laws,
// and the binning / pushforward operations that connect the two.
#pragma once

#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace reot {

// ---------------------------------------------------------------------------
// Continuous families (all supported on the nonnegative half line except
// Uniform, which carries its own interval).

struct GammaDist {
    double shape;
    double rate;
};

// Survival (scale / (x + scale))^tail_index on x >= 0 (a Lomax law).
struct ShiftedParetoDist {
    double scale;
    double tail_index;
};

struct LognormalDist {
    double log_mean;
    double log_sd;
};

struct ExponentialDist {
    double rate;
};

struct UniformDist {
    double lo;
    double hi;
};

class ContinuousDistribution {
public:
    using Family = std::variant<GammaDist, ShiftedParetoDist, LognormalDist,
                                ExponentialDist, UniformDist>;

    explicit ContinuousDistribution(Family family);

    static ContinuousDistribution gamma(double shape, double rate);
    static ContinuousDistribution shifted_pareto(double scale, double tail_index);
    static ContinuousDistribution lognormal(double log_mean, double log_sd);
    static ContinuousDistribution exponential(double rate);
    static ContinuousDistribution uniform(double lo, double hi);

    double cdf(double x) const;
    double pdf(double x) const;

    // Inverse cdf. Closed form where the family admits one; otherwise a
    // bracketing bisection on the cdf to 1e-12 absolute width.
    double quantile(double p) const;

    double mean() const;
    double variance() const;

    const Family& family() const { return family_; }
    std::string family_name() const;

private:
    Family family_;
};

// ---------------------------------------------------------------------------
// Finite law on a strictly increasing nonnegative support.

struct DiscreteDistribution {
    std::vector<double> support;
    std::vector<double> mass;

    // Enforces the representation invariants: matching sizes, strictly
    // increasing nonnegative support, nonnegative masses summing to 1
    // within 1e-12. Throws std::invalid_argument with the violated rule.
    void validate() const;

    double mean() const;
    double variance() const;
    double cdf(double x) const;

    // Smallest support point with cdf >= p; p <= 0 maps to 0 by convention
    // so that quantile compositions stay below the identity.
    double quantile(double p) const;

    std::size_t size() const { return support.size(); }
};

// Bins a continuous law onto {k*u/n : k=1..n} with u the tail_quantile-level
// quantile; interior bins take cdf increments, the last bin absorbs the
// whole upper tail so the masses sum to one exactly.
DiscreteDistribution discretize(const ContinuousDistribution& d, int n_bins,
                                double tail_quantile);

// Rounds to `digits` significant decimal digits (0 stays 0). Used to
// deduplicate image points of grid maps deterministically.
double round_sig(double v, int digits);

// Law of f(X) for a grid law X. Image values are deduplicated after rounding
// to 12 significant digits; masses of merged points accumulate. When
// index_map is given, entry i receives the index of f(support[i]) in the
// returned support.
DiscreteDistribution pushforward(const DiscreteDistribution& d,
                                 const std::function<double(double)>& f,
                                 std::vector<int>* index_map = nullptr);

// ---------------------------------------------------------------------------
// Joint law on a product grid. Axis 0 is the fastest-varying index in the
// flattened mass vector: flat = i0 + n0*(i1 + n1*(i2 + ...)).

struct GridLaw {
    std::vector<std::vector<double>> grids;
    std::vector<double> mass;

    std::size_t axes() const { return grids.size(); }
    std::size_t flat_size() const;
    std::size_t flat_index(std::span<const int> idx) const;
    void validate() const;

    double mass_at(std::span<const int> idx) const { return mass[flat_index(idx)]; }

    // Marginal law along one axis (sums the other axes out).
    DiscreteDistribution marginal(std::size_t axis) const;
};

// Independent product of per-axis grid laws.
GridLaw product_law(const std::vector<DiscreteDistribution>& margins);

}  // namespace reot
