#include "reot/measures.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace reot {

std::pair<double, double> mean_variance(const DiscreteDistribution& d) {
    d.validate();
    return {d.mean(), d.variance()};
}

RiskReport risk_report(const DiscreteDistribution& d, std::optional<double> alpha) {
    RiskReport r;
    std::tie(r.mean, r.variance) = mean_variance(d);
    if (alpha) {
        r.alpha = *alpha;
        r.var_alpha = value_at_risk(d, *alpha);
    }
    return r;
}

double value_at_risk(const DiscreteDistribution& d, double alpha) {
    d.validate();
    if (alpha < 0.0 || alpha >= 1.0)
        throw std::invalid_argument("value_at_risk: alpha must lie in [0, 1)");
    // Tail mass strictly beyond each support point, scanned in increasing
    // order; the first point whose tail fits under alpha is the lower VaR.
    // The comparison carries a 1e-12 slack so ties at exactly alpha resolve
    // toward the smaller threshold despite summation noise.
    const std::size_t n = d.size();
    std::vector<double> tail(n, 0.0);
    double acc = 0.0;
    for (std::size_t i = n; i-- > 1;) {
        acc += d.mass[i];
        tail[i - 1] = acc;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (tail[i] <= alpha + 1e-12) return d.support[i];
    }
    return d.support.back();
}

namespace {

DiscreteDistribution sum_law(const DiscreteTreaty& t, bool retained) {
    t.validate();
    std::map<double, double> merged;
    for (const auto& a : t.atoms) {
        double ceded = 0.0;
        double kept = 0.0;
        for (int l = 0; l < t.n_lines; ++l) {
            const double x = t.x_of(a, l);
            const double y = t.y_of(a, l);
            // Second block holds ceded amounts or the deductible depending
            // on the treaty orientation.
            const double r = (t.orientation == SecondBlock::reinsured) ? y : x - y;
            ceded += r;
            kept += x - r;
        }
        double key = round_sig(retained ? kept : ceded, 12);
        // Aggregated sums can brush tiny negative values from cancellation.
        if (key < 0.0 && key > -1e-12) key = 0.0;
        merged[key] += a.mass;
    }
    DiscreteDistribution out;
    out.support.reserve(merged.size());
    out.mass.reserve(merged.size());
    for (const auto& [value, m] : merged) {
        out.support.push_back(value);
        out.mass.push_back(m);
    }
    out.validate();
    return out;
}

}  // namespace

DiscreteDistribution retained_sum_law(const DiscreteTreaty& t) { return sum_law(t, true); }

DiscreteDistribution reinsured_sum_law(const DiscreteTreaty& t) { return sum_law(t, false); }

}  // namespace reot
