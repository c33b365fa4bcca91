// Risk functionals on grid laws and treaty-induced laws of the retained /
// reinsured sums.
#pragma once

#include <optional>
#include <utility>

#include "reot/dist.hpp"
#include "reot/treaty.hpp"

namespace reot {

// Moment summary of a law, with value-at-risk attached when a level was
// requested.
struct RiskReport {
    double mean = 0.0;
    double variance = 0.0;
    std::optional<double> var_alpha;  // value-at-risk at level `alpha`
    double alpha = 0.0;
};

// Exact weighted first two moments of a grid law.
std::pair<double, double> mean_variance(const DiscreteDistribution& d);

// Moments of a grid law bundled as a report; computes VaR when alpha is set.
RiskReport risk_report(const DiscreteDistribution& d, std::optional<double> alpha = {});

// Lower value-at-risk at level alpha: the smallest threshold u with
// P(X > u) <= alpha, i.e. inf{u : tail mass beyond u <= alpha}. Ties at
// exactly alpha resolve toward the smaller threshold. Always >= 0 for laws
// on the nonnegative half line.
double value_at_risk(const DiscreteDistribution& d, double alpha);

// Law of the retained sum of a treaty: sum_i (x_i - y_i) under the
// `reinsured` orientation, sum_i y_i under `retained`. Image values are
// deduplicated like pushforward (12 significant digits).
DiscreteDistribution retained_sum_law(const DiscreteTreaty& t);

// Law of the ceded sum (the complementary aggregation).
DiscreteDistribution reinsured_sum_law(const DiscreteTreaty& t);

}  // namespace reot
