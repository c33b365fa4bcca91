#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <map>
#include <vector>

#include "reot/dist.hpp"
#include "reot/measures.hpp"
#include "reot/treaty.hpp"

using namespace reot;

namespace {

DiscreteTreaty two_line_treaty(SecondBlock orientation) {
    DiscreteTreaty t;
    t.n_lines = 2;
    t.orientation = orientation;
    t.x_grids = {{1.0, 2.0}, {2.0, 3.0}};
    t.y_grids = {{0.5, 1.0}, {1.0, 1.5}};
    t.atoms = {
        {{0, 0}, {0, 0}, 0.25},
        {{0, 1}, {0, 1}, 0.25},
        {{1, 0}, {1, 0}, 0.30},
        {{1, 1}, {1, 1}, 0.20},
    };
    t.validate();
    return t;
}

}  // namespace

TEST_SUITE("measures") {

TEST_CASE("value at risk is the lower quantile at level 1 - alpha") {
    DiscreteDistribution d;
    d.support = {1.0, 2.0, 3.0, 4.0};
    d.mass = {0.25, 0.25, 0.25, 0.25};
    CHECK(value_at_risk(d, 0.1) == 4.0);
    CHECK(value_at_risk(d, 0.25) == 3.0);  // cdf(3) = 0.75 attains the level
    CHECK(value_at_risk(d, 0.5) == 2.0);
    CHECK(value_at_risk(d, 0.25 - 1e-13) == 3.0);  // tie slack
    CHECK(value_at_risk(d, 0.0) == 4.0);           // essential supremum
    CHECK_THROWS_AS(value_at_risk(d, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(value_at_risk(d, 1.0), std::invalid_argument);
}

TEST_CASE("risk report bundles the moments and optional tail value") {
    DiscreteDistribution d;
    d.support = {1.0, 3.0};
    d.mass = {0.5, 0.5};
    const RiskReport plain = risk_report(d);
    CHECK(plain.mean == doctest::Approx(2.0));
    CHECK(plain.variance == doctest::Approx(1.0));
    CHECK_FALSE(plain.var_alpha.has_value());

    const RiskReport tail = risk_report(d, 0.25);
    REQUIRE(tail.var_alpha.has_value());
    CHECK(*tail.var_alpha == 3.0);
    CHECK(tail.alpha == doctest::Approx(0.25));
}

TEST_CASE("sum laws respect the treaty orientation") {
    // Second block holds ceded amounts: reinsured sum = y1 + y2.
    const DiscreteTreaty ceded = two_line_treaty(SecondBlock::reinsured);
    const DiscreteDistribution rein = reinsured_sum_law(ceded);
    const DiscreteDistribution ret = retained_sum_law(ceded);

    // Atom (x, y) pairs: (1,2|0.5,1), (1,3|0.5,1.5), (2,2|1,1), (2,3|1,1.5).
    std::map<double, double> rein_expect = {{1.5, 0.25}, {2.0, 0.55}, {2.5, 0.20}};
    double total = 0.0;
    for (std::size_t i = 0; i < rein.size(); ++i) {
        const auto it = rein_expect.find(rein.support[i]);
        REQUIRE(it != rein_expect.end());
        CHECK(rein.mass[i] == doctest::Approx(it->second).epsilon(1e-12));
        total += rein.mass[i];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    // Retained = (x1 - y1) + (x2 - y2): 1.5, 2.0, 2.0, 2.5 with same masses.
    std::map<double, double> ret_expect = {{1.5, 0.25}, {2.0, 0.55}, {2.5, 0.20}};
    for (std::size_t i = 0; i < ret.size(); ++i) {
        const auto it = ret_expect.find(ret.support[i]);
        REQUIRE(it != ret_expect.end());
        CHECK(ret.mass[i] == doctest::Approx(it->second).epsilon(1e-12));
    }

    // Same atoms with the second block holding the retained amounts swaps
    // the two laws.
    const DiscreteTreaty retained = two_line_treaty(SecondBlock::retained);
    const DiscreteDistribution ret2 = retained_sum_law(retained);
    const DiscreteDistribution rein2 = reinsured_sum_law(retained);
    CHECK(ret2.support == rein.support);
    CHECK(rein2.support == ret.support);
}

TEST_CASE("sum law merges equal sums deterministically") {
    DiscreteTreaty t;
    t.n_lines = 2;
    t.orientation = SecondBlock::reinsured;
    t.x_grids = {{1.0, 2.0}, {1.0, 2.0}};
    t.y_grids = {{0.0, 1.0}, {0.0, 1.0}};
    // Ceded sums: 0+1 and 1+0 both equal 1.
    t.atoms = {
        {{0, 0}, {0, 1}, 0.5},
        {{1, 1}, {1, 0}, 0.5},
    };
    t.validate();
    const DiscreteDistribution s = reinsured_sum_law(t);
    REQUIRE(s.size() == 1);
    CHECK(s.support[0] == doctest::Approx(1.0));
    CHECK(s.mass[0] == doctest::Approx(1.0));
}

TEST_CASE("moments of the sum law match direct accumulation") {
    const DiscreteTreaty t = two_line_treaty(SecondBlock::reinsured);
    const DiscreteDistribution s = reinsured_sum_law(t);
    double mean = 0.0, second = 0.0;
    for (const TreatyAtom& a : t.atoms) {
        const double v = t.y_of(a, 0) + t.y_of(a, 1);
        mean += a.mass * v;
        second += a.mass * v * v;
    }
    const auto [m, var] = mean_variance(s);
    CHECK(m == doctest::Approx(mean).epsilon(1e-12));
    CHECK(var == doctest::Approx(second - mean * mean).epsilon(1e-12));
}

}  // TEST_SUITE
