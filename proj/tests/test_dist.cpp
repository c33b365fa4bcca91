#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "reot/dist.hpp"
#include "reot/rng.hpp"

using namespace reot;

TEST_SUITE("dist") {

TEST_CASE("closed-form moments of the continuous families") {
    const double ln3 = std::log(3.0);
    struct Row {
        ContinuousDistribution d;
        double mean, variance;
    };
    const std::vector<Row> rows = {
        {ContinuousDistribution::gamma(0.5, 0.5), 1.0, 2.0},
        {ContinuousDistribution::shifted_pareto(3.0, 4.0), 1.0, 2.0},
        {ContinuousDistribution::lognormal(-0.5 * ln3, std::sqrt(ln3)), 1.0, 2.0},
        {ContinuousDistribution::exponential(1.0), 1.0, 1.0},
        {ContinuousDistribution::uniform(0.0, 1.0), 0.5, 1.0 / 12.0},
    };
    for (const Row& r : rows) {
        CHECK(r.d.mean() == doctest::Approx(r.mean).epsilon(1e-12));
        CHECK(r.d.variance() == doctest::Approx(r.variance).epsilon(1e-12));
    }
}

TEST_CASE("quantile inverts the cdf") {
    const std::vector<ContinuousDistribution> dists = {
        ContinuousDistribution::gamma(0.5, 0.5),
        ContinuousDistribution::shifted_pareto(3.0, 4.0),
        ContinuousDistribution::lognormal(-0.5 * std::log(3.0), std::sqrt(std::log(3.0))),
        ContinuousDistribution::exponential(2.0),
        ContinuousDistribution::uniform(0.25, 4.0),
    };
    for (const auto& d : dists) {
        for (double p : {0.001, 0.05, 0.25, 0.5, 0.75, 0.95, 0.999}) {
            const double x = d.quantile(p);
            CHECK(d.cdf(x) == doctest::Approx(p).epsilon(1e-8));
        }
    }
}

TEST_CASE("family constructors reject bad parameters") {
    CHECK_THROWS_AS(ContinuousDistribution::gamma(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ContinuousDistribution::shifted_pareto(3.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ContinuousDistribution::lognormal(0.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(ContinuousDistribution::exponential(0.0), std::invalid_argument);
    CHECK_THROWS_AS(ContinuousDistribution::uniform(2.0, 1.0), std::invalid_argument);
}

TEST_CASE("discretize bins onto the prescribed grid and keeps total mass") {
    const auto d = ContinuousDistribution::exponential(1.0);
    const int n = 40;
    const double q = 0.999;
    const DiscreteDistribution g = discretize(d, n, q);
    g.validate();
    REQUIRE(g.size() == static_cast<std::size_t>(n));

    const double u = d.quantile(q);
    for (int k = 1; k <= n; ++k)
        CHECK(g.support[k - 1] == doctest::Approx(k * u / n).epsilon(1e-14));

    double total = 0.0;
    for (double m : g.mass) total += m;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));

    // Interior bins carry cdf increments; the last bin absorbs the tail.
    CHECK(g.mass[0] == doctest::Approx(d.cdf(u / n)).epsilon(1e-12));
    CHECK(g.mass[n - 1] == doctest::Approx(1.0 - d.cdf((n - 1) * u / n)).epsilon(1e-12));
}

TEST_CASE("discretize moments approach the continuous ones") {
    const auto d = ContinuousDistribution::gamma(0.5, 0.5);
    const DiscreteDistribution coarse = discretize(d, 50, 0.9999);
    const DiscreteDistribution fine = discretize(d, 2000, 0.9999);
    CHECK(std::fabs(fine.mean() - d.mean()) < std::fabs(coarse.mean() - d.mean()));
    CHECK(std::fabs(fine.mean() - d.mean()) < 5e-3);
    CHECK(std::fabs(fine.variance() - d.variance()) < 5e-2);
}

TEST_CASE("grid quantile conventions") {
    DiscreteDistribution g;
    g.support = {1.0, 2.0, 3.0, 4.0};
    g.mass = {0.25, 0.25, 0.25, 0.25};
    g.validate();
    CHECK(g.quantile(0.0) == 0.0);
    CHECK(g.quantile(-0.5) == 0.0);
    CHECK(g.quantile(0.25) == 1.0);
    CHECK(g.quantile(0.25 + 1e-6) == 2.0);
    CHECK(g.quantile(1.0) == 4.0);
    CHECK(g.cdf(0.5) == 0.0);
    CHECK(g.cdf(2.0) == doctest::Approx(0.5));
    CHECK(g.cdf(9.0) == doctest::Approx(1.0));
}

TEST_CASE("pushforward merges equal images and reports the index map") {
    DiscreteDistribution g;
    g.support = {0.5, 1.0, 1.5, 2.0};
    g.mass = {0.25, 0.25, 0.25, 0.25};
    std::vector<int> idx;
    const DiscreteDistribution h =
        pushforward(g, [](double x) { return std::min(x, 1.2); }, &idx);
    h.validate();
    REQUIRE(h.size() == 3);
    CHECK(h.support[0] == doctest::Approx(0.5));
    CHECK(h.support[1] == doctest::Approx(1.0));
    CHECK(h.support[2] == doctest::Approx(1.2));
    CHECK(h.mass[2] == doctest::Approx(0.5));
    CHECK(idx == std::vector<int>{0, 1, 2, 2});
}

TEST_CASE("round_sig keeps the stated number of significant digits") {
    CHECK(round_sig(1234567.89, 3) == doctest::Approx(1230000.0));
    CHECK(round_sig(0.00123456, 3) == doctest::Approx(0.00123));
    CHECK(round_sig(-9.87654, 2) == doctest::Approx(-9.9));
    CHECK(round_sig(0.0, 5) == 0.0);
}

TEST_CASE("product law stores axis 0 fastest and returns its marginals") {
    DiscreteDistribution a;
    a.support = {1.0, 2.0};
    a.mass = {0.3, 0.7};
    DiscreteDistribution b;
    b.support = {0.5, 1.5, 2.5};
    b.mass = {0.2, 0.5, 0.3};
    const GridLaw mu = product_law({a, b});
    REQUIRE(mu.axes() == 2);
    REQUIRE(mu.flat_size() == 6);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 2; ++i)
            CHECK(mu.mass[i + 2 * j] == doctest::Approx(a.mass[i] * b.mass[j]).epsilon(1e-15));

    const DiscreteDistribution m0 = mu.marginal(0);
    const DiscreteDistribution m1 = mu.marginal(1);
    for (std::size_t i = 0; i < 2; ++i) CHECK(m0.mass[i] == doctest::Approx(a.mass[i]));
    for (std::size_t j = 0; j < 3; ++j) CHECK(m1.mass[j] == doctest::Approx(b.mass[j]));
    CHECK(m0.support == a.support);
    CHECK(m1.support == b.support);
}

TEST_CASE("counter rng is a pure function of seed, stream, counter") {
    const CounterRng r1(123), r2(123), r3(124);
    CHECK(r1.bits(5, 9) == r2.bits(5, 9));
    CHECK(r1.bits(5, 9) != r3.bits(5, 9));
    CHECK(r1.bits(5, 9) != r1.bits(5, 10));
    CHECK(r1.bits(5, 9) != r1.bits(6, 9));
    for (std::uint64_t k = 0; k < 100; ++k) {
        const double u = r1.uniform01(0, k);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("samplers hit the family moments") {
    const CounterRng rng(42);
    const std::vector<ContinuousDistribution> dists = {
        ContinuousDistribution::exponential(1.0),
        ContinuousDistribution::gamma(0.5, 0.5),
        ContinuousDistribution::lognormal(-0.5 * std::log(3.0), std::sqrt(std::log(3.0))),
        ContinuousDistribution::shifted_pareto(3.0, 4.0),
    };
    const int n = 200000;
    for (std::size_t di = 0; di < dists.size(); ++di) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            SampleStream s(rng, di * n + i);
            const double x = sample(dists[di], s);
            CHECK(x >= 0.0);
            sum += x;
        }
        const double se = std::sqrt(dists[di].variance() / n);
        CHECK(std::fabs(sum / n - dists[di].mean()) < 6.0 * se);
    }
}

}  // TEST_SUITE
