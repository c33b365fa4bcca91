#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "reot/contracts.hpp"
#include "reot/dist.hpp"
#include "reot/lp.hpp"
#include "reot/oracle.hpp"
#include "test_util.hpp"

using namespace reot;

TEST_SUITE("oracle") {

TEST_CASE("brute force agrees with hand-solved programs") {
    // min x0 + 2 x1  s.t.  x0 + x1 = 1  ->  x = (1, 0), objective 1.
    auto lp = testutil::dense_lp({{1.0, 1.0}}, {1.0, 2.0}, {1.0});
    CHECK(brute_force_lp(lp) == doctest::Approx(1.0).epsilon(1e-12));

    // Transport-like: two sources {0.4, 0.6}, two sinks {0.5, 0.5},
    // costs (0, 1; 1, 0). Optimum ships the overlap diagonally: cost 0.1.
    auto tp = testutil::dense_lp(
        {{1.0, 1.0, 0.0, 0.0},
         {0.0, 0.0, 1.0, 1.0},
         {1.0, 0.0, 1.0, 0.0},
         {0.0, 1.0, 0.0, 1.0}},
        {0.0, 1.0, 1.0, 0.0}, {0.4, 0.6, 0.5, 0.5});
    CHECK(brute_force_lp(tp) == doctest::Approx(0.1).epsilon(1e-10));
}

TEST_CASE("brute force refuses oversized programs") {
    // 21 variables exceeds the hard cap.
    std::vector<double> row(21, 1.0);
    std::vector<double> cost(21, 1.0);
    auto lp = testutil::dense_lp({row}, cost, {1.0});
    CHECK_THROWS_AS(brute_force_lp(lp), std::invalid_argument);

    // 11 rows exceeds the row cap.
    std::vector<std::vector<double>> rows(11, std::vector<double>{1.0});
    std::vector<double> rhs(11, 1.0);
    auto tall = testutil::dense_lp(rows, {1.0}, rhs);
    CHECK_THROWS_AS(brute_force_lp(tall), std::invalid_argument);
}

TEST_CASE("brute force rejects inconsistent and infeasible systems") {
    // x0 = 1 and x0 = 2 simultaneously: inconsistent.
    auto bad = testutil::dense_lp({{1.0}, {1.0}}, {1.0}, {1.0, 2.0});
    CHECK_THROWS_AS(brute_force_lp(bad), std::runtime_error);

    // x0 + x1 = -1 with x >= 0: no feasible vertex.
    auto neg = testutil::dense_lp({{1.0, 1.0}}, {1.0, 1.0}, {-1.0});
    CHECK_THROWS_AS(brute_force_lp(neg), std::runtime_error);
}

TEST_CASE("comparison records carry the discrepancy arithmetic") {
    auto rep = compare_with_oracle(1.5, 1.0, OracleMethod::basis_enumeration);
    CHECK(rep.candidate == 1.5);
    CHECK(rep.oracle_value == 1.0);
    CHECK(rep.abs_discrepancy == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(rep.rel_discrepancy == doctest::Approx(0.5).epsilon(1e-15));

    // Small oracle values: relative denominator saturates at 1.
    auto tiny = compare_with_oracle(0.2, 0.1, OracleMethod::monte_carlo, 7u);
    CHECK(tiny.rel_discrepancy == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(tiny.seed.has_value());
    CHECK(*tiny.seed == 7u);

    // Large oracle values: relative denominator is |oracle|.
    auto big = compare_with_oracle(210.0, 200.0, OracleMethod::refinement);
    CHECK(big.abs_discrepancy == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(big.rel_discrepancy == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("monte carlo estimate matches known quota-share figures") {
    // Half of an exponential(1) claim is ceded; retained mean is 1/2,
    // loading with beta = 2 is 2 * E[ceded] = 1, and the retained VaR at
    // alpha = 0.1 is 0.5 * ln(10).
    Contract c = QuotaShareContract{0.5};
    std::vector<ContinuousDistribution> lines = {ContinuousDistribution::exponential(1.0)};
    const std::int64_t n = 200000;
    auto est = mc_estimate(c, lines, n, 7, 0.1, {2.0});

    CHECK(est.n_samples == n);
    CHECK(est.seed == 7);
    CHECK(est.retained_mean_std_error > 0.0);
    CHECK(est.retained_mean_std_error < 5e-3);
    CHECK(std::abs(est.retained.mean - 0.5) < 4.0 * est.retained_mean_std_error);
    // Retained is 0.5 X, so its variance is 0.25 Var(X) = 0.25.
    CHECK(est.retained.variance == doctest::Approx(0.25).epsilon(0.05));
    CHECK(est.reinsured.mean == doctest::Approx(0.5).epsilon(0.02));
    REQUIRE(est.loading.has_value());
    CHECK(*est.loading == doctest::Approx(1.0).epsilon(0.02));
    CHECK(est.loading_std_error > 0.0);
    REQUIRE(est.retained.var_alpha.has_value());
    CHECK(*est.retained.var_alpha ==
          doctest::Approx(0.5 * std::log(10.0)).epsilon(0.02));
}

TEST_CASE("monte carlo estimates are deterministic in the seed") {
    Contract c = StopLossContract{1.0};
    std::vector<ContinuousDistribution> lines = {ContinuousDistribution::exponential(1.0)};
    auto a = mc_estimate(c, lines, 50000, 11);
    auto b = mc_estimate(c, lines, 50000, 11);
    CHECK(a.retained.mean == b.retained.mean);
    CHECK(a.retained.variance == b.retained.variance);
    CHECK(a.reinsured.mean == b.reinsured.mean);

    auto other = mc_estimate(c, lines, 50000, 12);
    CHECK(other.retained.mean != a.retained.mean);
}

TEST_CASE("refinement sweep flags converging and diverging sequences") {
    auto conv = refinement_sweep(
        "grid", {10.0, 20.0, 40.0, 80.0},
        [](double n) { return 1.0 + 1.0 / n; }, 0.05);
    CHECK(conv.label == "grid");
    REQUIRE(conv.rows.size() == 4);
    CHECK(conv.rows[0].parameter == 10.0);
    CHECK(conv.rows[3].value == doctest::Approx(1.0125).epsilon(1e-12));
    CHECK(conv.stabilized);
    // |1.0125 - 1.025| / max(1, 1.0125)
    CHECK(conv.final_change == doctest::Approx(0.0125 / 1.0125).epsilon(1e-9));

    auto div = refinement_sweep(
        "grid", {10.0, 20.0, 40.0, 80.0},
        [](double n) { return n; }, 0.05);
    CHECK_FALSE(div.stabilized);
}

}  // TEST_SUITE("oracle")
