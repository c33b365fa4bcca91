#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <map>
#include <vector>

#include "reot/dist.hpp"
#include "reot/measures.hpp"
#include "reot/mmot.hpp"
#include "reot/oracle.hpp"
#include "reot/rng.hpp"
#include "reot/treaty.hpp"

using namespace reot;

namespace {

DiscreteDistribution grid(std::vector<double> support, std::vector<double> mass) {
    DiscreteDistribution d;
    d.support = std::move(support);
    d.mass = std::move(mass);
    d.validate();
    return d;
}

MarginalMap proportional(double f) {
    MarginalMap m;
    m.kind = MarginalMap::Kind::proportional;
    m.factor = f;
    return m;
}

MarginalMap cap_plus_share(double cap, double share, double excess_at) {
    MarginalMap m;
    m.kind = MarginalMap::Kind::cap_plus_share;
    m.cap = cap;
    m.share = share;
    m.excess_at = excess_at;
    return m;
}

struct PaperInstance {
    DiscreteDistribution d1, d2;
    GridLaw mu;
    MarginalMap m1, m2;
    DiscreteDistribution nu1, nu2;
};

PaperInstance paper_instance(int n, double q) {
    PaperInstance in;
    const auto line1 =
        ContinuousDistribution::lognormal(-0.5 * std::log(3.0), std::sqrt(std::log(3.0)));
    const auto line2 = ContinuousDistribution::shifted_pareto(3.0, 4.0);
    in.d1 = discretize(line1, n, q);
    in.d2 = discretize(line2, n, q);
    in.mu = product_law({in.d1, in.d2});
    in.m1 = proportional(0.5);
    in.m2 = cap_plus_share(0.5, 0.25, 0.95);
    in.nu1 = pushforward(in.d1, [&](double x) { return in.m1(x); });
    in.nu2 = pushforward(in.d2, [&](double x) { return in.m2(x); });
    return in;
}

}  // namespace

TEST_SUITE("mmot") {

TEST_CASE("marginal maps apply their closed forms") {
    MarginalMap id;
    CHECK(id(1.7) == doctest::Approx(1.7));
    CHECK(proportional(0.5)(3.0) == doctest::Approx(1.5));
    const MarginalMap m = cap_plus_share(0.5, 0.25, 0.95);
    CHECK(m(0.3) == doctest::Approx(0.3));
    CHECK(m(0.7) == doctest::Approx(0.5));
    CHECK(m(1.95) == doctest::Approx(0.5 + 0.25));
}

TEST_CASE("assemble keeps exactly the order-feasible columns") {
    const DiscreteDistribution d1 = grid({1.0, 2.0}, {0.5, 0.5});
    const DiscreteDistribution d2 = grid({1.0, 3.0}, {0.4, 0.6});
    const GridLaw mu = product_law({d1, d2});
    const DiscreteDistribution nu1 = grid({0.5, 1.5}, {0.5, 0.5});
    const DiscreteDistribution nu2 = grid({0.5, 2.0}, {0.4, 0.6});
    const MmotProblem p = assemble(mu, nu1, nu2);

    CHECK(p.n1 == 2);
    CHECK(p.m1 == 2);
    CHECK(p.rows() == 2 * 2 + 2 + 2);

    // Support deletion: y1 = 1.5 cannot pair with x1 = 1, y2 = 2 cannot pair
    // with x2 = 1. Counting feasible (k, l) per cell: (1,1)->1, (2,1)->2,
    // (1,3)->2, (2,3)->4 columns.
    CHECK(p.cols() == 1 + 2 + 2 + 4);
    for (const auto& col : p.columns) {
        CHECK(nu1.support[col[2]] <= d1.support[col[0]] + 1e-12);
        CHECK(nu2.support[col[3]] <= d2.support[col[1]] + 1e-12);
    }

    // Columns are enumerated with the claim-cell index fastest.
    for (std::size_t c = 1; c < p.columns.size(); ++c) {
        const auto key = [&](const std::array<std::uint16_t, 4>& v) {
            return ((static_cast<std::uint64_t>(v[3]) * p.m1 + v[2]) * p.n2 + v[1]) * p.n1 + v[0];
        };
        CHECK(key(p.columns[c - 1]) < key(p.columns[c]));
    }
}

TEST_CASE("column costs square the reinsured sum") {
    const PaperInstance in = paper_instance(6, 0.99);
    const MmotProblem p = assemble(in.mu, in.nu1, in.nu2);
    for (std::size_t c = 0; c < p.columns.size(); c += 7) {
        const auto& col = p.columns[c];
        const double r = in.d1.support[col[0]] - in.nu1.support[col[2]] +
                         in.d2.support[col[1]] - in.nu2.support[col[3]];
        CHECK(p.column_cost(c) == doctest::Approx(r * r).epsilon(1e-14));
    }
}

TEST_CASE("the assembled program prices columns by the index formula") {
    const PaperInstance in = paper_instance(12, 0.99);
    const MmotProblem p = assemble(in.mu, in.nu1, in.nu2);
    const StandardFormLP lp = p.to_lp();
    REQUIRE(lp.structured());
    REQUIRE(lp.num_vars == static_cast<std::int64_t>(p.cols()));

    // Spot-audit random columns: the triplet rows stored for the solver must
    // equal the rows derived from the (i, j, k, l) quadruple, and the stored
    // cost must equal the closed-form cost.
    const CounterRng rng(321);
    for (int t = 0; t < 10000; ++t) {
        const auto c = static_cast<std::size_t>(rng.uniform01(0, t) * p.cols());
        const auto& q = p.columns[c];
        const auto& rows = lp.triplets->rows[c];
        CHECK(rows[0] == q[0] + p.n1 * q[1]);
        CHECK(rows[1] == p.n1 * p.n2 + q[2]);
        CHECK(rows[2] == p.n1 * p.n2 + p.m1 + q[3]);
        CHECK(lp.cost[c] == doctest::Approx(p.column_cost(c)).epsilon(1e-15));
    }

    // Right-hand side stacks the claim law and both target marginals.
    for (std::size_t i = 0; i < in.mu.mass.size(); ++i)
        CHECK(lp.rhs[i] == doctest::Approx(in.mu.mass[i]));
    for (std::size_t k = 0; k < in.nu1.size(); ++k)
        CHECK(lp.rhs[in.mu.mass.size() + k] == doctest::Approx(in.nu1.mass[k]));
    for (std::size_t l = 0; l < in.nu2.size(); ++l)
        CHECK(lp.rhs[in.mu.mass.size() + in.nu1.size() + l] == doctest::Approx(in.nu2.mass[l]));
}

TEST_CASE("assemble names structurally infeasible marginals") {
    const DiscreteDistribution d1 = grid({1.0, 2.0}, {0.5, 0.5});
    const DiscreteDistribution d2 = grid({1.0, 3.0}, {0.4, 0.6});
    const GridLaw mu = product_law({d1, d2});
    // A target atom above every claim value can never satisfy y <= x.
    const DiscreteDistribution bad = grid({0.5, 9.0}, {0.5, 0.5});
    const DiscreteDistribution nu2 = grid({0.5, 2.0}, {0.4, 0.6});
    CHECK_THROWS_WITH_AS(assemble(mu, bad, nu2),
                         doctest::Contains("structurally infeasible"), std::invalid_argument);
}

TEST_CASE("tiny transport program matches basis enumeration") {
    const DiscreteDistribution d1 = grid({1.0, 2.0}, {0.35, 0.65});
    const DiscreteDistribution d2 = grid({0.5, 2.5}, {0.6, 0.4});
    const GridLaw mu = product_law({d1, d2});
    const DiscreteDistribution nu1 = pushforward(d1, [](double x) { return 0.5 * x; });
    const DiscreteDistribution nu2 = pushforward(d2, [](double x) { return std::min(x, 1.0); });
    const MmotProblem p = assemble(mu, nu1, nu2);
    REQUIRE(p.cols() <= 20);

    const MmotSolution sol = solve_mmot(p);
    REQUIRE(sol.lp.status == LPStatus::optimal);
    const double oracle = brute_force_lp(p.to_lp());
    CHECK(std::fabs(sol.objective - oracle) <= 1e-9 * std::max(1.0, std::fabs(oracle)));

    // The extracted treaty is a genuine coupling of the inputs.
    sol.treaty.validate();
    CHECK(check_feasible(sol.treaty, mu, 1e-9).ok);
    std::vector<double> m1(nu1.size(), 0.0), m2(nu2.size(), 0.0);
    for (const TreatyAtom& a : sol.treaty.atoms) {
        m1[a.yi[0]] += a.mass;
        m2[a.yi[1]] += a.mass;
    }
    for (std::size_t k = 0; k < nu1.size(); ++k)
        CHECK(m1[k] == doctest::Approx(nu1.mass[k]).epsilon(1e-9));
    for (std::size_t l = 0; l < nu2.size(); ++l)
        CHECK(m2[l] == doctest::Approx(nu2.mass[l]).epsilon(1e-9));

    // Objective equals the reinsured second moment of the treaty.
    double second = 0.0;
    for (const TreatyAtom& a : sol.treaty.atoms) {
        const double r = sol.treaty.x_of(a, 0) - sol.treaty.y_of(a, 0) +
                         sol.treaty.x_of(a, 1) - sol.treaty.y_of(a, 1);
        second += a.mass * r * r;
    }
    CHECK(second == doctest::Approx(sol.objective).epsilon(1e-9));
    CHECK(sol.reinsured.variance ==
          doctest::Approx(sol.objective - sol.reinsured.mean * sol.reinsured.mean).epsilon(1e-9));
}

TEST_CASE("deterministic benchmark treaty applies the maps cell by cell") {
    const PaperInstance in = paper_instance(8, 0.99);
    const DiscreteTreaty det = eta_det(in.mu, in.m1, in.m2);
    det.validate();
    CHECK(det.orientation == SecondBlock::retained);
    REQUIRE(det.atoms.size() == in.mu.mass.size());
    for (const TreatyAtom& a : det.atoms) {
        CHECK(det.y_of(a, 0) ==
              doctest::Approx(round_sig(in.m1(det.x_of(a, 0)), 12)).epsilon(1e-12));
        CHECK(det.y_of(a, 1) ==
              doctest::Approx(round_sig(in.m2(det.x_of(a, 1)), 12)).epsilon(1e-12));
    }
    CHECK(check_feasible(det, in.mu, 1e-10).ok);
}

TEST_CASE("medium instance reproduces the frozen reference values") {
    const PaperInstance in = paper_instance(12, 0.99);
    const MmotProblem p = assemble(in.mu, in.nu1, in.nu2);
    const MmotSolution sol = solve_mmot(p);
    REQUIRE(sol.lp.status == LPStatus::optimal);
    CHECK(sol.lp.max_primal_residual <= 1e-8);

    const double var_det = risk_report(reinsured_sum_law(eta_det(in.mu, in.m1, in.m2))).variance;
    const double var_ot = sol.reinsured.variance;
    CHECK(var_det == doctest::Approx(1.0899607362080674).epsilon(1e-6));
    CHECK(var_ot == doctest::Approx(0.8304027572572332).epsilon(1e-6));
    CHECK(var_ot < var_det);

    // Treaty masses renormalize to an exact unit total.
    double total = 0.0;
    for (const TreatyAtom& a : sol.treaty.atoms) total += a.mass;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_NOTHROW(sol.treaty.validate());
}

TEST_CASE("bivariate reports carry consistent margins and counts") {
    const PaperInstance in = paper_instance(10, 0.99);
    const MmotProblem p = assemble(in.mu, in.nu1, in.nu2);
    const MmotSolution sol = solve_mmot(p);
    REQUIRE(sol.lp.status == LPStatus::optimal);

    const MarginalReports rep = marginal_reports(sol.treaty);
    REQUIRE(rep.tables.size() == 6);
    REQUIRE(rep.n1 * rep.n2 == static_cast<int>(in.mu.mass.size()));

    const auto table = [&](const std::string& name) -> const BivariateTable& {
        for (const BivariateTable& t : rep.tables)
            if (t.name == name) return t;
        REQUIRE(false);
        return rep.tables.front();
    };

    const auto row_sums = [](const BivariateTable& t) {
        std::vector<double> s(t.row_values.size(), 0.0);
        for (std::size_t i = 0; i < t.row_values.size(); ++i)
            for (std::size_t j = 0; j < t.col_values.size(); ++j)
                s[i] += t.pmf[i * t.col_values.size() + j];
        return s;
    };
    const auto col_sums = [](const BivariateTable& t) {
        std::vector<double> s(t.col_values.size(), 0.0);
        for (std::size_t i = 0; i < t.row_values.size(); ++i)
            for (std::size_t j = 0; j < t.col_values.size(); ++j)
                s[j] += t.pmf[i * t.col_values.size() + j];
        return s;
    };

    const BivariateTable& x1y1 = table("x1_y1");
    const std::vector<double> r = row_sums(x1y1);
    for (std::size_t i = 0; i < in.d1.size(); ++i)
        CHECK(r[i] == doctest::Approx(in.d1.mass[i]).epsilon(1e-12));
    const std::vector<double> c = col_sums(x1y1);
    for (std::size_t k = 0; k < in.nu1.size(); ++k)
        CHECK(c[k] == doctest::Approx(in.nu1.mass[k]).epsilon(1e-12));

    const BivariateTable& yy = table("y1_y2");
    const std::vector<double> yr = row_sums(yy);
    const std::vector<double> yc = col_sums(yy);
    for (std::size_t k = 0; k < in.nu1.size(); ++k)
        CHECK(yr[k] == doctest::Approx(in.nu1.mass[k]).epsilon(1e-12));
    for (std::size_t l = 0; l < in.nu2.size(); ++l)
        CHECK(yc[l] == doctest::Approx(in.nu2.mass[l]).epsilon(1e-12));

    // Retained-pair table accumulates to probability one.
    const BivariateTable& rr = table("r1_r2");
    double total = 0.0;
    for (double v : rr.pmf) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    // Support counts: at least one second-block point on every populated
    // claim cell, and the joint count dominates each per-line count.
    REQUIRE(rep.conditional_support_counts.size() == in.mu.mass.size());
    for (std::size_t cell = 0; cell < in.mu.mass.size(); ++cell) {
        if (in.mu.mass[cell] > 1e-12) {
            CHECK(rep.conditional_support_counts[cell] >= 1);
            CHECK(rep.conditional_support_counts[cell] >= rep.y1_support_counts[cell]);
            CHECK(rep.conditional_support_counts[cell] >= rep.y2_support_counts[cell]);
            CHECK(rep.y1_support_counts[cell] >= 1);
        } else {
            CHECK(rep.conditional_support_counts[cell] == 0);
        }
    }
}

TEST_CASE("marginal reports require a two-line retained treaty") {
    DiscreteTreaty t;
    t.n_lines = 1;
    t.orientation = SecondBlock::retained;
    t.x_grids = {{1.0}};
    t.y_grids = {{0.5}};
    t.atoms = {{{0}, {0}, 1.0}};
    t.validate();
    CHECK_THROWS_AS(marginal_reports(t), std::invalid_argument);
}

}  // TEST_SUITE
