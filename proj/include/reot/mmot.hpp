// Discrete multi-marginal optimal transport: couple a bivariate claim law
// with two prescribed retained-amount marginals so that the second moment of
// the reinsured sum is minimal. The problem assembles into a structured LP
// whose columns carry one unit in the claim block and one per target block.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "reot/dist.hpp"
#include "reot/lp.hpp"
#include "reot/measures.hpp"
#include "reot/treaty.hpp"

namespace reot {

// Monotone transforms used to generate target marginals and the deterministic
// benchmark treaty.
struct MarginalMap {
    enum class Kind { identity, proportional, cap_plus_share };
    Kind kind = Kind::identity;
    double factor = 1.0;    // proportional: factor * x
    double cap = 0.0;       // cap_plus_share: min(x, cap) + share * (x - excess_at)+
    double share = 0.0;
    double excess_at = 0.0;

    double operator()(double x) const;
};

// Assembled transport problem over the surviving index set
//   { (i, j, k, l) : y1[k] <= x1[i], y2[l] <= x2[j] }
// enumerated in ascending flattened order with i fastest, then j, k, l.
struct MmotProblem {
    GridLaw mu;                     // joint claim law, two axes
    DiscreteDistribution nu1, nu2;  // retained-amount targets per line
    std::vector<std::array<std::uint16_t, 4>> columns;  // (i, j, k, l)
    int n1 = 0, n2 = 0, m1 = 0, m2 = 0;

    int rows() const { return n1 * n2 + m1 + m2; }
    std::int64_t cols() const { return static_cast<std::int64_t>(columns.size()); }

    // Squared reinsured sum (x1[i] - y1[k] + x2[j] - y2[l])^2 of one column.
    double column_cost(std::size_t c) const;

    // Equality-form LP with the structured triplet descriptor attached:
    // row i + n1*j carries the claim cell, n1*n2 + k the first target,
    // n1*n2 + m1 + l the second.
    StandardFormLP to_lp() const;
};

// Builds the surviving column set. Throws std::invalid_argument when a
// positive-mass constraint row has no surviving column (structural
// infeasibility), naming the row.
MmotProblem assemble(const GridLaw& mu_joint, const DiscreteDistribution& nu1,
                     const DiscreteDistribution& nu2);

struct MmotSolution {
    DiscreteTreaty treaty;   // orientation: retained (second block = deductible)
    double objective = 0.0;  // E[(R1 + R2)^2] at the optimum
    // Moments of the reinsured sum R1 + R2. The mean is fixed by the
    // marginals; variance = objective - mean^2.
    RiskReport reinsured;
    LPSolution lp;  // full solver diagnostics
};

// Solves the assembled LP with the two-phase simplex (all-artificial start)
// and extracts the optimal treaty. On a non-optimal LP status the treaty is
// left empty and the status travels in `lp.status`.
MmotSolution solve_mmot(const MmotProblem& p, const SimplexOptions& options = {});

// Deterministic benchmark treaty: each claim cell (i, j) is coupled with
// (map1(x1[i]), map2(x2[j])). Throws if a map output leaves [0, x].
DiscreteTreaty eta_det(const GridLaw& mu_joint, const MarginalMap& map1,
                       const MarginalMap& map2);

// Figure data: bivariate probability tables and the per-cell cardinality of
// the conditional second-block support (> 1 on cells where the treaty
// randomizes).
struct BivariateTable {
    std::string name;                // "x1_y1", "x2_y2", "x1_y2", "x2_y1", "y1_y2", "r1_r2"
    std::vector<double> row_values;  // first coordinate grid
    std::vector<double> col_values;  // second coordinate grid
    std::vector<double> pmf;         // row-major mass table
};

struct MarginalReports {
    std::vector<BivariateTable> tables;
    // Row-major over claim cells (entry i * n2 + j), counting atoms above
    // mass 1e-12 conditional on (x1[i], x2[j]): distinct (y1, y2) pairs, and
    // distinct values of each coordinate alone.
    std::vector<int> conditional_support_counts;
    std::vector<int> y1_support_counts;
    std::vector<int> y2_support_counts;
    std::vector<double> claim_cell_mass;  // aligned with the counts
    int n1 = 0, n2 = 0;
};

MarginalReports marginal_reports(const DiscreteTreaty& t);

}  // namespace reot
