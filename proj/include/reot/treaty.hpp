// Discrete reinsurance treaties: joint laws over (claim vector, second-block
// vector) pairs on product grids, plus the feasibility / dominance / coupling
// operations defined on them.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reot/contracts.hpp"
#include "reot/dist.hpp"

namespace reot {

// What the second block of a treaty stores. `reinsured` means atoms pair a
// claim vector x with ceded amounts y (so retained is x - y); `retained`
// means the second block holds the deductible itself.
enum class SecondBlock { reinsured, retained };

struct TreatyAtom {
    std::vector<std::int32_t> xi;  // per-line index into x_grids
    std::vector<std::int32_t> yi;  // per-line index into y_grids
    double mass = 0.0;
};

struct DiscreteTreaty {
    int n_lines = 0;
    std::vector<std::vector<double>> x_grids;
    std::vector<std::vector<double>> y_grids;
    std::vector<TreatyAtom> atoms;
    SecondBlock orientation = SecondBlock::reinsured;

    double x_of(const TreatyAtom& a, int line) const { return x_grids[line][a.xi[line]]; }
    double y_of(const TreatyAtom& a, int line) const { return y_grids[line][a.yi[line]]; }

    // Structural checks: arities, index ranges, nonnegative masses summing
    // to 1 within 1e-12. Throws std::invalid_argument.
    void validate() const;

    double total_mass() const;
};

// ---------------------------------------------------------------------------
// Feasibility against a prescribed claim law.

struct FeasibilityReport {
    bool ok = true;
    double max_marginal_residual = 0.0;  // worst |treaty x-marginal - mu| cell
    double mass_defect = 0.0;            // |total mass - 1|
    std::string violation;               // first violated rule, empty when ok
};

// A treaty is feasible for claim law mu when its first-block marginal equals
// mu cell-wise within tol, every atom satisfies 0 <= y <= x, and the total
// mass is 1 within tol.
FeasibilityReport check_feasible(const DiscreteTreaty& t, const GridLaw& mu,
                                 double tol = 1e-10);

// ---------------------------------------------------------------------------
// First-order stochastic dominance on grid laws.

struct DominanceVerdict {
    bool dominated = false;  // true when F_nu >= F_mu everywhere
    double worst_gap = 0.0;  // max(F_mu - F_nu) over the merged support
    double worst_point = 0.0;
};

// Checks nu <=_st mu (nu below mu): F_nu(x) >= F_mu(x) on the merged
// support, with slack 1e-12.
DominanceVerdict stochastic_dominance(const DiscreteDistribution& nu,
                                      const DiscreteDistribution& mu);

// ---------------------------------------------------------------------------
// Couplings and rearrangements.

// Quantile (comonotone) coupling of mu and nu: walks both supports in
// increasing order merging cumulative masses; the unique coupling whose cdf
// levels match. Requires nu <=_st mu so that y <= x holds on every atom.
// Returns a single-line treaty with orientation `reinsured`.
DiscreteTreaty comonotone_map(const DiscreteDistribution& mu, const DiscreteDistribution& nu);

// Componentwise monotone rearrangement: line i cedes
// nu_i.quantile(mu_i.cdf(x_i)), the map transporting mu_i onto nu_i when the
// cumulative levels of nu_i are attained by mu_i. Requires nu_i <=_st mu_i.
Contract rearrangement_contract(const std::vector<DiscreteDistribution>& mus,
                                const std::vector<DiscreteDistribution>& nus);

// ---------------------------------------------------------------------------
// Support condition for optimality certificates.

using PairCost = std::function<double(std::span<const double>, std::span<const double>)>;
using PairConstraints =
    std::function<std::vector<double>(std::span<const double>, std::span<const double>)>;

struct SupportConditionReport {
    bool ok = true;
    double worst_gap = 0.0;       // max over atoms of value(atom) - grid minimum
    std::size_t worst_atom = 0;   // atom index attaining the gap
};

// Certifies pointwise optimality of a treaty's second block: every atom
// (x, y) must satisfy
//   r_star * p(x, y) + lambda_star . g(x, y)
//     <= min over t in the [0, x] candidate grid of the same expression + tol,
// with per-line candidates {j/(grid_per_axis-1) * x_i}. The caller supplies
// (p, g, r_star, lambda_star) as one consistent tuple.
bool validate_support_condition(const DiscreteTreaty& t, const PairCost& p,
                                const PairConstraints& g, double r_star,
                                const std::vector<double>& lambda_star, double tol,
                                int grid_per_axis = 50,
                                SupportConditionReport* report = nullptr);

// The (p, g, r_star, lambda_star) tuple certifying a fitted multi-line
// mean-variance contract: p is the ceded premium, g couples the second moment
// and mean of the retained sum in the normalization matching the stored
// multiplier.
struct SupportConditionInputs {
    PairCost p;
    PairConstraints g;
    double r_star = 1.0;
    std::vector<double> lambda_star;
};
SupportConditionInputs multiline_support_inputs(const MultilineMeanVarianceContract& c);

}  // namespace reot
