#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace reot {

// Columns that carry exactly three unit coefficients in three distinct rows.
// Transport problems with one source law and two target marginals assemble
// into this shape; the solver prices such columns with a fused scan instead
// of walking a general sparse store, and never materializes the matrix.
struct UnitTripletColumns {
    std::vector<std::array<std::int32_t, 3>> rows;
};

// Linear program in standard equality form:
//     minimize    cost' x
//     subject to  A x = rhs,   x >= 0.
//
// Exactly one column representation is active: the explicit compressed
// sparse form (col_ptr / row_idx / coef) or the structured triplet form.
struct StandardFormLP {
    int num_rows = 0;
    std::int64_t num_vars = 0;
    std::vector<double> cost;
    std::vector<double> rhs;

    // Explicit storage, used when `triplets` is empty.
    std::vector<std::int64_t> col_ptr;  // size num_vars + 1
    std::vector<std::int32_t> row_idx;
    std::vector<double> coef;

    std::optional<UnitTripletColumns> triplets;

    bool structured() const { return triplets.has_value(); }

    // Throws std::invalid_argument on inconsistent dimensions or indices.
    void validate() const;

    // Applies fn(row, coefficient) to every entry of one column.
    template <typename Fn>
    void for_col(std::int64_t col, Fn&& fn) const {
        if (triplets) {
            for (std::int32_t r : triplets->rows[static_cast<std::size_t>(col)]) {
                fn(static_cast<int>(r), 1.0);
            }
        } else {
            const auto c = static_cast<std::size_t>(col);
            for (std::int64_t p = col_ptr[c]; p < col_ptr[c + 1]; ++p) {
                const auto e = static_cast<std::size_t>(p);
                fn(static_cast<int>(row_idx[e]), coef[e]);
            }
        }
    }
};

enum class PricingRule { dantzig, devex };

struct SimplexOptions {
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-7;
    int refactor_interval = 100;
    std::int64_t partial_pricing_pool = 2000;  // explicit columns only
    int bland_after_degenerate = 50;           // pivots; anti-cycling fallback
    std::int64_t max_iterations = 0;           // 0: derived from problem size
    PricingRule pricing = PricingRule::devex;
    bool parallel_pricing = true;              // deterministic either way
    std::int64_t log_every = 0;                // 0: silent; else stderr progress

    // Optional crash basis: column indices that form a feasible basis together
    // with artificial columns on the listed rows.  Silently falls back to the
    // all-artificial start if the matrix is singular, the sizes do not add up
    // to num_rows, or the implied point is infeasible.
    std::vector<std::int64_t> warm_columns;
    std::vector<int> warm_artificial_rows;
};

enum class LPStatus { optimal, infeasible, unbounded, iteration_limit, numerical_failure };

const char* to_string(LPStatus s);

struct LPSolution {
    LPStatus status = LPStatus::numerical_failure;
    double objective = 0.0;
    double phase1_objective = 0.0;

    // Sparse primal solution: basis[i] is the column occupying slot i with
    // value basic_values[i].  An entry >= num_vars is an artificial variable
    // kept (at value ~0) for a redundant row; row index = entry - num_vars.
    std::vector<std::int64_t> basis;
    std::vector<double> basic_values;

    std::vector<double> duals;  // one multiplier per row
    std::int64_t iterations = 0;
    int refactorizations = 0;
    double max_primal_residual = 0.0;
    std::string message;

    double primal_value(std::int64_t col) const;
    std::vector<double> dense_primal(const StandardFormLP& lp) const;
};

LPSolution solve_lp(const StandardFormLP& lp, const SimplexOptions& options = {});

// Reconstructs the basic values, duals, and objective that a stored basis
// implies: factorizes the basis matrix (given as real column ids plus
// artificial rows) and solves the two triangular systems. No pivoting; meant
// for re-checking persisted solutions. Status is `optimal` when the basis is
// nonsingular and the values are finite, `numerical_failure` otherwise —
// optimality itself is what check_kkt establishes afterwards.
LPSolution solution_from_basis(const StandardFormLP& lp,
                               const std::vector<std::int64_t>& columns,
                               const std::vector<int>& artificial_rows);

// Recomputed-from-scratch optimality diagnostics for a solution.
struct KktReport {
    double max_primal_residual = 0.0;    // includes any x < 0 violation
    double max_dual_infeasibility = 0.0; // most negative reduced cost, as magnitude
    double max_complementarity = 0.0;    // max |reduced cost * value| over basic columns
    double duality_gap = 0.0;            // |cost'x - rhs'y|
    bool satisfied = false;
};

KktReport check_kkt(const StandardFormLP& lp, const LPSolution& sol, double tol = 1e-8);

// Deterministically named MPS export (rows R0001..., columns X0000001...,
// objective row COST, canonical section order) and the matching parser.
// parse_mps(export_mps(lp)) reproduces the LP exactly up to the explicit
// column representation.
void export_mps(const StandardFormLP& lp, const std::string& path,
                const std::string& name = "REOTLP");
StandardFormLP parse_mps(const std::string& path);

}  // namespace reot
