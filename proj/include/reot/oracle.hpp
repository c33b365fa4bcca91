// Independent verification tools: a brute-force LP optimum by basis
// enumeration, seeded Monte Carlo risk estimates for contracts, and
// discretization refinement sweeps. Nothing here shares code paths with the
// solvers it is meant to check.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reot/contracts.hpp"
#include "reot/dist.hpp"
#include "reot/lp.hpp"
#include "reot/measures.hpp"

namespace reot {

enum class OracleMethod { basis_enumeration, monte_carlo, refinement };

const char* to_string(OracleMethod m);

// Comparison record between a candidate value and an independently computed
// one.
struct OracleReport {
    OracleMethod method = OracleMethod::basis_enumeration;
    double candidate = 0.0;
    double oracle_value = 0.0;
    double abs_discrepancy = 0.0;
    double rel_discrepancy = 0.0;  // abs / max(1, |oracle|)
    std::optional<std::uint64_t> seed;
    std::string notes;
};

OracleReport compare_with_oracle(double candidate, double oracle_value, OracleMethod method,
                                 std::optional<std::uint64_t> seed = {},
                                 std::string notes = {});

// Exact optimum of a tiny equality-form LP: row-reduces the system, then
// enumerates every square column subset of the reduced rows, solves it, and
// keeps the feasible basic solutions. Assumes a bounded problem (the optimum
// of a bounded LP sits on a vertex). Hard caps num_vars <= 20 and
// num_rows <= 10; larger inputs are refused with std::invalid_argument
// rather than subsampled. Throws std::runtime_error when the system is
// inconsistent or no feasible basic solution exists.
double brute_force_lp(const StandardFormLP& lp);

// Seeded Monte Carlo estimate of a contract's risk figures under independent
// claim lines X_i ~ dists[i]. Reduction order is fixed (block partial sums),
// so results are identical across thread counts.
struct McEstimate {
    RiskReport retained;   // moments of sum_i (X_i - R_i), VaR when alpha given
    RiskReport reinsured;  // moments of sum_i R_i
    double retained_mean_std_error = 0.0;
    std::optional<double> loading;  // sum_i betas[i] E[R_i] when betas given
    double loading_std_error = 0.0;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
};

McEstimate mc_estimate(const Contract& c, const std::vector<ContinuousDistribution>& dists,
                       std::int64_t n_samples, std::uint64_t seed,
                       std::optional<double> var_alpha = {},
                       const std::vector<double>& betas = {});

// Evaluates a figure of merit along a refinement parameter (grid size,
// quadrature nodes, ...) and flags whether the tail of the sequence has
// stabilized: the last two values must agree within rel_tol relatively.
struct RefinementRow {
    double parameter = 0.0;
    double value = 0.0;
};

struct RefinementReport {
    std::string label;
    std::vector<RefinementRow> rows;
    bool stabilized = false;
    double final_change = 0.0;  // |v_n - v_{n-1}| / max(1, |v_n|)
};

RefinementReport refinement_sweep(const std::string& label,
                                  const std::vector<double>& parameters,
                                  const std::function<double(double)>& evaluate,
                                  double rel_tol = 0.05);

}  // namespace reot
