// Reinsurance contract families and the parameter-fitting routines that
// calibrate them to premium or variance budgets.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "reot/dist.hpp"
#include "reot/quadrature.hpp"

namespace reot {

// ---------------------------------------------------------------------------
// Contract families. evaluate() returns the ceded amounts R(x), always
// clamped into [0, x] componentwise.

// Single line, R(x) = (x - attachment)+.
struct StopLossContract {
    double attachment = 0.0;
};

// Single line, R(x) = factor * x with factor in [0, 1].
struct QuotaShareContract {
    double factor = 0.0;
};

// Multi-line contract minimizing premium subject to a retained-variance
// budget, for premium weights beta_1 < ... < beta_n:
//   R_i(x) = min( (sum_{j>=i} x_j - betas[i]/lambda_star - sigma)_+ , x_i ).
// lambda_star is the budget multiplier in the normalization where the line-i
// deductible reads sigma + betas[i]/lambda_star; sigma is the mean of the
// retained sum at the optimum (a fixed point of the fit).
struct MultilineMeanVarianceContract {
    std::vector<double> betas;
    double lambda_star = 0.0;
    double sigma = 0.0;
};

// Multi-line premium minimization under a value-at-risk budget on the
// retained sum. With Q_i(x) = (sum_{j>=i} x_j - v_star)+ the candidate cession
// is y*(x) = (min(Q_1, x_1), ..., min(Q_{n-1}, x_{n-1}), Q_n); the contract
// pays y*(x) when the ceded premium q(x) = sum_i betas[i] y*_i(x) stays below
// the threshold d and pays nothing otherwise.
struct VarConstrainedContract {
    std::vector<double> betas;
    double v_star = 0.0;
    double d = 0.0;
};

// Monotone per-line map for componentwise (line-by-line) contracts.
struct LineMap {
    enum class Kind { linear, stop_loss, quantile_transform };
    Kind kind = Kind::linear;
    double factor = 1.0;      // linear: factor * x
    double attachment = 0.0;  // stop_loss: (x - attachment)+
    // quantile_transform: to.quantile(from.cdf(x)), the monotone rearrangement
    // sending the grid law `from` onto `to`.
    DiscreteDistribution from, to;

    double operator()(double x) const;
};

struct ComponentwiseContract {
    std::vector<LineMap> maps;
};

using Contract = std::variant<StopLossContract, QuotaShareContract,
                              MultilineMeanVarianceContract, VarConstrainedContract,
                              ComponentwiseContract>;

int contract_lines(const Contract& c);

// Ceded amounts per line; requires x.size() == contract_lines(c).
std::vector<double> evaluate(const Contract& c, std::span<const double> x);

// ---------------------------------------------------------------------------
// Integration backend shared by the fitting routines.

struct IntegrationConfig {
    enum class Mode { automatic, quadrature, monte_carlo };
    Mode mode = Mode::automatic;  // quadrature up to 3 lines, Monte Carlo beyond
    int nodes = 256;
    double tail_trunc = 1e-8;
    std::uint64_t mc_samples = 10'000'000;
    std::uint64_t seed = 42;
    ExecMode exec = ExecMode::parallel;
};

// ---------------------------------------------------------------------------
// Fit output.

struct FitReport {
    Contract contract;
    double premium = 0.0;           // sum_i betas[i] E[R_i]
    double retained_mean = 0.0;     // E[sum_i (X_i - R_i)]
    double retained_variance = 0.0;
    double multiplier = 0.0;        // budget multiplier where the family has one
    double residual = 0.0;          // budget equation residual at the fit
    long long iterations = 0;
    bool feasible = true;
    std::string notes;
};

// E[(X - a)+] via adaptive Simpson quadrature of the survival function;
// shared with tests that probe the stop-loss budget equation directly.
double expected_excess(const ContinuousDistribution& d, double a);

// Fits the attachment so that E[(X - a)+] equals premium_budget.
FitReport solve_stop_loss(const ContinuousDistribution& d, double premium_budget);

// Quota share calibrated to a ceded-variance budget: Var(f X) = c gives
// f = sqrt(c / Var(X)).
FitReport solve_quota_share_variance_premium(const ContinuousDistribution& d,
                                             double variance_budget);
FitReport solve_quota_share_variance_premium(double variance_x, double variance_budget);

// Independent-lines proportional program: ceded proportions
// a_i = (1 - betas[i] E[X_i] / (2 lambda Var(X_i)))_+ with lambda fitted by
// bisection so the retained variance sum_i (1 - a_i)^2 Var(X_i) meets the
// budget.
FitReport solve_definetti_proportions(const std::vector<double>& means,
                                      const std::vector<double>& variances,
                                      const std::vector<double>& betas,
                                      double variance_budget);

// Multi-line mean-variance optimum: nested fit of (lambda, sigma) so that the
// retained sum has variance equal to the budget and mean equal to sigma.
FitReport solve_mean_variance_multiline(const std::vector<ContinuousDistribution>& dists,
                                        const std::vector<double>& betas,
                                        double variance_budget,
                                        const IntegrationConfig& cfg = {});

// Premium minimization subject to VaR_alpha(retained sum) <= var_budget; see
// VarConstrainedContract. v_star equals the budget (the constraint binds) and
// d is the (1 - alpha)-quantile of the ceded premium q(X).
FitReport solve_var_constrained(const std::vector<ContinuousDistribution>& dists,
                                const std::vector<double>& betas, double alpha,
                                double var_budget, const IntegrationConfig& cfg = {});

// sum_i betas[i] E[R_i(X)] for independent lines X_i ~ dists[i].
double expected_loading(const Contract& c, const std::vector<ContinuousDistribution>& dists,
                        const std::vector<double>& betas, const IntegrationConfig& cfg = {});

}  // namespace reot
