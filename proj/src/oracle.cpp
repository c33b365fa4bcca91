#include "reot/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "reot/rng.hpp"

namespace reot {

const char* to_string(OracleMethod m) {
    switch (m) {
        case OracleMethod::basis_enumeration:
            return "basis_enumeration";
        case OracleMethod::monte_carlo:
            return "monte_carlo";
        case OracleMethod::refinement:
            return "refinement";
    }
    return "unknown";
}

OracleReport compare_with_oracle(double candidate, double oracle_value, OracleMethod method,
                                 std::optional<std::uint64_t> seed, std::string notes) {
    OracleReport r;
    r.method = method;
    r.candidate = candidate;
    r.oracle_value = oracle_value;
    r.abs_discrepancy = std::fabs(candidate - oracle_value);
    r.rel_discrepancy = r.abs_discrepancy / std::max(1.0, std::fabs(oracle_value));
    r.seed = seed;
    r.notes = std::move(notes);
    return r;
}

double brute_force_lp(const StandardFormLP& lp) {
    lp.validate();
    if (lp.num_vars > 20 || lp.num_rows > 10)
        throw std::invalid_argument(
            "brute_force_lp: refusing instances beyond 20 variables x 10 rows");

    const int m = lp.num_rows;
    const int n = static_cast<int>(lp.num_vars);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n + 1);
    for (int j = 0; j < n; ++j)
        lp.for_col(j, [&](int r, double v) { a(r, j) += v; });
    for (int r = 0; r < m; ++r) a(r, n) = lp.rhs[static_cast<std::size_t>(r)];

    // Row echelon form of the augmented system with partial pivoting; keeps
    // an independent subset of equations and exposes inconsistency.
    const double tol = 1e-11 * std::max(1.0, a.cwiseAbs().maxCoeff());
    int rank = 0;
    for (int col = 0; col < n && rank < m; ++col) {
        int piv = rank;
        for (int r = rank + 1; r < m; ++r)
            if (std::fabs(a(r, col)) > std::fabs(a(piv, col))) piv = r;
        if (std::fabs(a(piv, col)) <= tol) continue;
        a.row(rank).swap(a.row(piv));
        for (int r = rank + 1; r < m; ++r) {
            const double f = a(r, col) / a(rank, col);
            if (f != 0.0) a.row(r) -= f * a.row(rank);
        }
        ++rank;
    }
    for (int r = rank; r < m; ++r)
        if (a.row(r).head(n).cwiseAbs().maxCoeff() <= tol && std::fabs(a(r, n)) > tol)
            throw std::runtime_error("brute_force_lp: inconsistent equality system");

    if (rank == 0) {
        // Only x >= 0 remains; the origin is optimal for nonnegative costs.
        if (*std::min_element(lp.cost.begin(), lp.cost.end()) < 0.0)
            throw std::runtime_error("brute_force_lp: unbounded problem");
        return 0.0;
    }

    const Eigen::MatrixXd ar = a.topRows(rank).leftCols(n);
    const Eigen::VectorXd br = a.topRows(rank).col(n);
    const double btol = 1e-9 * std::max(1.0, br.cwiseAbs().maxCoeff());

    std::vector<int> comb(static_cast<std::size_t>(rank));
    std::iota(comb.begin(), comb.end(), 0);
    bool any_feasible = false;
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        Eigen::MatrixXd basis(rank, rank);
        for (int c = 0; c < rank; ++c) basis.col(c) = ar.col(comb[static_cast<std::size_t>(c)]);
        const Eigen::VectorXd x = basis.fullPivLu().solve(br);
        if ((basis * x - br).cwiseAbs().maxCoeff() <= btol && x.minCoeff() >= -1e-9) {
            double value = 0.0;
            for (int c = 0; c < rank; ++c)
                value += lp.cost[static_cast<std::size_t>(comb[static_cast<std::size_t>(c)])] *
                         x(c);
            best = std::min(best, value);
            any_feasible = true;
        }
        int i = rank - 1;
        while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - rank + i) --i;
        if (i < 0) break;
        ++comb[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < rank; ++k)
            comb[static_cast<std::size_t>(k)] = comb[static_cast<std::size_t>(k - 1)] + 1;
    }
    if (!any_feasible)
        throw std::runtime_error("brute_force_lp: no feasible basic solution");
    return best;
}

McEstimate mc_estimate(const Contract& c, const std::vector<ContinuousDistribution>& dists,
                       std::int64_t n_samples, std::uint64_t seed,
                       std::optional<double> var_alpha, const std::vector<double>& betas) {
    const int lines = contract_lines(c);
    if (static_cast<int>(dists.size()) != lines)
        throw std::invalid_argument("mc_estimate: one claim law per contract line required");
    if (n_samples < 1)
        throw std::invalid_argument("mc_estimate: n_samples must be at least 1");
    if (!betas.empty() && static_cast<int>(betas.size()) != lines)
        throw std::invalid_argument("mc_estimate: betas arity mismatch");
    if (var_alpha && !(*var_alpha > 0.0 && *var_alpha < 1.0))
        throw std::invalid_argument("mc_estimate: alpha must lie in (0, 1)");

    const std::size_t n = dists.size();
    const CounterRng rng(seed);
    const std::int64_t block = 65536;
    const std::int64_t n_blocks = (n_samples + block - 1) / block;
    // Per-block partials of ret, ret^2, rein, rein^2, load, load^2; merged in
    // block order so thread count never changes the reported numbers.
    std::vector<std::array<double, 6>> partial(static_cast<std::size_t>(n_blocks),
                                               std::array<double, 6>{});
    std::vector<double> ret_samples, rein_samples;
    if (var_alpha) {
        ret_samples.resize(static_cast<std::size_t>(n_samples));
        rein_samples.resize(static_cast<std::size_t>(n_samples));
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t bi = 0; bi < n_blocks; ++bi) {
        std::vector<double> x(n);
        auto& acc = partial[static_cast<std::size_t>(bi)];
        const std::int64_t lo = bi * block;
        const std::int64_t hi = std::min(n_samples, lo + block);
        for (std::int64_t s = lo; s < hi; ++s) {
            for (std::size_t l = 0; l < n; ++l) {
                SampleStream stream(rng, static_cast<std::uint64_t>(s) * n + l);
                x[l] = sample(dists[l], stream);
            }
            const std::vector<double> r = evaluate(c, x);
            double rein = 0.0, ret = 0.0, load = 0.0;
            for (std::size_t l = 0; l < n; ++l) {
                rein += r[l];
                ret += x[l] - r[l];
                if (!betas.empty()) load += betas[l] * r[l];
            }
            acc[0] += ret;
            acc[1] += ret * ret;
            acc[2] += rein;
            acc[3] += rein * rein;
            acc[4] += load;
            acc[5] += load * load;
            if (var_alpha) {
                ret_samples[static_cast<std::size_t>(s)] = ret;
                rein_samples[static_cast<std::size_t>(s)] = rein;
            }
        }
    }
    std::array<double, 6> sums{};
    for (const auto& acc : partial)
        for (std::size_t i = 0; i < sums.size(); ++i) sums[i] += acc[i];

    const double dn = static_cast<double>(n_samples);
    // Unbiased sample variance, for the standard error of a sample mean.
    const auto sample_var = [&](double sum2, double mean) {
        if (n_samples < 2) return 0.0;
        return std::max(0.0, (sum2 - dn * mean * mean) / (dn - 1.0));
    };

    McEstimate est;
    est.n_samples = n_samples;
    est.seed = seed;
    est.retained.mean = sums[0] / dn;
    est.retained.variance = std::max(0.0, sums[1] / dn - est.retained.mean * est.retained.mean);
    est.reinsured.mean = sums[2] / dn;
    est.reinsured.variance =
        std::max(0.0, sums[3] / dn - est.reinsured.mean * est.reinsured.mean);
    est.retained_mean_std_error = std::sqrt(sample_var(sums[1], est.retained.mean) / dn);
    if (!betas.empty()) {
        const double lmean = sums[4] / dn;
        est.loading = lmean;
        est.loading_std_error = std::sqrt(sample_var(sums[5], lmean) / dn);
    }
    if (var_alpha) {
        std::sort(ret_samples.begin(), ret_samples.end());
        std::sort(rein_samples.begin(), rein_samples.end());
        // Lower empirical quantile: smallest value whose strict upper tail
        // holds at most alpha of the sample.
        const auto rank = static_cast<std::size_t>(std::min<double>(
            dn - 1.0,
            std::max(0.0, std::ceil((1.0 - *var_alpha) * dn) - 1.0)));
        est.retained.alpha = *var_alpha;
        est.retained.var_alpha = ret_samples[rank];
        est.reinsured.alpha = *var_alpha;
        est.reinsured.var_alpha = rein_samples[rank];
    }
    return est;
}

RefinementReport refinement_sweep(const std::string& label,
                                  const std::vector<double>& parameters,
                                  const std::function<double(double)>& evaluate,
                                  double rel_tol) {
    if (parameters.empty())
        throw std::invalid_argument("refinement_sweep: need at least one parameter");
    RefinementReport rep;
    rep.label = label;
    rep.rows.reserve(parameters.size());
    for (double p : parameters) rep.rows.push_back({p, evaluate(p)});
    if (rep.rows.size() >= 2) {
        const double last = rep.rows.back().value;
        const double prev = rep.rows[rep.rows.size() - 2].value;
        rep.final_change = std::fabs(last - prev) / std::max(1.0, std::fabs(last));
        rep.stabilized = rep.final_change <= rel_tol;
    } else {
        rep.stabilized = true;
    }
    return rep;
}

}  // namespace reot
