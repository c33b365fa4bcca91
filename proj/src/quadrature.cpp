#include "reot/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace reot {

QuadratureRule1D gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
    QuadratureRule1D rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-based initial guess for the i-th root of P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Evaluate P_n and P_n' by the three-term recurrence.
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

QuadratureRule1D expectation_rule(const ContinuousDistribution& d, int nodes,
                                  double tail_trunc) {
    if (tail_trunc <= 0.0 || tail_trunc >= 1.0)
        throw std::invalid_argument("expectation_rule: tail truncation in (0,1)");
    const double lo = d.quantile(0.0);
    const double hi = d.quantile(1.0 - tail_trunc);
    const QuadratureRule1D base = gauss_legendre(nodes);

    bool sqrt_map = false;
    if (const auto* g = std::get_if<GammaDist>(&d.family())) {
        // The density carries x^(shape-1); for shape < 1 integrate in
        // t = sqrt(x) so the transformed integrand stays bounded.
        sqrt_map = g->shape < 1.0;
    }

    QuadratureRule1D rule;
    rule.nodes.resize(base.nodes.size());
    rule.weights.resize(base.nodes.size());
    if (sqrt_map) {
        const double tmax = std::sqrt(hi - lo);
        for (std::size_t q = 0; q < base.nodes.size(); ++q) {
            const double t = tmax * 0.5 * (base.nodes[q] + 1.0);
            const double x = lo + t * t;
            rule.nodes[q] = x;
            rule.weights[q] = base.weights[q] * (tmax * 0.5) * 2.0 * t * d.pdf(x);
        }
    } else {
        for (std::size_t q = 0; q < base.nodes.size(); ++q) {
            const double x = lo + (hi - lo) * 0.5 * (base.nodes[q] + 1.0);
            rule.nodes[q] = x;
            rule.weights[q] = base.weights[q] * (hi - lo) * 0.5 * d.pdf(x);
        }
    }
    return rule;
}

namespace {

// Accumulates the expectation over one slab: the outermost axis is fixed to
// index `outer`, all inner axes run in full, axis 0 fastest.
void accumulate_slab(std::span<const QuadratureRule1D> rules, std::size_t n_outputs,
                     const std::function<void(std::span<const double>, std::span<double>)>& f,
                     std::size_t outer, std::span<double> slab_sum) {
    const std::size_t dims = rules.size();
    std::vector<int> idx(dims, 0);
    std::vector<double> x(dims), fx(n_outputs);
    idx[dims - 1] = static_cast<int>(outer);
    for (std::size_t ax = 0; ax < dims; ++ax) x[ax] = rules[ax].nodes[idx[ax]];

    std::size_t inner_total = 1;
    for (std::size_t ax = 0; ax + 1 < dims; ++ax) inner_total *= rules[ax].nodes.size();

    for (std::size_t count = 0;; ++count) {
        double w = 1.0;
        for (std::size_t ax = 0; ax < dims; ++ax) w *= rules[ax].weights[idx[ax]];
        f(x, fx);
        for (std::size_t r = 0; r < n_outputs; ++r) slab_sum[r] += w * fx[r];

        if (count + 1 == inner_total) break;
        // Odometer increment over the inner axes.
        for (std::size_t ax = 0; ax + 1 < dims; ++ax) {
            if (++idx[ax] < static_cast<int>(rules[ax].nodes.size())) {
                x[ax] = rules[ax].nodes[idx[ax]];
                break;
            }
            idx[ax] = 0;
            x[ax] = rules[ax].nodes[0];
        }
    }
}

}  // namespace

std::vector<double> tensor_expectation(
    std::span<const QuadratureRule1D> rules, std::size_t n_outputs,
    const std::function<void(std::span<const double>, std::span<double>)>& f,
    ExecMode mode) {
    if (rules.empty()) throw std::invalid_argument("tensor_expectation: no axes");
    for (const auto& r : rules)
        if (r.nodes.empty() || r.nodes.size() != r.weights.size())
            throw std::invalid_argument("tensor_expectation: malformed rule");

    const std::size_t outer_n = rules.back().nodes.size();
    std::vector<double> slab(outer_n * n_outputs, 0.0);

    if (mode == ExecMode::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (long long outer = 0; outer < static_cast<long long>(outer_n); ++outer) {
            accumulate_slab(rules, n_outputs, f, static_cast<std::size_t>(outer),
                            std::span<double>(slab).subspan(outer * n_outputs, n_outputs));
        }
    } else {
        for (std::size_t outer = 0; outer < outer_n; ++outer) {
            accumulate_slab(rules, n_outputs, f, outer,
                            std::span<double>(slab).subspan(outer * n_outputs, n_outputs));
        }
    }

    // Merge slab partials in slab order (deterministic regardless of mode).
    std::vector<double> out(n_outputs, 0.0);
    for (std::size_t outer = 0; outer < outer_n; ++outer)
        for (std::size_t r = 0; r < n_outputs; ++r) out[r] += slab[outer * n_outputs + r];
    return out;
}

double tensor_expectation(std::span<const QuadratureRule1D> rules,
                          const std::function<double(std::span<const double>)>& f,
                          ExecMode mode) {
    auto wrapped = [&f](std::span<const double> x, std::span<double> out) { out[0] = f(x); };
    return tensor_expectation(rules, 1, wrapped, mode)[0];
}

}  // namespace reot
