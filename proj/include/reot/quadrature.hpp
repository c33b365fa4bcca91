// Gauss-Legendre quadrature and tensor-product expectations over independent
// continuous marginals. The tensor sweep is one of the hot kernels: it has an
// OpenMP variant and a serial reference that produce bitwise-identical sums.
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "reot/dist.hpp"

namespace reot {

enum class ExecMode { serial, parallel };

struct QuadratureRule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
// computed by Newton iteration on the Legendre recurrence.
QuadratureRule1D gauss_legendre(int n);

// Rule approximating E[f(X)] ~ sum w_q f(x_q) for X ~ d, truncated at the
// (1 - tail_trunc) quantile. The weights absorb the density and the map
// Jacobian; their sum falls short of one by about tail_trunc (the tail is
// dropped, not renormalized). Gamma shapes below one are integrated in
// t = sqrt(x) to tame the density singularity at the origin.
QuadratureRule1D expectation_rule(const ContinuousDistribution& d, int nodes,
                                  double tail_trunc);

// Multi-output tensor-product expectation over independent axes:
// out[r] = sum over the node grid of weight * f_r(x). The integrand fills
// `out` for one node vector x per call. Partial sums are accumulated per
// outermost-axis slab and merged in slab order, so serial and parallel
// execution give bitwise-identical results.
std::vector<double> tensor_expectation(
    std::span<const QuadratureRule1D> rules, std::size_t n_outputs,
    const std::function<void(std::span<const double>, std::span<double>)>& f,
    ExecMode mode = ExecMode::parallel);

// Single-output convenience wrapper.
double tensor_expectation(std::span<const QuadratureRule1D> rules,
                          const std::function<double(std::span<const double>)>& f,
                          ExecMode mode = ExecMode::parallel);

}  // namespace reot
