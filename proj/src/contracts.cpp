#include "reot/contracts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "reot/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace reot {

namespace {

double clamp01x(double r, double x) {
    return std::min(std::max(r, 0.0), std::max(x, 0.0));
}

// Adaptive Simpson with the classical Richardson acceptance test.
template <typename Fn>
double simpson_step(const Fn& f, double a, double fa, double b, double fb,
                    double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double both = left + right;
    if (depth <= 0 || std::abs(both - whole) <= 15.0 * tol)
        return both + (both - whole) / 15.0;
    return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

template <typename Fn>
double adaptive_simpson(const Fn& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, fa, b, fb, m, fm, whole, tol, 60);
}

// Effective truncation point: quantile where all but ~1e-13 of the mass sits.
double upper_cutoff(const ContinuousDistribution& d) {
    return d.quantile(1.0 - 1e-13);
}

void check_lines(const std::vector<ContinuousDistribution>& dists,
                 const std::vector<double>& betas, const char* where) {
    if (dists.empty() || dists.size() != betas.size())
        throw std::invalid_argument(std::string(where) + ": need one beta per line");
    for (double b : betas)
        if (!(b > 0.0))
            throw std::invalid_argument(std::string(where) + ": betas must be positive");
}

// Ceded amounts of the multiline mean-variance family, written out inline so
// the fitting loops avoid the generic evaluate() allocation per node.
inline double multiline_retained_sum(std::span<const double> x,
                                     std::span<const double> betas,
                                     double lambda_star, double sigma,
                                     std::span<double> ceded_opt) {
    const std::size_t n = x.size();
    double suffix = 0.0;
    for (std::size_t i = n; i-- > 0;) suffix += x[i];
    double retained = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (lambda_star > 0.0) {
            const double deductible = sigma + betas[i] / lambda_star;
            r = clamp01x(suffix - deductible, x[i]);
        }
        if (!ceded_opt.empty()) ceded_opt[i] = r;
        retained += x[i] - r;
        suffix -= x[i];
    }
    return retained;
}

// One deterministic Monte Carlo sweep: per-sample streams, fixed-size blocks,
// partial sums merged in block order so thread count never changes the total.
std::vector<double> mc_sweep(
    const std::vector<ContinuousDistribution>& dists, std::uint64_t n_samples,
    std::uint64_t seed, std::size_t n_outputs,
    const std::function<void(std::span<const double>, std::span<double>)>& f,
    ExecMode exec) {
    const std::size_t n = dists.size();
    const CounterRng rng(seed);
    const std::uint64_t block = 65536;
    const std::uint64_t n_blocks = (n_samples + block - 1) / block;
    std::vector<std::vector<double>> partial(
        static_cast<std::size_t>(n_blocks), std::vector<double>(n_outputs, 0.0));
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == ExecMode::parallel)
#endif
    for (std::int64_t bi = 0; bi < static_cast<std::int64_t>(n_blocks); ++bi) {
        std::vector<double> x(n), out(n_outputs);
        std::vector<double>& acc = partial[static_cast<std::size_t>(bi)];
        const std::uint64_t lo = static_cast<std::uint64_t>(bi) * block;
        const std::uint64_t hi = std::min(n_samples, lo + block);
        for (std::uint64_t s = lo; s < hi; ++s) {
            for (std::size_t l = 0; l < n; ++l) {
                SampleStream stream(rng, s * n + l);
                x[l] = sample(dists[l], stream);
            }
            f(x, out);
            for (std::size_t r = 0; r < n_outputs; ++r) acc[r] += out[r];
        }
    }
    std::vector<double> total(n_outputs, 0.0);
    for (const auto& acc : partial)
        for (std::size_t r = 0; r < n_outputs; ++r) total[r] += acc[r];
    for (double& t : total) t /= static_cast<double>(n_samples);
    return total;
}

}  // namespace

double LineMap::operator()(double x) const {
    switch (kind) {
        case Kind::linear:
            return factor * x;
        case Kind::stop_loss:
            return std::max(x - attachment, 0.0);
        case Kind::quantile_transform:
            return to.quantile(from.cdf(x));
    }
    return 0.0;
}

int contract_lines(const Contract& c) {
    struct Visitor {
        int operator()(const StopLossContract&) const { return 1; }
        int operator()(const QuotaShareContract&) const { return 1; }
        int operator()(const MultilineMeanVarianceContract& m) const {
            return static_cast<int>(m.betas.size());
        }
        int operator()(const VarConstrainedContract& v) const {
            return static_cast<int>(v.betas.size());
        }
        int operator()(const ComponentwiseContract& w) const {
            return static_cast<int>(w.maps.size());
        }
    };
    return std::visit(Visitor{}, c);
}

std::vector<double> evaluate(const Contract& c, std::span<const double> x) {
    const int n = contract_lines(c);
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("evaluate: claim vector arity mismatch");
    std::vector<double> r(static_cast<std::size_t>(n), 0.0);

    if (const auto* sl = std::get_if<StopLossContract>(&c)) {
        r[0] = x[0] - sl->attachment;
    } else if (const auto* qs = std::get_if<QuotaShareContract>(&c)) {
        r[0] = qs->factor * x[0];
    } else if (const auto* ml = std::get_if<MultilineMeanVarianceContract>(&c)) {
        multiline_retained_sum(x, ml->betas, ml->lambda_star, ml->sigma, r);
    } else if (const auto* vc = std::get_if<VarConstrainedContract>(&c)) {
        const std::size_t nn = vc->betas.size();
        double suffix = 0.0;
        double q = 0.0;
        std::vector<double> y(nn, 0.0);
        for (std::size_t i = nn; i-- > 0;) suffix += x[i];
        for (std::size_t i = 0; i < nn; ++i) {
            const double qi = std::max(suffix - vc->v_star, 0.0);
            y[i] = (i + 1 < nn) ? std::min(qi, std::max(x[i], 0.0)) : qi;
            q += vc->betas[i] * y[i];
            suffix -= x[i];
        }
        if (q <= vc->d) r = y;
    } else if (const auto* cw = std::get_if<ComponentwiseContract>(&c)) {
        for (std::size_t i = 0; i < cw->maps.size(); ++i) r[i] = cw->maps[i](x[i]);
    }

    for (int i = 0; i < n; ++i)
        r[static_cast<std::size_t>(i)] = clamp01x(r[static_cast<std::size_t>(i)], x[i]);
    return r;
}

double expected_excess(const ContinuousDistribution& d, double a) {
    if (a < 0.0) a = 0.0;
    const double hi = upper_cutoff(d);
    if (a >= hi) return 0.0;
    // E[(X - a)+] = integral of the survival function over (a, infinity); the
    // piece beyond the 1 - 1e-13 quantile is dropped (for the heavy-tailed
    // families it is below ~1e-9, for light tails below 1e-12).
    return adaptive_simpson([&](double x) { return 1.0 - d.cdf(x); }, a, hi, 1e-12);
}

FitReport solve_stop_loss(const ContinuousDistribution& d, double premium_budget) {
    if (!(premium_budget > 0.0))
        throw std::invalid_argument("solve_stop_loss: premium budget must be positive");
    FitReport rep;
    const double mean = d.mean();
    if (premium_budget >= mean) {
        rep.contract = StopLossContract{0.0};
        rep.premium = mean;
        rep.retained_mean = 0.0;
        rep.retained_variance = 0.0;
        rep.residual = mean - premium_budget;
        rep.feasible = false;
        rep.notes = "budget exceeds E[X]; full cession (attachment 0) is the closest fit";
        return rep;
    }
    double lo = 0.0, hi = upper_cutoff(d);
    long long iters = 0;
    // expected_excess is continuous and strictly decreasing from E[X] to ~0.
    for (int k = 0; k < 200 && (hi - lo) > 1e-14 * (1.0 + hi); ++k) {
        const double mid = 0.5 * (lo + hi);
        const double ee = expected_excess(d, mid);
        ++iters;
        if (ee > premium_budget)
            lo = mid;
        else
            hi = mid;
    }
    const double a = 0.5 * (lo + hi);
    const double premium = expected_excess(d, a);
    const double retained_mean = mean - premium;
    // E[min(X,a)^2] = 2 * integral_0^a t (1 - F(t)) dt for X >= 0.
    const double second =
        2.0 * adaptive_simpson([&](double t) { return t * (1.0 - d.cdf(t)); }, 0.0, a, 1e-12);
    rep.contract = StopLossContract{a};
    rep.premium = premium;
    rep.retained_mean = retained_mean;
    rep.retained_variance = std::max(second - retained_mean * retained_mean, 0.0);
    rep.residual = premium - premium_budget;
    rep.iterations = iters;
    return rep;
}

FitReport solve_quota_share_variance_premium(double variance_x, double variance_budget) {
    if (!(variance_x > 0.0))
        throw std::invalid_argument("solve_quota_share: Var(X) must be positive");
    if (variance_budget < 0.0)
        throw std::invalid_argument("solve_quota_share: variance budget must be nonnegative");
    FitReport rep;
    double f = std::sqrt(variance_budget / variance_x);
    if (f > 1.0) {
        f = 1.0;
        rep.feasible = false;
        rep.notes = "ceded-variance budget exceeds Var(X); factor capped at 1";
    }
    rep.contract = QuotaShareContract{f};
    rep.retained_variance = (1.0 - f) * (1.0 - f) * variance_x;
    rep.residual = f * f * variance_x - variance_budget;
    return rep;
}

FitReport solve_quota_share_variance_premium(const ContinuousDistribution& d,
                                             double variance_budget) {
    FitReport rep = solve_quota_share_variance_premium(d.variance(), variance_budget);
    const double f = std::get<QuotaShareContract>(rep.contract).factor;
    rep.premium = f * d.mean();
    rep.retained_mean = (1.0 - f) * d.mean();
    return rep;
}

FitReport solve_definetti_proportions(const std::vector<double>& means,
                                      const std::vector<double>& variances,
                                      const std::vector<double>& betas,
                                      double variance_budget) {
    const std::size_t n = means.size();
    if (n == 0 || variances.size() != n || betas.size() != n)
        throw std::invalid_argument("solve_definetti: input arity mismatch");
    for (std::size_t i = 0; i < n; ++i)
        if (!(means[i] > 0.0) || !(variances[i] > 0.0) || !(betas[i] > 0.0))
            throw std::invalid_argument("solve_definetti: moments and betas must be positive");
    if (!(variance_budget > 0.0))
        throw std::invalid_argument("solve_definetti: variance budget must be positive");

    const auto proportions = [&](double lambda) {
        std::vector<double> a(n);
        for (std::size_t i = 0; i < n; ++i)
            a[i] = std::max(1.0 - betas[i] * means[i] / (2.0 * lambda * variances[i]), 0.0);
        return a;
    };
    const auto retained_variance = [&](const std::vector<double>& a) {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) v += (1.0 - a[i]) * (1.0 - a[i]) * variances[i];
        return v;
    };

    FitReport rep;
    const double vmax = std::accumulate(variances.begin(), variances.end(), 0.0);
    if (variance_budget >= vmax) {
        // No cession needed: every line keeps a zero-factor linear map.
        ComponentwiseContract none;
        none.maps.resize(n);
        for (auto& m : none.maps) {
            m.kind = LineMap::Kind::linear;
            m.factor = 0.0;
        }
        rep.contract = none;
        rep.retained_variance = vmax;
        rep.retained_mean = std::accumulate(means.begin(), means.end(), 0.0);
        rep.residual = vmax - variance_budget;
        rep.notes = "variance budget not binding; no cession needed";
        return rep;
    }

    double lo = 1e-12, hi = 1.0;
    long long iters = 0;
    while (retained_variance(proportions(hi)) > variance_budget && hi < 1e12) {
        hi *= 2.0;
        ++iters;
    }
    for (int k = 0; k < 300 && (hi - lo) > 1e-15 * hi; ++k) {
        const double mid = 0.5 * (lo + hi);
        // Retained variance decreases as lambda grows (more is ceded).
        if (retained_variance(proportions(mid)) > variance_budget)
            lo = mid;
        else
            hi = mid;
        ++iters;
    }
    const double lambda = 0.5 * (lo + hi);
    const std::vector<double> a = proportions(lambda);

    ComponentwiseContract cw;
    cw.maps.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        cw.maps[i].kind = LineMap::Kind::linear;
        cw.maps[i].factor = a[i];
    }
    rep.contract = cw;
    for (std::size_t i = 0; i < n; ++i) {
        rep.premium += betas[i] * a[i] * means[i];
        rep.retained_mean += (1.0 - a[i]) * means[i];
    }
    rep.retained_variance = retained_variance(a);
    rep.multiplier = lambda;
    rep.residual = rep.retained_variance - variance_budget;
    rep.iterations = iters;
    return rep;
}

namespace {

// Shared moment engine for the multiline fit: quadrature below four lines
// (or on request), Monte Carlo otherwise. Outputs are
//   [0] E[retained sum], [1] E[(retained sum)^2], then optionally E[R_i].
class MultilineMoments {
  public:
    MultilineMoments(const std::vector<ContinuousDistribution>& dists,
                     const std::vector<double>& betas, const IntegrationConfig& cfg)
        : dists_(dists), betas_(betas), cfg_(cfg) {
        use_quadrature_ = cfg.mode == IntegrationConfig::Mode::quadrature ||
                          (cfg.mode == IntegrationConfig::Mode::automatic &&
                           dists.size() <= 3);
        if (use_quadrature_) {
            rules_.reserve(dists.size());
            for (const auto& d : dists_)
                rules_.push_back(expectation_rule(d, cfg.nodes, cfg.tail_trunc));
        }
    }

    bool quadrature() const { return use_quadrature_; }

    std::vector<double> pass(double lambda_star, double sigma, bool with_lines) {
        const std::size_t n = dists_.size();
        const std::size_t n_out = with_lines ? n + 2 : 2;
        ++passes_;
        auto f = [&](std::span<const double> x, std::span<double> out) {
            std::span<double> lines =
                with_lines ? out.subspan(2) : std::span<double>();
            const double retained =
                multiline_retained_sum(x, betas_, lambda_star, sigma, lines);
            out[0] = retained;
            out[1] = retained * retained;
        };
        if (use_quadrature_)
            return tensor_expectation(rules_, n_out, f, cfg_.exec);
        return mc_sweep(dists_, cfg_.mc_samples, cfg_.seed, n_out, f, cfg_.exec);
    }

    long long passes() const { return passes_; }

  private:
    const std::vector<ContinuousDistribution>& dists_;
    const std::vector<double>& betas_;
    IntegrationConfig cfg_;
    std::vector<QuadratureRule1D> rules_;
    bool use_quadrature_ = true;
    long long passes_ = 0;
};

}  // namespace

FitReport solve_mean_variance_multiline(const std::vector<ContinuousDistribution>& dists,
                                        const std::vector<double>& betas,
                                        double variance_budget,
                                        const IntegrationConfig& cfg) {
    check_lines(dists, betas, "solve_mean_variance_multiline");
    for (std::size_t i = 1; i < betas.size(); ++i)
        if (!(betas[i] > betas[i - 1]))
            throw std::invalid_argument(
                "solve_mean_variance_multiline: betas must be strictly increasing");
    if (!(variance_budget > 0.0))
        throw std::invalid_argument(
            "solve_mean_variance_multiline: variance budget must be positive");

    MultilineMoments engine(dists, betas, cfg);

    double sigma = 0.0;
    for (const auto& d : dists) sigma += d.mean();

    // For fixed lambda, sigma is the fixed point of "mean of the retained sum
    // given the deductibles use sigma"; damped iteration converges since the
    // map is a contraction in sigma.
    const auto converge_sigma = [&](double lambda_star) {
        std::vector<double> mom;
        for (int k = 0; k < 200; ++k) {
            mom = engine.pass(lambda_star, sigma, false);
            const double drift = mom[0] - sigma;
            sigma += 0.5 * drift;
            if (std::abs(drift) <= 1e-11 * (1.0 + std::abs(sigma))) break;
        }
        return mom;  // moments at (lambda, ~sigma)
    };
    const auto retained_var = [&](double lambda_star) {
        const std::vector<double> mom = converge_sigma(lambda_star);
        return mom[1] - mom[0] * mom[0];
    };

    FitReport rep;
    double lo = 2e-8, hi = 2e3;
    const double v_lo = retained_var(lo);
    if (v_lo < variance_budget) {
        rep.feasible = false;
        rep.notes = "variance budget not binding at vanishing cession";
        hi = lo;
    } else {
        const double v_hi = retained_var(hi);
        if (v_hi > variance_budget) {
            rep.feasible = false;
            rep.notes = "variance budget unreachable within the deductible family";
            lo = hi;
        } else {
            for (int k = 0; k < 200 && (hi - lo) > 1e-13 * hi; ++k) {
                const double mid = 0.5 * (lo + hi);
                const double v = retained_var(mid);
                if (std::abs(v - variance_budget) <= 1e-10 * std::max(1.0, variance_budget)) {
                    lo = hi = mid;
                    break;
                }
                // Retained variance decreases as lambda grows.
                if (v > variance_budget)
                    lo = mid;
                else
                    hi = mid;
            }
        }
    }
    const double lambda_star = 0.5 * (lo + hi);
    converge_sigma(lambda_star);
    const std::vector<double> mom = engine.pass(lambda_star, sigma, true);

    rep.contract = MultilineMeanVarianceContract{betas, lambda_star, sigma};
    for (std::size_t i = 0; i < betas.size(); ++i)
        rep.premium += betas[i] * mom[2 + i];
    rep.retained_mean = mom[0];
    rep.retained_variance = mom[1] - mom[0] * mom[0];
    rep.multiplier = lambda_star;
    rep.residual = rep.retained_variance - variance_budget;
    rep.iterations = engine.passes();
    if (!engine.quadrature() && rep.notes.empty())
        rep.notes = "moments estimated by Monte Carlo";
    return rep;
}

FitReport solve_var_constrained(const std::vector<ContinuousDistribution>& dists,
                                const std::vector<double>& betas, double alpha,
                                double var_budget, const IntegrationConfig& cfg) {
    check_lines(dists, betas, "solve_var_constrained");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("solve_var_constrained: alpha must lie in (0,1)");
    if (var_budget < 0.0)
        throw std::invalid_argument("solve_var_constrained: budget must be nonnegative");

    const std::size_t n = dists.size();
    const double v_star = var_budget;  // the VaR constraint binds at the budget
    FitReport rep;

    if (n == 1) {
        const ContinuousDistribution& d0 = dists[0];
        const double beta = betas[0];
        const double d_thr = beta * std::max(d0.quantile(1.0 - alpha) - v_star, 0.0);
        rep.contract = VarConstrainedContract{betas, v_star, d_thr};
        const double x_d = v_star + d_thr / beta;  // ceded-premium threshold in x
        const double hi = upper_cutoff(d0);
        const double cut = std::min(x_d, hi);
        rep.premium = beta * adaptive_simpson(
                                 [&](double x) { return (x - v_star) * d0.pdf(x); },
                                 v_star, cut, 1e-12);
        // Retained amount: x below v*, then v* up to the threshold, then x again.
        const double m1 =
            adaptive_simpson([&](double x) { return x * d0.pdf(x); }, 0.0, v_star, 1e-12) +
            v_star * (d0.cdf(cut) - d0.cdf(v_star)) +
            adaptive_simpson([&](double x) { return x * d0.pdf(x); }, cut, hi, 1e-12);
        const double m2 =
            adaptive_simpson([&](double x) { return x * x * d0.pdf(x); }, 0.0, v_star, 1e-12) +
            v_star * v_star * (d0.cdf(cut) - d0.cdf(v_star)) +
            adaptive_simpson([&](double x) { return x * x * d0.pdf(x); }, cut, hi, 1e-12);
        rep.retained_mean = m1;
        rep.retained_variance = std::max(m2 - m1 * m1, 0.0);
        rep.multiplier = d_thr;
        rep.iterations = 0;
        return rep;
    }

    // Several lines: the threshold d is the lower empirical (1 - alpha)-quantile
    // of the ceded premium q(X) under a deterministic Monte Carlo sample.
    const CounterRng rng(cfg.seed);
    const std::uint64_t m = std::max<std::uint64_t>(cfg.mc_samples, 1);
    std::vector<double> q(static_cast<std::size_t>(m));
    std::vector<double> x(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) private(x) \
    if (cfg.exec == ExecMode::parallel)
#endif
    for (std::int64_t s = 0; s < static_cast<std::int64_t>(m); ++s) {
        x.resize(n);
        for (std::size_t l = 0; l < n; ++l) {
            SampleStream stream(rng, static_cast<std::uint64_t>(s) * n + l);
            x[l] = sample(dists[l], stream);
        }
        double suffix = 0.0;
        for (std::size_t i = n; i-- > 0;) suffix += x[i];
        double qi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double cand = std::max(suffix - v_star, 0.0);
            const double yi = (i + 1 < n) ? std::min(cand, std::max(x[i], 0.0)) : cand;
            qi += betas[i] * yi;
            suffix -= x[i];
        }
        q[static_cast<std::size_t>(s)] = qi;
    }
    std::vector<double> sorted(q);
    std::sort(sorted.begin(), sorted.end());
    const std::uint64_t rank = static_cast<std::uint64_t>(
        std::ceil((1.0 - alpha) * static_cast<double>(m)));
    const double d_thr = sorted[static_cast<std::size_t>(
        std::min<std::uint64_t>(m - 1, rank > 0 ? rank - 1 : 0))];

    double premium = 0.0;
    std::uint64_t below = 0;
    for (double qi : q) {
        if (qi <= d_thr) {
            premium += qi;
            ++below;
        }
    }
    premium /= static_cast<double>(m);

    rep.contract = VarConstrainedContract{betas, v_star, d_thr};
    rep.premium = premium;
    rep.multiplier = d_thr;
    rep.residual =
        static_cast<double>(below) / static_cast<double>(m) - (1.0 - alpha);
    rep.iterations = static_cast<long long>(m);
    rep.notes = "threshold and premium from seeded Monte Carlo";
    return rep;
}

double expected_loading(const Contract& c, const std::vector<ContinuousDistribution>& dists,
                        const std::vector<double>& betas, const IntegrationConfig& cfg) {
    check_lines(dists, betas, "expected_loading");
    const std::size_t n = dists.size();
    if (contract_lines(c) != static_cast<int>(n))
        throw std::invalid_argument("expected_loading: contract arity mismatch");

    // Indicator-type contracts have a ceded premium that jumps; tensor
    // quadrature would smear the jump, so automatic mode sends them to
    // Monte Carlo along with higher-dimensional products.
    bool quad = cfg.mode == IntegrationConfig::Mode::quadrature;
    if (cfg.mode == IntegrationConfig::Mode::automatic)
        quad = n <= 3 && !std::holds_alternative<VarConstrainedContract>(c);

    auto f = [&](std::span<const double> x, std::span<double> out) {
        const std::vector<double> r = evaluate(c, x);
        for (std::size_t i = 0; i < n; ++i) out[i] = r[i];
    };
    std::vector<double> ceded;
    if (quad) {
        std::vector<QuadratureRule1D> rules;
        rules.reserve(n);
        for (const auto& d : dists)
            rules.push_back(expectation_rule(d, cfg.nodes, cfg.tail_trunc));
        ceded = tensor_expectation(rules, n, f, cfg.exec);
    } else {
        ceded = mc_sweep(dists, cfg.mc_samples, cfg.seed, n, f, cfg.exec);
    }
    double loading = 0.0;
    for (std::size_t i = 0; i < n; ++i) loading += betas[i] * ceded[i];
    return loading;
}

}  // namespace reot
