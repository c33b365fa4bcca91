#include "reot/dist.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "reot/special.hpp"

namespace reot {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

// ---------------------------------------------------------------------------
// ContinuousDistribution

ContinuousDistribution::ContinuousDistribution(Family family) : family_(std::move(family)) {
    std::visit(
        [](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, GammaDist>) {
                require(f.shape > 0.0 && f.rate > 0.0, "gamma: shape and rate must be positive");
            } else if constexpr (std::is_same_v<T, ShiftedParetoDist>) {
                require(f.scale > 0.0 && f.tail_index > 0.0,
                        "shifted_pareto: scale and tail index must be positive");
            } else if constexpr (std::is_same_v<T, LognormalDist>) {
                require(f.log_sd > 0.0, "lognormal: log_sd must be positive");
            } else if constexpr (std::is_same_v<T, ExponentialDist>) {
                require(f.rate > 0.0, "exponential: rate must be positive");
            } else if constexpr (std::is_same_v<T, UniformDist>) {
                require(f.lo < f.hi, "uniform: lo must be below hi");
                require(f.lo >= 0.0, "uniform: support must be nonnegative");
            }
        },
        family_);
}

ContinuousDistribution ContinuousDistribution::gamma(double shape, double rate) {
    return ContinuousDistribution(GammaDist{shape, rate});
}
ContinuousDistribution ContinuousDistribution::shifted_pareto(double scale, double tail_index) {
    return ContinuousDistribution(ShiftedParetoDist{scale, tail_index});
}
ContinuousDistribution ContinuousDistribution::lognormal(double log_mean, double log_sd) {
    return ContinuousDistribution(LognormalDist{log_mean, log_sd});
}
ContinuousDistribution ContinuousDistribution::exponential(double rate) {
    return ContinuousDistribution(ExponentialDist{rate});
}
ContinuousDistribution ContinuousDistribution::uniform(double lo, double hi) {
    return ContinuousDistribution(UniformDist{lo, hi});
}

double ContinuousDistribution::cdf(double x) const {
    return std::visit(
        [x](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, GammaDist>) {
                if (x <= 0.0) return 0.0;
                return regularized_gamma_p(f.shape, f.rate * x);
            } else if constexpr (std::is_same_v<T, ShiftedParetoDist>) {
                if (x <= 0.0) return 0.0;
                return 1.0 - std::pow(f.scale / (x + f.scale), f.tail_index);
            } else if constexpr (std::is_same_v<T, LognormalDist>) {
                if (x <= 0.0) return 0.0;
                return normal_cdf((std::log(x) - f.log_mean) / f.log_sd);
            } else if constexpr (std::is_same_v<T, ExponentialDist>) {
                if (x <= 0.0) return 0.0;
                return -std::expm1(-f.rate * x);
            } else {
                if (x <= f.lo) return 0.0;
                if (x >= f.hi) return 1.0;
                return (x - f.lo) / (f.hi - f.lo);
            }
        },
        family_);
}

double ContinuousDistribution::pdf(double x) const {
    return std::visit(
        [x](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, GammaDist>) {
                if (x <= 0.0) return 0.0;
                return std::exp(f.shape * std::log(f.rate) + (f.shape - 1.0) * std::log(x) -
                                f.rate * x - std::lgamma(f.shape));
            } else if constexpr (std::is_same_v<T, ShiftedParetoDist>) {
                if (x < 0.0) return 0.0;
                return f.tail_index / f.scale *
                       std::pow(f.scale / (x + f.scale), f.tail_index + 1.0);
            } else if constexpr (std::is_same_v<T, LognormalDist>) {
                if (x <= 0.0) return 0.0;
                const double z = (std::log(x) - f.log_mean) / f.log_sd;
                return std::exp(-0.5 * z * z) / (x * f.log_sd * std::sqrt(2.0 * M_PI));
            } else if constexpr (std::is_same_v<T, ExponentialDist>) {
                if (x < 0.0) return 0.0;
                return f.rate * std::exp(-f.rate * x);
            } else {
                return (x >= f.lo && x <= f.hi) ? 1.0 / (f.hi - f.lo) : 0.0;
            }
        },
        family_);
}

double ContinuousDistribution::quantile(double p) const {
    require(p >= 0.0 && p < 1.0, "quantile: p must lie in [0, 1)");
    if (p == 0.0) {
        return std::visit(
            [](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, UniformDist>) return f.lo;
                return 0.0;
            },
            family_);
    }
    // Closed forms.
    if (const auto* f = std::get_if<ShiftedParetoDist>(&family_)) {
        return f->scale * (std::pow(1.0 - p, -1.0 / f->tail_index) - 1.0);
    }
    if (const auto* f = std::get_if<ExponentialDist>(&family_)) {
        return -std::log1p(-p) / f->rate;
    }
    if (const auto* f = std::get_if<UniformDist>(&family_)) {
        return f->lo + p * (f->hi - f->lo);
    }
    // Gamma and lognormal: bracketing bisection on the cdf.
    double lo = 0.0;
    double hi = std::max(mean(), 1.0);
    while (cdf(hi) < p) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error("quantile: bracket expansion failed");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double ContinuousDistribution::mean() const {
    return std::visit(
        [](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, GammaDist>) {
                return f.shape / f.rate;
            } else if constexpr (std::is_same_v<T, ShiftedParetoDist>) {
                require(f.tail_index > 1.0, "shifted_pareto: mean needs tail index > 1");
                return f.scale / (f.tail_index - 1.0);
            } else if constexpr (std::is_same_v<T, LognormalDist>) {
                return std::exp(f.log_mean + 0.5 * f.log_sd * f.log_sd);
            } else if constexpr (std::is_same_v<T, ExponentialDist>) {
                return 1.0 / f.rate;
            } else {
                return 0.5 * (f.lo + f.hi);
            }
        },
        family_);
}

double ContinuousDistribution::variance() const {
    return std::visit(
        [](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, GammaDist>) {
                return f.shape / (f.rate * f.rate);
            } else if constexpr (std::is_same_v<T, ShiftedParetoDist>) {
                require(f.tail_index > 2.0, "shifted_pareto: variance needs tail index > 2");
                const double a = f.tail_index;
                return f.scale * f.scale * a / ((a - 1.0) * (a - 1.0) * (a - 2.0));
            } else if constexpr (std::is_same_v<T, LognormalDist>) {
                const double s2 = f.log_sd * f.log_sd;
                return std::expm1(s2) * std::exp(2.0 * f.log_mean + s2);
            } else if constexpr (std::is_same_v<T, ExponentialDist>) {
                return 1.0 / (f.rate * f.rate);
            } else {
                const double w = f.hi - f.lo;
                return w * w / 12.0;
            }
        },
        family_);
}

std::string ContinuousDistribution::family_name() const {
    return std::visit(
        [](const auto& f) -> std::string {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, GammaDist>) return "gamma";
            else if constexpr (std::is_same_v<T, ShiftedParetoDist>) return "shifted_pareto";
            else if constexpr (std::is_same_v<T, LognormalDist>) return "lognormal";
            else if constexpr (std::is_same_v<T, ExponentialDist>) return "exponential";
            else return "uniform";
        },
        family_);
}

// ---------------------------------------------------------------------------
// DiscreteDistribution

void DiscreteDistribution::validate() const {
    require(!support.empty(), "discrete law: empty support");
    require(support.size() == mass.size(), "discrete law: support/mass size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        require(support[i] >= 0.0, "discrete law: negative support point");
        require(mass[i] >= 0.0, "discrete law: negative mass");
        if (i > 0) require(support[i] > support[i - 1], "discrete law: support not strictly increasing");
        total += mass[i];
    }
    require(std::fabs(total - 1.0) <= 1e-12, "discrete law: masses must sum to 1");
}

double DiscreteDistribution::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) m += mass[i] * support[i];
    return m;
}

double DiscreteDistribution::variance() const {
    const double m = mean();
    double m2 = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) m2 += mass[i] * support[i] * support[i];
    return m2 - m * m;
}

double DiscreteDistribution::cdf(double x) const {
    double c = 0.0;
    for (std::size_t i = 0; i < support.size() && support[i] <= x; ++i) c += mass[i];
    return c;
}

double DiscreteDistribution::quantile(double p) const {
    if (p <= 0.0) return 0.0;
    double c = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        c += mass[i];
        if (c >= p - 1e-15) return support[i];
    }
    return support.back();
}

// ---------------------------------------------------------------------------
// Binning and pushforward

DiscreteDistribution discretize(const ContinuousDistribution& d, int n_bins,
                                double tail_quantile) {
    require(n_bins >= 1, "discretize: need at least one bin");
    require(tail_quantile > 0.0 && tail_quantile < 1.0, "discretize: tail quantile in (0,1)");
    const double u = d.quantile(tail_quantile);
    require(u > 0.0, "discretize: tail quantile level maps to zero");

    DiscreteDistribution out;
    out.support.resize(n_bins);
    out.mass.resize(n_bins);
    double prev_cdf = 0.0;
    for (int k = 1; k <= n_bins; ++k) {
        const double x = u * static_cast<double>(k) / static_cast<double>(n_bins);
        out.support[k - 1] = x;
        if (k < n_bins) {
            const double c = d.cdf(x);
            out.mass[k - 1] = c - prev_cdf;
            prev_cdf = c;
        } else {
            // Entire upper tail folds into the last point.
            out.mass[k - 1] = 1.0 - prev_cdf;
        }
    }
    out.validate();
    return out;
}

double round_sig(double v, int digits) {
    if (v == 0.0 || !std::isfinite(v)) return v;
    const double mag = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::fabs(v)))));
    return std::round(v * mag) / mag;
}

DiscreteDistribution pushforward(const DiscreteDistribution& d,
                                 const std::function<double(double)>& f,
                                 std::vector<int>* index_map) {
    d.validate();
    std::vector<double> image(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) image[i] = round_sig(f(d.support[i]), 12);

    std::map<double, double> merged;
    for (std::size_t i = 0; i < d.size(); ++i) merged[image[i]] += d.mass[i];

    DiscreteDistribution out;
    out.support.reserve(merged.size());
    out.mass.reserve(merged.size());
    std::map<double, int> position;
    for (const auto& [value, m] : merged) {
        position[value] = static_cast<int>(out.support.size());
        out.support.push_back(value);
        out.mass.push_back(m);
    }
    if (index_map) {
        index_map->resize(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) (*index_map)[i] = position[image[i]];
    }
    out.validate();
    return out;
}

// ---------------------------------------------------------------------------
// GridLaw

std::size_t GridLaw::flat_size() const {
    std::size_t n = 1;
    for (const auto& g : grids) n *= g.size();
    return n;
}

std::size_t GridLaw::flat_index(std::span<const int> idx) const {
    if (idx.size() != grids.size()) throw std::invalid_argument("grid law: index arity mismatch");
    std::size_t flat = 0;
    std::size_t stride = 1;
    for (std::size_t ax = 0; ax < grids.size(); ++ax) {
        const int i = idx[ax];
        if (i < 0 || static_cast<std::size_t>(i) >= grids[ax].size())
            throw std::out_of_range("grid law: index out of range");
        flat += stride * static_cast<std::size_t>(i);
        stride *= grids[ax].size();
    }
    return flat;
}

void GridLaw::validate() const {
    require(!grids.empty(), "grid law: no axes");
    for (const auto& g : grids) {
        require(!g.empty(), "grid law: empty axis grid");
        for (std::size_t i = 0; i < g.size(); ++i) {
            require(g[i] >= 0.0, "grid law: negative grid value");
            if (i > 0) require(g[i] > g[i - 1], "grid law: grid not strictly increasing");
        }
    }
    require(mass.size() == flat_size(), "grid law: mass size mismatch");
    double total = 0.0;
    for (double m : mass) {
        require(m >= 0.0, "grid law: negative mass");
        total += m;
    }
    require(std::fabs(total - 1.0) <= 1e-12, "grid law: masses must sum to 1");
}

DiscreteDistribution GridLaw::marginal(std::size_t axis) const {
    if (axis >= grids.size()) throw std::out_of_range("grid law: axis out of range");
    std::size_t stride = 1;
    for (std::size_t ax = 0; ax < axis; ++ax) stride *= grids[ax].size();
    const std::size_t n = grids[axis].size();
    const std::size_t block = stride * n;

    DiscreteDistribution out;
    out.support = grids[axis];
    out.mass.assign(n, 0.0);
    for (std::size_t flat = 0; flat < mass.size(); ++flat) {
        out.mass[(flat % block) / stride] += mass[flat];
    }
    return out;
}

GridLaw product_law(const std::vector<DiscreteDistribution>& margins) {
    if (margins.empty()) throw std::invalid_argument("product_law: no margins");
    GridLaw law;
    law.grids.reserve(margins.size());
    for (const auto& m : margins) {
        m.validate();
        law.grids.push_back(m.support);
    }
    law.mass.assign(law.flat_size(), 1.0);
    std::size_t stride = 1;
    for (const auto& m : margins) {
        const std::size_t n = m.support.size();
        const std::size_t block = stride * n;
        for (std::size_t flat = 0; flat < law.mass.size(); ++flat) {
            law.mass[flat] *= m.mass[(flat % block) / stride];
        }
        stride = block;
    }
    return law;
}

}  // namespace reot
