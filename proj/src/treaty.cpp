#include "reot/treaty.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace reot {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void DiscreteTreaty::validate() const {
    require(n_lines >= 1, "treaty: need at least one line");
    require(static_cast<int>(x_grids.size()) == n_lines, "treaty: x grid arity mismatch");
    require(static_cast<int>(y_grids.size()) == n_lines, "treaty: y grid arity mismatch");
    for (const auto& g : x_grids) require(!g.empty(), "treaty: empty x grid");
    for (const auto& g : y_grids) require(!g.empty(), "treaty: empty y grid");
    double total = 0.0;
    for (const auto& a : atoms) {
        require(static_cast<int>(a.xi.size()) == n_lines, "treaty: atom x arity mismatch");
        require(static_cast<int>(a.yi.size()) == n_lines, "treaty: atom y arity mismatch");
        for (int l = 0; l < n_lines; ++l) {
            require(a.xi[l] >= 0 && a.xi[l] < static_cast<int>(x_grids[l].size()),
                    "treaty: atom x index out of range");
            require(a.yi[l] >= 0 && a.yi[l] < static_cast<int>(y_grids[l].size()),
                    "treaty: atom y index out of range");
        }
        require(a.mass >= 0.0, "treaty: negative atom mass");
        total += a.mass;
    }
    require(std::fabs(total - 1.0) <= 1e-12, "treaty: atom masses must sum to 1");
}

double DiscreteTreaty::total_mass() const {
    double total = 0.0;
    for (const auto& a : atoms) total += a.mass;
    return total;
}

// ---------------------------------------------------------------------------

FeasibilityReport check_feasible(const DiscreteTreaty& t, const GridLaw& mu, double tol) {
    FeasibilityReport rep;
    try {
        t.validate();
        mu.validate();
    } catch (const std::exception& e) {
        rep.ok = false;
        rep.violation = e.what();
        return rep;
    }
    if (mu.axes() != static_cast<std::size_t>(t.n_lines)) {
        rep.ok = false;
        rep.violation = "claim law arity does not match treaty lines";
        return rep;
    }

    // Support condition 0 <= y <= x per atom (y grids are nonnegative by
    // construction, so only the upper bound can fail).
    for (std::size_t idx = 0; idx < t.atoms.size(); ++idx) {
        const auto& a = t.atoms[idx];
        if (a.mass <= 0.0) continue;
        for (int l = 0; l < t.n_lines; ++l) {
            if (t.y_of(a, l) > t.x_of(a, l) + tol) {
                rep.ok = false;
                rep.violation = "atom " + std::to_string(idx) + " line " + std::to_string(l) +
                                " exceeds its claim: y=" + std::to_string(t.y_of(a, l)) +
                                " > x=" + std::to_string(t.x_of(a, l));
                return rep;
            }
        }
    }

    // First-block marginal must reproduce mu cell-wise. Atoms index treaty
    // x grids which must agree with mu's grids.
    for (int l = 0; l < t.n_lines; ++l) {
        if (t.x_grids[l] != mu.grids[l]) {
            rep.ok = false;
            rep.violation = "treaty x grid for line " + std::to_string(l) +
                            " differs from the claim law grid";
            return rep;
        }
    }
    std::vector<double> marg(mu.mass.size(), 0.0);
    for (const auto& a : t.atoms) marg[mu.flat_index(a.xi)] += a.mass;
    for (std::size_t cell = 0; cell < marg.size(); ++cell) {
        rep.max_marginal_residual =
            std::max(rep.max_marginal_residual, std::fabs(marg[cell] - mu.mass[cell]));
    }
    rep.mass_defect = std::fabs(t.total_mass() - 1.0);
    if (rep.max_marginal_residual > tol) {
        rep.ok = false;
        rep.violation = "claim marginal residual " + std::to_string(rep.max_marginal_residual) +
                        " exceeds tolerance";
    } else if (rep.mass_defect > tol) {
        rep.ok = false;
        rep.violation = "total mass defect " + std::to_string(rep.mass_defect) +
                        " exceeds tolerance";
    }
    return rep;
}

// ---------------------------------------------------------------------------

DominanceVerdict stochastic_dominance(const DiscreteDistribution& nu,
                                      const DiscreteDistribution& mu) {
    nu.validate();
    mu.validate();
    std::vector<double> points;
    points.reserve(nu.size() + mu.size());
    points.insert(points.end(), nu.support.begin(), nu.support.end());
    points.insert(points.end(), mu.support.begin(), mu.support.end());
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    DominanceVerdict v;
    v.worst_gap = -1e300;
    for (double x : points) {
        const double gap = mu.cdf(x) - nu.cdf(x);
        if (gap > v.worst_gap) {
            v.worst_gap = gap;
            v.worst_point = x;
        }
    }
    v.dominated = v.worst_gap <= 1e-12;
    return v;
}

DiscreteTreaty comonotone_map(const DiscreteDistribution& mu, const DiscreteDistribution& nu) {
    const DominanceVerdict dom = stochastic_dominance(nu, mu);
    if (!dom.dominated) {
        throw std::invalid_argument(
            "comonotone_map: target is not stochastically dominated; F_mu - F_nu = " +
            std::to_string(dom.worst_gap) + " at x = " + std::to_string(dom.worst_point));
    }

    DiscreteTreaty t;
    t.n_lines = 1;
    t.x_grids = {mu.support};
    t.y_grids = {nu.support};
    t.orientation = SecondBlock::reinsured;

    // Northwest-corner walk over the two sorted supports: repeatedly pair the
    // current atoms and move the smaller remaining mass.
    std::size_t i = 0, k = 0;
    double mu_left = mu.mass[0];
    double nu_left = nu.mass[0];
    while (i < mu.size() && k < nu.size()) {
        const double step = std::min(mu_left, nu_left);
        if (step > 0.0) {
            TreatyAtom a;
            a.xi = {static_cast<std::int32_t>(i)};
            a.yi = {static_cast<std::int32_t>(k)};
            a.mass = step;
            t.atoms.push_back(std::move(a));
        }
        mu_left -= step;
        nu_left -= step;
        // Advance whichever side is exhausted; on exact ties advance both.
        if (mu_left <= 0.0 && i + 1 <= mu.size()) {
            ++i;
            if (i < mu.size()) mu_left = mu.mass[i];
        }
        if (nu_left <= 0.0 && k + 1 <= nu.size()) {
            ++k;
            if (k < nu.size()) nu_left = nu.mass[k];
        }
    }
    // Rounding can leave a sliver (within the 1e-12 mass-sum slack) on one
    // side after the other exhausts; fold it into the last emitted atom so
    // the total is conserved without inventing new support pairs.
    if (!t.atoms.empty()) {
        double leftover = 0.0;
        if (i < mu.size()) {
            leftover = mu_left;
            for (std::size_t r = i + 1; r < mu.size(); ++r) leftover += mu.mass[r];
        } else if (k < nu.size()) {
            leftover = nu_left;
            for (std::size_t r = k + 1; r < nu.size(); ++r) leftover += nu.mass[r];
        }
        if (leftover > 0.0) t.atoms.back().mass += leftover;
    }
    return t;
}

Contract rearrangement_contract(const std::vector<DiscreteDistribution>& mus,
                                const std::vector<DiscreteDistribution>& nus) {
    if (mus.empty() || mus.size() != nus.size())
        throw std::invalid_argument("rearrangement_contract: marginal arity mismatch");
    ComponentwiseContract c;
    c.maps.reserve(mus.size());
    for (std::size_t l = 0; l < mus.size(); ++l) {
        const DominanceVerdict dom = stochastic_dominance(nus[l], mus[l]);
        if (!dom.dominated) {
            throw std::invalid_argument(
                "rearrangement_contract: line " + std::to_string(l) +
                " target not dominated; worst gap " + std::to_string(dom.worst_gap) + " at x = " +
                std::to_string(dom.worst_point));
        }
        LineMap m;
        m.kind = LineMap::Kind::quantile_transform;
        m.from = mus[l];
        m.to = nus[l];
        c.maps.push_back(std::move(m));
    }
    return Contract(std::move(c));
}

// ---------------------------------------------------------------------------

bool validate_support_condition(const DiscreteTreaty& t, const PairCost& p,
                                const PairConstraints& g, double r_star,
                                const std::vector<double>& lambda_star, double tol,
                                int grid_per_axis, SupportConditionReport* report) {
    t.validate();
    if (grid_per_axis < 2) throw std::invalid_argument("validate_support_condition: grid too small");
    const int n = t.n_lines;
    const std::size_t m = lambda_star.size();

    auto value_at = [&](std::span<const double> x, std::span<const double> y) {
        double v = r_star * p(x, y);
        const std::vector<double> gv = g(x, y);
        if (gv.size() != m)
            throw std::invalid_argument("validate_support_condition: constraint arity mismatch");
        for (std::size_t j = 0; j < m; ++j) v += lambda_star[j] * gv[j];
        return v;
    };

    SupportConditionReport rep;
    rep.worst_gap = -1e300;
    std::vector<double> x(n), y(n), tpt(n);
    for (std::size_t idx = 0; idx < t.atoms.size(); ++idx) {
        const auto& a = t.atoms[idx];
        if (a.mass <= 0.0) continue;
        for (int l = 0; l < n; ++l) {
            x[l] = t.x_of(a, l);
            y[l] = t.y_of(a, l);
        }
        const double atom_value = value_at(x, y);

        // Scan the candidate grid {j/(G-1) * x_l} per line for a lower value.
        double grid_min = 1e300;
        std::vector<int> idxs(n, 0);
        for (;;) {
            for (int l = 0; l < n; ++l)
                tpt[l] = x[l] * static_cast<double>(idxs[l]) / static_cast<double>(grid_per_axis - 1);
            grid_min = std::min(grid_min, value_at(x, tpt));
            int ax = 0;
            for (; ax < n; ++ax) {
                if (++idxs[ax] < grid_per_axis) break;
                idxs[ax] = 0;
            }
            if (ax == n) break;
        }
        const double gap = atom_value - grid_min;
        if (gap > rep.worst_gap) {
            rep.worst_gap = gap;
            rep.worst_atom = idx;
        }
    }
    rep.ok = rep.worst_gap <= tol;
    if (report) *report = rep;
    return rep.ok;
}

SupportConditionInputs multiline_support_inputs(const MultilineMeanVarianceContract& c) {
    SupportConditionInputs in;
    const double sigma = c.sigma;
    in.p = [betas = c.betas](std::span<const double> /*x*/, std::span<const double> y) {
        double s = 0.0;
        for (std::size_t i = 0; i < betas.size(); ++i) s += betas[i] * y[i];
        return s;
    };
    // Halved so that pairing with the stored (doubled-normalization)
    // multiplier reproduces the fitting Lagrangian exactly.
    in.g = [sigma](std::span<const double> x, std::span<const double> y) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += x[i] - y[i];
        return std::vector<double>{0.5 * (s * s - 2.0 * sigma * s)};
    };
    in.r_star = 1.0;
    in.lambda_star = {c.lambda_star};
    return in;
}

}  // namespace reot
