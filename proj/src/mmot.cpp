#include "reot/mmot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace reot {

namespace {

constexpr double kSupportSlack = 1e-12;

// Rounds an arithmetic image for deduplication and clears the tiny negatives
// that cancellation can leave behind.
double clean_value(double v) {
    double r = round_sig(v, 12);
    if (r < 0.0 && r > -1e-12) r = 0.0;
    return r;
}

}  // namespace

double MarginalMap::operator()(double x) const {
    switch (kind) {
        case Kind::identity:
            return x;
        case Kind::proportional:
            return factor * x;
        case Kind::cap_plus_share:
            return std::min(x, cap) + share * std::max(x - excess_at, 0.0);
    }
    throw std::logic_error("mmot: unknown marginal map kind");
}

double MmotProblem::column_cost(std::size_t c) const {
    const auto& q = columns[c];
    const double d = mu.grids[0][q[0]] - nu1.support[q[2]] +
                     mu.grids[1][q[1]] - nu2.support[q[3]];
    return d * d;
}

StandardFormLP MmotProblem::to_lp() const {
    StandardFormLP lp;
    lp.num_rows = rows();
    lp.num_vars = cols();
    lp.rhs.resize(static_cast<std::size_t>(lp.num_rows));
    std::copy(mu.mass.begin(), mu.mass.end(), lp.rhs.begin());
    std::copy(nu1.mass.begin(), nu1.mass.end(),
              lp.rhs.begin() + static_cast<std::ptrdiff_t>(n1) * n2);
    std::copy(nu2.mass.begin(), nu2.mass.end(),
              lp.rhs.begin() + static_cast<std::ptrdiff_t>(n1) * n2 + m1);

    const std::size_t k = columns.size();
    lp.cost.resize(k);
    lp.triplets.emplace();
    lp.triplets->rows.resize(k);
    const std::int32_t base1 = n1 * n2;
    const std::int32_t base2 = base1 + m1;
    for (std::size_t c = 0; c < k; ++c) {
        const auto& q = columns[c];
        lp.cost[c] = column_cost(c);
        lp.triplets->rows[c] = {static_cast<std::int32_t>(q[0] + n1 * q[1]),
                                base1 + static_cast<std::int32_t>(q[2]),
                                base2 + static_cast<std::int32_t>(q[3])};
    }
    lp.validate();
    return lp;
}

MmotProblem assemble(const GridLaw& mu_joint, const DiscreteDistribution& nu1,
                     const DiscreteDistribution& nu2) {
    mu_joint.validate();
    nu1.validate();
    nu2.validate();
    if (mu_joint.axes() != 2)
        throw std::invalid_argument("mmot: claim law must have exactly two axes");

    MmotProblem p;
    p.mu = mu_joint;
    p.nu1 = nu1;
    p.nu2 = nu2;
    p.n1 = static_cast<int>(mu_joint.grids[0].size());
    p.n2 = static_cast<int>(mu_joint.grids[1].size());
    p.m1 = static_cast<int>(nu1.size());
    p.m2 = static_cast<int>(nu2.size());
    if (p.n1 > 65535 || p.n2 > 65535 || p.m1 > 65535 || p.m2 > 65535)
        throw std::invalid_argument("mmot: grid sizes beyond 16-bit index packing");

    const auto& x1 = p.mu.grids[0];
    const auto& x2 = p.mu.grids[1];
    const auto& y1 = nu1.support;
    const auto& y2 = nu2.support;

    // y-supports are sorted, so the feasible targets of a claim value form a
    // prefix: k < k_cnt1[i] keeps y1[k] <= x1[i] + slack.
    std::vector<int> k_cnt1(x1.size()), l_cnt2(x2.size());
    std::int64_t c1 = 0, c2 = 0;
    for (std::size_t i = 0; i < x1.size(); ++i) {
        k_cnt1[i] = static_cast<int>(
            std::upper_bound(y1.begin(), y1.end(), x1[i] + kSupportSlack) - y1.begin());
        c1 += k_cnt1[i];
    }
    for (std::size_t j = 0; j < x2.size(); ++j) {
        l_cnt2[j] = static_cast<int>(
            std::upper_bound(y2.begin(), y2.end(), x2[j] + kSupportSlack) - y2.begin());
        c2 += l_cnt2[j];
    }

    // Every positive-mass constraint row must keep at least one column.
    const int kmax1 = *std::max_element(k_cnt1.begin(), k_cnt1.end());
    const int lmax2 = *std::max_element(l_cnt2.begin(), l_cnt2.end());
    for (int j = 0; j < p.n2; ++j) {
        for (int i = 0; i < p.n1; ++i) {
            const double m = p.mu.mass[static_cast<std::size_t>(i) + p.mu.grids[0].size() * j];
            if (m > 0.0 && (k_cnt1[i] == 0 || l_cnt2[j] == 0)) {
                std::ostringstream os;
                os << "mmot: structurally infeasible; claim row " << (i + p.n1 * j)
                   << " (cell i=" << i << ", j=" << j << ", x1=" << x1[i] << ", x2=" << x2[j]
                   << ") has no admissible target after support deletion";
                throw std::invalid_argument(os.str());
            }
        }
    }
    for (int k = 0; k < p.m1; ++k) {
        if (nu1.mass[static_cast<std::size_t>(k)] > 0.0 && (k >= kmax1 || c2 == 0)) {
            std::ostringstream os;
            os << "mmot: structurally infeasible; first-line target row " << (p.n1 * p.n2 + k)
               << " (k=" << k << ", y1=" << y1[static_cast<std::size_t>(k)]
               << ") exceeds every claim value";
            throw std::invalid_argument(os.str());
        }
    }
    for (int l = 0; l < p.m2; ++l) {
        if (nu2.mass[static_cast<std::size_t>(l)] > 0.0 && (l >= lmax2 || c1 == 0)) {
            std::ostringstream os;
            os << "mmot: structurally infeasible; second-line target row "
               << (p.n1 * p.n2 + p.m1 + l) << " (l=" << l << ", y2="
               << y2[static_cast<std::size_t>(l)] << ") exceeds every claim value";
            throw std::invalid_argument(os.str());
        }
    }

    // Ascending flattened order: i fastest, then j, k, l.
    p.columns.reserve(static_cast<std::size_t>(c1 * c2));
    for (int l = 0; l < p.m2; ++l) {
        for (int k = 0; k < p.m1; ++k) {
            for (int j = 0; j < p.n2; ++j) {
                if (l >= l_cnt2[j]) continue;
                for (int i = 0; i < p.n1; ++i) {
                    if (k >= k_cnt1[i]) continue;
                    p.columns.push_back({static_cast<std::uint16_t>(i),
                                         static_cast<std::uint16_t>(j),
                                         static_cast<std::uint16_t>(k),
                                         static_cast<std::uint16_t>(l)});
                }
            }
        }
    }
    return p;
}

MmotSolution solve_mmot(const MmotProblem& p, const SimplexOptions& options) {
    const StandardFormLP lp = p.to_lp();

    MmotSolution out;
    out.lp = solve_lp(lp, options);

    double claim_mean = 0.0;
    for (int j = 0; j < p.n2; ++j)
        for (int i = 0; i < p.n1; ++i)
            claim_mean += p.mu.mass[static_cast<std::size_t>(i) + p.mu.grids[0].size() * j] *
                          (p.mu.grids[0][static_cast<std::size_t>(i)] +
                           p.mu.grids[1][static_cast<std::size_t>(j)]);
    out.reinsured.mean = claim_mean - (p.nu1.mean() + p.nu2.mean());

    if (out.lp.status != LPStatus::optimal) return out;

    out.objective = out.lp.objective;
    out.reinsured.variance = out.objective - out.reinsured.mean * out.reinsured.mean;

    DiscreteTreaty t;
    t.n_lines = 2;
    t.x_grids = p.mu.grids;
    t.y_grids = {p.nu1.support, p.nu2.support};
    t.orientation = SecondBlock::retained;
    for (std::size_t s = 0; s < out.lp.basis.size(); ++s) {
        const std::int64_t col = out.lp.basis[s];
        if (col >= lp.num_vars) continue;  // artificial parked on a redundant row
        const double v = out.lp.basic_values[s];
        if (v <= 1e-15) continue;
        const auto& q = p.columns[static_cast<std::size_t>(col)];
        TreatyAtom a;
        a.xi = {static_cast<std::int32_t>(q[0]), static_cast<std::int32_t>(q[1])};
        a.yi = {static_cast<std::int32_t>(q[2]), static_cast<std::int32_t>(q[3])};
        a.mass = v;
        t.atoms.push_back(std::move(a));
    }
    std::sort(t.atoms.begin(), t.atoms.end(), [](const TreatyAtom& a, const TreatyAtom& b) {
        return std::tie(a.xi[0], a.xi[1], a.yi[0], a.yi[1]) <
               std::tie(b.xi[0], b.xi[1], b.yi[0], b.yi[1]);
    });
    // Solver roundoff and the dropped near-zero basics leave the total mass
    // within solver tolerance of 1; rescale so the treaty is an exact law.
    double total = 0.0;
    for (const auto& a : t.atoms) total += a.mass;
    if (total > 0.0 && std::fabs(total - 1.0) <= 1e-8)
        for (auto& a : t.atoms) a.mass /= total;
    out.treaty = std::move(t);
    return out;
}

DiscreteTreaty eta_det(const GridLaw& mu_joint, const MarginalMap& map1,
                       const MarginalMap& map2) {
    mu_joint.validate();
    if (mu_joint.axes() != 2)
        throw std::invalid_argument("mmot: claim law must have exactly two axes");

    const std::array<const MarginalMap*, 2> maps = {&map1, &map2};
    for (int line = 0; line < 2; ++line) {
        for (double x : mu_joint.grids[static_cast<std::size_t>(line)]) {
            const double y = (*maps[static_cast<std::size_t>(line)])(x);
            if (y < -kSupportSlack || y > x + kSupportSlack) {
                std::ostringstream os;
                os << "deterministic treaty: map for line " << (line + 1) << " sends x=" << x
                   << " to " << y << ", outside [0, x]";
                throw std::invalid_argument(os.str());
            }
        }
    }

    std::vector<int> idx1, idx2;
    const DiscreteDistribution nu1 =
        pushforward(mu_joint.marginal(0), [&](double x) { return map1(x); }, &idx1);
    const DiscreteDistribution nu2 =
        pushforward(mu_joint.marginal(1), [&](double x) { return map2(x); }, &idx2);

    DiscreteTreaty t;
    t.n_lines = 2;
    t.x_grids = mu_joint.grids;
    t.y_grids = {nu1.support, nu2.support};
    t.orientation = SecondBlock::retained;
    const int n1 = static_cast<int>(mu_joint.grids[0].size());
    const int n2 = static_cast<int>(mu_joint.grids[1].size());
    for (int j = 0; j < n2; ++j) {
        for (int i = 0; i < n1; ++i) {
            const double m = mu_joint.mass[static_cast<std::size_t>(i) + mu_joint.grids[0].size() * j];
            if (m <= 0.0) continue;
            TreatyAtom a;
            a.xi = {i, j};
            a.yi = {idx1[static_cast<std::size_t>(i)], idx2[static_cast<std::size_t>(j)]};
            a.mass = m;
            t.atoms.push_back(std::move(a));
        }
    }
    t.validate();
    return t;
}

namespace {

// Dense bivariate table over fixed per-coordinate grids, accumulated from
// (row index, col index, mass) triples.
BivariateTable indexed_table(std::string name, std::vector<double> row_values,
                             std::vector<double> col_values,
                             const std::vector<std::array<std::int64_t, 2>>& cells,
                             const std::vector<double>& masses) {
    BivariateTable tab;
    tab.name = std::move(name);
    tab.row_values = std::move(row_values);
    tab.col_values = std::move(col_values);
    tab.pmf.assign(tab.row_values.size() * tab.col_values.size(), 0.0);
    for (std::size_t a = 0; a < cells.size(); ++a)
        tab.pmf[static_cast<std::size_t>(cells[a][0]) * tab.col_values.size() +
                static_cast<std::size_t>(cells[a][1])] += masses[a];
    return tab;
}

}  // namespace

MarginalReports marginal_reports(const DiscreteTreaty& t) {
    if (t.n_lines != 2)
        throw std::invalid_argument("marginal_reports: treaty must have two lines");
    if (t.orientation != SecondBlock::retained)
        throw std::invalid_argument("marginal_reports: treaty must use retained orientation");
    t.validate();

    MarginalReports rep;
    rep.n1 = static_cast<int>(t.x_grids[0].size());
    rep.n2 = static_cast<int>(t.x_grids[1].size());

    const std::size_t n_atoms = t.atoms.size();
    std::vector<double> masses(n_atoms);
    std::vector<std::array<std::int64_t, 2>> x1y1(n_atoms), x2y2(n_atoms), x1y2(n_atoms),
        x2y1(n_atoms), y1y2(n_atoms);
    for (std::size_t a = 0; a < n_atoms; ++a) {
        const auto& at = t.atoms[a];
        masses[a] = at.mass;
        x1y1[a] = {at.xi[0], at.yi[0]};
        x2y2[a] = {at.xi[1], at.yi[1]};
        x1y2[a] = {at.xi[0], at.yi[1]};
        x2y1[a] = {at.xi[1], at.yi[0]};
        y1y2[a] = {at.yi[0], at.yi[1]};
    }
    rep.tables.push_back(indexed_table("x1_y1", t.x_grids[0], t.y_grids[0], x1y1, masses));
    rep.tables.push_back(indexed_table("x2_y2", t.x_grids[1], t.y_grids[1], x2y2, masses));
    rep.tables.push_back(indexed_table("x1_y2", t.x_grids[0], t.y_grids[1], x1y2, masses));
    rep.tables.push_back(indexed_table("x2_y1", t.x_grids[1], t.y_grids[0], x2y1, masses));
    rep.tables.push_back(indexed_table("y1_y2", t.y_grids[0], t.y_grids[1], y1y2, masses));

    // Ceded amounts need arithmetic, so their grids come from deduplicated
    // images rather than stored indices.
    std::vector<double> r1(n_atoms), r2(n_atoms);
    std::map<double, std::int64_t> r1_ix, r2_ix;
    for (std::size_t a = 0; a < n_atoms; ++a) {
        const auto& at = t.atoms[a];
        r1[a] = clean_value(t.x_of(at, 0) - t.y_of(at, 0));
        r2[a] = clean_value(t.x_of(at, 1) - t.y_of(at, 1));
        r1_ix.emplace(r1[a], 0);
        r2_ix.emplace(r2[a], 0);
    }
    std::vector<double> r1_values, r2_values;
    for (auto& [v, ix] : r1_ix) {
        ix = static_cast<std::int64_t>(r1_values.size());
        r1_values.push_back(v);
    }
    for (auto& [v, ix] : r2_ix) {
        ix = static_cast<std::int64_t>(r2_values.size());
        r2_values.push_back(v);
    }
    std::vector<std::array<std::int64_t, 2>> r1r2(n_atoms);
    for (std::size_t a = 0; a < n_atoms; ++a) r1r2[a] = {r1_ix[r1[a]], r2_ix[r2[a]]};
    rep.tables.push_back(
        indexed_table("r1_r2", std::move(r1_values), std::move(r2_values), r1r2, masses));

    const std::size_t n_cells =
        static_cast<std::size_t>(rep.n1) * static_cast<std::size_t>(rep.n2);
    rep.conditional_support_counts.assign(n_cells, 0);
    rep.y1_support_counts.assign(n_cells, 0);
    rep.y2_support_counts.assign(n_cells, 0);
    rep.claim_cell_mass.assign(n_cells, 0.0);
    std::map<std::int64_t, std::set<std::int64_t>> pairs;
    std::map<std::int64_t, std::set<std::int32_t>> firsts, seconds;
    for (const auto& at : t.atoms) {
        const std::int64_t cell = static_cast<std::int64_t>(at.xi[0]) * rep.n2 + at.xi[1];
        rep.claim_cell_mass[static_cast<std::size_t>(cell)] += at.mass;
        if (at.mass > 1e-12) {
            pairs[cell].insert((static_cast<std::int64_t>(at.yi[0]) << 32) |
                               static_cast<std::int64_t>(at.yi[1]));
            firsts[cell].insert(at.yi[0]);
            seconds[cell].insert(at.yi[1]);
        }
    }
    for (const auto& [cell, targets] : pairs)
        rep.conditional_support_counts[static_cast<std::size_t>(cell)] =
            static_cast<int>(targets.size());
    for (const auto& [cell, targets] : firsts)
        rep.y1_support_counts[static_cast<std::size_t>(cell)] = static_cast<int>(targets.size());
    for (const auto& [cell, targets] : seconds)
        rep.y2_support_counts[static_cast<std::size_t>(cell)] = static_cast<int>(targets.size());
    return rep;
}

}  // namespace reot
