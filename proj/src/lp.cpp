#include "reot/lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace reot {

const char* to_string(LPStatus s) {
    switch (s) {
        case LPStatus::optimal: return "optimal";
        case LPStatus::infeasible: return "infeasible";
        case LPStatus::unbounded: return "unbounded";
        case LPStatus::iteration_limit: return "iteration_limit";
        case LPStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

void StandardFormLP::validate() const {
    if (num_rows <= 0) throw std::invalid_argument("lp: num_rows must be positive");
    if (num_vars <= 0) throw std::invalid_argument("lp: num_vars must be positive");
    if (static_cast<std::int64_t>(cost.size()) != num_vars)
        throw std::invalid_argument("lp: cost size does not match num_vars");
    if (static_cast<int>(rhs.size()) != num_rows)
        throw std::invalid_argument("lp: rhs size does not match num_rows");
    for (double b : rhs)
        if (!std::isfinite(b)) throw std::invalid_argument("lp: rhs must be finite");
    for (double c : cost)
        if (!std::isfinite(c)) throw std::invalid_argument("lp: cost must be finite");
    if (triplets) {
        if (static_cast<std::int64_t>(triplets->rows.size()) != num_vars)
            throw std::invalid_argument("lp: triplet column count does not match num_vars");
        for (const auto& t : triplets->rows) {
            for (std::int32_t r : t)
                if (r < 0 || r >= num_rows)
                    throw std::invalid_argument("lp: triplet row index out of range");
            if (t[0] == t[1] || t[0] == t[2] || t[1] == t[2])
                throw std::invalid_argument("lp: triplet rows must be distinct");
        }
    } else {
        if (static_cast<std::int64_t>(col_ptr.size()) != num_vars + 1)
            throw std::invalid_argument("lp: col_ptr size must be num_vars + 1");
        if (col_ptr.front() != 0 ||
            col_ptr.back() != static_cast<std::int64_t>(row_idx.size()) ||
            row_idx.size() != coef.size())
            throw std::invalid_argument("lp: inconsistent sparse column storage");
        for (std::int64_t j = 0; j < num_vars; ++j) {
            const auto c = static_cast<std::size_t>(j);
            if (col_ptr[c] > col_ptr[c + 1])
                throw std::invalid_argument("lp: col_ptr must be nondecreasing");
        }
        for (std::int32_t r : row_idx)
            if (r < 0 || r >= num_rows)
                throw std::invalid_argument("lp: column row index out of range");
    }
}

double LPSolution::primal_value(std::int64_t col) const {
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (basis[i] == col) return basic_values[i];
    return 0.0;
}

std::vector<double> LPSolution::dense_primal(const StandardFormLP& lp) const {
    std::vector<double> x(static_cast<std::size_t>(lp.num_vars), 0.0);
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (basis[i] >= 0 && basis[i] < lp.num_vars)
            x[static_cast<std::size_t>(basis[i])] = basic_values[i];
    return x;
}

namespace {

// One product-form update of the basis inverse: after a pivot in `row` with
// pivot column `alpha` (the entering column solved through the old basis).
struct Eta {
    int row;
    Eigen::VectorXd alpha;
};

struct PriceResult {
    std::int64_t col = -1;
    double reduced = 0.0;
    double score = 0.0;  // selection score; larger is better
};

struct LeaveResult {
    int row = -1;
    double theta = 0.0;
};

class SimplexSolver {
  public:
    SimplexSolver(const StandardFormLP& lp, const SimplexOptions& opt)
        : lp_(lp), opt_(opt), m_(lp.num_rows), n_(lp.num_vars) {}

    LPSolution run();

  private:
    const StandardFormLP& lp_;
    SimplexOptions opt_;
    int m_;
    std::int64_t n_;

    // Row signs normalize the system to rhs >= 0; an artificial variable for
    // row r is addressed as column n_ + r and is a unit column in the
    // normalized system.
    Eigen::VectorXd sign_;
    Eigen::VectorXd b_;
    std::vector<std::int64_t> basis_;
    std::vector<char> is_basic_;
    Eigen::VectorXd xB_;
    Eigen::VectorXd cB_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    std::vector<Eta> etas_;
    bool phase1_ = true;

    std::vector<double> devex_;
    std::int64_t cursor_block_ = 0;
    std::int64_t iterations_ = 0;
    int refactorizations_ = 0;
    int degenerate_streak_ = 0;
    std::string message_;

    Eigen::VectorXd ys_;  // sign-adjusted duals for pricing
    Eigen::VectorXd zs_;  // sign-adjusted pivot row for weight updates

    double column_cost(std::int64_t j) const {
        if (j >= n_) return phase1_ ? 1.0 : 0.0;
        return phase1_ ? 0.0 : lp_.cost[static_cast<std::size_t>(j)];
    }

    double phase1_tol() const {
        return opt_.feasibility_tol * std::max(1.0, b_.lpNorm<1>());
    }

    double artificial_sum() const {
        double s = 0.0;
        for (int i = 0; i < m_; ++i)
            if (basis_[i] >= n_) s += std::max(xB_[i], 0.0);
        return s;
    }

    void rebuild_cB() {
        cB_.resize(m_);
        for (int i = 0; i < m_; ++i) cB_[i] = column_cost(basis_[i]);
    }

    void reset_devex() { devex_.assign(static_cast<std::size_t>(n_), 1.0); }

    int pricing_chunks() const {
        int chunks = 1;
#ifdef _OPENMP
        if (opt_.parallel_pricing) chunks = std::max(1, omp_get_max_threads());
#endif
        return chunks;
    }

    bool refactorize();
    Eigen::VectorXd column_dense(std::int64_t j) const;
    Eigen::VectorXd ftran(Eigen::VectorXd v) const;
    Eigen::VectorXd btran(Eigen::VectorXd v) const;
    bool try_warm_start();
    PriceResult price_structured(bool bland) const;
    PriceResult price_explicit(bool bland);
    LeaveResult choose_leaving(const Eigen::VectorXd& alpha, bool bland) const;
    void update_devex(std::int64_t entering, int row, double pivot);
    LPStatus iterate();
    LPSolution package(LPStatus st);
};

bool SimplexSolver::refactorize() {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m_, m_);
    for (int i = 0; i < m_; ++i) {
        const std::int64_t j = basis_[i];
        if (j >= n_) {
            B(static_cast<int>(j - n_), i) = 1.0;
        } else {
            lp_.for_col(j, [&](int r, double a) { B(r, i) += sign_[r] * a; });
        }
    }
    lu_.compute(B);
    etas_.clear();
    ++refactorizations_;
    const Eigen::VectorXd d = lu_.matrixLU().diagonal().cwiseAbs();
    const double dmax = d.maxCoeff();
    return d.minCoeff() > 1e-13 * std::max(1.0, dmax);
}

Eigen::VectorXd SimplexSolver::column_dense(std::int64_t j) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m_);
    if (j >= n_) {
        v[static_cast<int>(j - n_)] = 1.0;
    } else {
        lp_.for_col(j, [&](int r, double a) { v[r] += sign_[r] * a; });
    }
    return v;
}

Eigen::VectorXd SimplexSolver::ftran(Eigen::VectorXd v) const {
    Eigen::VectorXd x = lu_.solve(v);
    for (const Eta& e : etas_) {
        const double t = x[e.row] / e.alpha[e.row];
        if (t != 0.0) x -= t * e.alpha;
        x[e.row] = t;
    }
    return x;
}

Eigen::VectorXd SimplexSolver::btran(Eigen::VectorXd v) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        const double dot = it->alpha.dot(v);
        const double vr = v[it->row];
        v[it->row] = (vr - (dot - it->alpha[it->row] * vr)) / it->alpha[it->row];
    }
    return lu_.transpose().solve(v);
}

bool SimplexSolver::try_warm_start() {
    if (static_cast<std::int64_t>(opt_.warm_columns.size()) +
            static_cast<std::int64_t>(opt_.warm_artificial_rows.size()) !=
        m_)
        return false;
    std::vector<char> seen_col(static_cast<std::size_t>(n_), 0);
    std::vector<char> seen_row(static_cast<std::size_t>(m_), 0);
    int slot = 0;
    for (std::int64_t j : opt_.warm_columns) {
        if (j < 0 || j >= n_ || seen_col[static_cast<std::size_t>(j)]) return false;
        seen_col[static_cast<std::size_t>(j)] = 1;
        basis_[slot++] = j;
    }
    for (int r : opt_.warm_artificial_rows) {
        if (r < 0 || r >= m_ || seen_row[static_cast<std::size_t>(r)]) return false;
        seen_row[static_cast<std::size_t>(r)] = 1;
        basis_[slot++] = n_ + r;
    }
    if (!refactorize()) return false;
    xB_ = ftran(b_);
    if (!xB_.allFinite() || xB_.minCoeff() < -opt_.feasibility_tol) return false;
    for (std::int64_t j : opt_.warm_columns) is_basic_[static_cast<std::size_t>(j)] = 1;
    return true;
}

PriceResult SimplexSolver::price_structured(bool bland) const {
    const auto& T = lp_.triplets->rows;
    const double tol = opt_.optimality_tol;
    const double* cp = phase1_ ? nullptr : lp_.cost.data();
    if (bland) {
        for (std::int64_t j = 0; j < n_; ++j) {
            if (is_basic_[static_cast<std::size_t>(j)]) continue;
            const auto& t = T[static_cast<std::size_t>(j)];
            const double d =
                (cp ? cp[j] : 0.0) - ys_[t[0]] - ys_[t[1]] - ys_[t[2]];
            if (d < -tol) return {j, d, -d};
        }
        return {};
    }
    const bool devex = opt_.pricing == PricingRule::devex;
    const int chunks = pricing_chunks();
    std::vector<PriceResult> part(static_cast<std::size_t>(chunks));
#ifdef _OPENMP
#pragma omp parallel for schedule(static, 1) if (chunks > 1)
#endif
    for (int c = 0; c < chunks; ++c) {
        const std::int64_t lo = n_ * c / chunks;
        const std::int64_t hi = n_ * (c + 1) / chunks;
        PriceResult best;
        for (std::int64_t j = lo; j < hi; ++j) {
            if (is_basic_[static_cast<std::size_t>(j)]) continue;
            const auto& t = T[static_cast<std::size_t>(j)];
            const double d =
                (cp ? cp[j] : 0.0) - ys_[t[0]] - ys_[t[1]] - ys_[t[2]];
            if (d < -tol) {
                const double sc =
                    devex ? d * d / devex_[static_cast<std::size_t>(j)] : -d;
                if (sc > best.score) best = {j, d, sc};
            }
        }
        part[static_cast<std::size_t>(c)] = best;
    }
    PriceResult global;
    for (const PriceResult& p : part)
        if (p.col >= 0 && p.score > global.score) global = p;
    return global;
}

PriceResult SimplexSolver::price_explicit(bool bland) {
    const double tol = opt_.optimality_tol;
    auto reduced_cost = [&](std::int64_t j) {
        double d = column_cost(j);
        lp_.for_col(j, [&](int r, double a) { d -= ys_[r] * a; });
        return d;
    };
    if (bland) {
        for (std::int64_t j = 0; j < n_; ++j) {
            if (is_basic_[static_cast<std::size_t>(j)]) continue;
            const double d = reduced_cost(j);
            if (d < -tol) return {j, d, -d};
        }
        return {};
    }
    const bool devex = opt_.pricing == PricingRule::devex;
    const std::int64_t pool = std::max<std::int64_t>(1, opt_.partial_pricing_pool);
    const std::int64_t nblocks = (n_ + pool - 1) / pool;
    // Small problems and devex pricing use a full scan; otherwise rotate
    // through blocks of the candidate pool until one yields a candidate.
    if (devex || nblocks <= 2) {
        PriceResult best;
        for (std::int64_t j = 0; j < n_; ++j) {
            if (is_basic_[static_cast<std::size_t>(j)]) continue;
            const double d = reduced_cost(j);
            if (d < -tol) {
                const double sc =
                    devex ? d * d / devex_[static_cast<std::size_t>(j)] : -d;
                if (sc > best.score) best = {j, d, sc};
            }
        }
        return best;
    }
    for (std::int64_t step = 0; step < nblocks; ++step) {
        const std::int64_t blk = (cursor_block_ + step) % nblocks;
        const std::int64_t lo = blk * pool;
        const std::int64_t hi = std::min(n_, lo + pool);
        PriceResult best;
        for (std::int64_t j = lo; j < hi; ++j) {
            if (is_basic_[static_cast<std::size_t>(j)]) continue;
            const double d = reduced_cost(j);
            if (d < -tol && -d > best.score) best = {j, d, -d};
        }
        if (best.col >= 0) {
            cursor_block_ = (blk + 1) % nblocks;
            return best;
        }
    }
    return {};
}

LeaveResult SimplexSolver::choose_leaving(const Eigen::VectorXd& alpha,
                                          bool bland) const {
    // A basic artificial parked at zero must never block progress: pivot it
    // out at ratio zero on any usable element of its row, even a negative
    // one.  This is what clears redundant-row artificials in phase two.
    if (!phase1_) {
        int guard = -1;
        double guard_mag = 0.0;
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] >= n_ && std::abs(xB_[i]) <= opt_.feasibility_tol &&
                std::abs(alpha[i]) > opt_.pivot_tol &&
                std::abs(alpha[i]) > guard_mag) {
                guard_mag = std::abs(alpha[i]);
                guard = i;
            }
        }
        if (guard >= 0) return {guard, 0.0};
    }
    double theta = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m_; ++i) {
        if (alpha[i] > opt_.pivot_tol)
            theta = std::min(theta, std::max(xB_[i], 0.0) / alpha[i]);
    }
    if (!std::isfinite(theta)) return {};
    const double tie = 1e-10 * (1.0 + theta);
    int row = -1;
    double best_pivot = 0.0;
    std::int64_t best_index = std::numeric_limits<std::int64_t>::max();
    for (int i = 0; i < m_; ++i) {
        if (alpha[i] <= opt_.pivot_tol) continue;
        if (std::max(xB_[i], 0.0) / alpha[i] > theta + tie) continue;
        if (bland) {
            if (basis_[i] < best_index) {
                best_index = basis_[i];
                row = i;
            }
        } else if (alpha[i] > best_pivot) {
            best_pivot = alpha[i];
            row = i;
        }
    }
    return {row, theta};
}

void SimplexSolver::update_devex(std::int64_t entering, int row, double pivot) {
    const double wq = std::max(devex_[static_cast<std::size_t>(entering)], 1.0);
    const double base = wq / (pivot * pivot);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
    e[row] = 1.0;
    const Eigen::VectorXd z = btran(std::move(e));
    zs_.resize(m_);
    for (int i = 0; i < m_; ++i) zs_[i] = sign_[i] * z[i];

    const std::int64_t leaving = basis_[row];
    if (leaving < n_)
        devex_[static_cast<std::size_t>(leaving)] = std::max(base, 1.0);

    double wmax = 0.0;
    if (lp_.structured()) {
        const auto& T = lp_.triplets->rows;
        const int chunks = pricing_chunks();
        std::vector<double> partmax(static_cast<std::size_t>(chunks), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static, 1) if (chunks > 1)
#endif
        for (int c = 0; c < chunks; ++c) {
            const std::int64_t lo = n_ * c / chunks;
            const std::int64_t hi = n_ * (c + 1) / chunks;
            double local = 0.0;
            for (std::int64_t j = lo; j < hi; ++j) {
                if (is_basic_[static_cast<std::size_t>(j)]) continue;
                const auto& t = T[static_cast<std::size_t>(j)];
                const double ar = zs_[t[0]] + zs_[t[1]] + zs_[t[2]];
                if (ar != 0.0) {
                    const double cand = ar * ar * base;
                    double& w = devex_[static_cast<std::size_t>(j)];
                    if (cand > w) w = cand;
                    if (w > local) local = w;
                }
            }
            partmax[static_cast<std::size_t>(c)] = local;
        }
        for (double v : partmax) wmax = std::max(wmax, v);
    } else {
        for (std::int64_t j = 0; j < n_; ++j) {
            if (is_basic_[static_cast<std::size_t>(j)]) continue;
            double ar = 0.0;
            lp_.for_col(j, [&](int r, double a) { ar += zs_[r] * a; });
            if (ar != 0.0) {
                const double cand = ar * ar * base;
                double& w = devex_[static_cast<std::size_t>(j)];
                if (cand > w) w = cand;
                if (w > wmax) wmax = w;
            }
        }
    }
    // Start a new reference framework once the weights blow up.
    if (wmax > 1e8) reset_devex();
}

LPStatus SimplexSolver::iterate() {
    rebuild_cB();
    reset_devex();
    const std::int64_t max_iter =
        opt_.max_iterations > 0
            ? opt_.max_iterations
            : std::max<std::int64_t>(50000, 300LL * static_cast<std::int64_t>(m_));
    ys_.resize(m_);
    while (true) {
        if (iterations_ >= max_iter) return LPStatus::iteration_limit;

        Eigen::VectorXd y = btran(cB_);
        if (!y.allFinite()) {
            if (!refactorize()) return LPStatus::numerical_failure;
            xB_ = ftran(b_);
            y = btran(cB_);
            if (!y.allFinite()) return LPStatus::numerical_failure;
        }
        for (int r = 0; r < m_; ++r) ys_[r] = sign_[r] * y[r];

        const bool bland = degenerate_streak_ >= opt_.bland_after_degenerate;
        const PriceResult pick =
            lp_.structured() ? price_structured(bland) : price_explicit(bland);
        if (pick.col < 0) return LPStatus::optimal;

        Eigen::VectorXd alpha = ftran(column_dense(pick.col));
        if (!alpha.allFinite()) {
            if (!refactorize()) return LPStatus::numerical_failure;
            xB_ = ftran(b_);
            alpha = ftran(column_dense(pick.col));
            if (!alpha.allFinite()) return LPStatus::numerical_failure;
        }

        const LeaveResult lv = choose_leaving(alpha, bland);
        if (lv.row < 0) {
            // In phase one the objective is bounded below by zero, so an
            // unbounded ray can only be numerical noise.
            return phase1_ ? LPStatus::numerical_failure : LPStatus::unbounded;
        }

        if (opt_.pricing == PricingRule::devex)
            update_devex(pick.col, lv.row, alpha[lv.row]);

        degenerate_streak_ = lv.theta <= 1e-12 ? degenerate_streak_ + 1 : 0;
        xB_ -= lv.theta * alpha;
        xB_[lv.row] = lv.theta;
        const std::int64_t out = basis_[lv.row];
        if (out < n_) is_basic_[static_cast<std::size_t>(out)] = 0;
        is_basic_[static_cast<std::size_t>(pick.col)] = 1;
        basis_[lv.row] = pick.col;
        cB_[lv.row] = column_cost(pick.col);
        etas_.push_back({lv.row, std::move(alpha)});
        ++iterations_;

        if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
            if (!refactorize()) return LPStatus::numerical_failure;
            xB_ = ftran(b_);
        }
        if (opt_.log_every > 0 && iterations_ % opt_.log_every == 0) {
            std::fprintf(stderr,
                         "[reot-lp] iter=%lld phase=%d obj=%.9g streak=%d\n",
                         static_cast<long long>(iterations_), phase1_ ? 1 : 2,
                         cB_.dot(xB_), degenerate_streak_);
        }
    }
}

LPSolution SimplexSolver::package(LPStatus st) {
    // Refresh the factorization so reported values come from a clean solve.
    if (refactorize()) {
        const Eigen::VectorXd fresh = ftran(b_);
        if (fresh.allFinite()) xB_ = fresh;
    }
    LPSolution s;
    s.status = st;
    s.basis = basis_;
    s.basic_values.assign(xB_.data(), xB_.data() + m_);
    rebuild_cB();
    const Eigen::VectorXd y = btran(cB_);
    s.duals.resize(static_cast<std::size_t>(m_));
    for (int r = 0; r < m_; ++r) s.duals[static_cast<std::size_t>(r)] = sign_[r] * y[r];

    double obj = 0.0;
    for (int i = 0; i < m_; ++i)
        if (basis_[i] < n_) obj += lp_.cost[static_cast<std::size_t>(basis_[i])] * xB_[i];
    s.objective = obj;
    s.phase1_objective = artificial_sum();
    s.iterations = iterations_;
    s.refactorizations = refactorizations_;

    std::vector<double> res(lp_.rhs);
    for (int i = 0; i < m_; ++i) {
        const std::int64_t j = basis_[i];
        const double v = xB_[i];
        if (j >= n_) {
            const int r = static_cast<int>(j - n_);
            res[static_cast<std::size_t>(r)] -= sign_[r] * v;
        } else {
            lp_.for_col(j, [&](int r, double a) {
                res[static_cast<std::size_t>(r)] -= a * v;
            });
        }
    }
    double linf = 0.0;
    for (double r : res) linf = std::max(linf, std::abs(r));
    s.max_primal_residual = linf;
    s.message = message_;
    return s;
}

LPSolution SimplexSolver::run() {
    lp_.validate();
    sign_.resize(m_);
    b_.resize(m_);
    for (int r = 0; r < m_; ++r) {
        sign_[r] = lp_.rhs[static_cast<std::size_t>(r)] < 0.0 ? -1.0 : 1.0;
        b_[r] = sign_[r] * lp_.rhs[static_cast<std::size_t>(r)];
    }
    basis_.assign(static_cast<std::size_t>(m_), 0);
    is_basic_.assign(static_cast<std::size_t>(n_), 0);

    bool warm = false;
    if (!opt_.warm_columns.empty() || !opt_.warm_artificial_rows.empty()) {
        warm = try_warm_start();
        if (!warm) {
            std::fill(is_basic_.begin(), is_basic_.end(), char(0));
            message_ = "warm start rejected; cold start used";
        }
    }
    if (!warm) {
        for (int r = 0; r < m_; ++r) basis_[static_cast<std::size_t>(r)] = n_ + r;
        if (!refactorize()) {
            phase1_ = false;
            return package(LPStatus::numerical_failure);
        }
        xB_ = b_;
    }

    double p1 = 0.0;
    phase1_ = true;
    if (artificial_sum() > phase1_tol()) {
        const LPStatus st = iterate();
        if (st != LPStatus::optimal) {
            phase1_ = false;
            LPSolution s = package(st);
            s.phase1_objective = artificial_sum();
            return s;
        }
        p1 = artificial_sum();
        if (p1 > phase1_tol()) {
            phase1_ = false;
            LPSolution s = package(LPStatus::infeasible);
            s.phase1_objective = p1;
            return s;
        }
    } else {
        p1 = artificial_sum();
    }

    phase1_ = false;
    const LPStatus st = iterate();
    LPSolution s = package(st);
    s.phase1_objective = p1;
    return s;
}

}  // namespace

LPSolution solve_lp(const StandardFormLP& lp, const SimplexOptions& options) {
    SimplexSolver solver(lp, options);
    return solver.run();
}

LPSolution solution_from_basis(const StandardFormLP& lp,
                               const std::vector<std::int64_t>& columns,
                               const std::vector<int>& artificial_rows) {
    lp.validate();
    const int m = lp.num_rows;
    if (static_cast<int>(columns.size() + artificial_rows.size()) != m)
        throw std::invalid_argument("solution_from_basis: basis arity must equal num_rows");

    LPSolution sol;
    sol.message = "reconstructed from stored basis";
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
    int slot = 0;
    for (std::int64_t j : columns) {
        if (j < 0 || j >= lp.num_vars)
            throw std::invalid_argument("solution_from_basis: column id out of range");
        lp.for_col(j, [&](int r, double a) { b(r, slot) += a; });
        sol.basis.push_back(j);
        ++slot;
    }
    for (int r : artificial_rows) {
        if (r < 0 || r >= m)
            throw std::invalid_argument("solution_from_basis: artificial row out of range");
        b(r, slot) = 1.0;
        sol.basis.push_back(lp.num_vars + r);
        ++slot;
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
    const Eigen::VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
    if (diag.minCoeff() <= 1e-13 * std::max(1.0, diag.maxCoeff())) {
        sol.status = LPStatus::numerical_failure;
        sol.message = "stored basis is singular";
        return sol;
    }

    Eigen::VectorXd rhs(m), cb(m);
    for (int r = 0; r < m; ++r) rhs(r) = lp.rhs[static_cast<std::size_t>(r)];
    for (int i = 0; i < m; ++i) {
        const std::int64_t j = sol.basis[static_cast<std::size_t>(i)];
        cb(i) = (j < lp.num_vars) ? lp.cost[static_cast<std::size_t>(j)] : 0.0;
    }
    const Eigen::VectorXd xb = lu.solve(rhs);
    const Eigen::VectorXd y = lu.transpose().solve(cb);
    if (!xb.allFinite() || !y.allFinite()) {
        sol.status = LPStatus::numerical_failure;
        sol.message = "stored basis produced non-finite values";
        return sol;
    }

    sol.basic_values.assign(xb.data(), xb.data() + m);
    sol.duals.assign(y.data(), y.data() + m);
    for (int i = 0; i < m; ++i)
        if (sol.basis[static_cast<std::size_t>(i)] < lp.num_vars)
            sol.objective += cb(i) * xb(i);
    std::vector<double> res(lp.rhs);
    for (int i = 0; i < m; ++i) {
        const std::int64_t j = sol.basis[static_cast<std::size_t>(i)];
        const double v = xb(i);
        if (j < lp.num_vars)
            lp.for_col(j, [&](int r, double a) { res[static_cast<std::size_t>(r)] -= a * v; });
        else
            res[static_cast<std::size_t>(j - lp.num_vars)] -= v;
    }
    for (double r : res) sol.max_primal_residual = std::max(sol.max_primal_residual, std::abs(r));
    sol.status = LPStatus::optimal;
    return sol;
}

KktReport check_kkt(const StandardFormLP& lp, const LPSolution& sol, double tol) {
    lp.validate();
    if (sol.basis.size() != sol.basic_values.size() ||
        static_cast<int>(sol.basis.size()) != lp.num_rows ||
        static_cast<int>(sol.duals.size()) != lp.num_rows)
        throw std::invalid_argument("check_kkt: solution shape mismatch");

    KktReport rep;
    std::vector<double> res(lp.rhs);
    double xmin = 0.0;
    double primal_obj = 0.0;
    for (std::size_t i = 0; i < sol.basis.size(); ++i) {
        const std::int64_t j = sol.basis[i];
        const double v = sol.basic_values[i];
        xmin = std::min(xmin, v);
        if (j < 0 || j >= lp.num_vars) continue;  // artificial stays in residual
        primal_obj += lp.cost[static_cast<std::size_t>(j)] * v;
        lp.for_col(j, [&](int r, double a) { res[static_cast<std::size_t>(r)] -= a * v; });
    }
    for (double r : res)
        rep.max_primal_residual = std::max(rep.max_primal_residual, std::abs(r));
    rep.max_primal_residual = std::max(rep.max_primal_residual, -xmin);

    for (std::int64_t j = 0; j < lp.num_vars; ++j) {
        double d = lp.cost[static_cast<std::size_t>(j)];
        lp.for_col(j, [&](int r, double a) { d -= sol.duals[static_cast<std::size_t>(r)] * a; });
        if (d < 0.0) rep.max_dual_infeasibility = std::max(rep.max_dual_infeasibility, -d);
    }
    for (std::size_t i = 0; i < sol.basis.size(); ++i) {
        const std::int64_t j = sol.basis[i];
        if (j < 0 || j >= lp.num_vars) continue;
        double d = lp.cost[static_cast<std::size_t>(j)];
        lp.for_col(j, [&](int r, double a) { d -= sol.duals[static_cast<std::size_t>(r)] * a; });
        rep.max_complementarity =
            std::max(rep.max_complementarity, std::abs(d * sol.basic_values[i]));
    }
    double dual_obj = 0.0;
    for (int r = 0; r < lp.num_rows; ++r)
        dual_obj += sol.duals[static_cast<std::size_t>(r)] * lp.rhs[static_cast<std::size_t>(r)];
    rep.duality_gap = std::abs(primal_obj - dual_obj);

    double rhs_scale = 1.0;
    for (double b : lp.rhs) rhs_scale = std::max(rhs_scale, std::abs(b));
    double cost_scale = 1.0;
    for (double c : lp.cost) cost_scale = std::max(cost_scale, std::abs(c));
    rep.satisfied = rep.max_primal_residual <= tol * rhs_scale &&
                    rep.max_dual_infeasibility <= tol * cost_scale &&
                    rep.max_complementarity <= tol * cost_scale &&
                    rep.duality_gap <= tol * cost_scale * 10.0;
    return rep;
}

}  // namespace reot
