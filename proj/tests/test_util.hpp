// Shared helpers for the unit tests: dense LP construction, random bounded
// LP instances, and scratch directories.
#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "reot/lp.hpp"
#include "reot/rng.hpp"

namespace testutil {

// Equality-form LP from a dense row-major matrix.
inline reot::StandardFormLP dense_lp(const std::vector<std::vector<double>>& a,
                                     const std::vector<double>& cost,
                                     const std::vector<double>& rhs) {
    reot::StandardFormLP lp;
    lp.num_rows = static_cast<int>(a.size());
    lp.num_vars = static_cast<std::int64_t>(cost.size());
    lp.cost = cost;
    lp.rhs = rhs;
    lp.col_ptr.assign(1, 0);
    for (std::size_t j = 0; j < cost.size(); ++j) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i][j] != 0.0) {
                lp.row_idx.push_back(static_cast<std::int32_t>(i));
                lp.coef.push_back(a[i][j]);
            }
        }
        lp.col_ptr.push_back(static_cast<std::int64_t>(lp.coef.size()));
    }
    lp.validate();
    return lp;
}

// Random feasible bounded LP: rhs is manufactured from a nonnegative point
// and an all-ones row caps the feasible set inside a simplex.
inline reot::StandardFormLP random_bounded_lp(std::uint64_t seed, int max_rows, int max_vars) {
    const reot::CounterRng rng(seed);
    reot::SampleStream s(rng, 0);
    const auto pick = [&](int lo, int hi) {
        return lo + static_cast<int>(s.next_uniform() * (hi - lo + 1));
    };
    const int extra_rows = pick(0, max_rows - 1);
    const int n = pick(extra_rows + 1, max_vars);

    std::vector<double> x0(n);
    for (double& v : x0) v = s.next_uniform() < 0.3 ? 0.0 : 2.0 * s.next_uniform();

    std::vector<std::vector<double>> a;
    std::vector<double> rhs;
    for (int r = 0; r < extra_rows; ++r) {
        std::vector<double> row(n);
        double b = 0.0;
        for (int j = 0; j < n; ++j) {
            row[j] = static_cast<double>(pick(-2, 3));
            b += row[j] * x0[j];
        }
        a.push_back(row);
        rhs.push_back(b);
    }
    std::vector<double> ones(n, 1.0);
    double total = 0.0;
    for (double v : x0) total += v;
    a.push_back(ones);
    rhs.push_back(total);

    std::vector<double> cost(n);
    for (double& c : cost) c = static_cast<double>(pick(-5, 5)) / 2.0;
    return dense_lp(a, cost, rhs);
}

inline std::filesystem::path scratch_dir(const std::string& tag) {
    static std::mt19937_64 gen(std::random_device{}());
    const auto dir = std::filesystem::temp_directory_path() /
                     ("reot_test_" + tag + "_" + std::to_string(gen()));
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testutil
