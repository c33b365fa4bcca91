// On-disk artifact formats shared by the CLI: CSV laws, treaties, and figure
// tables, plus the config hashing that names run directories. Artifacts that
// are read back by the verifier round-trip at full precision; report numbers
// meant for humans are printed with 9 significant digits.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "reot/dist.hpp"
#include "reot/mmot.hpp"
#include "reot/treaty.hpp"

namespace reot {

// Shortest decimal with the given number of significant digits (%g).
std::string format_sig(double v, int digits = 9);

// The double nearest to format_sig(v, digits); embedding this in JSON makes
// the dump print the rounded decimal itself.
double round_to_sig(double v, int digits = 9);

// FNV-1a over the canonical (sorted-key) config serialization.
std::uint64_t fnv1a64(std::string_view s);
std::string hash_hex(std::uint64_t h);

// Grid law as CSV with header `value,mass`, full precision.
void write_distribution_csv(const DiscreteDistribution& d, const std::string& path);
DiscreteDistribution read_distribution_csv(const std::string& path);

// Treaty atoms as CSV `i1,..,in,k1,..,kn,mass` (0-based indices, full
// precision masses) plus a JSON sidecar holding grids and orientation.
void write_treaty_csv(const DiscreteTreaty& t, const std::string& csv_path,
                      const std::string& sidecar_path);
DiscreteTreaty read_treaty_csv(const std::string& csv_path, const std::string& sidecar_path);

// Bivariate pmf as a matrix CSV: header row `value,<col values>`, one row per
// first-coordinate value. 9 significant digits (figure data).
void write_table_csv(const BivariateTable& tab, const std::string& path);
BivariateTable read_table_csv(const std::string& path);

// Integer grid (conditional support cardinalities) in the same matrix layout.
void write_count_grid_csv(const std::vector<int>& counts, const std::vector<double>& row_values,
                          const std::vector<double>& col_values, const std::string& path);

}  // namespace reot
