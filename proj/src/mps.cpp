#include "reot/lp.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace reot {

namespace {

std::string row_name(int r, int width) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "R%0*d", width > 30 ? 30 : width, r + 1);
    return buf;
}

std::string col_name(std::int64_t j, int width) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "X%0*" PRId64, width > 30 ? 30 : width, j + 1);
    return buf;
}

int digits_for(std::int64_t count, int at_least) {
    int d = 1;
    std::int64_t v = count;
    while (v >= 10) {
        v /= 10;
        ++d;
    }
    return d < at_least ? at_least : d;
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void export_mps(const StandardFormLP& lp, const std::string& path,
                const std::string& name) {
    lp.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_mps: cannot open " + path);

    const int rw = digits_for(lp.num_rows, 4);
    const int cw = digits_for(lp.num_vars, 7);

    out << "NAME          " << name << "\n";
    out << "ROWS\n";
    out << " N  COST\n";
    for (int r = 0; r < lp.num_rows; ++r) out << " E  " << row_name(r, rw) << "\n";

    out << "COLUMNS\n";
    for (std::int64_t j = 0; j < lp.num_vars; ++j) {
        const std::string cn = col_name(j, cw);
        // The objective entry is always written, even when zero, so that every
        // column is named in the file and the round trip preserves num_vars.
        out << "    " << cn << "  COST  "
            << format_value(lp.cost[static_cast<std::size_t>(j)]) << "\n";
        int pending = 0;
        lp.for_col(j, [&](int r, double a) {
            if (pending == 0) out << "    " << cn;
            out << "  " << row_name(r, rw) << "  " << format_value(a);
            if (++pending == 2) {
                out << "\n";
                pending = 0;
            }
        });
        if (pending != 0) out << "\n";
    }

    out << "RHS\n";
    for (int r = 0; r < lp.num_rows; ++r) {
        const double b = lp.rhs[static_cast<std::size_t>(r)];
        if (b != 0.0)
            out << "    RHS  " << row_name(r, rw) << "  " << format_value(b) << "\n";
    }
    out << "ENDATA\n";
    if (!out.good()) throw std::runtime_error("export_mps: write failed for " + path);
}

StandardFormLP parse_mps(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("parse_mps: cannot open " + path);

    enum class Section { none, rows, columns, rhs, done };
    Section section = Section::none;

    std::map<std::string, int> row_index;
    std::string objective_row;
    StandardFormLP lp;

    std::map<std::string, std::int64_t> col_index;
    std::string current_col;
    std::vector<std::vector<std::pair<int, double>>> entries;
    std::vector<double> costs;

    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '*') continue;
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;

        if (line[0] != ' ' && line[0] != '\t') {
            const std::string& kw = tok[0];
            if (kw == "NAME") continue;
            if (kw == "ROWS") { section = Section::rows; continue; }
            if (kw == "COLUMNS") { section = Section::columns; continue; }
            if (kw == "RHS") { section = Section::rhs; continue; }
            if (kw == "ENDATA") { section = Section::done; break; }
            if (kw == "RANGES" || kw == "BOUNDS")
                throw std::runtime_error("parse_mps: unsupported section " + kw);
            throw std::runtime_error("parse_mps: unknown section " + kw);
        }

        switch (section) {
            case Section::rows: {
                if (tok.size() != 2)
                    throw std::runtime_error("parse_mps: malformed ROWS line: " + line);
                if (tok[0] == "N") {
                    if (!objective_row.empty())
                        throw std::runtime_error("parse_mps: multiple objective rows");
                    objective_row = tok[1];
                } else if (tok[0] == "E") {
                    if (!row_index.emplace(tok[1], lp.num_rows).second)
                        throw std::runtime_error("parse_mps: duplicate row " + tok[1]);
                    ++lp.num_rows;
                } else {
                    throw std::runtime_error(
                        "parse_mps: only E constraint rows are supported, got " + tok[0]);
                }
                break;
            }
            case Section::columns: {
                if (tok.size() >= 3 && tok[1] == "'MARKER'")
                    throw std::runtime_error("parse_mps: integer markers unsupported");
                if (tok.size() != 3 && tok.size() != 5)
                    throw std::runtime_error("parse_mps: malformed COLUMNS line: " + line);
                const std::string& cn = tok[0];
                auto it = col_index.find(cn);
                if (it == col_index.end()) {
                    it = col_index.emplace(cn, static_cast<std::int64_t>(entries.size())).first;
                    entries.emplace_back();
                    costs.push_back(0.0);
                    current_col = cn;
                } else if (cn != current_col) {
                    throw std::runtime_error(
                        "parse_mps: column entries must be contiguous: " + cn);
                }
                const std::int64_t j = it->second;
                for (std::size_t p = 1; p + 1 < tok.size(); p += 2) {
                    const std::string& rn = tok[p];
                    const double v = std::stod(tok[p + 1]);
                    if (rn == objective_row) {
                        costs[static_cast<std::size_t>(j)] = v;
                    } else {
                        auto rit = row_index.find(rn);
                        if (rit == row_index.end())
                            throw std::runtime_error("parse_mps: unknown row " + rn);
                        entries[static_cast<std::size_t>(j)].emplace_back(rit->second, v);
                    }
                }
                break;
            }
            case Section::rhs: {
                if (tok.size() != 3 && tok.size() != 5)
                    throw std::runtime_error("parse_mps: malformed RHS line: " + line);
                if (lp.rhs.empty()) lp.rhs.assign(static_cast<std::size_t>(lp.num_rows), 0.0);
                for (std::size_t p = 1; p + 1 < tok.size(); p += 2) {
                    auto rit = row_index.find(tok[p]);
                    if (rit == row_index.end())
                        throw std::runtime_error("parse_mps: unknown RHS row " + tok[p]);
                    lp.rhs[static_cast<std::size_t>(rit->second)] = std::stod(tok[p + 1]);
                }
                break;
            }
            default:
                throw std::runtime_error("parse_mps: data line outside any section: " + line);
        }
    }
    if (section != Section::done)
        throw std::runtime_error("parse_mps: missing ENDATA");
    if (objective_row.empty())
        throw std::runtime_error("parse_mps: no objective row declared");
    if (lp.rhs.empty()) lp.rhs.assign(static_cast<std::size_t>(lp.num_rows), 0.0);

    lp.num_vars = static_cast<std::int64_t>(entries.size());
    lp.cost = std::move(costs);
    lp.col_ptr.assign(1, 0);
    for (const auto& col : entries) {
        for (const auto& [r, v] : col) {
            lp.row_idx.push_back(static_cast<std::int32_t>(r));
            lp.coef.push_back(v);
        }
        lp.col_ptr.push_back(static_cast<std::int64_t>(lp.row_idx.size()));
    }
    lp.validate();
    return lp;
}

}  // namespace reot
