#include "reot/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace reot {

namespace {

using nlohmann::json;

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("io: cannot open " + path + " for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("io: cannot open " + path + " for reading");
    return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& s, const std::string& path) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("io: malformed number '" + s + "' in " + path);
    }
}

long parse_index(const std::string& s, const std::string& path) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("io: malformed index '" + s + "' in " + path);
    }
}

json grids_to_json(const std::vector<std::vector<double>>& grids) {
    json out = json::array();
    for (const auto& g : grids) out.push_back(g);
    return out;
}

std::vector<std::vector<double>> grids_from_json(const json& j, const std::string& path) {
    if (!j.is_array()) throw std::runtime_error("io: grids must be an array in " + path);
    std::vector<std::vector<double>> grids;
    for (const auto& g : j) grids.push_back(g.get<std::vector<double>>());
    return grids;
}

}  // namespace

std::string format_sig(double v, int digits) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

double round_to_sig(double v, int digits) { return std::stod(format_sig(v, digits)); }

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_distribution_csv(const DiscreteDistribution& d, const std::string& path) {
    d.validate();
    auto out = open_out(path);
    out << "value,mass\n";
    for (std::size_t i = 0; i < d.size(); ++i)
        out << format_full(d.support[i]) << ',' << format_full(d.mass[i]) << '\n';
}

DiscreteDistribution read_distribution_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"value", "mass"})
        throw std::runtime_error("io: expected header 'value,mass' in " + path);
    DiscreteDistribution d;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2)
            throw std::runtime_error("io: expected 2 fields per row in " + path);
        d.support.push_back(parse_double(fields[0], path));
        d.mass.push_back(parse_double(fields[1], path));
    }
    d.validate();
    return d;
}

void write_treaty_csv(const DiscreteTreaty& t, const std::string& csv_path,
                      const std::string& sidecar_path) {
    t.validate();
    auto out = open_out(csv_path);
    for (int l = 0; l < t.n_lines; ++l) out << 'i' << (l + 1) << ',';
    for (int l = 0; l < t.n_lines; ++l) out << 'k' << (l + 1) << ',';
    out << "mass\n";
    for (const auto& a : t.atoms) {
        for (int l = 0; l < t.n_lines; ++l) out << a.xi[static_cast<std::size_t>(l)] << ',';
        for (int l = 0; l < t.n_lines; ++l) out << a.yi[static_cast<std::size_t>(l)] << ',';
        out << format_full(a.mass) << '\n';
    }

    json side;
    side["version"] = 1;
    side["n_lines"] = t.n_lines;
    side["orientation"] = (t.orientation == SecondBlock::retained) ? "retained" : "reinsured";
    side["x_grids"] = grids_to_json(t.x_grids);
    side["y_grids"] = grids_to_json(t.y_grids);
    auto sout = open_out(sidecar_path);
    sout << side.dump(2) << '\n';
}

DiscreteTreaty read_treaty_csv(const std::string& csv_path, const std::string& sidecar_path) {
    json side;
    {
        auto sin = open_in(sidecar_path);
        try {
            sin >> side;
        } catch (const std::exception& e) {
            throw std::runtime_error("io: malformed JSON in " + sidecar_path + ": " + e.what());
        }
    }
    for (const char* key : {"version", "n_lines", "orientation", "x_grids", "y_grids"})
        if (!side.contains(key))
            throw std::runtime_error("io: sidecar " + sidecar_path + " missing key '" + key + "'");

    DiscreteTreaty t;
    t.n_lines = side["n_lines"].get<int>();
    const std::string orient = side["orientation"].get<std::string>();
    if (orient == "retained")
        t.orientation = SecondBlock::retained;
    else if (orient == "reinsured")
        t.orientation = SecondBlock::reinsured;
    else
        throw std::runtime_error("io: unknown orientation '" + orient + "' in " + sidecar_path);
    t.x_grids = grids_from_json(side["x_grids"], sidecar_path);
    t.y_grids = grids_from_json(side["y_grids"], sidecar_path);

    auto in = open_in(csv_path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("io: empty treaty CSV " + csv_path);
    std::vector<std::string> expected;
    for (int l = 0; l < t.n_lines; ++l) expected.push_back("i" + std::to_string(l + 1));
    for (int l = 0; l < t.n_lines; ++l) expected.push_back("k" + std::to_string(l + 1));
    expected.push_back("mass");
    if (split_csv_line(line) != expected)
        throw std::runtime_error("io: treaty CSV header mismatch in " + csv_path);

    const std::size_t n = static_cast<std::size_t>(t.n_lines);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2 * n + 1)
            throw std::runtime_error("io: treaty CSV row arity mismatch in " + csv_path);
        TreatyAtom a;
        for (std::size_t l = 0; l < n; ++l)
            a.xi.push_back(static_cast<std::int32_t>(parse_index(fields[l], csv_path)));
        for (std::size_t l = 0; l < n; ++l)
            a.yi.push_back(static_cast<std::int32_t>(parse_index(fields[n + l], csv_path)));
        a.mass = parse_double(fields[2 * n], csv_path);
        t.atoms.push_back(std::move(a));
    }
    t.validate();
    return t;
}

void write_table_csv(const BivariateTable& tab, const std::string& path) {
    auto out = open_out(path);
    out << "value";
    for (double c : tab.col_values) out << ',' << format_sig(c);
    out << '\n';
    for (std::size_t r = 0; r < tab.row_values.size(); ++r) {
        out << format_sig(tab.row_values[r]);
        for (std::size_t c = 0; c < tab.col_values.size(); ++c)
            out << ',' << format_sig(tab.pmf[r * tab.col_values.size() + c]);
        out << '\n';
    }
}

BivariateTable read_table_csv(const std::string& path) {
    auto in = open_in(path);
    BivariateTable tab;
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("io: empty table CSV " + path);
    auto header = split_csv_line(line);
    if (header.empty() || header[0] != "value")
        throw std::runtime_error("io: expected 'value' header in " + path);
    for (std::size_t c = 1; c < header.size(); ++c)
        tab.col_values.push_back(parse_double(header[c], path));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != tab.col_values.size() + 1)
            throw std::runtime_error("io: table CSV row arity mismatch in " + path);
        tab.row_values.push_back(parse_double(fields[0], path));
        for (std::size_t c = 1; c < fields.size(); ++c)
            tab.pmf.push_back(parse_double(fields[c], path));
    }
    return tab;
}

void write_count_grid_csv(const std::vector<int>& counts, const std::vector<double>& row_values,
                          const std::vector<double>& col_values, const std::string& path) {
    if (counts.size() != row_values.size() * col_values.size())
        throw std::invalid_argument("io: count grid size mismatch");
    auto out = open_out(path);
    out << "value";
    for (double c : col_values) out << ',' << format_sig(c);
    out << '\n';
    for (std::size_t r = 0; r < row_values.size(); ++r) {
        out << format_sig(row_values[r]);
        for (std::size_t c = 0; c < col_values.size(); ++c)
            out << ',' << counts[r * col_values.size() + c];
        out << '\n';
    }
}

}  // namespace reot
