#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "reot/dist.hpp"
#include "reot/io.hpp"
#include "reot/mmot.hpp"
#include "reot/treaty.hpp"
#include "test_util.hpp"

using namespace reot;
namespace fs = std::filesystem;

TEST_SUITE("io") {

TEST_CASE("significant-digit formatting and rounding") {
    CHECK(format_sig(1.0, 9) == "1");
    CHECK(format_sig(0.123456789123, 9) == "0.123456789");
    CHECK(format_sig(-2.5, 3) == "-2.5");
    CHECK(format_sig(0.0, 9) == "0");

    CHECK(round_to_sig(1.0, 9) == 1.0);
    // Round-tripping the rounded value is a fixed point.
    double r = round_to_sig(0.123456789123, 9);
    CHECK(round_to_sig(r, 9) == r);
    CHECK(std::abs(r - 0.123456789123) < 1e-9);
    // Rounding away digits changes the value of a long fraction.
    CHECK(round_to_sig(1.0 / 3.0, 9) != 1.0 / 3.0);
}

TEST_CASE("hashing matches the reference FNV-1a vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
    CHECK(fnv1a64("a") != fnv1a64("b"));

    auto hex = hash_hex(fnv1a64(""));
    CHECK(hex.size() == 16);
    CHECK(hex == "cbf29ce484222325");
    for (char c : hex) CHECK(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));
}

TEST_CASE("distribution CSV round trip preserves atoms exactly") {
    auto dir = testutil::scratch_dir("io_dist");
    DiscreteDistribution d;
    d.support = {0.0, 1.0 / 3.0, 0.7071067811865476, 12.25};
    d.mass = {0.125, 0.375, 0.25, 0.25};
    d.validate();

    std::string path = (fs::path(dir) / "law.csv").string();
    write_distribution_csv(d, path);
    auto back = read_distribution_csv(path);
    REQUIRE(back.support.size() == d.support.size());
    for (std::size_t i = 0; i < d.support.size(); ++i) {
        CHECK(back.support[i] == d.support[i]);
        CHECK(back.mass[i] == d.mass[i]);
    }
}

TEST_CASE("distribution CSV parse errors name the offending file") {
    auto dir = testutil::scratch_dir("io_dist_bad");
    std::string bad_header = (fs::path(dir) / "h.csv").string();
    {
        std::ofstream out(bad_header);
        out << "value;mass\n0,1\n";
    }
    CHECK_THROWS_WITH_AS(read_distribution_csv(bad_header),
                         doctest::Contains("h.csv"), std::runtime_error);

    std::string bad_arity = (fs::path(dir) / "a.csv").string();
    {
        std::ofstream out(bad_arity);
        out << "value,mass\n1.0,0.5,9.9\n";
    }
    CHECK_THROWS_AS(read_distribution_csv(bad_arity), std::runtime_error);

    CHECK_THROWS_AS(read_distribution_csv((fs::path(dir) / "missing.csv").string()),
                    std::runtime_error);
}

TEST_CASE("treaty CSV with sidecar round trips grids, atoms, orientation") {
    auto dir = testutil::scratch_dir("io_treaty");
    DiscreteTreaty t;
    t.n_lines = 2;
    t.x_grids = {{0.0, 1.0 / 7.0, 2.0}, {0.5, 1.5}};
    t.y_grids = {{0.0, 1.0 / 7.0}, {0.5}};
    t.orientation = SecondBlock::retained;
    t.atoms = {
        {{0, 0}, {0, 0}, 0.25},
        {{1, 0}, {1, 0}, 0.25},
        {{1, 1}, {1, 0}, 0.125},
        {{2, 1}, {0, 0}, 0.375},
    };
    t.validate();

    std::string csv = (fs::path(dir) / "treaty.csv").string();
    std::string meta = (fs::path(dir) / "treaty_meta.json").string();
    write_treaty_csv(t, csv, meta);
    auto back = read_treaty_csv(csv, meta);

    CHECK(back.n_lines == 2);
    CHECK(back.orientation == SecondBlock::retained);
    REQUIRE(back.x_grids.size() == 2);
    REQUIRE(back.y_grids.size() == 2);
    CHECK(back.x_grids[0] == t.x_grids[0]);
    CHECK(back.x_grids[1] == t.x_grids[1]);
    CHECK(back.y_grids[0] == t.y_grids[0]);
    CHECK(back.y_grids[1] == t.y_grids[1]);
    REQUIRE(back.atoms.size() == t.atoms.size());
    for (std::size_t a = 0; a < t.atoms.size(); ++a) {
        CHECK(back.atoms[a].xi == t.atoms[a].xi);
        CHECK(back.atoms[a].yi == t.atoms[a].yi);
        CHECK(back.atoms[a].mass == t.atoms[a].mass);
    }
    CHECK_NOTHROW(back.validate());
}

TEST_CASE("treaty reader rejects a malformed atom row") {
    auto dir = testutil::scratch_dir("io_treaty_bad");
    DiscreteTreaty t;
    t.n_lines = 1;
    t.x_grids = {{0.0, 1.0}};
    t.y_grids = {{0.0}};
    t.atoms = {{{0}, {0}, 0.5}, {{1}, {0}, 0.5}};
    t.validate();
    std::string csv = (fs::path(dir) / "t.csv").string();
    std::string meta = (fs::path(dir) / "t_meta.json").string();
    write_treaty_csv(t, csv, meta);
    {
        std::ofstream out(csv, std::ios::app);
        out << "0,0\n";  // wrong arity for a 1-line treaty
    }
    CHECK_THROWS_AS(read_treaty_csv(csv, meta), std::runtime_error);
}

TEST_CASE("bivariate table CSV round trips at figure precision") {
    auto dir = testutil::scratch_dir("io_table");
    BivariateTable tab;
    tab.name = "y1_y2";
    tab.row_values = {0.0, 1.0, 2.5};
    tab.col_values = {0.5, 1.5};
    tab.pmf = {0.1, 0.2, 0.3, 0.0, 0.15, 0.25};

    std::string path = (fs::path(dir) / "y1_y2.csv").string();
    write_table_csv(tab, path);
    auto back = read_table_csv(path);
    REQUIRE(back.row_values.size() == 3);
    REQUIRE(back.col_values.size() == 2);
    REQUIRE(back.pmf.size() == 6);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(back.row_values[i] == doctest::Approx(tab.row_values[i]).epsilon(1e-9));
    for (std::size_t j = 0; j < 2; ++j)
        CHECK(back.col_values[j] == doctest::Approx(tab.col_values[j]).epsilon(1e-9));
    for (std::size_t k = 0; k < 6; ++k)
        CHECK(back.pmf[k] == doctest::Approx(tab.pmf[k]).epsilon(1e-8));
}

TEST_CASE("count grid writer emits a readable matrix") {
    auto dir = testutil::scratch_dir("io_counts");
    std::string path = (fs::path(dir) / "counts.csv").string();
    write_count_grid_csv({1, 2, 3, 4, 5, 6}, {0.0, 1.0}, {0.5, 1.5, 2.5}, path);

    std::ifstream in(path);
    REQUIRE(in.good());
    std::string header, row0, row1;
    std::getline(in, header);
    std::getline(in, row0);
    std::getline(in, row1);
    CHECK(header.find("value") == 0);
    CHECK(row0.find("1") != std::string::npos);
    CHECK(row1.find("6") != std::string::npos);
}

}  // TEST_SUITE("io")
