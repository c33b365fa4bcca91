#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "reot/cli.hpp"
#include "test_util.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("reot");
    for (const auto& a : args) argv.push_back(a.c_str());
    return reot::run_cli(static_cast<int>(argv.size()), argv.data());
}

// Every run directory is named by the config hash; tests give each run its
// own out-root, so the single subdirectory is the run.
fs::path single_run_dir(const std::string& root) {
    fs::path found;
    int count = 0;
    for (const auto& e : fs::directory_iterator(root)) {
        if (e.is_directory()) {
            found = e.path();
            ++count;
        }
    }
    REQUIRE(count == 1);
    return found;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return json::parse(in);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help exits cleanly") {
    CHECK(run({"--help"}) == 0);
    CHECK(run({"solve", "--help"}) == 0);
}

TEST_CASE("quota share run writes a complete report") {
    auto root = testutil::scratch_dir("cli_qs");
    CHECK(run({"solve", "quota-share", "--var", "2", "--budget", "2",
               "--out-root", root}) == 0);
    auto dir = single_run_dir(root);
    CHECK(fs::exists(dir / "config.json"));
    CHECK(fs::exists(dir / "metadata.json"));
    auto rep = read_json(dir / "report.json");
    CHECK(rep.at("command") == "quota-share");
    CHECK(rep.at("feasible") == true);
    CHECK(rep.at("contract").at("kind") == "quota_share");
    CHECK(rep.at("contract").at("factor").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    auto meta = read_json(dir / "metadata.json");
    CHECK(meta.at("config_hash") == dir.filename().string());
}

TEST_CASE("stop loss default instance fits the unit attachment") {
    auto root = testutil::scratch_dir("cli_sl");
    CHECK(run({"solve", "stop-loss", "--out-root", root}) == 0);
    auto rep = read_json(single_run_dir(root) / "report.json");
    CHECK(rep.at("contract").at("kind") == "stop_loss");
    CHECK(rep.at("contract").at("attachment").get<double>() ==
          doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("proportional solve reproduces the reference proportions") {
    auto root = testutil::scratch_dir("cli_df");
    CHECK(run({"solve", "definetti", "--out-root", root}) == 0);
    auto rep = read_json(single_run_dir(root) / "report.json");
    auto props = rep.at("proportions");
    REQUIRE(props.size() == 2);
    CHECK(props[0].get<double>() == doctest::Approx(0.6286093).epsilon(1e-3));
    CHECK(props[1].get<double>() == doctest::Approx(0.0715233).epsilon(2e-3));
    CHECK(rep.at("retained_variance").get<double>() == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("var-constrained solve hits the closed-form uniform answers") {
    auto root = testutil::scratch_dir("cli_vc");
    CHECK(run({"solve", "var-constrained", "--out-root", root}) == 0);
    auto rep = read_json(single_run_dir(root) / "report.json");
    auto c = rep.at("contract");
    CHECK(c.at("kind") == "var_constrained");
    CHECK(c.at("v_star").get<double>() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(c.at("d").get<double>() == doctest::Approx(0.4).epsilon(1e-6));
    CHECK(rep.at("premium").get<double>() == doctest::Approx(0.08).epsilon(1e-6));
}

TEST_CASE("transport solve, verify, and report chain on a small grid") {
    auto root = testutil::scratch_dir("cli_mmot");
    REQUIRE(run({"solve", "mmot", "--n", "6", "--out-root", root}) == 0);
    auto dir = single_run_dir(root);
    for (const char* f : {"report.json", "treaty.csv", "treaty_meta.json",
                          "treaty_det.csv", "treaty_det_meta.json", "solution.json",
                          "x1.csv", "x2.csv", "nu1.csv", "nu2.csv"})
        CHECK(fs::exists(dir / f));

    auto rep = read_json(dir / "report.json");
    CHECK(rep.at("lp_status") == "optimal");
    CHECK(rep.at("var_ot").get<double>() < rep.at("var_det").get<double>());

    CHECK(run({"verify", "--run", dir.string()}) == 0);
    CHECK(fs::exists(dir / "verify.json"));
    CHECK(read_json(dir / "verify.json").at("all_ok") == true);

    CHECK(run({"report", "--run", dir.string()}) == 0);
    for (const char* f : {"ot_x1_y1.csv", "ot_y1_y2.csv", "ot_r1_r2.csv",
                          "ot_joint_counts.csv", "ot_summary.json"})
        CHECK(fs::exists(dir / "report" / f));
    CHECK(run({"report", "--run", dir.string(), "--treaty", "det"}) == 0);
    CHECK(fs::exists(dir / "report" / "det_summary.json"));

    SUBCASE("tampered treaty masses fail verification with the feasibility code") {
        // Overwrite the first atom's mass with a valid number that breaks the
        // mass balance; the file still parses, the treaty no longer verifies.
        std::ifstream in(dir / "treaty.csv");
        std::string content((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        in.close();
        auto header_end = content.find('\n');
        auto line_end = content.find('\n', header_end + 1);
        auto comma = content.rfind(',', line_end);
        content.replace(comma + 1, line_end - comma - 1, "0.987654321");
        std::ofstream out(dir / "treaty.csv", std::ios::trunc);
        out << content;
        out.close();
        CHECK(run({"verify", "--run", dir.string()}) == 3);
    }

    SUBCASE("a deleted artifact is a missing-artifact error") {
        fs::remove(dir / "solution.json");
        CHECK(run({"verify", "--run", dir.string()}) == 4);
    }
}

TEST_CASE("mean-variance solve verifies end to end") {
    auto root = testutil::scratch_dir("cli_mv");
    REQUIRE(run({"solve", "mean-variance", "--nodes", "64", "--out-root", root}) == 0);
    auto dir = single_run_dir(root);
    auto rep = read_json(dir / "report.json");
    CHECK(rep.at("contract").at("kind") == "mean_variance_multiline");
    CHECK(rep.at("improvement_pct").get<double>() > 50.0);
    CHECK(run({"verify", "--run", dir.string()}) == 0);
    CHECK(read_json(dir / "verify.json").at("all_ok") == true);
}

TEST_CASE("discretize then verify round trips the grid") {
    auto root = testutil::scratch_dir("cli_dz");
    REQUIRE(run({"discretize", "--n", "12", "--q", "0.99", "--out-root", root}) == 0);
    auto dir = single_run_dir(root);
    CHECK(fs::exists(dir / "distribution.csv"));
    CHECK(run({"verify", "--run", dir.string()}) == 0);
}

TEST_CASE("configuration errors use the dedicated exit code") {
    auto root = testutil::scratch_dir("cli_cfg");

    auto write_cfg = [&](const char* name, const json& j) {
        fs::path p = fs::path(root) / name;
        std::ofstream out(p);
        out << j.dump(2);
        return p.string();
    };

    std::string unknown = write_cfg(
        "unknown.json", {{"version", 1}, {"budget", 2.0}, {"bogus_key", 1}});
    CHECK(run({"solve", "quota-share", "--config", unknown, "--out-root", root}) == 2);

    std::string unversioned = write_cfg("unversioned.json", {{"budget", 2.0}});
    CHECK(run({"solve", "quota-share", "--config", unversioned, "--out-root", root}) == 2);

    CHECK(run({"discretize", "--family", "cauchy", "--out-root", root}) == 2);

    std::string missing = (fs::path(root) / "nope.json").string();
    CHECK(run({"solve", "quota-share", "--config", missing, "--out-root", root}) == 4);
}

TEST_CASE("explicit flags override configuration file values") {
    auto root = testutil::scratch_dir("cli_ovr");
    fs::path cfg_path = fs::path(root) / "qs.json";
    {
        std::ofstream out(cfg_path);
        out << json{{"version", 1}, {"var", 2.0}, {"budget", 0.5}}.dump(2);
    }
    CHECK(run({"solve", "quota-share", "--config", cfg_path.string(), "--budget", "2",
               "--out-root", root}) == 0);
    auto rep = read_json(single_run_dir(root) / "report.json");
    // budget 2 on variance 2 fits the full cession, not the 0.5 from the file
    CHECK(rep.at("contract").at("factor").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    auto cfg = read_json(single_run_dir(root) / "config.json");
    CHECK(cfg.at("budget").get<double>() == 2.0);
}

TEST_CASE("infeasible fits exit with the infeasibility code") {
    auto root = testutil::scratch_dir("cli_infeas");
    // Ceded variance budget above the claim variance cannot be met.
    CHECK(run({"solve", "quota-share", "--var", "2", "--budget", "5",
               "--out-root", root}) == 3);
    auto rep = read_json(single_run_dir(root) / "report.json");
    CHECK(rep.at("feasible") == false);
}

}  // TEST_SUITE("cli")
