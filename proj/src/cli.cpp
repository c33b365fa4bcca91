#include "reot/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "reot/contracts.hpp"
#include "reot/dist.hpp"
#include "reot/io.hpp"
#include "reot/lp.hpp"
#include "reot/measures.hpp"
#include "reot/mmot.hpp"
#include "reot/treaty.hpp"

namespace reot {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Exit-code carriers. ConfigError -> 2, InfeasibleError -> 3,
// MissingArtifact -> 4, SolverFailure -> 5.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MissingArtifact : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --------------------------------------------------------------------------
// JSON access with contextual errors.

json load_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return j;
}

void write_json_file(const json& j, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed on " + path.string());
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError(ctx + ": unknown key '" + item.key() + "'");
    }
}

double num_at(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key)) throw ConfigError(ctx + ": missing key '" + std::string(key) + "'");
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(ctx + ": key '" + std::string(key) + "' must be a number");
    return v.get<double>();
}

long long int_at(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key)) throw ConfigError(ctx + ": missing key '" + std::string(key) + "'");
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(ctx + ": key '" + std::string(key) + "' must be an integer");
    return v.get<long long>();
}

std::string str_at(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key)) throw ConfigError(ctx + ": missing key '" + std::string(key) + "'");
    const json& v = j.at(key);
    if (!v.is_string()) throw ConfigError(ctx + ": key '" + std::string(key) + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> list_at(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key)) throw ConfigError(ctx + ": missing key '" + std::string(key) + "'");
    const json& v = j.at(key);
    if (!v.is_array()) throw ConfigError(ctx + ": key '" + std::string(key) + "' must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const json& e : v) {
        if (!e.is_number()) throw ConfigError(ctx + ": key '" + std::string(key) + "' must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

json jnum(double v) { return json(round_to_sig(v, 9)); }

json jlist(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(jnum(x));
    return a;
}

// --------------------------------------------------------------------------
// Distribution and map specs.

json default_family_spec(const std::string& family) {
    if (family == "gamma") return {{"family", "gamma"}, {"shape", 0.5}, {"rate", 0.5}};
    if (family == "shifted_pareto")
        return {{"family", "shifted_pareto"}, {"scale", 3.0}, {"tail_index", 4.0}};
    if (family == "lognormal")
        return {{"family", "lognormal"},
                {"log_mean", -0.5 * std::log(3.0)},
                {"log_sd", std::sqrt(std::log(3.0))}};
    if (family == "exponential") return {{"family", "exponential"}, {"rate", 1.0}};
    if (family == "uniform") return {{"family", "uniform"}, {"lo", 0.0}, {"hi", 1.0}};
    throw ConfigError("unknown family '" + family +
                      "' (expected gamma, shifted_pareto, lognormal, exponential, uniform)");
}

ContinuousDistribution dist_from_json(const json& spec, const std::string& ctx) {
    if (!spec.is_object()) throw ConfigError(ctx + ": distribution spec must be an object");
    const std::string fam = str_at(spec, "family", ctx);
    try {
        if (fam == "gamma") {
            check_keys(spec, {"family", "shape", "rate"}, ctx);
            return ContinuousDistribution::gamma(num_at(spec, "shape", ctx), num_at(spec, "rate", ctx));
        }
        if (fam == "shifted_pareto") {
            check_keys(spec, {"family", "scale", "tail_index"}, ctx);
            return ContinuousDistribution::shifted_pareto(num_at(spec, "scale", ctx),
                                                          num_at(spec, "tail_index", ctx));
        }
        if (fam == "lognormal") {
            check_keys(spec, {"family", "log_mean", "log_sd"}, ctx);
            return ContinuousDistribution::lognormal(num_at(spec, "log_mean", ctx),
                                                     num_at(spec, "log_sd", ctx));
        }
        if (fam == "exponential") {
            check_keys(spec, {"family", "rate"}, ctx);
            return ContinuousDistribution::exponential(num_at(spec, "rate", ctx));
        }
        if (fam == "uniform") {
            check_keys(spec, {"family", "lo", "hi"}, ctx);
            return ContinuousDistribution::uniform(num_at(spec, "lo", ctx), num_at(spec, "hi", ctx));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(ctx + ": " + e.what());
    }
    throw ConfigError(ctx + ": unknown family '" + fam + "'");
}

std::vector<ContinuousDistribution> lines_from_cfg(const json& cfg, const std::string& ctx) {
    if (!cfg.contains("lines") || !cfg.at("lines").is_array())
        throw ConfigError(ctx + ": key 'lines' must be an array of distribution specs");
    std::vector<ContinuousDistribution> out;
    int i = 0;
    for (const json& spec : cfg.at("lines")) {
        out.push_back(dist_from_json(spec, ctx + ".lines[" + std::to_string(i) + "]"));
        ++i;
    }
    if (out.empty()) throw ConfigError(ctx + ": 'lines' must not be empty");
    return out;
}

MarginalMap map_from_json(const json& spec, const std::string& ctx) {
    if (!spec.is_object()) throw ConfigError(ctx + ": map spec must be an object");
    const std::string kind = str_at(spec, "kind", ctx);
    MarginalMap m;
    if (kind == "identity") {
        check_keys(spec, {"kind"}, ctx);
        m.kind = MarginalMap::Kind::identity;
    } else if (kind == "proportional") {
        check_keys(spec, {"kind", "factor"}, ctx);
        m.kind = MarginalMap::Kind::proportional;
        m.factor = num_at(spec, "factor", ctx);
    } else if (kind == "cap_plus_share") {
        check_keys(spec, {"kind", "cap", "share", "excess_at"}, ctx);
        m.kind = MarginalMap::Kind::cap_plus_share;
        m.cap = num_at(spec, "cap", ctx);
        m.share = num_at(spec, "share", ctx);
        m.excess_at = num_at(spec, "excess_at", ctx);
    } else {
        throw ConfigError(ctx + ": unknown map kind '" + kind +
                          "' (expected identity, proportional, cap_plus_share)");
    }
    return m;
}

IntegrationConfig integration_from_cfg(const json& cfg, const std::string& ctx) {
    IntegrationConfig ic;
    const std::string mode = str_at(cfg, "integration", ctx);
    if (mode == "automatic")
        ic.mode = IntegrationConfig::Mode::automatic;
    else if (mode == "quadrature")
        ic.mode = IntegrationConfig::Mode::quadrature;
    else if (mode == "monte_carlo" || mode == "monte-carlo")
        ic.mode = IntegrationConfig::Mode::monte_carlo;
    else
        throw ConfigError(ctx + ": unknown integration mode '" + mode + "'");
    const long long nodes = int_at(cfg, "nodes", ctx);
    if (nodes < 8) throw ConfigError(ctx + ": 'nodes' must be at least 8");
    ic.nodes = static_cast<int>(nodes);
    const long long samples = int_at(cfg, "mc_samples", ctx);
    if (samples < 1) throw ConfigError(ctx + ": 'mc_samples' must be positive");
    ic.mc_samples = static_cast<std::uint64_t>(samples);
    ic.seed = static_cast<std::uint64_t>(int_at(cfg, "seed", ctx));
    ic.tail_trunc = num_at(cfg, "tail_trunc", ctx);
    if (!(ic.tail_trunc > 0.0 && ic.tail_trunc < 0.5))
        throw ConfigError(ctx + ": 'tail_trunc' must lie in (0, 0.5)");
    return ic;
}

// --------------------------------------------------------------------------
// Contract serialization (report.json <-> verify).

json contract_to_json(const Contract& c) {
    struct Visitor {
        json operator()(const StopLossContract& s) const {
            return {{"kind", "stop_loss"}, {"attachment", jnum(s.attachment)}};
        }
        json operator()(const QuotaShareContract& q) const {
            return {{"kind", "quota_share"}, {"factor", jnum(q.factor)}};
        }
        json operator()(const MultilineMeanVarianceContract& m) const {
            return {{"kind", "mean_variance_multiline"},
                    {"betas", jlist(m.betas)},
                    {"lambda_star", jnum(m.lambda_star)},
                    {"sigma", jnum(m.sigma)}};
        }
        json operator()(const VarConstrainedContract& v) const {
            return {{"kind", "var_constrained"},
                    {"betas", jlist(v.betas)},
                    {"v_star", jnum(v.v_star)},
                    {"d", jnum(v.d)}};
        }
        json operator()(const ComponentwiseContract& c) const {
            json maps = json::array();
            for (const LineMap& m : c.maps) {
                switch (m.kind) {
                    case LineMap::Kind::linear:
                        maps.push_back({{"kind", "linear"}, {"factor", jnum(m.factor)}});
                        break;
                    case LineMap::Kind::stop_loss:
                        maps.push_back({{"kind", "stop_loss"}, {"attachment", jnum(m.attachment)}});
                        break;
                    case LineMap::Kind::quantile_transform:
                        maps.push_back({{"kind", "quantile_transform"}});
                        break;
                }
            }
            return {{"kind", "componentwise"}, {"maps", maps}};
        }
    };
    return std::visit(Visitor{}, c);
}

json fit_report_to_json(const FitReport& fr) {
    return {{"contract", contract_to_json(fr.contract)},
            {"premium", jnum(fr.premium)},
            {"retained_mean", jnum(fr.retained_mean)},
            {"retained_variance", jnum(fr.retained_variance)},
            {"multiplier", jnum(fr.multiplier)},
            {"residual", jnum(fr.residual)},
            {"iterations", fr.iterations},
            {"feasible", fr.feasible},
            {"notes", fr.notes}};
}

// --------------------------------------------------------------------------
// Run directories. The directory name is the FNV-1a hash of the effective
// config with output-location keys removed, so identical problems land in
// identical directories and reruns overwrite byte-identical artifacts.
// Timestamps live in metadata.json only.

std::string config_hash(const json& effective) {
    json canon = effective;
    canon.erase("out_root");
    return hash_hex(fnv1a64(canon.dump()));
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

fs::path make_run_dir(const json& effective) {
    const std::string h = config_hash(effective);
    const fs::path dir = fs::path(effective.at("out_root").get<std::string>()) / h;
    fs::create_directories(dir);
    write_json_file(effective, dir / "config.json");
    write_json_file(json{{"config_hash", h}, {"timestamp_utc", utc_timestamp()}},
                    dir / "metadata.json");
    return dir;
}

// Merges a config file (if any) over defaults, key by key. Arrays and nested
// objects replace the default wholesale so partial specs cannot blend two
// families.
json effective_config(json defaults, const std::string& config_path,
                      std::initializer_list<const char*> allowed, const std::string& command) {
    if (!config_path.empty()) {
        const json file = load_json_file(config_path);
        if (!file.is_object()) throw ConfigError(config_path + ": config must be a JSON object");
        if (!file.contains("version"))
            throw ConfigError(config_path + ": missing mandatory key 'version'");
        if (!(file.at("version").is_number_integer() && file.at("version").get<long long>() == 1))
            throw ConfigError(config_path + ": unsupported config version (expected 1)");
        check_keys(file, allowed, config_path);
        for (const auto& item : file.items()) defaults[item.key()] = item.value();
    }
    defaults["command"] = command;
    return defaults;
}

void echo_run_dir(const fs::path& dir) {
    std::cout << "run directory: " << fs::absolute(dir).lexically_normal().string() << "\n";
}

// --------------------------------------------------------------------------
// Flag storage. One instance per subcommand, declared in run_cli scope so the
// storage outlives parsing.

struct DistFlags {
    std::string family;
    double shape = 0, rate = 0, scale = 0, tail_index = 0, log_mean = 0, log_sd = 0, lo = 0, hi = 0;
    CLI::Option* family_opt = nullptr;
    std::map<std::string, std::pair<CLI::Option*, double*>> params;

    void attach(CLI::App* cmd) {
        family_opt = cmd->add_option("--family", family,
                                     "distribution family (gamma, shifted_pareto, lognormal, "
                                     "exponential, uniform)");
        params["shape"] = {cmd->add_option("--shape", shape, "gamma shape"), &shape};
        params["rate"] = {cmd->add_option("--rate", rate, "gamma/exponential rate"), &rate};
        params["scale"] = {cmd->add_option("--scale", scale, "shifted-pareto scale"), &scale};
        params["tail_index"] =
            {cmd->add_option("--tail-index", tail_index, "shifted-pareto tail index"), &tail_index};
        params["log_mean"] = {cmd->add_option("--log-mean", log_mean, "lognormal log-mean"), &log_mean};
        params["log_sd"] = {cmd->add_option("--log-sd", log_sd, "lognormal log-sd"), &log_sd};
        params["lo"] = {cmd->add_option("--lo", lo, "uniform lower endpoint"), &lo};
        params["hi"] = {cmd->add_option("--hi", hi, "uniform upper endpoint"), &hi};
    }

    // Overrides the spec in cfg[key]: --family resets to that family's
    // default parameters, then any given parameter flags land on top.
    void apply(json& cfg, const char* key) const {
        json spec = cfg.contains(key) ? cfg.at(key) : json();
        if (family_opt && family_opt->count()) spec = default_family_spec(family);
        for (const auto& [name, entry] : params)
            if (entry.first->count()) {
                if (!spec.is_object())
                    throw ConfigError("parameter flag --" + name + " needs a distribution");
                spec[name] = *entry.second;
            }
        cfg[key] = spec;
    }
};

std::vector<double> parse_double_list(const std::string& s, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError(flag + ": cannot parse '" + tok + "' as a number");
        }
    }
    if (out.empty()) throw ConfigError(flag + ": empty list");
    return out;
}

// --------------------------------------------------------------------------
// discretize

int cmd_discretize(const json& cfg) {
    const ContinuousDistribution dist = dist_from_json(cfg.at("family_spec"), "config.family_spec");
    const long long n = int_at(cfg, "n_bins", "config");
    const double q = num_at(cfg, "tail_quantile", "config");
    if (n < 1) throw ConfigError("config: 'n_bins' must be positive");
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("config: 'tail_quantile' must lie in (0, 1)");

    const DiscreteDistribution d = discretize(dist, static_cast<int>(n), q);
    const fs::path dir = make_run_dir(cfg);
    write_distribution_csv(d, (dir / "distribution.csv").string());

    json report = {{"command", "discretize"},
                   {"config_hash", config_hash(cfg)},
                   {"family", dist.family_name()},
                   {"n_bins", n},
                   {"tail_quantile", jnum(q)},
                   {"grid_max", jnum(d.support.back())},
                   {"mean", jnum(d.mean())},
                   {"variance", jnum(d.variance())},
                   {"continuous_mean", jnum(dist.mean())},
                   {"continuous_variance", jnum(dist.variance())}};
    write_json_file(report, dir / "report.json");

    std::cout << "discretized " << dist.family_name() << " onto " << n << " bins (tail quantile "
              << format_sig(q) << ")\n"
              << "grid mean " << format_sig(d.mean()) << ", variance " << format_sig(d.variance())
              << " (continuous: " << format_sig(dist.mean()) << ", " << format_sig(dist.variance())
              << ")\n";
    echo_run_dir(dir);
    return 0;
}

// --------------------------------------------------------------------------
// solve subcommands

int finish_fit(const json& cfg, const char* command, FitReport fr, json extra = json::object()) {
    const fs::path dir = make_run_dir(cfg);
    json report = fit_report_to_json(fr);
    report["command"] = command;
    report["config_hash"] = config_hash(cfg);
    for (const auto& item : extra.items()) report[item.key()] = item.value();
    write_json_file(report, dir / "report.json");
    echo_run_dir(dir);
    if (!fr.feasible) {
        std::cout << "infeasible: " << fr.notes << "\n";
        return 3;
    }
    return 0;
}

int cmd_stop_loss(const json& cfg) {
    const ContinuousDistribution line = dist_from_json(cfg.at("line"), "config.line");
    const double budget = num_at(cfg, "budget", "config");
    const FitReport fr = solve_stop_loss(line, budget);
    const auto& c = std::get<StopLossContract>(fr.contract);
    std::cout << "stop-loss attachment a = " << format_sig(c.attachment) << "\n"
              << "ceded premium E[(X - a)+] = " << format_sig(fr.premium) << " (budget "
              << format_sig(budget) << ", residual " << format_sig(fr.residual) << ")\n";
    return finish_fit(cfg, "solve-stop-loss", fr, {{"budget", jnum(budget)}});
}

int cmd_quota_share(const json& cfg) {
    const double budget = num_at(cfg, "budget", "config");
    const bool has_line = cfg.contains("line") && !cfg.at("line").is_null();
    FitReport fr;
    if (has_line) {
        const ContinuousDistribution line = dist_from_json(cfg.at("line"), "config.line");
        fr = solve_quota_share_variance_premium(line, budget);
    } else {
        fr = solve_quota_share_variance_premium(num_at(cfg, "var", "config"), budget);
    }
    const auto& c = std::get<QuotaShareContract>(fr.contract);
    std::cout << "quota share factor f = " << format_sig(c.factor) << " (ceded variance budget "
              << format_sig(budget) << ")\n";
    return finish_fit(cfg, "solve-quota-share", fr, {{"budget", jnum(budget)}});
}

int cmd_definetti(const json& cfg) {
    const std::vector<double> means = list_at(cfg, "means", "config");
    const std::vector<double> variances = list_at(cfg, "variances", "config");
    const std::vector<double> betas = list_at(cfg, "betas", "config");
    const double budget = num_at(cfg, "budget", "config");
    const FitReport fr = solve_definetti_proportions(means, variances, betas, budget);

    std::vector<double> props;
    for (const LineMap& m : std::get<ComponentwiseContract>(fr.contract).maps)
        props.push_back(m.factor);
    std::cout << "ceded proportions a = (";
    for (std::size_t i = 0; i < props.size(); ++i)
        std::cout << (i ? ", " : "") << format_sig(props[i]);
    std::cout << ")\nloading = " << format_sig(fr.premium) << ", retained variance = "
              << format_sig(fr.retained_variance) << " (budget " << format_sig(budget) << ")\n";
    return finish_fit(cfg, "solve-definetti", fr,
                      {{"budget", jnum(budget)}, {"betas", jlist(betas)},
                       {"proportions", jlist(props)}});
}

int cmd_mean_variance(const json& cfg) {
    const std::vector<ContinuousDistribution> lines = lines_from_cfg(cfg, "config");
    const std::vector<double> betas = list_at(cfg, "betas", "config");
    const double budget = num_at(cfg, "budget", "config");
    const IntegrationConfig ic = integration_from_cfg(cfg, "config");
    const FitReport fr = solve_mean_variance_multiline(lines, betas, budget, ic);
    const auto& c = std::get<MultilineMeanVarianceContract>(fr.contract);

    // Benchmark against the best proportional program on the same lines.
    std::vector<double> means, variances;
    for (const auto& d : lines) {
        means.push_back(d.mean());
        variances.push_back(d.variance());
    }
    const FitReport prop = solve_definetti_proportions(means, variances, betas, budget);
    const double improvement =
        prop.premium > 0.0 ? (prop.premium - fr.premium) / prop.premium * 100.0 : 0.0;

    std::cout << "sigma = " << format_sig(c.sigma) << ", lambda* = " << format_sig(c.lambda_star)
              << "\npremium = " << format_sig(fr.premium) << " (proportional benchmark "
              << format_sig(prop.premium) << ", improvement " << format_sig(improvement, 4)
              << "%)\nretained variance = " << format_sig(fr.retained_variance) << " (budget "
              << format_sig(budget) << ")\n";
    return finish_fit(cfg, "solve-mean-variance", fr,
                      {{"budget", jnum(budget)},
                       {"betas", jlist(betas)},
                       {"proportional_premium", jnum(prop.premium)},
                       {"improvement_pct", jnum(improvement)}});
}

int cmd_var_constrained(const json& cfg) {
    const std::vector<ContinuousDistribution> lines = lines_from_cfg(cfg, "config");
    const std::vector<double> betas = list_at(cfg, "betas", "config");
    const double alpha = num_at(cfg, "alpha", "config");
    const double budget = num_at(cfg, "budget", "config");
    const IntegrationConfig ic = integration_from_cfg(cfg, "config");
    const FitReport fr = solve_var_constrained(lines, betas, alpha, budget, ic);
    const auto& c = std::get<VarConstrainedContract>(fr.contract);
    std::cout << "v* = " << format_sig(c.v_star) << ", premium threshold d = " << format_sig(c.d)
              << "\npremium = " << format_sig(fr.premium) << "\n";
    return finish_fit(cfg, "solve-var-constrained", fr,
                      {{"budget", jnum(budget)}, {"alpha", jnum(alpha)}, {"betas", jlist(betas)}});
}

// --------------------------------------------------------------------------
// solve mmot

struct MmotInputs {
    DiscreteDistribution d1, d2;
    GridLaw mu;
    MarginalMap map1, map2;
    DiscreteDistribution nu1, nu2;
};

MmotInputs mmot_inputs_from_cfg(const json& cfg) {
    const std::vector<ContinuousDistribution> lines = lines_from_cfg(cfg, "config");
    if (lines.size() != 2) throw ConfigError("config: mmot needs exactly two lines");
    if (!cfg.contains("marginal_maps") || !cfg.at("marginal_maps").is_array() ||
        cfg.at("marginal_maps").size() != 2)
        throw ConfigError("config: 'marginal_maps' must be an array of two map specs");
    const long long n = int_at(cfg, "n_bins", "config");
    const double q = num_at(cfg, "tail_quantile", "config");
    if (n < 2) throw ConfigError("config: 'n_bins' must be at least 2");
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("config: 'tail_quantile' must lie in (0, 1)");

    MmotInputs in;
    in.d1 = discretize(lines[0], static_cast<int>(n), q);
    in.d2 = discretize(lines[1], static_cast<int>(n), q);
    in.mu = product_law({in.d1, in.d2});
    in.map1 = map_from_json(cfg.at("marginal_maps")[0], "config.marginal_maps[0]");
    in.map2 = map_from_json(cfg.at("marginal_maps")[1], "config.marginal_maps[1]");
    in.nu1 = pushforward(in.d1, [&](double x) { return in.map1(x); });
    in.nu2 = pushforward(in.d2, [&](double x) { return in.map2(x); });
    return in;
}

SimplexOptions simplex_options_from_cfg(const json& cfg) {
    SimplexOptions opts;
    const std::string pricing = str_at(cfg, "pricing", "config");
    if (pricing == "devex")
        opts.pricing = PricingRule::devex;
    else if (pricing == "dantzig")
        opts.pricing = PricingRule::dantzig;
    else
        throw ConfigError("config: unknown pricing rule '" + pricing + "'");
    const long long iters = int_at(cfg, "max_iterations", "config");
    if (iters < 0) throw ConfigError("config: 'max_iterations' must be nonnegative");
    opts.max_iterations = iters;
    const long long log_every = int_at(cfg, "log_every", "config");
    if (log_every < 0) throw ConfigError("config: 'log_every' must be nonnegative");
    opts.log_every = log_every;
    return opts;
}

MmotProblem assemble_checked(const MmotInputs& in) {
    try {
        return assemble(in.mu, in.nu1, in.nu2);
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        if (msg.find("structurally infeasible") != std::string::npos) throw InfeasibleError(msg);
        throw;
    }
}

int cmd_mmot(const json& cfg) {
    const MmotInputs in = mmot_inputs_from_cfg(cfg);
    const MmotProblem problem = assemble_checked(in);
    const SimplexOptions opts = simplex_options_from_cfg(cfg);

    const fs::path dir = make_run_dir(cfg);
    const std::string mps_path = cfg.contains("mps_path") ? cfg.at("mps_path").get<std::string>() : "";
    if (!mps_path.empty()) {
        export_mps(problem.to_lp(), mps_path);
        std::cout << "wrote MPS model to " << mps_path << "\n";
    }

    std::cout << "solving transport LP: " << problem.rows() << " rows, " << problem.cols()
              << " columns\n";
    const MmotSolution sol = solve_mmot(problem, opts);

    json report = {{"command", "solve-mmot"},
                   {"config_hash", config_hash(cfg)},
                   {"n_bins", int_at(cfg, "n_bins", "config")},
                   {"tail_quantile", jnum(num_at(cfg, "tail_quantile", "config"))},
                   {"rows", problem.rows()},
                   {"columns", problem.cols()},
                   {"lp_status", to_string(sol.lp.status)},
                   {"iterations", sol.lp.iterations},
                   {"refactorizations", sol.lp.refactorizations},
                   {"max_primal_residual", jnum(sol.lp.max_primal_residual)}};

    if (sol.lp.status != LPStatus::optimal) {
        report["message"] = sol.lp.message;
        write_json_file(report, dir / "report.json");
        echo_run_dir(dir);
        if (sol.lp.status == LPStatus::infeasible)
            throw InfeasibleError("transport LP infeasible: " + sol.lp.message);
        throw SolverFailure("transport LP did not reach optimality: " + sol.lp.message);
    }

    // Deterministic benchmark treaty on the same grids and its reinsured law.
    const DiscreteTreaty det = eta_det(in.mu, in.map1, in.map2);
    const RiskReport det_risk = risk_report(reinsured_sum_law(det));
    const double var_det = det_risk.variance;
    const double var_ot = sol.reinsured.variance;
    const double improvement = var_det > 0.0 ? (var_det - var_ot) / var_det * 100.0 : 0.0;

    report["objective"] = jnum(sol.objective);
    report["reinsured_mean"] = jnum(sol.reinsured.mean);
    report["var_ot"] = jnum(var_ot);
    report["var_det"] = jnum(var_det);
    report["improvement_pct"] = jnum(improvement);
    report["atoms"] = sol.treaty.atoms.size();
    write_json_file(report, dir / "report.json");

    write_treaty_csv(sol.treaty, (dir / "treaty.csv").string(), (dir / "treaty_meta.json").string());
    write_treaty_csv(det, (dir / "treaty_det.csv").string(), (dir / "treaty_det_meta.json").string());
    write_distribution_csv(in.d1, (dir / "x1.csv").string());
    write_distribution_csv(in.d2, (dir / "x2.csv").string());
    write_distribution_csv(in.nu1, (dir / "nu1.csv").string());
    write_distribution_csv(in.nu2, (dir / "nu2.csv").string());

    // Basis snapshot at full precision; verify refactorizes from this.
    json basis_cols = json::array();
    json artificial_rows = json::array();
    for (std::int64_t b : sol.lp.basis) {
        if (b >= static_cast<std::int64_t>(problem.cols()))
            artificial_rows.push_back(b - static_cast<std::int64_t>(problem.cols()));
        else
            basis_cols.push_back(b);
    }
    write_json_file(json{{"basis_columns", basis_cols},
                         {"artificial_rows", artificial_rows},
                         {"num_vars", problem.cols()},
                         {"rows", problem.rows()},
                         {"objective", sol.objective},
                         {"iterations", sol.lp.iterations}},
                    dir / "solution.json");

    std::cout << "var_det = " << format_sig(var_det) << "\n"
              << "var_ot  = " << format_sig(var_ot) << "\n"
              << "improvement = " << format_sig(improvement, 4) << "%  (" << sol.treaty.atoms.size()
              << " atoms, " << sol.lp.iterations << " iterations)\n";
    echo_run_dir(dir);
    return 0;
}

// --------------------------------------------------------------------------
// verify

struct Check {
    std::string name;
    bool ok = false;
    std::string detail;
    bool feasibility_class = false;  // failed feasibility -> exit 3, else 5
};

class CheckList {
  public:
    void add(const std::string& name, bool ok, const std::string& detail,
             bool feasibility_class = false) {
        checks_.push_back({name, ok, detail, feasibility_class});
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << name;
        if (!detail.empty()) std::cout << "  (" << detail << ")";
        std::cout << "\n";
    }

    int finish(const fs::path& dir) const {
        json arr = json::array();
        bool all_ok = true;
        bool feas_fail = false;
        for (const Check& c : checks_) {
            arr.push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
            all_ok = all_ok && c.ok;
            feas_fail = feas_fail || (!c.ok && c.feasibility_class);
        }
        write_json_file(json{{"all_ok", all_ok}, {"checks", arr}}, dir / "verify.json");
        if (all_ok) {
            std::cout << "verification passed (" << checks_.size() << " checks)\n";
            return 0;
        }
        std::cout << "verification FAILED\n";
        return feas_fail ? 3 : 5;
    }

  private:
    std::vector<Check> checks_;
};

void require_artifact(const fs::path& p) {
    if (!fs::exists(p)) throw MissingArtifact("missing artifact: " + p.string());
}

double grid_max_residual(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::fabs(a[i] - b[i]));
    return r;
}

int verify_mmot(const fs::path& dir, const json& cfg, const json& report) {
    require_artifact(dir / "treaty.csv");
    require_artifact(dir / "treaty_meta.json");
    require_artifact(dir / "solution.json");

    const MmotInputs in = mmot_inputs_from_cfg(cfg);
    const MmotProblem problem = assemble_checked(in);
    CheckList checks;

    // Treaty artifact: structural validity, claim-law feasibility, and the
    // prescribed second-block marginals.
    DiscreteTreaty treaty;
    bool structural = true;
    try {
        treaty = read_treaty_csv((dir / "treaty.csv").string(), (dir / "treaty_meta.json").string());
        checks.add("treaty structure", true, std::to_string(treaty.atoms.size()) + " atoms", true);
    } catch (const std::invalid_argument& e) {
        checks.add("treaty structure", false, e.what(), true);
        structural = false;
    }

    if (structural) {
        const FeasibilityReport feas = check_feasible(treaty, in.mu, 1e-8);
        checks.add("claim-law feasibility", feas.ok,
                   feas.ok ? "max marginal residual " + format_sig(feas.max_marginal_residual, 3)
                           : feas.violation,
                   true);

        for (int line = 0; line < 2; ++line) {
            const DiscreteDistribution& nu = line == 0 ? in.nu1 : in.nu2;
            std::vector<double> m(nu.size(), 0.0);
            bool in_range = true;
            for (const TreatyAtom& a : treaty.atoms) {
                if (a.yi[line] < 0 || a.yi[line] >= static_cast<int>(m.size())) {
                    in_range = false;
                    break;
                }
                m[a.yi[line]] += a.mass;
            }
            const double r = in_range ? grid_max_residual(m, nu.mass)
                                      : std::numeric_limits<double>::infinity();
            checks.add("retained marginal, line " + std::to_string(line + 1), in_range && r <= 1e-8,
                       "residual " + format_sig(r, 3), true);
        }
    }

    // Optimality: refactorize the stored basis and re-derive the KKT system
    // from scratch at tolerance 1e-8.
    const json snap = load_json_file(dir / "solution.json");
    bool shape_ok =
        snap.contains("num_vars") &&
        snap.at("num_vars").get<std::int64_t>() == problem.cols() &&
        snap.contains("rows") && snap.at("rows").get<int>() == problem.rows();
    checks.add("stored basis shape", shape_ok,
               "LP is " + std::to_string(problem.rows()) + " x " + std::to_string(problem.cols()));
    if (!shape_ok) return checks.finish(dir);

    std::vector<std::int64_t> cols;
    for (const json& v : snap.at("basis_columns")) cols.push_back(v.get<std::int64_t>());
    std::vector<int> art_rows;
    for (const json& v : snap.at("artificial_rows")) art_rows.push_back(v.get<int>());

    const StandardFormLP lp = problem.to_lp();
    LPSolution sol;
    try {
        sol = solution_from_basis(lp, cols, art_rows);
    } catch (const std::exception& e) {
        checks.add("basis refactorization", false, e.what());
        return checks.finish(dir);
    }
    checks.add("basis refactorization", sol.status == LPStatus::optimal,
               "residual " + format_sig(sol.max_primal_residual, 3));

    const KktReport kkt = check_kkt(lp, sol, 1e-8);
    checks.add("KKT conditions", kkt.satisfied,
               "primal " + format_sig(kkt.max_primal_residual, 3) + ", dual " +
                   format_sig(kkt.max_dual_infeasibility, 3) + ", gap " +
                   format_sig(kkt.duality_gap, 3));

    const double stored_obj = snap.contains("objective") ? snap.at("objective").get<double>() : 0.0;
    const double obj_diff = std::fabs(sol.objective - stored_obj);
    checks.add("objective matches stored basis", obj_diff <= 1e-9 * std::max(1.0, std::fabs(stored_obj)),
               "difference " + format_sig(obj_diff, 3));

    if (structural) {
        // Objective recomputed from the treaty artifact itself.
        double treaty_obj = 0.0;
        for (const TreatyAtom& a : treaty.atoms) {
            const double r = treaty.x_of(a, 0) - treaty.y_of(a, 0) + treaty.x_of(a, 1) -
                             treaty.y_of(a, 1);
            treaty_obj += a.mass * r * r;
        }
        const double tdiff = std::fabs(treaty_obj - stored_obj);
        checks.add("objective matches treaty atoms",
                   tdiff <= 1e-8 * std::max(1.0, std::fabs(stored_obj)),
                   "difference " + format_sig(tdiff, 3));

        const RiskReport risk = risk_report(reinsured_sum_law(treaty));
        const double var_reported = num_at(report, "var_ot", "report.json");
        const double vdiff = std::fabs(risk.variance - var_reported);
        checks.add("reinsured variance matches report",
                   vdiff <= 1e-6 * std::max(1.0, std::fabs(var_reported)),
                   "difference " + format_sig(vdiff, 3));
    }

    const DiscreteTreaty det = eta_det(in.mu, in.map1, in.map2);
    const double det_var = risk_report(reinsured_sum_law(det)).variance;
    const double det_reported = num_at(report, "var_det", "report.json");
    const double ddiff = std::fabs(det_var - det_reported);
    checks.add("benchmark variance matches report",
               ddiff <= 1e-6 * std::max(1.0, std::fabs(det_reported)),
               "difference " + format_sig(ddiff, 3));

    return checks.finish(dir);
}

Contract contract_from_json(const json& j, const std::string& ctx) {
    const std::string kind = str_at(j, "kind", ctx);
    if (kind == "stop_loss") return StopLossContract{num_at(j, "attachment", ctx)};
    if (kind == "quota_share") return QuotaShareContract{num_at(j, "factor", ctx)};
    if (kind == "mean_variance_multiline")
        return MultilineMeanVarianceContract{list_at(j, "betas", ctx), num_at(j, "lambda_star", ctx),
                                             num_at(j, "sigma", ctx)};
    if (kind == "var_constrained")
        return VarConstrainedContract{list_at(j, "betas", ctx), num_at(j, "v_star", ctx),
                                      num_at(j, "d", ctx)};
    throw ConfigError(ctx + ": cannot rebuild contract of kind '" + kind + "'");
}

// Joint grid treaty whose second block holds the ceded amounts of a contract
// evaluated on a product grid; feeds the pointwise optimality certificate.
DiscreteTreaty contract_grid_treaty(const Contract& c,
                                    const std::vector<ContinuousDistribution>& lines, int bins,
                                    double tail_quantile) {
    const int n = static_cast<int>(lines.size());
    std::vector<DiscreteDistribution> margins;
    for (const auto& d : lines) margins.push_back(discretize(d, bins, tail_quantile));

    DiscreteTreaty t;
    t.n_lines = n;
    t.orientation = SecondBlock::reinsured;
    for (const auto& m : margins) t.x_grids.push_back(m.support);

    // Collect ceded values per line, dedupe into y grids.
    std::vector<std::map<double, int>> y_index(n);
    std::vector<int> idx(n, 0);
    std::vector<double> x(n), y;
    std::vector<std::vector<double>> cell_y;
    std::vector<std::vector<int>> cell_x;
    std::vector<double> cell_mass;
    bool done = false;
    while (!done) {
        double mass = 1.0;
        for (int i = 0; i < n; ++i) {
            x[i] = margins[i].support[idx[i]];
            mass *= margins[i].mass[idx[i]];
        }
        y = evaluate(c, x);
        for (int i = 0; i < n; ++i) y_index[i].emplace(round_sig(std::max(y[i], 0.0), 12), 0);
        cell_x.push_back(idx);
        cell_y.push_back(y);
        cell_mass.push_back(mass);
        done = true;
        for (int i = 0; i < n; ++i) {
            if (++idx[i] < static_cast<int>(margins[i].size())) {
                done = false;
                break;
            }
            idx[i] = 0;
        }
    }
    t.y_grids.resize(n);
    for (int i = 0; i < n; ++i) {
        int k = 0;
        for (auto& [v, slot] : y_index[i]) {
            slot = k++;
            t.y_grids[i].push_back(v);
        }
    }
    for (std::size_t cell = 0; cell < cell_mass.size(); ++cell) {
        if (cell_mass[cell] <= 0.0) continue;
        TreatyAtom a;
        a.mass = cell_mass[cell];
        for (int i = 0; i < n; ++i) {
            a.xi.push_back(cell_x[cell][i]);
            a.yi.push_back(y_index[i].at(round_sig(std::max(cell_y[cell][i], 0.0), 12)));
        }
        t.atoms.push_back(std::move(a));
    }
    t.validate();
    return t;
}

int verify_mean_variance(const fs::path& dir, const json& cfg, const json& report) {
    const std::vector<ContinuousDistribution> lines = lines_from_cfg(cfg, "config");
    const std::vector<double> betas = list_at(cfg, "betas", "config");
    const double budget = num_at(cfg, "budget", "config");
    const Contract contract = contract_from_json(report.at("contract"), "report.json.contract");
    const auto& mc = std::get<MultilineMeanVarianceContract>(contract);
    CheckList checks;

    // Pointwise optimality certificate on a 50 x 50 product grid.
    const DiscreteTreaty grid = contract_grid_treaty(contract, lines, 50, 0.999);
    const SupportConditionInputs inputs = multiline_support_inputs(mc);
    SupportConditionReport sup;
    const bool sup_ok = validate_support_condition(grid, inputs.p, inputs.g, inputs.r_star,
                                                   inputs.lambda_star, 1e-6, 50, &sup);
    checks.add("pointwise optimality certificate", sup_ok,
               "worst gap " + format_sig(sup.worst_gap, 3), true);

    // Premium re-integration with the stored settings.
    const IntegrationConfig ic = integration_from_cfg(cfg, "config");
    const double premium = expected_loading(contract, lines, betas, ic);
    const double reported = num_at(report, "premium", "report.json");
    const double pdiff = std::fabs(premium - reported);
    checks.add("premium recomputation", pdiff <= 1e-6 * std::max(1.0, std::fabs(reported)),
               "difference " + format_sig(pdiff, 3));

    // Budget residual as stored by the fit.
    const double retained_var = num_at(report, "retained_variance", "report.json");
    checks.add("variance budget attained", std::fabs(retained_var - budget) <= 1e-6 * budget,
               "retained variance " + format_sig(retained_var), true);
    return checks.finish(dir);
}

int verify_refit(const fs::path& dir, const json& cfg, const json& report,
                 const std::string& command) {
    CheckList checks;
    FitReport fr;
    std::vector<std::pair<const char*, double>> numbers;
    if (command == "solve-stop-loss") {
        fr = solve_stop_loss(dist_from_json(cfg.at("line"), "config.line"),
                             num_at(cfg, "budget", "config"));
        numbers = {{"attachment", std::get<StopLossContract>(fr.contract).attachment}};
    } else if (command == "solve-quota-share") {
        const bool has_line = cfg.contains("line") && !cfg.at("line").is_null();
        fr = has_line ? solve_quota_share_variance_premium(
                            dist_from_json(cfg.at("line"), "config.line"),
                            num_at(cfg, "budget", "config"))
                      : solve_quota_share_variance_premium(num_at(cfg, "var", "config"),
                                                           num_at(cfg, "budget", "config"));
        numbers = {{"factor", std::get<QuotaShareContract>(fr.contract).factor}};
    } else if (command == "solve-definetti") {
        fr = solve_definetti_proportions(list_at(cfg, "means", "config"),
                                         list_at(cfg, "variances", "config"),
                                         list_at(cfg, "betas", "config"),
                                         num_at(cfg, "budget", "config"));
    } else if (command == "solve-var-constrained") {
        fr = solve_var_constrained(lines_from_cfg(cfg, "config"), list_at(cfg, "betas", "config"),
                                   num_at(cfg, "alpha", "config"), num_at(cfg, "budget", "config"),
                                   integration_from_cfg(cfg, "config"));
        const auto& c = std::get<VarConstrainedContract>(fr.contract);
        numbers = {{"v_star", c.v_star}, {"d", c.d}};
    } else {
        throw ConfigError("verify: unsupported command '" + command + "'");
    }

    auto compare = [&](const char* key, double fresh) {
        const double stored = num_at(report, key, "report.json");
        const double diff = std::fabs(fresh - stored);
        checks.add(std::string("refit matches stored ") + key,
                   diff <= 1e-9 * std::max(1.0, std::fabs(stored)),
                   "difference " + format_sig(diff, 3));
    };
    compare("premium", fr.premium);
    compare("retained_variance", fr.retained_variance);
    for (const auto& [name, fresh] : numbers) {
        const double stored = num_at(report.at("contract"), name, "report.json.contract");
        const double diff = std::fabs(fresh - stored);
        checks.add(std::string("refit matches stored contract ") + name,
                   diff <= 1e-9 * std::max(1.0, std::fabs(stored)),
                   "difference " + format_sig(diff, 3));
    }
    checks.add("fit reported feasible", report.at("feasible").get<bool>(), fr.notes, true);
    return checks.finish(dir);
}

int verify_discretize(const fs::path& dir, const json& cfg, const json& report) {
    require_artifact(dir / "distribution.csv");
    CheckList checks;
    DiscreteDistribution d;
    try {
        d = read_distribution_csv((dir / "distribution.csv").string());
        checks.add("grid law structure", true, std::to_string(d.size()) + " atoms", true);
    } catch (const std::invalid_argument& e) {
        checks.add("grid law structure", false, e.what(), true);
        return checks.finish(dir);
    }
    const double mdiff = std::fabs(d.mean() - num_at(report, "mean", "report.json"));
    const double vdiff = std::fabs(d.variance() - num_at(report, "variance", "report.json"));
    checks.add("moments match report", mdiff <= 1e-6 && vdiff <= 1e-6,
               "mean diff " + format_sig(mdiff, 3) + ", variance diff " + format_sig(vdiff, 3));

    const ContinuousDistribution dist = dist_from_json(cfg.at("family_spec"), "config.family_spec");
    const DiscreteDistribution fresh =
        discretize(dist, static_cast<int>(int_at(cfg, "n_bins", "config")),
                   num_at(cfg, "tail_quantile", "config"));
    const double gdiff = grid_max_residual(fresh.support, d.support);
    const double mssdiff = grid_max_residual(fresh.mass, d.mass);
    checks.add("grid reproducible from config", gdiff <= 1e-12 && mssdiff <= 1e-12,
               "support diff " + format_sig(gdiff, 3) + ", mass diff " + format_sig(mssdiff, 3));
    return checks.finish(dir);
}

int cmd_verify(const std::string& run_dir) {
    const fs::path dir(run_dir);
    require_artifact(dir / "config.json");
    require_artifact(dir / "report.json");
    const json cfg = load_json_file(dir / "config.json");
    const json report = load_json_file(dir / "report.json");
    const std::string command = str_at(cfg, "command", "config.json");

    if (command == "solve-mmot") return verify_mmot(dir, cfg, report);
    if (command == "solve-mean-variance") return verify_mean_variance(dir, cfg, report);
    if (command == "discretize") return verify_discretize(dir, cfg, report);
    return verify_refit(dir, cfg, report, command);
}

// --------------------------------------------------------------------------
// report: figure tables for a solved transport run.

int cmd_report(const std::string& run_dir, const std::string& which) {
    const fs::path dir(run_dir);
    const bool det = which == "det";
    if (!det && which != "ot")
        throw ConfigError("report: --treaty must be 'ot' or 'det'");
    const std::string prefix = det ? "det_" : "ot_";
    const fs::path treaty_csv = dir / (det ? "treaty_det.csv" : "treaty.csv");
    const fs::path treaty_meta = dir / (det ? "treaty_det_meta.json" : "treaty_meta.json");
    require_artifact(treaty_csv);
    require_artifact(treaty_meta);
    for (const char* f : {"x1.csv", "x2.csv", "nu1.csv", "nu2.csv"}) require_artifact(dir / f);

    const DiscreteTreaty t = read_treaty_csv(treaty_csv.string(), treaty_meta.string());
    const MarginalReports rep = marginal_reports(t);
    const fs::path outdir = dir / "report";
    fs::create_directories(outdir);

    for (const BivariateTable& tab : rep.tables)
        write_table_csv(tab, (outdir / (prefix + tab.name + ".csv")).string());
    write_count_grid_csv(rep.y1_support_counts, t.x_grids[0], t.x_grids[1],
                         (outdir / (prefix + "y1_counts.csv")).string());
    write_count_grid_csv(rep.y2_support_counts, t.x_grids[0], t.x_grids[1],
                         (outdir / (prefix + "y2_counts.csv")).string());
    write_count_grid_csv(rep.conditional_support_counts, t.x_grids[0], t.x_grids[1],
                         (outdir / (prefix + "joint_counts.csv")).string());

    // Re-read the emitted tables and reconcile their margins against the
    // stored laws; this audits the rounded artifacts that figures consume.
    const DiscreteDistribution x1 = read_distribution_csv((dir / "x1.csv").string());
    const DiscreteDistribution x2 = read_distribution_csv((dir / "x2.csv").string());
    const DiscreteDistribution nu1 = read_distribution_csv((dir / "nu1.csv").string());
    const DiscreteDistribution nu2 = read_distribution_csv((dir / "nu2.csv").string());

    auto margin_residual = [&](const std::string& name, const DiscreteDistribution& rows,
                               const DiscreteDistribution& cols) {
        const BivariateTable tab = read_table_csv((outdir / (prefix + name + ".csv")).string());
        double worst = 0.0;
        if (tab.row_values.size() != rows.size() || tab.col_values.size() != cols.size())
            return std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < tab.row_values.size(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < tab.col_values.size(); ++j)
                s += tab.pmf[i * tab.col_values.size() + j];
            worst = std::max(worst, std::fabs(s - rows.mass[i]));
        }
        for (std::size_t j = 0; j < tab.col_values.size(); ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < tab.row_values.size(); ++i)
                s += tab.pmf[i * tab.col_values.size() + j];
            worst = std::max(worst, std::fabs(s - cols.mass[j]));
        }
        return worst;
    };

    double worst = 0.0;
    worst = std::max(worst, margin_residual("x1_y1", x1, nu1));
    worst = std::max(worst, margin_residual("x2_y2", x2, nu2));
    worst = std::max(worst, margin_residual("x1_y2", x1, nu2));
    worst = std::max(worst, margin_residual("x2_y1", x2, nu1));
    worst = std::max(worst, margin_residual("y1_y2", nu1, nu2));

    // Mass off the diagonal of the (Y1, Y2) coupling: zero iff the retained
    // blocks are comonotone cell by cell.
    double off_diag = 0.0;
    for (const BivariateTable& tab : rep.tables) {
        if (tab.name != "y1_y2") continue;
        double diag = 0.0;
        const std::size_t k = std::min(tab.row_values.size(), tab.col_values.size());
        for (std::size_t i = 0; i < k; ++i) diag += tab.pmf[i * tab.col_values.size() + i];
        off_diag = std::max(0.0, 1.0 - diag);
    }

    json summary = {{"treaty", det ? "det" : "ot"},
                    {"tables", {"x1_y1", "x2_y2", "x1_y2", "x2_y1", "y1_y2", "r1_r2"}},
                    {"count_grids", {"y1_counts", "y2_counts", "joint_counts"}},
                    {"max_margin_residual", jnum(worst)},
                    {"off_diagonal_mass_fraction", jnum(off_diag)}};
    write_json_file(summary, outdir / (prefix + "summary.json"));

    std::cout << "wrote 6 coupling tables and 3 support-count grids to " << outdir.string() << "\n"
              << "max margin residual vs stored laws = " << format_sig(worst, 3) << "\n"
              << "off-diagonal mass of (Y1, Y2) = " << format_sig(off_diag, 4) << "\n";
    if (worst > 1e-10) {
        std::cout << "margin reconciliation FAILED (residual above 1e-10)\n";
        return 5;
    }
    return 0;
}

void apply_thread_env() {
#ifdef _OPENMP
    if (const char* t = std::getenv("REOT_THREADS")) {
        const int n = std::atoi(t);
        if (n >= 1) omp_set_num_threads(n);
    }
#endif
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    apply_thread_env();

    CLI::App app{"optimal reinsurance over discrete transport couplings"};
    app.require_subcommand(1);
    int rc = 0;

    // ---- discretize ------------------------------------------------------
    auto* discretize_cmd = app.add_subcommand("discretize", "bin a continuous law onto a grid");
    struct {
        std::string config, out_root;
        long long n = 0;
        double q = 0;
        DistFlags dist;
        CLI::Option *n_opt, *q_opt, *out_opt;
    } dz;
    discretize_cmd->add_option("--config", dz.config, "JSON config file");
    dz.out_opt = discretize_cmd->add_option("--out-root", dz.out_root, "run directory root");
    dz.n_opt = discretize_cmd->add_option("--n", dz.n, "number of bins");
    dz.q_opt = discretize_cmd->add_option("--q", dz.q, "tail quantile defining the grid ceiling");
    dz.dist.attach(discretize_cmd);
    discretize_cmd->callback([&] {
        json cfg = effective_config(
            json{{"version", 1},
                 {"family_spec", default_family_spec("lognormal")},
                 {"n_bins", 40},
                 {"tail_quantile", 0.999},
                 {"out_root", "runs"}},
            dz.config, {"version", "family_spec", "n_bins", "tail_quantile", "out_root"},
            "discretize");
        dz.dist.apply(cfg, "family_spec");
        if (dz.n_opt->count()) cfg["n_bins"] = dz.n;
        if (dz.q_opt->count()) cfg["tail_quantile"] = dz.q;
        if (dz.out_opt->count()) cfg["out_root"] = dz.out_root;
        rc = cmd_discretize(cfg);
    });

    // ---- solve -----------------------------------------------------------
    auto* solve = app.add_subcommand("solve", "fit a contract or solve the transport program");
    solve->require_subcommand(1);

    auto* sl = solve->add_subcommand("stop-loss", "attachment meeting a ceded-premium budget");
    struct {
        std::string config, out_root;
        double budget = 0;
        DistFlags dist;
        CLI::Option *budget_opt, *out_opt;
    } slf;
    sl->add_option("--config", slf.config, "JSON config file");
    slf.out_opt = sl->add_option("--out-root", slf.out_root, "run directory root");
    slf.budget_opt = sl->add_option("--budget", slf.budget, "ceded premium budget E[(X-a)+]");
    slf.dist.attach(sl);
    sl->callback([&] {
        json cfg = effective_config(json{{"version", 1},
                                         {"line", default_family_spec("exponential")},
                                         {"budget", std::exp(-1.0)},
                                         {"out_root", "runs"}},
                                    slf.config, {"version", "line", "budget", "out_root"},
                                    "solve-stop-loss");
        slf.dist.apply(cfg, "line");
        if (slf.budget_opt->count()) cfg["budget"] = slf.budget;
        if (slf.out_opt->count()) cfg["out_root"] = slf.out_root;
        rc = cmd_stop_loss(cfg);
    });

    auto* qs = solve->add_subcommand("quota-share", "proportional factor meeting a ceded-variance budget");
    struct {
        std::string config, out_root;
        double var = 0, budget = 0;
        DistFlags dist;
        CLI::Option *var_opt, *budget_opt, *out_opt;
    } qsf;
    qs->add_option("--config", qsf.config, "JSON config file");
    qsf.out_opt = qs->add_option("--out-root", qsf.out_root, "run directory root");
    qsf.var_opt = qs->add_option("--var", qsf.var, "variance of the underlying claim");
    qsf.budget_opt = qs->add_option("--budget", qsf.budget, "ceded variance budget");
    qsf.dist.attach(qs);
    qs->callback([&] {
        json cfg = effective_config(
            json{{"version", 1}, {"var", 2.0}, {"budget", 2.0}, {"line", nullptr}, {"out_root", "runs"}},
            qsf.config, {"version", "var", "budget", "line", "out_root"}, "solve-quota-share");
        if (qsf.dist.family_opt->count()) qsf.dist.apply(cfg, "line");
        if (qsf.var_opt->count()) cfg["var"] = qsf.var;
        if (qsf.budget_opt->count()) cfg["budget"] = qsf.budget;
        if (qsf.out_opt->count()) cfg["out_root"] = qsf.out_root;
        rc = cmd_quota_share(cfg);
    });

    auto* df = solve->add_subcommand("definetti",
                                     "proportional cessions from line moments under a variance budget");
    struct {
        std::string config, out_root, means, variances, betas;
        double budget = 0;
        CLI::Option *means_opt, *vars_opt, *betas_opt, *budget_opt, *out_opt;
    } dff;
    df->add_option("--config", dff.config, "JSON config file");
    dff.out_opt = df->add_option("--out-root", dff.out_root, "run directory root");
    dff.means_opt = df->add_option("--means", dff.means, "comma-separated line means");
    dff.vars_opt = df->add_option("--variances", dff.variances, "comma-separated line variances");
    dff.betas_opt = df->add_option("--betas", dff.betas, "comma-separated premium weights");
    dff.budget_opt = df->add_option("--budget", dff.budget, "retained variance budget");
    df->callback([&] {
        json cfg = effective_config(json{{"version", 1},
                                         {"means", {1.0, 1.0}},
                                         {"variances", {2.0, 2.0}},
                                         {"betas", {0.1, 0.25}},
                                         {"budget", 2.0},
                                         {"out_root", "runs"}},
                                    dff.config,
                                    {"version", "means", "variances", "betas", "budget", "out_root"},
                                    "solve-definetti");
        if (dff.means_opt->count()) cfg["means"] = parse_double_list(dff.means, "--means");
        if (dff.vars_opt->count()) cfg["variances"] = parse_double_list(dff.variances, "--variances");
        if (dff.betas_opt->count()) cfg["betas"] = parse_double_list(dff.betas, "--betas");
        if (dff.budget_opt->count()) cfg["budget"] = dff.budget;
        if (dff.out_opt->count()) cfg["out_root"] = dff.out_root;
        rc = cmd_definetti(cfg);
    });

    json integration_defaults = {{"integration", "automatic"}, {"nodes", 256},
                                 {"mc_samples", 10000000},   {"seed", 42},
                                 {"tail_trunc", 1e-8}};

    auto* mv = solve->add_subcommand("mean-variance",
                                     "layered multi-line contract under a retained-variance budget");
    struct {
        std::string config, out_root, betas, integration;
        double budget = 0;
        long long nodes = 0, mc_samples = 0, seed = 0;
        CLI::Option *betas_opt, *budget_opt, *integ_opt, *nodes_opt, *mc_opt, *seed_opt, *out_opt;
    } mvf;
    mv->add_option("--config", mvf.config, "JSON config file");
    mvf.out_opt = mv->add_option("--out-root", mvf.out_root, "run directory root");
    mvf.betas_opt = mv->add_option("--betas", mvf.betas, "comma-separated premium weights");
    mvf.budget_opt = mv->add_option("--budget", mvf.budget, "retained variance budget");
    mvf.integ_opt = mv->add_option("--integration", mvf.integration,
                                   "integration mode (automatic, quadrature, monte_carlo)");
    mvf.nodes_opt = mv->add_option("--nodes", mvf.nodes, "quadrature nodes per line");
    mvf.mc_opt = mv->add_option("--mc-samples", mvf.mc_samples, "Monte Carlo sample count");
    mvf.seed_opt = mv->add_option("--seed", mvf.seed, "Monte Carlo seed");
    mv->callback([&] {
        json defaults = {{"version", 1},
                         {"lines", {default_family_spec("gamma"), default_family_spec("shifted_pareto")}},
                         {"betas", {0.1, 0.25}},
                         {"budget", 2.0},
                         {"out_root", "runs"}};
        for (const auto& item : integration_defaults.items()) defaults[item.key()] = item.value();
        json cfg = effective_config(defaults, mvf.config,
                                    {"version", "lines", "betas", "budget", "integration", "nodes",
                                     "mc_samples", "seed", "tail_trunc", "out_root"},
                                    "solve-mean-variance");
        if (mvf.betas_opt->count()) cfg["betas"] = parse_double_list(mvf.betas, "--betas");
        if (mvf.budget_opt->count()) cfg["budget"] = mvf.budget;
        if (mvf.integ_opt->count()) cfg["integration"] = mvf.integration;
        if (mvf.nodes_opt->count()) cfg["nodes"] = mvf.nodes;
        if (mvf.mc_opt->count()) cfg["mc_samples"] = mvf.mc_samples;
        if (mvf.seed_opt->count()) cfg["seed"] = mvf.seed;
        if (mvf.out_opt->count()) cfg["out_root"] = mvf.out_root;
        rc = cmd_mean_variance(cfg);
    });

    auto* vc = solve->add_subcommand("var-constrained",
                                     "premium minimization under a value-at-risk budget");
    struct {
        std::string config, out_root, betas, integration;
        double alpha = 0, budget = 0;
        long long nodes = 0, mc_samples = 0, seed = 0;
        CLI::Option *betas_opt, *alpha_opt, *budget_opt, *integ_opt, *nodes_opt, *mc_opt, *seed_opt,
            *out_opt;
    } vcf;
    vc->add_option("--config", vcf.config, "JSON config file");
    vcf.out_opt = vc->add_option("--out-root", vcf.out_root, "run directory root");
    vcf.betas_opt = vc->add_option("--betas", vcf.betas, "comma-separated premium weights");
    vcf.alpha_opt = vc->add_option("--alpha", vcf.alpha, "tail level of the VaR constraint");
    vcf.budget_opt = vc->add_option("--budget", vcf.budget, "retained VaR budget");
    vcf.integ_opt = vc->add_option("--integration", vcf.integration,
                                   "integration mode (automatic, quadrature, monte_carlo)");
    vcf.nodes_opt = vc->add_option("--nodes", vcf.nodes, "quadrature nodes per line");
    vcf.mc_opt = vc->add_option("--mc-samples", vcf.mc_samples, "Monte Carlo sample count");
    vcf.seed_opt = vc->add_option("--seed", vcf.seed, "Monte Carlo seed");
    vc->callback([&] {
        json defaults = {{"version", 1},
                         {"lines", {default_family_spec("uniform")}},
                         {"betas", {1.0}},
                         {"alpha", 0.1},
                         {"budget", 0.5},
                         {"out_root", "runs"}};
        for (const auto& item : integration_defaults.items()) defaults[item.key()] = item.value();
        json cfg = effective_config(defaults, vcf.config,
                                    {"version", "lines", "betas", "alpha", "budget", "integration",
                                     "nodes", "mc_samples", "seed", "tail_trunc", "out_root"},
                                    "solve-var-constrained");
        if (vcf.betas_opt->count()) cfg["betas"] = parse_double_list(vcf.betas, "--betas");
        if (vcf.alpha_opt->count()) cfg["alpha"] = vcf.alpha;
        if (vcf.budget_opt->count()) cfg["budget"] = vcf.budget;
        if (vcf.integ_opt->count()) cfg["integration"] = vcf.integration;
        if (vcf.nodes_opt->count()) cfg["nodes"] = vcf.nodes;
        if (vcf.mc_opt->count()) cfg["mc_samples"] = vcf.mc_samples;
        if (vcf.seed_opt->count()) cfg["seed"] = vcf.seed;
        if (vcf.out_opt->count()) cfg["out_root"] = vcf.out_root;
        rc = cmd_var_constrained(cfg);
    });

    auto* mm = solve->add_subcommand("mmot",
                                     "minimal-variance coupling of prescribed retained marginals");
    struct {
        std::string config, out_root, pricing, mps;
        long long n = 0, max_iterations = 0, log_every = 0;
        double q = 0;
        CLI::Option *n_opt, *q_opt, *pricing_opt, *iters_opt, *log_opt, *mps_opt, *out_opt;
    } mmf;
    mm->add_option("--config", mmf.config, "JSON config file");
    mmf.out_opt = mm->add_option("--out-root", mmf.out_root, "run directory root");
    mmf.n_opt = mm->add_option("--n", mmf.n, "bins per claim line");
    mmf.q_opt = mm->add_option("--q", mmf.q, "tail quantile defining each grid ceiling");
    mmf.pricing_opt = mm->add_option("--pricing", mmf.pricing, "pricing rule (devex, dantzig)");
    mmf.iters_opt = mm->add_option("--max-iterations", mmf.max_iterations,
                                   "simplex iteration cap (0 = automatic)");
    mmf.log_opt = mm->add_option("--log-every", mmf.log_every,
                                 "progress line every k iterations (0 = quiet)");
    mmf.mps_opt = mm->add_option("--mps", mmf.mps, "also export the LP in MPS format to this path");
    mm->callback([&] {
        json cfg = effective_config(
            json{{"version", 1},
                 {"lines", {default_family_spec("lognormal"), default_family_spec("shifted_pareto")}},
                 {"marginal_maps",
                  {json{{"kind", "proportional"}, {"factor", 0.5}},
                   json{{"kind", "cap_plus_share"}, {"cap", 0.5}, {"share", 0.25}, {"excess_at", 0.95}}}},
                 {"n_bins", 40},
                 {"tail_quantile", 0.999},
                 {"pricing", "devex"},
                 {"max_iterations", 0},
                 {"log_every", 0},
                 {"mps_path", ""},
                 {"out_root", "runs"}},
            mmf.config,
            {"version", "lines", "marginal_maps", "n_bins", "tail_quantile", "pricing",
             "max_iterations", "log_every", "mps_path", "out_root"},
            "solve-mmot");
        if (mmf.n_opt->count()) cfg["n_bins"] = mmf.n;
        if (mmf.q_opt->count()) cfg["tail_quantile"] = mmf.q;
        if (mmf.pricing_opt->count()) cfg["pricing"] = mmf.pricing;
        if (mmf.iters_opt->count()) cfg["max_iterations"] = mmf.max_iterations;
        if (mmf.log_opt->count()) cfg["log_every"] = mmf.log_every;
        if (mmf.mps_opt->count()) cfg["mps_path"] = mmf.mps;
        if (mmf.out_opt->count()) cfg["out_root"] = mmf.out_root;
        rc = cmd_mmot(cfg);
    });

    // ---- verify / report -------------------------------------------------
    auto* verify_cmd = app.add_subcommand("verify", "re-check the artifacts of a finished run");
    struct {
        std::string run;
    } vf;
    verify_cmd->add_option("--run", vf.run, "run directory to verify")->required();
    verify_cmd->callback([&] { rc = cmd_verify(vf.run); });

    auto* report_cmd = app.add_subcommand("report", "emit coupling tables for a transport run");
    struct {
        std::string run, treaty = "ot";
    } rf;
    report_cmd->add_option("--run", rf.run, "run directory holding the treaty")->required();
    report_cmd->add_option("--treaty", rf.treaty, "which treaty to tabulate (ot, det)");
    report_cmd->callback([&] { rc = cmd_report(rf.run, rf.treaty); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const MissingArtifact& e) {
        std::cerr << "missing artifact: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 5;
    }
    return rc;
}

}  // namespace reot
