// config.hpp: experiment configuration: strict JSON schema, dotted-key overrides,
// and the dry-run validation report.

#pragma once

#include "jch/disorder.hpp"
#include "jch/smft.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace jch::cli {

using json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::pair<std::string, std::string>>& experiment_kinds() {
    static const std::vector<std::pair<std::string, std::string>> kinds = {
        {"clean-two-site", "exact two-site ground states over (detuning, hopping): site-site, in-site, atom-atom negativity"},
        {"mf-phase-diagram", "cluster mean-field sweep over (mu, hopping): order parameter, site purity and in-site entanglement"},
        {"disorder-ensemble", "two-site Gaussian disorder ensembles: histograms, average entanglement, entanglement of the average state"},
        {"smft-solve", "single stochastic mean-field fixed point with observable distributions"},
        {"smft-sweep", "stochastic mean-field sweeps over disorder width or the (mu, hopping) plane"},
    };
    return kinds;
}

inline bool is_experiment(const std::string& s) {
    for (const auto& [k, d] : experiment_kinds())
        if (k == s) return true;
    return false;
}

struct ModelConfig {
    double omega = 10.0;
    double g = 1.0;
    double detuning = 0.0;
    double hopping = 1.0;
    double mu_over_g = 0.0;
    int n_max = 6;
};

struct CleanConfig {
    double detuning_min = -20.0, detuning_max = 20.0;
    double log10_a_min = -2.0, log10_a_max = 1.0;
    int grid_delta = 60, grid_A = 60;
};

struct MFBlock {
    std::string cluster = "chain";  // chain | plaquette
    int cluster_sites = 2;
    int z = 2;
    double mu_min = -1.0, mu_max = 0.0;
    double log10_a_min = -3.0, log10_a_max = 0.0;
    int grid_mu = 21, grid_A = 21;
    double alpha_max = 3.0;
};

struct DisorderBlock {
    std::string target = "detuning";
    std::optional<double> mean;
    std::vector<double> deltas;  // empty: 12 log-spaced widths over [0.01, 30]
    int n_samples = 4000;
    int bins = 40;
    std::string mode = "delta";  // delta | map
    double map_delta = 10.0;

    std::vector<double> resolved_deltas() const {
        if (!deltas.empty()) return deltas;
        std::vector<double> d;
        for (int k = 0; k < 12; ++k) d.push_back(std::pow(10.0, -2.0 + k * (std::log10(30.0) + 2.0) / 11.0));
        return d;
    }
};

struct SMFTBlock {
    SMFTConfig numerics{};
    std::string target = "detuning";
    double delta = 0.0;
    double detuning = 0.0;
    double hopping = 0.012589254117941675;  // 10^-1.9
    double mu_over_g = -1.0;
    std::string sweep = "delta";  // delta | map
    std::vector<double> deltas{0.0, 0.05, 0.1, 0.15, 0.2, 0.25};
    double mu_min = -1.0, mu_max = 0.0;
    double log10_a_min = -3.0, log10_a_max = -1.0;
    int grid_mu = 11, grid_A = 11;
    int bins = 40;
};

struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 0;
    int workers = 0;
    std::string output = "out";
    ModelConfig model;
    CleanConfig clean;
    MFBlock mf;
    DisorderBlock disorder;
    SMFTBlock smft;
};

namespace detail {

/// Rejects keys outside `allowed` with the full dotted path in the message.
inline void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError("'" + path + "' must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key()))
            throw ConfigError("unknown key '" + (path.empty() ? it.key() : path + "." + it.key()) + "'");
}

template <class T>
void read(const json& j, const char* key, const std::string& path, T& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    const std::string where = path.empty() ? key : path + "." + key;
    try {
        if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) throw ConfigError("");
            out = v.template get<double>();
        } else if constexpr (std::is_same_v<T, int>) {
            if (!v.is_number_integer()) throw ConfigError("");
            out = v.template get<int>();
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.template get<long long>() >= 0)) throw ConfigError("");
            out = v.template get<std::uint64_t>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError("");
            out = v.template get<std::string>();
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
            if (!v.is_array()) throw ConfigError("");
            out.clear();
            for (const auto& x : v) {
                if (!x.is_number()) throw ConfigError("");
                out.push_back(x.template get<double>());
            }
        } else if constexpr (std::is_same_v<T, std::optional<double>>) {
            if (v.is_null())
                out.reset();
            else if (v.is_number())
                out = v.template get<double>();
            else
                throw ConfigError("");
        }
    } catch (const ConfigError&) {
        throw ConfigError("key '" + where + "' has the wrong type");
    }
}

inline std::string line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

inline ExperimentConfig config_from_json(const json& j) {
    using detail::read;
    detail::check_keys(j, "", {"experiment", "seed", "workers", "output", "model", "clean_two_site", "mf", "disorder", "smft"});
    ExperimentConfig c;
    read(j, "experiment", "", c.experiment);
    read(j, "seed", "", c.seed);
    read(j, "workers", "", c.workers);
    read(j, "output", "", c.output);
    if (j.contains("model")) {
        const auto& m = j.at("model");
        detail::check_keys(m, "model", {"omega", "g", "detuning", "hopping", "mu_over_g", "n_max"});
        read(m, "omega", "model", c.model.omega);
        read(m, "g", "model", c.model.g);
        read(m, "detuning", "model", c.model.detuning);
        read(m, "hopping", "model", c.model.hopping);
        read(m, "mu_over_g", "model", c.model.mu_over_g);
        read(m, "n_max", "model", c.model.n_max);
    }
    if (j.contains("clean_two_site")) {
        const auto& m = j.at("clean_two_site");
        const std::string p = "clean_two_site";
        detail::check_keys(m, p, {"detuning_min", "detuning_max", "log10_a_min", "log10_a_max", "grid_delta", "grid_A"});
        read(m, "detuning_min", p, c.clean.detuning_min);
        read(m, "detuning_max", p, c.clean.detuning_max);
        read(m, "log10_a_min", p, c.clean.log10_a_min);
        read(m, "log10_a_max", p, c.clean.log10_a_max);
        read(m, "grid_delta", p, c.clean.grid_delta);
        read(m, "grid_A", p, c.clean.grid_A);
    }
    if (j.contains("mf")) {
        const auto& m = j.at("mf");
        const std::string p = "mf";
        detail::check_keys(m, p, {"cluster", "cluster_sites", "z", "mu_min", "mu_max", "log10_a_min", "log10_a_max", "grid_mu",
                                  "grid_A", "alpha_max"});
        read(m, "cluster", p, c.mf.cluster);
        read(m, "cluster_sites", p, c.mf.cluster_sites);
        read(m, "z", p, c.mf.z);
        read(m, "mu_min", p, c.mf.mu_min);
        read(m, "mu_max", p, c.mf.mu_max);
        read(m, "log10_a_min", p, c.mf.log10_a_min);
        read(m, "log10_a_max", p, c.mf.log10_a_max);
        read(m, "grid_mu", p, c.mf.grid_mu);
        read(m, "grid_A", p, c.mf.grid_A);
        read(m, "alpha_max", p, c.mf.alpha_max);
    }
    if (j.contains("disorder")) {
        const auto& m = j.at("disorder");
        const std::string p = "disorder";
        detail::check_keys(m, p, {"target", "mean", "deltas", "n_samples", "bins", "mode", "map_delta"});
        read(m, "target", p, c.disorder.target);
        read(m, "mean", p, c.disorder.mean);
        read(m, "deltas", p, c.disorder.deltas);
        read(m, "n_samples", p, c.disorder.n_samples);
        read(m, "bins", p, c.disorder.bins);
        read(m, "mode", p, c.disorder.mode);
        read(m, "map_delta", p, c.disorder.map_delta);
    }
    if (j.contains("smft")) {
        const auto& m = j.at("smft");
        const std::string p = "smft";
        detail::check_keys(m, p, {"z", "n_grid", "alpha_max", "tol_tv", "max_iters", "quad_nodes", "n_max", "target", "delta",
                                  "detuning", "hopping", "mu_over_g", "sweep", "deltas", "mu_min", "mu_max", "log10_a_min",
                                  "log10_a_max", "grid_mu", "grid_A", "bins"});
        auto& n = c.smft.numerics;
        read(m, "z", p, n.z);
        read(m, "n_grid", p, n.n_grid);
        read(m, "alpha_max", p, n.alpha_max);
        read(m, "tol_tv", p, n.tol_tv);
        read(m, "max_iters", p, n.max_iters);
        read(m, "quad_nodes", p, n.quad_nodes);
        read(m, "n_max", p, n.n_max);
        read(m, "target", p, c.smft.target);
        read(m, "delta", p, c.smft.delta);
        read(m, "detuning", p, c.smft.detuning);
        read(m, "hopping", p, c.smft.hopping);
        read(m, "mu_over_g", p, c.smft.mu_over_g);
        read(m, "sweep", p, c.smft.sweep);
        read(m, "deltas", p, c.smft.deltas);
        read(m, "mu_min", p, c.smft.mu_min);
        read(m, "mu_max", p, c.smft.mu_max);
        read(m, "log10_a_min", p, c.smft.log10_a_min);
        read(m, "log10_a_max", p, c.smft.log10_a_max);
        read(m, "grid_mu", p, c.smft.grid_mu);
        read(m, "grid_A", p, c.smft.grid_A);
        read(m, "bins", p, c.smft.bins);
    }
    return c;
}

/// Fully resolved configuration; this is what a run echoes into its output directory.
inline json config_to_json(const ExperimentConfig& c) {
    json j;
    j["experiment"] = c.experiment;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["output"] = c.output;
    j["model"] = {{"omega", c.model.omega}, {"g", c.model.g}, {"detuning", c.model.detuning},
                  {"hopping", c.model.hopping}, {"mu_over_g", c.model.mu_over_g}, {"n_max", c.model.n_max}};
    j["clean_two_site"] = {{"detuning_min", c.clean.detuning_min}, {"detuning_max", c.clean.detuning_max},
                           {"log10_a_min", c.clean.log10_a_min}, {"log10_a_max", c.clean.log10_a_max},
                           {"grid_delta", c.clean.grid_delta}, {"grid_A", c.clean.grid_A}};
    j["mf"] = {{"cluster", c.mf.cluster}, {"cluster_sites", c.mf.cluster_sites}, {"z", c.mf.z},
               {"mu_min", c.mf.mu_min}, {"mu_max", c.mf.mu_max}, {"log10_a_min", c.mf.log10_a_min},
               {"log10_a_max", c.mf.log10_a_max}, {"grid_mu", c.mf.grid_mu}, {"grid_A", c.mf.grid_A},
               {"alpha_max", c.mf.alpha_max}};
    j["disorder"] = {{"target", c.disorder.target},
                     {"mean", c.disorder.mean ? json(*c.disorder.mean) : json(nullptr)},
                     {"deltas", c.disorder.resolved_deltas()},
                     {"n_samples", c.disorder.n_samples},
                     {"bins", c.disorder.bins},
                     {"mode", c.disorder.mode},
                     {"map_delta", c.disorder.map_delta}};
    const auto& n = c.smft.numerics;
    j["smft"] = {{"z", n.z}, {"n_grid", n.n_grid}, {"alpha_max", n.alpha_max}, {"tol_tv", n.tol_tv},
                 {"max_iters", n.max_iters}, {"quad_nodes", n.quad_nodes}, {"n_max", n.n_max},
                 {"target", c.smft.target}, {"delta", c.smft.delta}, {"detuning", c.smft.detuning},
                 {"hopping", c.smft.hopping}, {"mu_over_g", c.smft.mu_over_g}, {"sweep", c.smft.sweep},
                 {"deltas", c.smft.deltas}, {"mu_min", c.smft.mu_min}, {"mu_max", c.smft.mu_max},
                 {"log10_a_min", c.smft.log10_a_min}, {"log10_a_max", c.smft.log10_a_max},
                 {"grid_mu", c.smft.grid_mu}, {"grid_A", c.smft.grid_A}, {"bins", c.smft.bins}};
    return j;
}

inline json parse_config_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::string msg = e.what();
        const auto p = msg.find("parse error at ");
        throw ConfigError(origin + ": " + detail::line_col(text, e.byte > 0 ? e.byte - 1 : 0) + ": " +
                          (p == std::string::npos ? msg : msg.substr(msg.find(':', p) + 2)));
    }
}

inline json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

/// Applies `a.b.c=value`; value is parsed as JSON and falls back to a plain string.
inline void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not of the form key=value");
    const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    json* node = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
        if (!node->is_object()) {
            if (!node->is_null()) throw ConfigError("override key '" + key + "' descends into a non-object");
            *node = json::object();
        }
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

struct Problem {
    enum class Level { error, warning } level;
    std::string message;
};

struct ValidationReport {
    std::vector<Problem> problems;
    double cost_flops = 0.0;  // grid points x dim^3
    long long grid_points = 0;
    long long max_dim = 0;

    bool ok() const {
        for (const auto& p : problems)
            if (p.level == Problem::Level::error) return false;
        return true;
    }
};

inline constexpr double kDeskBudgetDim = 5.0e4;

/// Schema-level and physics-level checks plus a dense-cost estimate; never throws.
inline ValidationReport validate(const ExperimentConfig& c) {
    ValidationReport r;
    auto err = [&](std::string m) { r.problems.push_back({Problem::Level::error, std::move(m)}); };
    auto warn = [&](std::string m) { r.problems.push_back({Problem::Level::warning, std::move(m)}); };
    auto cube = [](double d) { return d * d * d; };

    if (!is_experiment(c.experiment)) err("unknown experiment '" + c.experiment + "'");
    if (c.workers < 0) err("workers must be >= 0");
    if (c.model.n_max < 1) err("model.n_max must be >= 1");
    if (!(c.model.g > 0.0)) err("model.g must be > 0 (energies are measured in units of g)");
    const double local = 2.0 * (c.model.n_max + 1);

    if (c.experiment == "clean-two-site") {
        if (c.clean.grid_delta < 1 || c.clean.grid_A < 1) err("clean_two_site grids must have >= 1 point");
        if (c.model.n_max < 2) err("model.n_max must be >= 2 for the two-excitation sector");
        r.grid_points = static_cast<long long>(c.clean.grid_delta) * c.clean.grid_A;
        r.max_dim = static_cast<long long>(local * local);
        r.cost_flops = double(r.grid_points) * cube(9.0);
    } else if (c.experiment == "mf-phase-diagram") {
        if (c.mf.grid_mu < 1 || c.mf.grid_A < 1) err("mf grids must have >= 1 point");
        if (c.mf.cluster != "chain" && c.mf.cluster != "plaquette") err("mf.cluster must be 'chain' or 'plaquette'");
        if (c.mf.cluster_sites < 1) err("mf.cluster_sites must be >= 1");
        if (c.mf.z < 1) err("mf.z must be >= 1");
        if (!(c.mf.alpha_max > 0.0)) err("mf.alpha_max must be > 0");
        const int sites = c.mf.cluster == "plaquette" ? 4 : c.mf.cluster_sites;
        if (c.mf.cluster == "chain" && sites > 1 && c.mf.z < 2) err("mf.z must be >= 2 for a chain cluster");
        if (c.mf.cluster == "plaquette" && c.mf.z < 2) err("mf.z must be >= 2 for a plaquette cluster");
        const double dim = std::pow(local, sites);
        r.grid_points = static_cast<long long>(c.mf.grid_mu) * c.mf.grid_A;
        r.max_dim = static_cast<long long>(dim);
        r.cost_flops = double(r.grid_points) * 73.0 * cube(dim);
        if (dim > kDeskBudgetDim)
            warn("cluster dimension " + std::to_string(static_cast<long long>(local)) + "^" + std::to_string(sites) + " = " +
                 std::to_string(static_cast<long long>(dim)) + " exceeds the desk-scale budget");
    } else if (c.experiment == "disorder-ensemble") {
        try {
            parse_disorder_target(c.disorder.target);
        } catch (const std::exception& e) {
            err(std::string("disorder.target: ") + e.what());
        }
        for (double d : c.disorder.resolved_deltas())
            if (!(d >= 0.0)) err("disorder.deltas contains a negative width " + std::to_string(d));
        if (!(c.disorder.map_delta >= 0.0)) err("disorder.map_delta must be >= 0");
        if (c.disorder.n_samples < 1) err("disorder.n_samples must be >= 1");
        if (c.disorder.bins < 1) err("disorder.bins must be >= 1");
        if (c.disorder.mode != "delta" && c.disorder.mode != "map") err("disorder.mode must be 'delta' or 'map'");
        if (c.model.n_max < 2) err("model.n_max must be >= 2 for the two-excitation sector");
        const long long widths = c.disorder.mode == "map" ? static_cast<long long>(c.clean.grid_delta) * c.clean.grid_A
                                                          : static_cast<long long>(c.disorder.resolved_deltas().size());
        r.grid_points = widths * c.disorder.n_samples;
        r.max_dim = static_cast<long long>(local * local);
        r.cost_flops = double(r.grid_points) * cube(9.0);
    } else if (c.experiment == "smft-solve" || c.experiment == "smft-sweep") {
        try {
            c.smft.numerics.validate();
        } catch (const std::exception& e) {
            err(std::string("smft: ") + e.what());
        }
        try {
            parse_disorder_target(c.smft.target);
        } catch (const std::exception& e) {
            err(std::string("smft.target: ") + e.what());
        }
        if (!(c.smft.delta >= 0.0)) err("smft.delta must be >= 0");
        long long points = 1;
        if (c.experiment == "smft-sweep") {
            if (c.smft.sweep == "delta") {
                for (double d : c.smft.deltas)
                    if (!(d >= 0.0)) err("smft.deltas contains a negative width " + std::to_string(d));
                if (c.smft.deltas.empty()) err("smft.deltas must not be empty");
                points = static_cast<long long>(c.smft.deltas.size());
            } else if (c.smft.sweep == "map") {
                if (c.smft.grid_mu < 1 || c.smft.grid_A < 1) err("smft map grids must have >= 1 point");
                points = static_cast<long long>(c.smft.grid_mu) * c.smft.grid_A;
            } else {
                err("smft.sweep must be 'delta' or 'map'");
            }
        }
        if (c.smft.bins < 1) err("smft.bins must be >= 1");
        const double dim = 2.0 * (c.smft.numerics.n_max + 1);
        const double nodes = double(c.smft.numerics.quad_nodes) * c.smft.numerics.z * c.smft.numerics.n_grid;
        r.grid_points = points;
        r.max_dim = static_cast<long long>(dim);
        r.cost_flops = double(points) * nodes * cube(dim);
    }
    return r;
}

inline json report_to_json(const ValidationReport& r) {
    json probs = json::array();
    for (const auto& p : r.problems)
        probs.push_back({{"level", p.level == Problem::Level::error ? "error" : "warning"}, {"message", p.message}});
    return {{"ok", r.ok()},
            {"problems", probs},
            {"estimate", {{"grid_points", r.grid_points}, {"max_dimension", r.max_dim}, {"dense_flops", r.cost_flops}}}};
}

}  // namespace jch::cli
