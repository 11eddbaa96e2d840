// app.hpp: command-line front end: `run`, `validate`, `list-experiments`.
// Exit codes: 0 success, 2 configuration error, 3 runtime failure.

#pragma once

#include "jch/cli/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace jch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct CommandLine {
    std::string experiment;
    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<int> grid_a, grid_delta;
    std::optional<double> delta_detuning;
    std::vector<std::string> sets;
};

/// Merges file, flags and `--set` overrides (in that order) into a resolved config.
inline ExperimentConfig resolve_config(const CommandLine& cl) {
    json j = cl.config_path.empty() ? json::object() : load_config_file(cl.config_path);
    if (!j.is_object()) throw ConfigError("config root must be an object");
    if (!cl.experiment.empty()) j["experiment"] = cl.experiment;
    const std::string kind = j.contains("experiment") && j["experiment"].is_string() ? j["experiment"].get<std::string>() : "";
    if (cl.out) j["output"] = *cl.out;
    if (cl.seed) j["seed"] = *cl.seed;
    if (cl.workers) j["workers"] = *cl.workers;
    auto block_for_grid = [&]() -> std::string {
        if (kind == "clean-two-site" || kind == "disorder-ensemble") return "clean_two_site";
        if (kind == "mf-phase-diagram") return "mf";
        if (kind == "smft-sweep") return "smft";
        throw ConfigError("--grid-A does not apply to experiment '" + kind + "'");
    };
    if (cl.grid_a) apply_override(j, block_for_grid() + ".grid_A=" + std::to_string(*cl.grid_a));
    if (cl.grid_delta) {
        if (kind != "clean-two-site" && kind != "disorder-ensemble")
            throw ConfigError("--grid-delta does not apply to experiment '" + kind + "'");
        apply_override(j, "clean_two_site.grid_delta=" + std::to_string(*cl.grid_delta));
    }
    if (cl.delta_detuning) {
        const std::string v = format_number(*cl.delta_detuning);
        if (kind == "smft-solve" || kind == "smft-sweep") {
            apply_override(j, "smft.target=\"detuning\"");
            apply_override(j, (kind == "smft-solve" ? "smft.delta=" : "smft.deltas=[") + v + (kind == "smft-sweep" ? "]" : ""));
        } else if (kind == "disorder-ensemble") {
            apply_override(j, "disorder.target=\"detuning\"");
            apply_override(j, "disorder.deltas=[" + v + "]");
        } else {
            throw ConfigError("--delta-detuning does not apply to experiment '" + kind + "'");
        }
    }
    for (const auto& s : cl.sets) apply_override(j, s);
    auto cfg = config_from_json(j);
    if (cfg.experiment.empty()) throw ConfigError("no experiment given (positional argument or \"experiment\" key)");
    return cfg;
}

inline void print_report(const ValidationReport& r, std::ostream& os) {
    for (const auto& p : r.problems)
        os << (p.level == Problem::Level::error ? "error: " : "warning: ") << p.message << '\n';
}

/// Runs one experiment into cfg.output; returns an exit code.
inline int execute(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto report = validate(cfg);
    print_report(report, err);
    if (!report.ok()) return kExitConfig;
    RunContext ctx(cfg.output, cfg);
    ctx.echo_config();
    try {
        run_experiment(ctx);
    } catch (const ConfigError& e) {
        ctx.write_manifest(e.what());
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        ctx.write_manifest(e.what());
        err << "runtime failure: " << e.what() << " (partial artifacts kept in " << cfg.output << ")\n";
        return kExitRuntime;
    }
    ctx.write_manifest();
    out << "wrote " << cfg.output << "/manifest.json\n";
    return kExitOk;
}

inline int main(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Jaynes-Cummings-Hubbard lattice experiments"};
    app.require_subcommand(1);
    CommandLine cl;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("experiment", cl.experiment, "experiment kind (overrides the config file)");
        sub->add_option("--config", cl.config_path, "JSON configuration file");
        sub->add_option("--set", cl.sets, "dotted-key override, e.g. smft.z=4")->take_all();
        sub->add_option("--out", cl.out, "output directory");
        sub->add_option("--seed", cl.seed, "random seed");
        sub->add_option("--workers", cl.workers, "worker threads (0 = all cores)");
        sub->add_option("--grid-A", cl.grid_a, "points on the hopping axis");
        sub->add_option("--grid-delta", cl.grid_delta, "points on the detuning axis");
        sub->add_option("--delta-detuning", cl.delta_detuning, "detuning disorder width in units of g");
    };
    auto* run = app.add_subcommand("run", "run an experiment");
    add_common(run);
    auto* val = app.add_subcommand("validate", "check a configuration and estimate its cost");
    add_common(val);
    auto* list = app.add_subcommand("list-experiments", "list experiment kinds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (list->parsed()) {
        for (const auto& [k, d] : experiment_kinds()) out << k << "  " << d << '\n';
        return kExitOk;
    }
    ExperimentConfig cfg;
    try {
        cfg = resolve_config(cl);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    if (val->parsed()) {
        const auto report = validate(cfg);
        out << report_to_json(report).dump(2) << '\n';
        return report.ok() ? kExitOk : kExitConfig;
    }
    (void)run;
    return execute(cfg, out, err);
}

}  // namespace jch::cli
