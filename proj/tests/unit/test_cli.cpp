#include "jch/cli/app.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace jch;
using namespace jch::cli;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "jchsim");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("jchsim_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const fs::path& p) { return json::parse(read_file(p)); }

fs::path write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
    return p;
}

bool has_error(const ValidationReport& r) { return !r.ok(); }

bool has_warning(const ValidationReport& r) {
    for (const auto& p : r.problems)
        if (p.level == Problem::Level::warning) return true;
    return false;
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
    ExperimentConfig c;
    c.experiment = "smft-sweep";
    c.disorder.mean = 2.5;
    c.smft.deltas = {0.0, 0.3};
    const auto back = config_from_json(config_to_json(c));
    EXPECT_EQ(config_to_json(back).dump(), config_to_json(c).dump());
    EXPECT_EQ(back.disorder.mean.value(), 2.5);
}

TEST(Config, UnknownKeysAreRejectedWithPath) {
    try {
        config_from_json(json::parse(R"({"experiment":"smft-solve","smft":{"zz":4}})"));
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("smft.zz"), std::string::npos) << e.what();
    }
    EXPECT_THROW(config_from_json(json::parse(R"({"bogus":1})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"model":{"n_max":"six"}})")), ConfigError);
}

TEST(Config, ParseErrorsCarryLineAndColumn) {
    try {
        parse_config_text("{\n  \"seed\": 3,\n  \"workers\": ]\n}", "cfg.json");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("cfg.json: line 3, column"), std::string::npos) << e.what();
    }
}

TEST(Config, Overrides) {
    json j = json::object();
    apply_override(j, "smft.z=6");
    apply_override(j, "smft.target=coupling");
    apply_override(j, "disorder.deltas=[0.5,1]");
    apply_override(j, "experiment=smft-solve");
    const auto c = config_from_json(j);
    EXPECT_EQ(c.smft.numerics.z, 6);
    EXPECT_EQ(c.smft.target, "coupling");
    EXPECT_EQ(c.disorder.deltas, (std::vector<double>{0.5, 1.0}));
    EXPECT_THROW(apply_override(j, "novalue"), ConfigError);
    EXPECT_THROW(apply_override(j, "smft..z=1"), ConfigError);
    EXPECT_THROW(apply_override(j, "smft.z.x=1"), ConfigError);
}

TEST(Validate, Examples) {
    ExperimentConfig c;
    c.experiment = "disorder-ensemble";
    EXPECT_TRUE(validate(c).problems.empty());

    c.disorder.deltas = {0.5, -1.0};
    EXPECT_TRUE(has_error(validate(c)));

    ExperimentConfig mf;
    mf.experiment = "mf-phase-diagram";
    mf.model.n_max = 20;
    mf.mf.cluster = "plaquette";
    mf.mf.z = 4;
    const auto r = validate(mf);
    EXPECT_FALSE(has_error(r));
    EXPECT_TRUE(has_warning(r));
    EXPECT_EQ(r.max_dim, 42LL * 42 * 42 * 42);

    ExperimentConfig bad;
    bad.experiment = "nope";
    EXPECT_TRUE(has_error(validate(bad)));
    ExperimentConfig s;
    s.experiment = "smft-solve";
    s.smft.delta = -0.1;
    EXPECT_TRUE(has_error(validate(s)));
}

TEST(App, ListAndValidateExitCodes) {
    const auto list = run_cli({"list-experiments"});
    EXPECT_EQ(list.code, kExitOk);
    for (const auto& [k, d] : experiment_kinds()) EXPECT_NE(list.out.find(k), std::string::npos);

    auto dir = scratch("validate");
    const auto good = run_cli({"validate", "smft-solve"});
    EXPECT_EQ(good.code, kExitOk);
    EXPECT_TRUE(json::parse(good.out)["problems"].empty());

    const auto neg = run_cli({"validate", "disorder-ensemble", "--set", "disorder.deltas=[-1]"});
    EXPECT_EQ(neg.code, kExitConfig);

    const auto cfg = write_file(dir / "bad.json", "{\"experiment\": \"smft-solve\", \"smft\": {\"nope\": 1}}");
    EXPECT_EQ(run_cli({"run", "--config", cfg.string(), "--out", (dir / "o").string()}).code, kExitConfig);
    const auto broken = write_file(dir / "broken.json", "{\n\"seed\": }");
    const auto b = run_cli({"run", "--config", broken.string()});
    EXPECT_EQ(b.code, kExitConfig);
    EXPECT_NE(b.err.find("line 2, column"), std::string::npos) << b.err;
    EXPECT_EQ(run_cli({"run"}).code, kExitConfig);
    EXPECT_EQ(run_cli({"run", "mf-phase-diagram", "--grid-delta", "3"}).code, kExitConfig);
    EXPECT_EQ(run_cli({"frobnicate"}).code, kExitConfig);
}

TEST(App, CleanTwoSiteArtifacts) {
    const auto dir = scratch("clean");
    const auto r = run_cli({"run", "clean-two-site", "--grid-A", "3", "--grid-delta", "4", "--out", dir.string(), "--set",
                            "model.n_max=3"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    for (const char* f : {"config.echo", "manifest.json", "clean_two_site.csv", "map_site_site.csv", "map_in_site.csv",
                          "map_atom_atom.csv"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    const auto m = read_json(dir / "manifest.json");
    EXPECT_EQ(m["status"], "ok");
    EXPECT_EQ(m["experiment"], "clean-two-site");
    for (const auto& f : m["files"]) EXPECT_EQ(f["sha256"].get<std::string>(), sha256_file(dir / f["name"].get<std::string>()));
    const auto echo = config_from_json(read_json(dir / "config.echo"));
    EXPECT_EQ(echo.clean.grid_A, 3);
    EXPECT_EQ(echo.model.n_max, 3);
    // header + 12 rows
    const auto csv = read_file(dir / "map_site_site.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 13);
}

TEST(App, DeterministicAcrossWorkerCounts) {
    std::map<std::string, std::string> first;
    for (int w : {1, 2}) {
        const auto dir = scratch("det" + std::to_string(w));
        const auto r = run_cli({"run", "disorder-ensemble", "--out", dir.string(), "--workers", std::to_string(w), "--seed", "9",
                                "--set", "disorder.n_samples=150", "--set", "disorder.deltas=[0.5,3]", "--set", "model.n_max=3"});
        ASSERT_EQ(r.code, kExitOk) << r.err;
        const auto m = read_json(dir / "manifest.json");
        for (const auto& f : m["files"]) {
            const std::string name = f["name"];
            if (name.size() < 4 || name.substr(name.size() - 4) != ".csv") continue;
            if (w == 1)
                first[name] = f["sha256"];
            else
                EXPECT_EQ(first.at(name), f["sha256"].get<std::string>()) << name;
        }
    }
    EXPECT_GE(first.size(), 5u);
}

TEST(App, SmftSolveMatchesMeanField) {
    const auto dir = scratch("smft");
    const auto r = run_cli({"run", "smft-solve", "--delta-detuning", "0", "--out", dir.string(), "--set", "smft.hopping=0.05",
                            "--set", "smft.mu_over_g=-0.9"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto s = read_json(dir / "summary.json");
    ClusterSetup mf;
    mf.cluster = LatticeSpec::single_site(4);
    mf.n_max = 20;
    const double alpha = solve_self_consistent(mf.problem(-0.9, 0.05)).alpha;
    EXPECT_LT(std::abs(s["mean_alpha"].get<double>() - alpha), 1e-3);
    EXPECT_TRUE(s["converged"].get<bool>());
}

TEST(App, RuntimeFailureKeepsPartialArtifacts) {
    const auto dir = scratch("fail");
    // alpha* beyond the eta grid edge trips the aliasing guard
    const auto r = run_cli({"run", "smft-solve", "--out", dir.string(), "--set", "smft.hopping=0.05", "--set", "smft.mu_over_g=-0.5",
                            "--set", "smft.alpha_max=0.5", "--set", "smft.n_max=12", "--set", "smft.n_grid=64"});
    EXPECT_EQ(r.code, kExitRuntime) << r.err;
    const auto m = read_json(dir / "manifest.json");
    EXPECT_EQ(m["status"], "failed");
    EXPECT_TRUE(m.contains("error"));
    EXPECT_TRUE(fs::exists(dir / "config.echo"));
}
