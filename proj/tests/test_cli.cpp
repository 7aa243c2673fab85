#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rel_euler/cli.hpp"

using namespace rel_euler;
using namespace rel_euler::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("rel_euler_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Config, DefaultsValidate) {
    const auto d = validate(default_config(), schema());
    EXPECT_TRUE(d.empty()) << (d.empty() ? "" : d.front());
}

TEST(Config, EveryToleranceHasADefault) {
    const json tol = schema()["properties"]["tolerances"]["properties"];
    const json def = default_config()["tolerances"];
    for (const auto& [k, v] : tol.items()) EXPECT_TRUE(def.contains(k)) << k;
    for (const auto& [k, v] : def.items()) EXPECT_TRUE(tol.contains(k)) << k;
}

TEST(Config, Diagnostics) {
    json c = default_config();
    c["grid"]["n"] = 2;
    c["bogus"] = 1;
    c["vartheta"] = 0.5;
    const auto d = validate(c, schema());
    auto has = [&](const std::string& prefix) {
        for (const auto& s : d)
            if (s.rfind(prefix, 0) == 0) return true;
        return false;
    };
    EXPECT_TRUE(has("/grid/n"));
    EXPECT_TRUE(has("/vartheta"));
    EXPECT_TRUE(has("/: unknown key 'bogus'"));
    EXPECT_EQ(d.size(), 3u);
}

TEST(Config, MergeKeepsUnspecified) {
    const json m = merge(default_config(), json{{"grid", {{"n", 16}}}});
    EXPECT_EQ(m["grid"]["n"], 16);
    EXPECT_EQ(m["grid"]["dim"], default_config()["grid"]["dim"]);
}

TEST(Config, LoadErrors) {
    const auto dir = scratch("load");
    EXPECT_THROW(load_config((dir / "missing.json").string()), ConfigError);
    std::ofstream(dir / "bad.json") << "{ not json";
    EXPECT_THROW(load_config((dir / "bad.json").string()), ConfigError);
    std::ofstream(dir / "unknown.json") << R"({"grid": {"n": 16, "colour": 3}})";
    try {
        load_config((dir / "unknown.json").string());
        FAIL();
    } catch (const ConfigError& e) {
        ASSERT_FALSE(e.diagnostics.empty());
        EXPECT_NE(e.diagnostics.front().find("/grid"), std::string::npos);
    }
}

TEST(Checks, Relations) {
    EXPECT_TRUE(check_le("a", "x", 1.0, 1.0).pass);
    EXPECT_FALSE(check_le("a", "x", NAN, 1.0).pass);
    EXPECT_FALSE(check_ge("a", "x", NAN, 1.0).pass);
    EXPECT_TRUE(check_ge("a", "x", 2.0, 1.0).pass);
    const json j = to_json(check_le("a", "x", 0.5, 1.0));
    EXPECT_EQ(j["relation"], "<=");
    EXPECT_EQ(j["pass"], true);
}

TEST(Cli, JetVerifyExample) {
    const auto dir = scratch("jet");
    const int rc = run({"jet-verify", "--order", "2", "--count", "100", "--identities", "WTe-h,CEQ", "--seed", "7",
                        "--output-dir", dir.string()});
    EXPECT_EQ(rc, 0);
    const json r = read_json(dir / "report.json");
    EXPECT_EQ(r["exit_code"], 0);
    EXPECT_EQ(r["passed"], true);
    EXPECT_EQ(r["command"], "jet-verify");
    ASSERT_GE(r["checks"].size(), 2u);
    for (const auto& c : r["checks"]) EXPECT_LE(c["value"].get<double>(), 1e-9);
}

TEST(Cli, JetVerifyTooLowOrderIsUsageError) {
    const auto dir = scratch("jet_low");
    EXPECT_EQ(run({"jet-verify", "--order", "2", "--identities", "SDe", "--output-dir", dir.string()}), 2);
    EXPECT_EQ(read_json(dir / "report.json")["exit_code"], 2);
}

TEST(Cli, SimulateRestState) {
    const auto dir = scratch("rest");
    std::ofstream(dir / "rest.json") << R"({"grid": {"dim": 1, "n": 16},
        "run": {"t_max": 0.5},
        "initial": {"kind": "constant", "rho": 0.25, "velocity": [0, 0, 0]}})";
    const auto out = dir / "out";
    EXPECT_EQ(run({"simulate", "--config", (dir / "rest.json").string(), "--output-dir", out.string()}), 0);
    EXPECT_TRUE(fs::exists(out / "diagnostics.csv"));
    EXPECT_TRUE(fs::exists(out / "snapshots" / "snap_0000.bin"));
    const auto snap = read_snapshot((out / "snapshots" / "snap_0000.bin").string());
    const auto last = from_snapshot(snap, 2.0);
    for (double x : last.u[1]) EXPECT_EQ(x, 0.0);
}

TEST(Cli, ConfigErrorsExitTwo) {
    const auto dir = scratch("errors");
    EXPECT_EQ(run({"simulate", "--config", (dir / "nope.json").string(), "--output-dir", dir.string()}), 2);
    const json r = read_json(dir / "report.json");
    EXPECT_EQ(r["exit_code"], 2);
    std::ofstream(dir / "unknown.json") << R"({"gird": {}})";
    EXPECT_EQ(run({"simulate", "--config", (dir / "unknown.json").string(), "--output-dir", dir.string()}), 2);
    EXPECT_EQ(run({"no-such-command"}), 2);
    EXPECT_EQ(run({"jet-verify", "--order", "9", "--output-dir", dir.string()}), 2);
}

TEST(Cli, DeterministicReports) {
    const auto a = scratch("det_a"), b = scratch("det_b");
    for (const auto& d : {a, b})
        EXPECT_EQ(run({"probe", "--count", "5", "--resolution", "32", "--seed", "3", "--output-dir", d.string()}), 0);
    // identical apart from the output directory echoed in the config
    json ra = read_json(a / "report.json"), rb = read_json(b / "report.json");
    ra["config"].erase("output_dir");
    rb["config"].erase("output_dir");
    EXPECT_EQ(ra.dump(), rb.dump());
}

TEST(Cli, DuhamelRuns) {
    const auto dir = scratch("duhamel");
    std::ofstream(dir / "d.json") << R"({"duhamel": {"dim": 1, "n": 16, "steps": [16, 32]}})";
    EXPECT_EQ(run({"duhamel", "--config", (dir / "d.json").string(), "--output-dir", dir.string()}), 0);
    EXPECT_TRUE(read_json(dir / "report.json")["data"].contains("duhamel"));
}
