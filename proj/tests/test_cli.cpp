#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "maxlab/experiments.hpp"
#include "maxlab/io.hpp"

using namespace maxlab;
namespace fs = std::filesystem;
namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("maxlab_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_config(const fs::path& dir, const std::string& name,
                         const std::string& body) {
    fs::path p = dir / name;
    std::ofstream out(p);
    out << body;
    return p.string();
}

} // namespace

TEST_CASE("experiment registry names every runner with its claim") {
    auto infos = list_experiments();
    CHECK(infos.size() == 9);
    bool max_ok = false, ctr_ok = false;
    for (const auto& e : infos) {
        CHECK(!e.name.empty());
        CHECK(!e.statement.empty());
        if (e.name == "maximal") max_ok = e.statement.find("Theorem 4") != std::string::npos;
        if (e.name == "counterexample")
            ctr_ok = e.statement.find("Theorem 7") != std::string::npos;
    }
    CHECK(max_ok);
    CHECK(ctr_ok);
}

TEST_CASE("format_double round-trips every double through text") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 1.0,
                     0x1p-1074, 3.141592653589793}) {
        std::string text = format_double(v);
        double back = std::strtod(text.c_str(), nullptr);
        CHECK(std::memcmp(&back, &v, sizeof v) == 0);
    }
    CHECK(format_double(-0.0) == "-0");
    CHECK(format_double(42.0) == "42");
}

TEST_CASE("csv_escape quotes exactly the fields that need it") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("load_config rejects bad files with messages that name the problem") {
    fs::path dir = fresh_dir("cfg");

    CHECK_THROWS_AS(load_config((dir / "missing.json").string()), ConfigError);

    std::string bad_json = write_config(dir, "bad.json", "{ not json");
    CHECK_THROWS_AS(load_config(bad_json), ConfigError);

    std::string no_name = write_config(dir, "noname.json", R"({"a": 2.0})");
    CHECK_THROWS_AS(load_config(no_name), ConfigError);

    std::string unknown_exp =
        write_config(dir, "unknown.json", R"({"experiment": "warp_drive"})");
    bool threw = false;
    try {
        load_config(unknown_exp);
    } catch (const ConfigError& e) {
        threw = true;
        CHECK(std::string(e.what()).find("warp_drive") != std::string::npos);
    }
    CHECK(threw);

    std::string stray = write_config(dir, "stray.json",
                                     R"({"experiment": "exponents", "bogus_knob": 1})");
    threw = false;
    try {
        RunOptions opt;
        opt.out_dir = (dir / "out_stray").string();
        run_experiment(load_config(stray), opt);
    } catch (const ConfigError& e) {
        threw = true;
        CHECK(std::string(e.what()).find("bogus_knob") != std::string::npos);
    }
    CHECK(threw);

    // unknown keys inside the time-set object are caught too
    std::string nested = write_config(
        dir, "nested.json",
        R"({"experiment": "covernum", "set": {"type": "cantor", "lambda": 0.25, "level": 4, "spin": 3}})");
    threw = false;
    try {
        RunOptions opt;
        opt.out_dir = (dir / "out").string();
        run_experiment(load_config(nested), opt);
    } catch (const ConfigError& e) {
        threw = true;
        CHECK(std::string(e.what()).find("spin") != std::string::npos);
    }
    CHECK(threw);
}

TEST_CASE("a fixed config always produces byte-identical CSV output") {
    fs::path dir = fresh_dir("det");
    std::string cfg = write_config(dir, "suffsum.json", R"({
        "experiment": "suffsum",
        "set": {"type": "cantor", "lambda": 0.3333333333333333, "level": 6},
        "s": 0.7, "a": 2.0, "m_max": 9
    })");
    RunOptions o1, o2;
    o1.out_dir = (dir / "one").string();
    o2.out_dir = (dir / "two").string();
    RunResult r1 = run_experiment(load_config(cfg), o1);
    RunResult r2 = run_experiment(load_config(cfg), o2);
    CHECK(r1.exit_code == 0);
    CHECK(r1.checks_passed);
    std::string c1 = slurp(r1.csv_path), c2 = slurp(r2.csv_path);
    CHECK(!c1.empty());
    CHECK(c1 == c2);
    CHECK(c1.find("partial_sum") != std::string::npos);

    // summaries agree except for the volatile provenance timestamp
    auto s1 = nlohmann::json::parse(slurp(r1.summary_path));
    auto s2 = nlohmann::json::parse(slurp(r2.summary_path));
    s1["provenance"].erase("timestamp");
    s2["provenance"].erase("timestamp");
    CHECK(s1 == s2);
    CHECK(s1["passed"].get<bool>());
}

TEST_CASE("cantor_endpoints time sets drop t = 0 and keep the rest") {
    fs::path dir = fresh_dir("cep");
    std::string cfg = write_config(dir, "cn.json", R"({
        "experiment": "covernum",
        "set": {"type": "cantor_endpoints", "lambda": 0.3333333333333333, "level": 2},
        "m_max": 6
    })");
    RunOptions opt;
    opt.out_dir = (dir / "out").string();
    RunResult r = run_experiment(load_config(cfg), opt);
    CHECK(r.exit_code == 0);
    // 2^{level+1} endpoints, minus the origin: stored in the summary grid echo
    auto s = nlohmann::json::parse(slurp(r.summary_path));
    CHECK(s["config"]["set"]["type"] == "cantor_endpoints");
    // the covering numbers of the endpoint set at the Cantor scales
    std::string csv = slurp(r.csv_path);
    CHECK(csv.find("covering_number") != std::string::npos);
}

TEST_CASE("runner exit codes: clean pass and failing check") {
    fs::path dir = fresh_dir("exit");
    std::string ok = write_config(dir, "ok.json", R"({
        "experiment": "exponents", "a": 2.0, "s": 0.5, "n": 1
    })");
    RunOptions opt;
    opt.out_dir = (dir / "out_ok").string();
    RunResult r = run_experiment(load_config(ok), opt);
    CHECK(r.exit_code == 0);
    CHECK(r.checks_passed);

    // truncation growth is strictly positive, so a zero tolerance must fail
    std::string fail_cfg = write_config(dir, "fail.json", R"({
        "experiment": "theorem3",
        "mode_bound": 8, "trials": 3, "j_lo": 3, "j_hi": 5, "growth_tol": 0.0
    })");
    RunOptions opt2;
    opt2.out_dir = (dir / "out_fail").string();
    RunResult rf = run_experiment(load_config(fail_cfg), opt2);
    CHECK(rf.exit_code == 2);
    CHECK(!rf.checks_passed);
    auto s = nlohmann::json::parse(slurp(rf.summary_path));
    CHECK(!s["passed"].get<bool>());
    bool saw_failed_check = false;
    for (const auto& chk : s["checks"])
        if (!chk["passed"].get<bool>()) saw_failed_check = true;
    CHECK(saw_failed_check);
}

TEST_CASE("propagate runner validates its identities end to end") {
    fs::path dir = fresh_dir("prop");
    std::string cfg = write_config(dir, "p.json", R"({
        "experiment": "propagate", "mode_bound": 8, "trials": 3, "seed": 7
    })");
    RunOptions opt;
    opt.out_dir = (dir / "out").string();
    RunResult r = run_experiment(load_config(cfg), opt);
    CHECK(r.exit_code == 0);
    auto s = nlohmann::json::parse(slurp(r.summary_path));
    for (const auto& chk : s["checks"]) CHECK(chk["passed"].get<bool>());
    CHECK(s["provenance"].contains("grid"));
}
