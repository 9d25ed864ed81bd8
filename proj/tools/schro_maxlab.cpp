#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "maxlab/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"schro_maxlab: numerical laboratory for fractional Schrodinger means"};
    app.require_subcommand(1);

    auto* list_cmd = app.add_subcommand("list", "list experiments and the claims they exercise");

    std::string config_path;
    maxlab::RunOptions opt;
    auto* run_cmd = app.add_subcommand("run", "run one experiment from a JSON config");
    run_cmd->add_option("config", config_path, "JSON config file")->required();
    run_cmd->add_option("--out", opt.out_dir, "output directory (default .)");
    run_cmd->add_option("--threads", opt.threads, "worker thread cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e); // prints help text or the usage error
        return code == 0 ? 0 : 1;
    }

    try {
        if (*list_cmd) {
            for (const auto& info : maxlab::list_experiments())
                std::printf("%s → %s\n", info.name.c_str(), info.statement.c_str());
            return 0;
        }
        maxlab::RunResult res = maxlab::run_experiment(maxlab::load_config(config_path), opt);
        std::printf("wrote %s\nwrote %s\n", res.csv_path.c_str(), res.summary_path.c_str());
        if (!res.checks_passed) std::fprintf(stderr, "one or more checks failed\n");
        return res.exit_code;
    } catch (const maxlab::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
