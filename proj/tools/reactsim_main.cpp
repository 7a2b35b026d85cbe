#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "reactsim/reactsim.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string output_path;
    int workers = 0;  // 0 means hardware concurrency
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_workers) {
    cmd->add_option("--config", opts.config_path, "path to the JSON run configuration")
        ->required();
    cmd->add_option("--seed", opts.seed, "override the config's RNG seed");
    cmd->add_option("--output", opts.output_path, "output CSV path (default: stdout)");
    if (with_workers) {
        cmd->add_option("--workers", opts.workers,
                        "worker threads for path simulation (default: hardware)");
    }
}

int load_and_run(const CommonOptions& opts,
                 const std::function<int(const reactsim::RunConfig&, std::ostream&)>& run) {
    reactsim::RunConfig cfg;
    try {
        std::ifstream in(opts.config_path);
        if (!in) {
            std::cerr << "error: cannot open config file '" << opts.config_path << "'\n";
            return reactsim::exit_failure;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        cfg = reactsim::parse_config(buf.str());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return reactsim::exit_failure;
    }
    if (opts.seed.has_value()) cfg.sim.seed = *opts.seed;

    // --output beats the config's output field; empty means stdout
    const std::string out_path = !opts.output_path.empty() ? opts.output_path : cfg.output_path;
    try {
        if (out_path.empty()) {
            return run(cfg, std::cout);
        }
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot open output file '" << out_path << "'\n";
            return reactsim::exit_failure;
        }
        const int code = run(cfg, out);
        out.flush();
        if (!out) {
            std::cerr << "error: write to '" << out_path << "' failed\n";
            return reactsim::exit_failure;
        }
        return code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return reactsim::exit_failure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "reactsim: thresholds and Monte Carlo verification for the "
        "interval-parameterized jump-diffusion reaction model"};
    app.require_subcommand(1);

    CommonOptions thresholds_opts, simulate_opts, verify_opts, sweep_opts;
    CLI::App* thresholds =
        app.add_subcommand("thresholds", "closed-form threshold report per imprecision level");
    add_common(thresholds, thresholds_opts, false);
    CLI::App* simulate = app.add_subcommand("simulate", "single-path trace at one level");
    add_common(simulate, simulate_opts, false);
    CLI::App* verify =
        app.add_subcommand("verify", "ensemble verification of the predicted regime");
    add_common(verify, verify_opts, true);
    CLI::App* sweep = app.add_subcommand("sweep", "verification across an imprecision grid");
    add_common(sweep, sweep_opts, true);

    CLI11_PARSE(app, argc, argv);

    if (thresholds->parsed()) {
        return load_and_run(thresholds_opts, [](const reactsim::RunConfig& cfg, std::ostream& out) {
            return reactsim::cmd_thresholds(cfg, out);
        });
    }
    if (simulate->parsed()) {
        return load_and_run(simulate_opts, [](const reactsim::RunConfig& cfg, std::ostream& out) {
            return reactsim::cmd_simulate(cfg, out);
        });
    }
    if (verify->parsed()) {
        return load_and_run(verify_opts, [&](const reactsim::RunConfig& cfg, std::ostream& out) {
            return reactsim::cmd_verify(cfg, out, verify_opts.workers);
        });
    }
    return load_and_run(sweep_opts, [&](const reactsim::RunConfig& cfg, std::ostream& out) {
        return reactsim::cmd_sweep(cfg, out, sweep_opts.workers);
    });
}
