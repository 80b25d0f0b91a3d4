// Command-line front end: run single experiments, parameter sweeps, or the
// verification suite.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "plr/config.hpp"
#include "plr/experiment.hpp"
#include "verify/acceptance.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw plr::InvalidConfigError("cannot parse sweep value: " + item);
        }
    }
    return out;
}

// Precedence: --output-dir flag, PLREFINE_OUTPUT_DIR, config output_dir.
std::filesystem::path resolve_output_dir(const std::string& flag_dir,
                                         const plr::RunConfig& cfg) {
    if (!flag_dir.empty()) return flag_dir;
    if (const char* env = std::getenv("PLREFINE_OUTPUT_DIR"); env && *env) return env;
    if (!cfg.output_dir.empty()) return cfg.output_dir;
    throw plr::InvalidConfigError(
        "missing required field: output_dir (or pass --output-dir)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"streaming pseudo-label refinement engine"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    std::string sweep_param;
    std::string sweep_values;

    CLI::App* run = app.add_subcommand("run", "run one experiment from a config file");
    run->add_option("config", config_path, "JSON config path")->required();
    run->add_option("--output-dir", output_dir, "override the config's output_dir");

    CLI::App* sweep = app.add_subcommand("sweep", "run the config once per parameter value");
    sweep->add_option("config", config_path, "JSON config path")->required();
    sweep->add_option("--param", sweep_param, "n, alpha, d, tau, H, lambda_dual or target_temp_mult")
        ->required();
    sweep->add_option("--values", sweep_values, "comma-separated values")->required();
    sweep->add_option("--output-dir", output_dir, "override the config's output_dir");

    CLI::App* verify = app.add_subcommand("verify", "run the acceptance checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const plr::RunConfig cfg = plr::RunConfig::load_file(config_path);
            const auto dir = resolve_output_dir(output_dir, cfg);
            try {
                plr::run_experiment(cfg, dir, &std::cout);
            } catch (const plr::InvalidConfigError&) {
                throw;
            } catch (const std::exception& e) {
                std::cerr << "runtime error: " << e.what() << "\n";
                return kExitRuntimeError;
            }
            return kExitOk;
        }
        if (sweep->parsed()) {
            const plr::RunConfig cfg = plr::RunConfig::load_file(config_path);
            const auto values = parse_values(sweep_values);
            if (values.empty())
                throw plr::InvalidConfigError("sweep --values must be non-empty");
            const auto dir = resolve_output_dir(output_dir, cfg);
            // Validate the parameter name before any run starts.
            plr::apply_sweep_param(cfg, sweep_param, values.front());
            try {
                plr::run_sweep(cfg, sweep_param, values, dir, &std::cout);
            } catch (const plr::InvalidConfigError&) {
                throw;
            } catch (const std::exception& e) {
                std::cerr << "runtime error: " << e.what() << "\n";
                return kExitRuntimeError;
            }
            return kExitOk;
        }
        if (verify->parsed()) {
            const auto results = plr::verify::run_all(&std::cout);
            return plr::verify::all_passed(results) ? kExitOk : kExitConfigError;
        }
    } catch (const plr::InvalidConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return kExitOk;
}
