// Command-line front end for the racetrack agglomeration model.
//
//   racetrack simulate  [--config FILE] [--sigma S --tau T ...]
//   racetrack spectrum  [--config FILE] [--n-max N]
//   racetrack sweep     --axis tau --values 0.1,0.4,0.95 [--config FILE]
//   racetrack validate  [--config FILE]

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "racetrack/cli_io.hpp"

namespace {

using racetrack::ConfigOverrides;
using racetrack::RunConfig;

struct CommonArgs {
    std::string config_path;
    ConfigOverrides overrides;
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Config file (key=value or JSON)");
    static const std::vector<std::string> keys = {
        "mu", "sigma", "tau", "F", "Phi", "I", "dt", "epsilon", "max_steps",
        "min_steps", "snapshot_stride", "seed", "seeds", "amplitude", "kappa",
        "n_max", "out_dir", "format"};
    for (const auto& key : keys) {
        std::string flag = "--" + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        cmd->add_option_function<std::string>(
            flag, [&args, key](const std::string& v) { args.overrides[key] = v; },
            "Override config key " + key);
    }
}

RunConfig resolve_config(const CommonArgs& args) {
    RunConfig config;
    if (!args.config_path.empty()) {
        config = racetrack::load_config(args.config_path);
    }
    // precedence: explicit flags > environment > config file > defaults
    if (const char* dir = std::getenv("RACETRACK_OUT_DIR"); dir && *dir) {
        config.out_dir = dir;
    }
    racetrack::apply_overrides(config, args.overrides);
    return config;
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuous racetrack economy: equilibrium, replicator dynamics, "
                 "linear stability and spike-count experiments"};
    app.require_subcommand(1);

    CommonArgs sim_args, spec_args, sweep_args, val_args;
    std::string axis_name = "tau";
    std::string axis_values_csv;

    auto* sim = app.add_subcommand("simulate", "Integrate to a stationary profile");
    add_common_options(sim, sim_args);
    auto* spec = app.add_subcommand("spectrum", "Closed-form stability spectrum of the flat state");
    add_common_options(spec, spec_args);
    auto* swp = app.add_subcommand("sweep", "Max-spike-count sweep over sigma, tau or Phi");
    add_common_options(swp, sweep_args);
    swp->add_option("--axis", axis_name, "Swept parameter: sigma | tau | Phi")->required();
    swp->add_option("--values", axis_values_csv, "Comma-separated axis values")->required();
    auto* val = app.add_subcommand("validate", "Linear vs nonlinear growth-rate self-test");
    add_common_options(val, val_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            return racetrack::cmd_simulate(resolve_config(sim_args), std::cout);
        }
        if (spec->parsed()) {
            return racetrack::cmd_spectrum(resolve_config(spec_args), std::cout);
        }
        if (swp->parsed()) {
            const auto values = parse_values(axis_values_csv);
            if (values.empty()) {
                std::cerr << "error: --values is empty\n";
                return racetrack::exit_invalid_input;
            }
            return racetrack::cmd_sweep(resolve_config(sweep_args), axis_name, values,
                                        std::cout);
        }
        if (val->parsed()) {
            return racetrack::cmd_validate(resolve_config(val_args), std::cout);
        }
    } catch (const racetrack::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return racetrack::exit_invalid_input;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return racetrack::exit_invalid_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return racetrack::exit_numerical_failure;
    }
    return racetrack::exit_invalid_input;
}
