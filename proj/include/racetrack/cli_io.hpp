#ifndef RACETRACK_CLI_IO_HPP
#define RACETRACK_CLI_IO_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "racetrack/analysis.hpp"

namespace racetrack {

// Exit code contract, stable for scripting.
inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid_input = 1;
inline constexpr int exit_not_converged = 2;
inline constexpr int exit_numerical_failure = 3;

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    ModelParams params;
    IntegratorConfig integrator;
    int grid_size = 256;
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds;  // empty -> 10 consecutive from `seed`
    double amplitude = 0.01;
    double kappa = 2.0;
    int n_max = 64;
    std::string out_dir = ".";
    std::string format = "csv";  // csv | json | both

    void validate() const;
    std::vector<std::uint64_t> seed_list() const;
};

/// Loads key=value or JSON (chosen by content) and validates. Unknown keys
/// are rejected with the offending key named.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text);

/// Re-emits a config as the flat key=value format; load(parse(emit(c))) == c.
std::string emit_config(const RunConfig& config);

/// Flag overrides collected by the CLI, applied after the file is loaded.
using ConfigOverrides = std::map<std::string, std::string>;
void apply_overrides(RunConfig& config, const ConfigOverrides& overrides);

// Plot-ready emission. All numeric columns carry 17 significant digits.
std::string format_full(double v);
void write_profile_csv(const std::filesystem::path& path, const Grid& grid,
                       const Field& lambda, const Field& w, const Field& G,
                       const Field& omega);
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& spectrum);
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result);

// Subcommand entry points; the CLI binary is a thin dispatcher over these.
int cmd_simulate(const RunConfig& config, std::ostream& log);
int cmd_spectrum(const RunConfig& config, std::ostream& log);
int cmd_sweep(const RunConfig& config, const std::string& axis_name,
              const std::vector<double>& axis_values, std::ostream& log);
int cmd_validate(const RunConfig& config, std::ostream& log);

}  // namespace racetrack

#endif
