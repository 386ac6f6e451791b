#ifndef RACETRACK_ANALYSIS_HPP
#define RACETRACK_ANALYSIS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "racetrack/dynamics.hpp"
#include "racetrack/stability.hpp"

namespace racetrack {

struct Spike {
    int center;   // node index of the run's maximum
    double peak;  // lambda at that node
    double mass;  // dx * sum of lambda over the run
};

struct SpikeReport {
    int spike_count = 0;
    std::vector<Spike> spikes;
    double kappa = 2.0;
    double background_mass = 0.0;
};

/// A spike is a maximal circularly-contiguous run of nodes with
/// lambda_i > kappa * lambda_bar. Runs wrapping the seam count once.
SpikeReport count_spikes(const Grid& grid, const Field& lambda_star, double kappa);

/// Variant guarding against accidental use on non-stationary profiles.
SpikeReport count_spikes(const Grid& grid, const SimulationResult& result, double kappa,
                         bool allow_unconverged = false);

struct SeedOutcome {
    std::uint64_t seed;
    int spike_count;  // -1 when not converged
    bool converged;
    long steps;
};

struct MaxSpikeResult {
    int max_count;  // over converged seeds only
    std::vector<SeedOutcome> per_seed;
    std::optional<SimulationResult> best_run;  // a converged run attaining the max
};

MaxSpikeResult max_spike_count(const ModelParams& params, const Kernel& kernel,
                               const Grid& grid, const IntegratorConfig& config,
                               const std::vector<std::uint64_t>& seeds, double kappa,
                               double amplitude);

/// Seeds lambda = lambda_bar*(1 + amplitude*cos(n x)), integrates to the
/// horizon, and least-squares fits the log-magnitude slope of the n-th
/// Fourier coefficient while it stays below 100x its initial value.
double measure_mode_growth(const ModelParams& params, const Kernel& kernel, const Grid& grid,
                           int n, double amplitude, double horizon, double dt = 0.01);

enum class SweepAxis { sigma, tau, Phi };

SweepAxis sweep_axis_from_name(const std::string& name);
std::string to_string(SweepAxis axis);

struct SweepPoint {
    double axis_value;
    ModelParams params;
    bool params_valid = false;
    std::string error;  // nonempty when the point failed outright
    int max_spikes = -1;
    std::vector<SeedOutcome> per_seed;
    int fastest_mode = 0;
    int n_tilde = -1;
    bool nbh = false;
    std::optional<SimulationResult> best_run;
};

struct SweepResult {
    SweepAxis axis;
    std::vector<SweepPoint> points;
};

struct SweepSpec {
    SweepAxis axis = SweepAxis::tau;
    std::vector<double> values;
    std::vector<std::uint64_t> seeds;
    double kappa = 2.0;
    double amplitude = 0.01;
    int n_max = 64;
    int threads = 0;  // 0 = hardware concurrency
};

/// Runs max_spike_count plus the linear-spectrum summary at every axis point.
/// Per-point failures are recorded and the sweep continues. Execution may be
/// parallel over (point, seed); assembly order is deterministic.
SweepResult sweep(const ModelParams& base, const Grid& grid, const IntegratorConfig& config,
                  const SweepSpec& spec);

}  // namespace racetrack

#endif
