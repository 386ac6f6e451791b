#include "racetrack/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <future>
#include <thread>

namespace racetrack {

SpikeReport count_spikes(const Grid& grid, const Field& lambda_star, double kappa) {
    if (!(kappa > 1.0)) throw std::invalid_argument("count_spikes: kappa must be > 1");
    if (static_cast<int>(lambda_star.size()) != grid.node_count) {
        throw std::invalid_argument("count_spikes: length mismatch");
    }
    const int n = grid.node_count;
    const double threshold = kappa * ModelParams::lambda_bar;

    SpikeReport report;
    report.kappa = kappa;

    std::vector<bool> above(n);
    int first_below = -1;
    for (int i = 0; i < n; ++i) {
        above[i] = lambda_star[i] > threshold;
        if (!above[i] && first_below < 0) first_below = i;
    }
    if (first_below < 0) {
        // everything above threshold: one run wrapping the whole circle
        Spike s{0, lambda_star[0], 0.0};
        for (int i = 0; i < n; ++i) {
            s.mass += lambda_star[i];
            if (lambda_star[i] > s.peak) { s.peak = lambda_star[i]; s.center = i; }
        }
        s.mass *= grid.dx;
        report.spikes.push_back(s);
        report.spike_count = 1;
        report.background_mass = 0.0;
        return report;
    }

    // Scan starting just past a below-threshold node so seam-wrapping runs
    // are collected once.
    double background = 0.0;
    int i = first_below;
    for (int visited = 0; visited < n;) {
        const int idx = (i + visited) % n;
        if (!above[idx]) {
            background += lambda_star[idx];
            ++visited;
            continue;
        }
        Spike s{idx, lambda_star[idx], 0.0};
        while (visited < n && above[(i + visited) % n]) {
            const int j = (i + visited) % n;
            s.mass += lambda_star[j];
            if (lambda_star[j] > s.peak) { s.peak = lambda_star[j]; s.center = j; }
            ++visited;
        }
        s.mass *= grid.dx;
        report.spikes.push_back(s);
    }
    report.spike_count = static_cast<int>(report.spikes.size());
    report.background_mass = background * grid.dx;
    return report;
}

SpikeReport count_spikes(const Grid& grid, const SimulationResult& result, double kappa,
                         bool allow_unconverged) {
    if (!result.converged && !allow_unconverged) {
        throw std::invalid_argument("count_spikes: simulation did not converge");
    }
    return count_spikes(grid, result.lambda_star, kappa);
}

MaxSpikeResult max_spike_count(const ModelParams& params, const Kernel& kernel,
                               const Grid& grid, const IntegratorConfig& config,
                               const std::vector<std::uint64_t>& seeds, double kappa,
                               double amplitude) {
    if (seeds.empty()) throw std::invalid_argument("max_spike_count: no seeds");
    MaxSpikeResult result;
    result.max_count = -1;
    for (std::uint64_t seed : seeds) {
        Field lambda0 = initial_condition(grid, seed, amplitude);
        SimulationResult sim = simulate(params, kernel, grid, config, lambda0);
        sim.seed = seed;
        sim.amplitude = amplitude;
        SeedOutcome outcome{seed, -1, sim.converged, sim.steps};
        if (sim.converged) {
            outcome.spike_count = count_spikes(grid, sim.lambda_star, kappa).spike_count;
            if (outcome.spike_count > result.max_count) {
                result.max_count = outcome.spike_count;
                result.best_run = std::move(sim);
            }
        }
        result.per_seed.push_back(outcome);
    }
    if (result.max_count < 0) {
        throw std::runtime_error("max_spike_count: no seed converged");
    }
    return result;
}

namespace {

double mode_magnitude(const Grid& grid, const Field& lambda, int n) {
    std::complex<double> acc(0.0, 0.0);
    for (int i = 0; i < grid.node_count; ++i) {
        const double phase = -n * grid.nodes[i];
        acc += lambda[i] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return std::abs(acc) * grid.dx;
}

}  // namespace

double measure_mode_growth(const ModelParams& params, const Kernel& kernel, const Grid& grid,
                           int n, double amplitude, double horizon, double dt) {
    if (n < 1 || n > grid.node_count / 2 - 1) {
        throw std::invalid_argument("measure_mode_growth: mode out of range");
    }
    if (!(amplitude > 0.0) || amplitude > 1e-4) {
        throw std::invalid_argument("measure_mode_growth: amplitude must be in (0, 1e-4]");
    }
    Field lambda(grid.node_count);
    double sum = 0.0;
    for (int i = 0; i < grid.node_count; ++i) {
        lambda[i] = ModelParams::lambda_bar * (1.0 + amplitude * std::cos(n * grid.nodes[i]));
        sum += lambda[i];
    }
    const double inv = 1.0 / (grid.dx * sum);
    for (double& v : lambda) v *= inv;

    const double m0 = mode_magnitude(grid, lambda, n);
    const long steps = std::lround(horizon / dt);

    std::vector<double> times{0.0};
    std::vector<double> logs{std::log(m0)};
    Stepper stepper(params, kernel, grid);
    for (long s = 1; s <= steps; ++s) {
        double sup_diff = 0.0, mass_drift = 0.0;
        stepper.advance(lambda, dt, sup_diff, mass_drift);
        const double m = mode_magnitude(grid, lambda, n);
        if (m >= 100.0 * m0) break;  // leaving the linear regime
        times.push_back(s * dt);
        logs.push_back(std::log(m));
    }
    if (times.size() < 3) {
        throw std::runtime_error("measure_mode_growth: mode escaped linear regime too fast");
    }
    // least-squares slope of log|c_n| vs t
    const size_t m = times.size();
    double t_mean = 0.0, l_mean = 0.0;
    for (size_t i = 0; i < m; ++i) { t_mean += times[i]; l_mean += logs[i]; }
    t_mean /= m; l_mean /= m;
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < m; ++i) {
        num += (times[i] - t_mean) * (logs[i] - l_mean);
        den += (times[i] - t_mean) * (times[i] - t_mean);
    }
    return num / den;
}

SweepAxis sweep_axis_from_name(const std::string& name) {
    if (name == "sigma") return SweepAxis::sigma;
    if (name == "tau") return SweepAxis::tau;
    if (name == "Phi" || name == "phi") return SweepAxis::Phi;
    throw std::invalid_argument("sweep: unknown axis '" + name + "' (sigma|tau|Phi)");
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::sigma: return "sigma";
        case SweepAxis::tau: return "tau";
        case SweepAxis::Phi: return "Phi";
    }
    return "?";
}

namespace {

ModelParams with_axis_value(const ModelParams& base, SweepAxis axis, double value) {
    ModelParams p = base;
    switch (axis) {
        case SweepAxis::sigma: p.sigma = value; break;
        case SweepAxis::tau: p.tau = value; break;
        case SweepAxis::Phi: p.Phi = value; break;
    }
    return p;
}

}  // namespace

SweepResult sweep(const ModelParams& base, const Grid& grid, const IntegratorConfig& config,
                  const SweepSpec& spec) {
    if (spec.values.empty()) throw std::invalid_argument("sweep: no axis values");
    if (spec.seeds.empty()) throw std::invalid_argument("sweep: no seeds");

    SweepResult result;
    result.axis = spec.axis;
    result.points.resize(spec.values.size());

    auto run_point = [&](size_t idx) {
        SweepPoint& point = result.points[idx];
        point.axis_value = spec.values[idx];
        point.params = with_axis_value(base, spec.axis, spec.values[idx]);
        try {
            point.params.validate();
            point.params_valid = true;
            point.nbh = no_black_hole(point.params);
            const int n_max = std::max(spec.n_max, tail_bound_mode(point.params) + 1);
            point.fastest_mode = spectrum(point.params, n_max).fastest_mode;
            point.n_tilde = tail_instability_threshold(point.params, n_max);

            Kernel kernel = build_kernel(grid, point.params.alpha());
            MaxSpikeResult msr = max_spike_count(point.params, kernel, grid, config,
                                                 spec.seeds, spec.kappa, spec.amplitude);
            point.max_spikes = msr.max_count;
            point.per_seed = std::move(msr.per_seed);
            point.best_run = std::move(msr.best_run);
        } catch (const std::exception& e) {
            point.error = e.what();
        }
    };

    unsigned threads = spec.threads > 0 ? static_cast<unsigned>(spec.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, spec.values.size());
    if (threads <= 1) {
        for (size_t i = 0; i < spec.values.size(); ++i) run_point(i);
    } else {
        // Points are independent; results land in preallocated slots, so the
        // assembled output does not depend on scheduling.
        std::vector<std::future<void>> futures;
        std::atomic<size_t> next{0};
        futures.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            futures.push_back(std::async(std::launch::async, [&]() {
                for (size_t i = next.fetch_add(1); i < spec.values.size();
                     i = next.fetch_add(1)) {
                    run_point(i);
                }
            }));
        }
        for (auto& f : futures) f.get();
    }
    return result;
}

}  // namespace racetrack
