#include "racetrack/cli_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace racetrack {

namespace fs = std::filesystem;
using nlohmann::json;

void RunConfig::validate() const {
    params.validate();
    integrator.validate();
    if (grid_size < 4 || grid_size % 2 != 0) {
        throw config_error("I: grid size must be even and >= 4");
    }
    if (!(amplitude >= 0.0) || amplitude >= 1.0) {
        throw config_error("amplitude: must be in [0, 1)");
    }
    if (!(kappa > 1.0)) throw config_error("kappa: must be > 1");
    if (n_max < 1) throw config_error("n_max: must be >= 1");
    if (format != "csv" && format != "json" && format != "both") {
        throw config_error("format: must be csv, json or both");
    }
}

std::vector<std::uint64_t> RunConfig::seed_list() const {
    if (!seeds.empty()) return seeds;
    std::vector<std::uint64_t> list(10);
    for (int i = 0; i < 10; ++i) list[i] = seed + i;
    return list;
}

namespace {

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw config_error(key + ": not a number: '" + value + "'");
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw config_error(key + ": not an integer: '" + value + "'");
    }
}

std::uint64_t parse_seed(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw config_error(key + ": not a seed: '" + value + "'");
    }
}

std::vector<std::uint64_t> parse_seed_list(const std::string& key, const std::string& value) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(parse_seed(key, item));
    }
    if (out.empty()) throw config_error(key + ": empty seed list");
    return out;
}

void set_key(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "mu") config.params.mu = parse_double(key, value);
    else if (key == "sigma") config.params.sigma = parse_double(key, value);
    else if (key == "tau") config.params.tau = parse_double(key, value);
    else if (key == "F") config.params.F = parse_double(key, value);
    else if (key == "Phi") config.params.Phi = parse_double(key, value);
    else if (key == "I") config.grid_size = static_cast<int>(parse_long(key, value));
    else if (key == "dt") config.integrator.dt = parse_double(key, value);
    else if (key == "epsilon") config.integrator.epsilon = parse_double(key, value);
    else if (key == "max_steps") config.integrator.max_steps = parse_long(key, value);
    else if (key == "min_steps") config.integrator.min_steps = parse_long(key, value);
    else if (key == "snapshot_stride") config.integrator.snapshot_stride = parse_long(key, value);
    else if (key == "seed") config.seed = parse_seed(key, value);
    else if (key == "seeds") config.seeds = parse_seed_list(key, value);
    else if (key == "amplitude") config.amplitude = parse_double(key, value);
    else if (key == "kappa") config.kappa = parse_double(key, value);
    else if (key == "n_max") config.n_max = static_cast<int>(parse_long(key, value));
    else if (key == "out_dir") config.out_dir = value;
    else if (key == "format") config.format = value;
    else throw config_error("unknown config key '" + key + "'");
}

RunConfig parse_config_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw config_error(std::string("json parse: ") + e.what());
    }
    if (!doc.is_object()) throw config_error("json config must be an object");
    RunConfig config;
    for (auto& [key, value] : doc.items()) {
        if (key == "seeds") {
            if (!value.is_array()) throw config_error("seeds: must be an array");
            config.seeds.clear();
            for (const auto& s : value) config.seeds.push_back(s.get<std::uint64_t>());
            if (config.seeds.empty()) throw config_error("seeds: empty seed list");
        } else if (key == "out_dir" || key == "format") {
            set_key(config, key, value.get<std::string>());
        } else if (value.is_number() || value.is_string()) {
            set_key(config, key, value.is_string() ? value.get<std::string>()
                                                   : json(value).dump());
        } else {
            throw config_error(key + ": unsupported value type");
        }
    }
    return config;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

RunConfig parse_config_flat(const std::string& text) {
    RunConfig config;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw config_error("line " + std::to_string(line_no) + ": expected key=value");
        }
        set_key(config, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return config;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    const std::string stripped = trim(text);
    RunConfig config = (!stripped.empty() && stripped[0] == '{')
                           ? parse_config_json(text)
                           : parse_config_flat(text);
    config.validate();
    return config;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot read config file: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string emit_config(const RunConfig& config) {
    std::ostringstream out;
    out << "mu = " << format_full(config.params.mu) << '\n'
        << "sigma = " << format_full(config.params.sigma) << '\n'
        << "tau = " << format_full(config.params.tau) << '\n'
        << "F = " << format_full(config.params.F) << '\n'
        << "Phi = " << format_full(config.params.Phi) << '\n'
        << "I = " << config.grid_size << '\n'
        << "dt = " << format_full(config.integrator.dt) << '\n'
        << "epsilon = " << format_full(config.integrator.epsilon) << '\n'
        << "max_steps = " << config.integrator.max_steps << '\n'
        << "min_steps = " << config.integrator.min_steps << '\n'
        << "snapshot_stride = " << config.integrator.snapshot_stride << '\n'
        << "seed = " << config.seed << '\n';
    if (!config.seeds.empty()) {
        out << "seeds = ";
        for (size_t i = 0; i < config.seeds.size(); ++i) {
            if (i) out << ',';
            out << config.seeds[i];
        }
        out << '\n';
    }
    out << "amplitude = " << format_full(config.amplitude) << '\n'
        << "kappa = " << format_full(config.kappa) << '\n'
        << "n_max = " << config.n_max << '\n'
        << "out_dir = " << config.out_dir << '\n'
        << "format = " << config.format << '\n';
    return out.str();
}

void apply_overrides(RunConfig& config, const ConfigOverrides& overrides) {
    for (const auto& [key, value] : overrides) set_key(config, key, value);
    config.validate();
}

namespace {

/// Removes every file it registered unless release() was called.
class OutputGuard {
public:
    ~OutputGuard() {
        if (released_) return;
        for (const auto& p : paths_) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }
    void track(const fs::path& p) { paths_.push_back(p); }
    void release() { released_ = true; }

private:
    std::vector<fs::path> paths_;
    bool released_ = false;
};

json params_to_json(const ModelParams& p) {
    return json{{"mu", p.mu}, {"sigma", p.sigma}, {"tau", p.tau},
                {"F", p.F},   {"Phi", p.Phi},     {"alpha", p.alpha()}};
}

json spike_report_to_json(const SpikeReport& report) {
    json spikes = json::array();
    for (const auto& s : report.spikes) {
        spikes.push_back({{"center", s.center}, {"peak", s.peak}, {"mass", s.mass}});
    }
    return json{{"spike_count", report.spike_count},
                {"kappa", report.kappa},
                {"background_mass", report.background_mass},
                {"spikes", spikes}};
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string axis_value_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    std::string s(buf);
    std::replace(s.begin(), s.end(), '.', 'p');
    return s;
}

}  // namespace

void write_profile_csv(const fs::path& path, const Grid& grid, const Field& lambda,
                       const Field& w, const Field& G, const Field& omega) {
    std::ostringstream out;
    out << "x,lambda,w,G,omega\n";
    for (int i = 0; i < grid.node_count; ++i) {
        out << format_full(grid.nodes[i]) << ',' << format_full(lambda[i]) << ','
            << format_full(w[i]) << ',' << format_full(G[i]) << ','
            << format_full(omega[i]) << '\n';
    }
    write_text(path, out.str());
}

void write_spectrum_csv(const fs::path& path, const Spectrum& spectrum) {
    std::ostringstream out;
    out << "n,E_n,J_n,growth_rate,verdict\n";
    for (const auto& row : spectrum.rows) {
        out << row.n << ',' << format_full(row.E_n) << ',' << format_full(row.J_n) << ','
            << format_full(row.growth_rate) << ',' << to_string(row.verdict) << '\n';
    }
    write_text(path, out.str());
}

void write_sweep_csv(const fs::path& path, const SweepResult& result) {
    std::ostringstream out;
    out << "axis_value,max_spikes,seed,count,converged,fastest_mode,n_tilde,nbh\n";
    for (const auto& point : result.points) {
        if (!point.error.empty()) {
            out << format_full(point.axis_value) << ",error,,,,,,\n";
            continue;
        }
        for (const auto& seed : point.per_seed) {
            out << format_full(point.axis_value) << ',' << point.max_spikes << ','
                << seed.seed << ',' << seed.spike_count << ','
                << (seed.converged ? 1 : 0) << ',' << point.fastest_mode << ','
                << point.n_tilde << ',' << (point.nbh ? 1 : 0) << '\n';
        }
    }
    write_text(path, out.str());
}

int cmd_simulate(const RunConfig& config, std::ostream& log) {
    const Grid grid = build_grid(config.grid_size);
    const Kernel kernel = build_kernel(grid, config.params.alpha());
    const fs::path dir(config.out_dir);
    fs::create_directories(dir);
    OutputGuard guard;

    try {
        const Field lambda0 = initial_condition(grid, config.seed, config.amplitude);

        std::ofstream trajectory;
        SnapshotSink sink = nullptr;
        if (config.integrator.snapshot_stride > 0) {
            const fs::path traj_path = dir / "trajectory.csv";
            guard.track(traj_path);
            trajectory.open(traj_path, std::ios::binary);
            trajectory << "step,t,node,x,lambda\n";
            sink = [&](long step_index, double t, const Field& lambda) {
                for (int i = 0; i < grid.node_count; ++i) {
                    trajectory << step_index << ',' << format_full(t) << ',' << i << ','
                               << format_full(grid.nodes[i]) << ','
                               << format_full(lambda[i]) << '\n';
                }
            };
        }

        SimulationResult sim = simulate(config.params, kernel, grid, config.integrator,
                                        lambda0, sink);
        sim.seed = config.seed;
        sim.amplitude = config.amplitude;

        const Field G = price_index(config.params, kernel, grid, sim.lambda_star);
        const Field w = nominal_wage(config.params, kernel, grid, sim.lambda_star, G);
        const Field omega = real_wage(config.params, w, G);
        const SpikeReport report = count_spikes(grid, sim.lambda_star, config.kappa);

        if (config.format != "json") {
            const fs::path profile_path = dir / "profile.csv";
            guard.track(profile_path);
            write_profile_csv(profile_path, grid, sim.lambda_star, w, G, omega);
        }
        json summary{{"schema", 1},
                     {"params", params_to_json(config.params)},
                     {"I", config.grid_size},
                     {"dt", config.integrator.dt},
                     {"epsilon", config.integrator.epsilon},
                     {"seed", sim.seed},
                     {"amplitude", sim.amplitude},
                     {"steps", sim.steps},
                     {"converged", sim.converged},
                     {"spike_count", report.spike_count},
                     {"spike_report", spike_report_to_json(report)}};
        const fs::path summary_path = dir / "summary.json";
        guard.track(summary_path);
        write_text(summary_path, summary.dump(2) + "\n");

        log << "steps=" << sim.steps << " converged=" << (sim.converged ? 1 : 0)
            << " spikes=" << report.spike_count << "\n";
        guard.release();
        return sim.converged ? exit_ok : exit_not_converged;
    } catch (const integration_blowup_error& e) {
        log << "error: " << e.what() << "\n";
        return exit_numerical_failure;
    } catch (const degenerate_density_error& e) {
        log << "error: " << e.what() << "\n";
        return exit_numerical_failure;
    }
}

int cmd_spectrum(const RunConfig& config, std::ostream& log) {
    const Spectrum spec = spectrum(config.params, config.n_max);
    const fs::path dir(config.out_dir);
    fs::create_directories(dir);

    int n_tilde = -1;
    std::string tail_note;
    try {
        n_tilde = tail_instability_threshold(config.params, config.n_max);
    } catch (const std::invalid_argument& e) {
        tail_note = e.what();
    }

    if (config.format != "json") {
        write_spectrum_csv(dir / "spectrum.csv", spec);
    }
    json summary{{"schema", 1},
                 {"params", params_to_json(config.params)},
                 {"n_max", config.n_max},
                 {"no_black_hole", no_black_hole(config.params)},
                 {"fastest_mode", spec.fastest_mode},
                 {"J_limit_alpha_inf", stability_coefficient_limit(config.params)}};
    if (n_tilde >= 0) summary["n_tilde"] = n_tilde;
    else summary["n_tilde_error"] = tail_note;
    write_text(dir / "spectrum.json", summary.dump(2) + "\n");

    log << "fastest_mode=" << spec.fastest_mode << " n_tilde=" << n_tilde
        << " nbh=" << (no_black_hole(config.params) ? 1 : 0) << "\n";
    return exit_ok;
}

int cmd_sweep(const RunConfig& config, const std::string& axis_name,
              const std::vector<double>& axis_values, std::ostream& log) {
    SweepSpec spec;
    spec.axis = sweep_axis_from_name(axis_name);
    spec.values = axis_values;
    spec.seeds = config.seed_list();
    spec.kappa = config.kappa;
    spec.amplitude = config.amplitude;
    spec.n_max = config.n_max;

    const Grid grid = build_grid(config.grid_size);
    const SweepResult result = sweep(config.params, grid, config.integrator, spec);

    const fs::path dir(config.out_dir);
    fs::create_directories(dir);
    write_sweep_csv(dir / "sweep.csv", result);

    bool any_success = false;
    for (const auto& point : result.points) {
        if (!point.error.empty()) {
            log << to_string(result.axis) << "=" << point.axis_value
                << " failed: " << point.error << "\n";
            continue;
        }
        any_success = true;
        log << to_string(result.axis) << "=" << point.axis_value
            << " max_spikes=" << point.max_spikes << "\n";
        if (point.best_run) {
            const Kernel kernel = build_kernel(grid, point.params.alpha());
            const Field& lam = point.best_run->lambda_star;
            const Field G = price_index(point.params, kernel, grid, lam);
            const Field w = nominal_wage(point.params, kernel, grid, lam, G);
            const Field omega = real_wage(point.params, w, G);
            write_profile_csv(dir / ("profile_" + to_string(result.axis) + "_" +
                                     axis_value_label(point.axis_value) + ".csv"),
                              grid, lam, w, G, omega);
        }
    }
    return any_success ? exit_ok : exit_not_converged;
}

int cmd_validate(const RunConfig& config, std::ostream& log) {
    const Grid grid = build_grid(config.grid_size);
    const Kernel kernel = build_kernel(grid, config.params.alpha());
    const double amplitude = 1e-6;
    const double horizon = 1.0;

    bool all_ok = true;
    bool blew_up = false;
    log << "mode   predicted      measured       rel_err  status\n";
    for (int n = 1; n <= 8; ++n) {
        const double predicted = ModelParams::lambda_bar * stability_coefficient(config.params, n);
        double measured = 0.0;
        std::string status;
        try {
            measured = measure_mode_growth(config.params, kernel, grid, n, amplitude,
                                           horizon, config.integrator.dt);
        } catch (const std::exception& e) {
            log << n << "  blow-up: " << e.what() << "\n";
            blew_up = true;
            all_ok = false;
            continue;
        }
        double rel_err;
        if (std::abs(predicted) < 1e-14) {
            rel_err = std::abs(measured);
            status = rel_err < 1e-10 ? "pass" : "FAIL";
        } else {
            rel_err = std::abs(measured - predicted) / std::abs(predicted);
            status = rel_err <= 0.02 ? "pass" : "FAIL";
        }
        if (status != "pass") all_ok = false;
        char line[160];
        std::snprintf(line, sizeof(line), "%4d  %13.6e  %13.6e  %8.2e  %s\n", n, predicted,
                      measured, rel_err, status.c_str());
        log << line;
    }
    if (blew_up) return exit_numerical_failure;
    return all_ok ? exit_ok : exit_numerical_failure;
}

}  // namespace racetrack
