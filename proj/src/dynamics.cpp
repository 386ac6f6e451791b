#include "racetrack/dynamics.hpp"

#include <cmath>
#include <random>

#if defined(__SSE2__)
#include <immintrin.h>
#endif

namespace racetrack {

void IntegratorConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("IntegratorConfig: dt must be > 0");
    }
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw std::invalid_argument("IntegratorConfig: epsilon must be > 0");
    }
    if (max_steps < 1) {
        throw std::invalid_argument("IntegratorConfig: max_steps must be >= 1");
    }
    if (min_steps < 1 || min_steps > max_steps) {
        throw std::invalid_argument("IntegratorConfig: min_steps must be in [1, max_steps]");
    }
    if (snapshot_stride < 0) {
        throw std::invalid_argument("IntegratorConfig: snapshot_stride must be >= 0");
    }
}

integration_blowup_error::integration_blowup_error(long step_, int node_)
    : std::runtime_error("integration blowup at step " + std::to_string(step_) +
                         ", node " + std::to_string(node_)),
      step(step_), node(node_) {}

Field rhs(const ModelParams& params, const Kernel& kernel, const Grid& grid,
          const Field& lambda) {
    validate_density(grid, lambda);
    EquilibriumWorkspace eq(grid.node_count);
    eq.eval(params, kernel, grid, lambda);
    Field out(grid.node_count);
    const auto omega = eq.omega();
    const double avg = eq.omega_avg();
    for (int i = 0; i < grid.node_count; ++i) {
        out[i] = (omega[i] - avg) * lambda[i];
    }
    return out;
}

Stepper::Stepper(const ModelParams& params, const Kernel& kernel, const Grid& grid)
    : params_(params), kernel_(kernel), grid_(grid), eq_(grid.node_count),
      k1_(grid.node_count), k2_(grid.node_count), k3_(grid.node_count),
      k4_(grid.node_count), stage_(grid.node_count), next_(grid.node_count) {}

void Stepper::rhs_into(std::span<const double> lambda, std::span<double> out) {
    eq_.eval(params_, kernel_, grid_, lambda);
    const auto omega = eq_.omega();
    const double avg = eq_.omega_avg();
    for (int i = 0; i < grid_.node_count; ++i) {
        out[i] = (omega[i] - avg) * lambda[i];
    }
}

void Stepper::advance(std::vector<double>& lambda, double dt, double& sup_diff,
                      double& mass_drift) {
    const int n = grid_.node_count;
    const double half = 0.5 * dt;

    rhs_into(lambda, k1_);
    for (int i = 0; i < n; ++i) stage_[i] = lambda[i] + half * k1_[i];
    rhs_into(stage_, k2_);
    for (int i = 0; i < n; ++i) stage_[i] = lambda[i] + half * k2_[i];
    rhs_into(stage_, k3_);
    for (int i = 0; i < n; ++i) stage_[i] = lambda[i] + dt * k3_[i];
    rhs_into(stage_, k4_);

    const double sixth = dt / 6.0;
    double norm1 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = lambda[i] + sixth * (k1_[i] + 2.0 * (k2_[i] + k3_[i]) + k4_[i]);
        next_[i] = v;
        norm1 += std::abs(v);
    }
    norm1 *= grid_.dx;
    mass_drift = std::abs(norm1 - 1.0);
    if (!std::isfinite(norm1) || norm1 == 0.0) {
        throw integration_blowup_error(-1, 0);
    }

    const double inv = 1.0 / norm1;
    double diff = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = next_[i] * inv;
        diff = std::max(diff, std::abs(v - lambda[i]));
        lambda[i] = v;
        if (!std::isfinite(v)) throw integration_blowup_error(-1, i);
    }
    sup_diff = diff;
}

Field rk4_step_raw(const ModelParams& params, const Kernel& kernel, const Grid& grid,
                   const Field& lambda, double dt) {
    const int n = grid.node_count;
    EquilibriumWorkspace eq(n);
    auto f = [&](const Field& state) {
        eq.eval(params, kernel, grid, state);
        Field out(n);
        const auto omega = eq.omega();
        const double avg = eq.omega_avg();
        for (int i = 0; i < n; ++i) out[i] = (omega[i] - avg) * state[i];
        return out;
    };
    const Field k1 = f(lambda);
    Field stage(n);
    for (int i = 0; i < n; ++i) stage[i] = lambda[i] + 0.5 * dt * k1[i];
    const Field k2 = f(stage);
    for (int i = 0; i < n; ++i) stage[i] = lambda[i] + 0.5 * dt * k2[i];
    const Field k3 = f(stage);
    for (int i = 0; i < n; ++i) stage[i] = lambda[i] + dt * k3[i];
    const Field k4 = f(stage);
    Field out(n);
    for (int i = 0; i < n; ++i) {
        out[i] = lambda[i] + dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    }
    return out;
}

Field step(const ModelParams& params, const Kernel& kernel, const Grid& grid,
           const Field& lambda, double dt) {
    Field tilde = rk4_step_raw(params, kernel, grid, lambda, dt);
    double norm1 = 0.0;
    for (double v : tilde) norm1 += std::abs(v);
    norm1 *= grid.dx;
    if (!std::isfinite(norm1) || norm1 == 0.0) throw integration_blowup_error(0, 0);
    for (double& v : tilde) v /= norm1;
    return tilde;
}

Field initial_condition(const Grid& grid, std::uint64_t seed, double amplitude) {
    if (!(amplitude >= 0.0) || amplitude >= 1.0) {
        throw std::invalid_argument("initial_condition: amplitude must be in [0, 1)");
    }
    const int n = grid.node_count;
    if (amplitude == 0.0) {
        // uniform density has unit mass by construction; skipping the
        // normalizing sum keeps every entry exactly lambda_bar
        return Field(n, ModelParams::lambda_bar);
    }
    std::mt19937_64 rng(seed);
    Field lambda(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        // top 53 bits -> [0,1); avoids distribution objects so the stream is
        // identical across standard library implementations
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        lambda[i] = ModelParams::lambda_bar * (1.0 + amplitude * (2.0 * u - 1.0));
        sum += lambda[i];
    }
    const double inv = 1.0 / (grid.dx * sum);
    for (double& v : lambda) v *= inv;
    return lambda;
}

namespace {

// The replicator dynamics drives the off-spike density toward zero
// exponentially; below ~1e-308 it enters the subnormal range, where x86
// arithmetic is 10-100x slower while the values are physically zero.
// Flushing subnormals to zero inside long integrations removes the stall
// without affecting anything above the underflow threshold.
class FlushSubnormalsGuard {
public:
#if defined(__SSE2__)
    FlushSubnormalsGuard() : saved_(_mm_getcsr()) {
        _mm_setcsr(saved_ | 0x8040);  // FTZ | DAZ
    }
    ~FlushSubnormalsGuard() { _mm_setcsr(saved_); }
private:
    unsigned saved_;
public:
#else
    FlushSubnormalsGuard() = default;
#endif
    FlushSubnormalsGuard(const FlushSubnormalsGuard&) = delete;
    FlushSubnormalsGuard& operator=(const FlushSubnormalsGuard&) = delete;
};

}  // namespace

SimulationResult simulate(const ModelParams& params, const Kernel& kernel, const Grid& grid,
                          const IntegratorConfig& config, const Field& lambda0,
                          const SnapshotSink& sink) {
    config.validate();
    FlushSubnormalsGuard flush_guard;
    validate_density(grid, lambda0);

    SimulationResult result;
    result.lambda_star = lambda0;
    Stepper stepper(params, kernel, grid);
    auto& lambda = result.lambda_star;

    for (long step_index = 1; step_index <= config.max_steps; ++step_index) {
        double sup_diff = 0.0, mass_drift = 0.0;
        try {
            stepper.advance(lambda, config.dt, sup_diff, mass_drift);
        } catch (const integration_blowup_error& e) {
            throw integration_blowup_error(step_index, e.node);
        }
        if (config.snapshot_stride > 0) {
            result.sup_diff_history.push_back(sup_diff);
            if (sink && step_index % config.snapshot_stride == 0) {
                sink(step_index, step_index * config.dt, lambda);
            }
        }
        if (step_index >= config.min_steps && sup_diff < config.epsilon) {
            result.steps = step_index;
            result.converged = true;
            if (sink) sink(step_index, step_index * config.dt, lambda);
            return result;
        }
    }
    result.steps = config.max_steps;
    result.converged = false;
    if (sink) sink(result.steps, result.steps * config.dt, lambda);
    return result;
}

}  // namespace racetrack
