#ifndef RACETRACK_DYNAMICS_HPP
#define RACETRACK_DYNAMICS_HPP

#include <cstdint>
#include <functional>
#include <stdexcept>

#include "racetrack/equilibrium.hpp"

namespace racetrack {

struct IntegratorConfig {
    double dt = 0.01;
    double epsilon = 1e-10;      // stopping threshold on sup-norm step difference
    long max_steps = 20'000'000;  // safety cap; hitting it yields converged=false
    long min_steps = 1;          // earliest step at which the stopping rule applies
    long snapshot_stride = 0;    // steps between snapshots, 0 = final only

    void validate() const;
};

struct integration_blowup_error : std::runtime_error {
    long step;
    int node;
    integration_blowup_error(long step_, int node_);
};

struct SimulationResult {
    Field lambda_star;
    long steps = 0;
    bool converged = false;
    std::vector<double> sup_diff_history;  // filled when snapshot_stride > 0
    std::uint64_t seed = 0;
    double amplitude = 0.0;
};

/// Called every snapshot_stride steps (and once at the end) when installed.
using SnapshotSink = std::function<void(long step, double t, const Field& lambda)>;

/// Replicator right-hand side (omega - omega_avg) * lambda, with the
/// equilibrium fields recomputed from this lambda.
Field rhs(const ModelParams& params, const Kernel& kernel, const Grid& grid,
          const Field& lambda);

/// One classical RK4 stage sweep, before normalization.
Field rk4_step_raw(const ModelParams& params, const Kernel& kernel, const Grid& grid,
                   const Field& lambda, double dt);

/// RK4 step followed by the mass-conserving normalization
/// lambda_new = lambda_tilde / (dx * sum |lambda_tilde_i|).
Field step(const ModelParams& params, const Kernel& kernel, const Grid& grid,
           const Field& lambda, double dt);

/// lambda_bar * (1 + u_i), u_i iid uniform on [-amplitude, amplitude] from a
/// seeded generator, then normalized to unit mass. Reproducible per
/// (seed, I, amplitude) across platforms.
Field initial_condition(const Grid& grid, std::uint64_t seed, double amplitude);

SimulationResult simulate(const ModelParams& params, const Kernel& kernel, const Grid& grid,
                          const IntegratorConfig& config, const Field& lambda0,
                          const SnapshotSink& sink = nullptr);

/// Reusable time stepper with preallocated buffers; simulate() is built on it.
class Stepper {
public:
    Stepper(const ModelParams& params, const Kernel& kernel, const Grid& grid);

    /// Advances lambda in place. Reports the sup-norm difference against the
    /// previous state and the pre-normalization mass drift |‖λ̃‖₁ - 1|.
    void advance(std::vector<double>& lambda, double dt, double& sup_diff, double& mass_drift);

private:
    void rhs_into(std::span<const double> lambda, std::span<double> out);

    const ModelParams& params_;
    const Kernel& kernel_;
    const Grid& grid_;
    EquilibriumWorkspace eq_;
    std::vector<double> k1_, k2_, k3_, k4_, stage_, next_;
};

}  // namespace racetrack

#endif
