#include "racetrack/equilibrium.hpp"

#include <cmath>

namespace racetrack {

void validate_density(const Grid& grid, const Field& lambda) {
    if (static_cast<int>(lambda.size()) != grid.node_count) {
        throw std::invalid_argument("density: length does not match grid");
    }
    double mass = 0.0;
    for (double v : lambda) {
        if (!std::isfinite(v)) throw degenerate_density_error("density: non-finite entry");
        if (v < 0.0) throw degenerate_density_error("density: negative entry");
        mass += v;
    }
    mass *= grid.dx;
    if (std::abs(mass - 1.0) > 1e-10) {
        throw degenerate_density_error("density: mass " + std::to_string(mass) + " != 1");
    }
}

Field price_index(const ModelParams& params, const Kernel& kernel, const Grid& grid,
                  const Field& lambda) {
    validate_density(grid, lambda);
    const int n = grid.node_count;
    Field g_inv(n);
    kernel.apply(lambda, g_inv);
    const double scale = grid.dx / params.F;
    const double exponent = 1.0 / (1.0 - params.sigma);
    Field G(n);
    for (int i = 0; i < n; ++i) {
        const double s = scale * g_inv[i];
        if (!(s > 0.0)) {
            throw degenerate_density_error("price_index: nonpositive integrand at node " +
                                           std::to_string(i));
        }
        G[i] = std::pow(s, exponent);
    }
    return G;
}

Field nominal_wage(const ModelParams& params, const Kernel& kernel, const Grid& grid,
                   const Field& lambda, const Field& G) {
    const int n = grid.node_count;
    const double phi_bar = params.phi_bar();
    Field weighted(n);
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(G[i]) || G[i] <= 0.0) {
            throw degenerate_density_error("nominal_wage: invalid price index entry");
        }
        weighted[i] = (phi_bar + lambda[i]) * std::pow(G[i], params.sigma - 1.0);
    }
    Field w(n);
    kernel.apply(weighted, w);
    const double scale = params.mu / (params.sigma * params.F) * grid.dx;
    for (double& v : w) v *= scale;
    return w;
}

Field real_wage(const ModelParams& params, const Field& w, const Field& G) {
    Field omega(w.size());
    for (size_t i = 0; i < w.size(); ++i) {
        if (!(G[i] > 0.0)) {
            throw degenerate_density_error("real_wage: nonpositive price index entry");
        }
        omega[i] = w[i] - params.mu * std::log(G[i]);
    }
    return omega;
}

double average_real_wage(const Grid& grid, const Field& omega, const Field& lambda) {
    if (omega.size() != lambda.size() ||
        static_cast<int>(omega.size()) != grid.node_count) {
        throw std::invalid_argument("average_real_wage: length mismatch");
    }
    double sum = 0.0;
    for (size_t i = 0; i < omega.size(); ++i) sum += omega[i] * lambda[i];
    return grid.dx * sum;
}

EquilibriumWorkspace::EquilibriumWorkspace(int node_count)
    : g_inv_(node_count), g_pow_(node_count), weighted_(node_count),
      w_(node_count), omega_(node_count) {}

void EquilibriumWorkspace::eval(const ModelParams& params, const Kernel& kernel,
                                const Grid& grid, std::span<const double> lambda) {
    const int n = grid.node_count;
    const double phi_bar = params.phi_bar();

    kernel.apply(lambda, g_inv_);
    const double g_scale = grid.dx / params.F;
    for (int i = 0; i < n; ++i) {
        const double s = g_scale * g_inv_[i];
        if (!(s > 0.0)) {
            throw degenerate_density_error("equilibrium: nonpositive integrand at node " +
                                           std::to_string(i));
        }
        g_inv_[i] = s;
        g_pow_[i] = 1.0 / s;  // G^{sigma-1} without a pow round trip
        weighted_[i] = (phi_bar + lambda[i]) * g_pow_[i];
    }

    kernel.apply(weighted_, w_);
    const double w_scale = params.mu / (params.sigma * params.F) * grid.dx;
    // mu*ln G = mu/(1-sigma) * ln(G^{1-sigma})
    const double log_scale = params.mu / (1.0 - params.sigma);
    double avg = 0.0;
    for (int i = 0; i < n; ++i) {
        omega_[i] = w_scale * w_[i] - log_scale * std::log(g_inv_[i]);
        avg += omega_[i] * lambda[i];
    }
    omega_avg_ = grid.dx * avg;
}

}  // namespace racetrack
