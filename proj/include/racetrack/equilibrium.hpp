#ifndef RACETRACK_EQUILIBRIUM_HPP
#define RACETRACK_EQUILIBRIUM_HPP

#include <stdexcept>

#include "racetrack/geometry.hpp"
#include "racetrack/params.hpp"

namespace racetrack {

/// Raised when a density field is degenerate (zero mass, negative entries
/// beyond tolerance, or a nonpositive price-index integrand).
struct degenerate_density_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Checks length, finiteness, nonnegativity and unit mass (tol 1e-10).
void validate_density(const Grid& grid, const Field& lambda);

/// Price index G(x_i) = [ (1/F) * dx * sum_j K[i][j] * lambda_j ]^{1/(1-sigma)}.
Field price_index(const ModelParams& params, const Kernel& kernel, const Grid& grid,
                  const Field& lambda);

/// Nominal wage w(x_i) = mu/(sigma F) * dx * sum_j K[i][j]*(phi_bar+lambda_j)*G_j^{sigma-1}.
Field nominal_wage(const ModelParams& params, const Kernel& kernel, const Grid& grid,
                   const Field& lambda, const Field& G);

/// Real wage omega = w - mu * ln(G).
Field real_wage(const ModelParams& params, const Field& w, const Field& G);

/// Average real wage: dx * sum_i omega_i * lambda_i (Lambda = 1).
double average_real_wage(const Grid& grid, const Field& omega, const Field& lambda);

/// Preallocated buffers for the equilibrium evaluation inside time stepping.
/// Works with G^{1-sigma} directly; G itself is only materialized on demand.
class EquilibriumWorkspace {
public:
    explicit EquilibriumWorkspace(int node_count);

    /// Computes omega and omega_avg for the given density. No density
    /// validation; the caller owns that. Throws degenerate_density_error
    /// if the price-index integrand is nonpositive anywhere.
    void eval(const ModelParams& params, const Kernel& kernel, const Grid& grid,
              std::span<const double> lambda);

    std::span<const double> omega() const { return omega_; }
    double omega_avg() const { return omega_avg_; }
    /// G^{sigma-1} as computed during the last eval.
    std::span<const double> g_pow() const { return g_pow_; }
    /// G^{1-sigma} (the raw bracketed integral) from the last eval.
    std::span<const double> g_inv_pow() const { return g_inv_; }

private:
    std::vector<double> g_inv_;    // G^{1-sigma}
    std::vector<double> g_pow_;    // G^{sigma-1}
    std::vector<double> weighted_; // (phi_bar + lambda) * G^{sigma-1}
    std::vector<double> w_;
    std::vector<double> omega_;
    double omega_avg_ = 0.0;
};

}  // namespace racetrack

#endif
