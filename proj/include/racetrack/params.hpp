#ifndef RACETRACK_PARAMS_HPP
#define RACETRACK_PARAMS_HPP

#include <numbers>

namespace racetrack {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Economic parameters of the racetrack model. The total mobile population
/// is fixed to 1, so the homogeneous mobile density is 1/(2*pi).
struct ModelParams {
    double mu = 0.1;     // manufacturing expenditure share, in [0,1)
    double sigma = 5.0;  // elasticity of substitution, > 1
    double tau = 0.5;    // transport cost per unit distance, > 0
    double F = 1.0;      // fixed labor input per firm, > 0
    double Phi = 1.3;    // total immobile population, > 0

    static constexpr double Lambda = 1.0;  // total mobile population, fixed
    static constexpr double lambda_bar = 1.0 / two_pi;

    double alpha() const { return (sigma - 1.0) * tau; }
    double phi_bar() const { return Phi / two_pi; }

    /// Throws std::invalid_argument naming the offending parameter.
    void validate() const;
};

}  // namespace racetrack

#endif
