#ifndef RACETRACK_STABILITY_HPP
#define RACETRACK_STABILITY_HPP

#include <string>
#include <vector>

#include "racetrack/params.hpp"

namespace racetrack {

/// Flat-earth stationary solution and its closed-form equilibrium values.
struct HomogeneousState {
    double lambda_bar;
    double phi_bar;
    double w_bar;
    double G_bar;
    double G_pow;  // G_bar^{sigma-1}, the combination the spectrum uses
    double omega_bar;
};

enum class ModeVerdict { stable, unstable, marginal };

std::string to_string(ModeVerdict v);

struct SpectrumRow {
    int n;
    double E_n;
    double J_n;
    double growth_rate;  // lambda_bar * J_n
    ModeVerdict verdict;
};

struct Spectrum {
    std::vector<SpectrumRow> rows;  // n = 1..n_max
    int fastest_mode;               // argmax growth rate; heuristic spike-count predictor
};

/// |J_n| below this counts as marginal rather than carrying a sign.
inline constexpr double marginal_tolerance = 1e-12;

HomogeneousState homogeneous_state(const ModelParams& params);

/// Fourier coefficient of the transport kernel on the circle:
/// E_n = 2*alpha*(1 - (-1)^|n| e^{-alpha*pi}) / (n^2 + alpha^2).
double mode_coefficient(double alpha, int n);

/// Growth coefficient of mode n around the flat-earth state. n != 0.
double stability_coefficient(const ModelParams& params, int n);

/// alpha -> infinity limit of J_n (independent of n).
double stability_coefficient_limit(const ModelParams& params);

/// No-black-hole condition sigma/(sigma-1) < Phi.
bool no_black_hole(const ModelParams& params);

/// Smallest n_tilde >= 0 such that J_n > 0 for all n_tilde < n <= n_max,
/// with an analytic bound guaranteeing positivity for all n > n_max.
/// Throws std::invalid_argument when n_max is too small for the bound.
int tail_instability_threshold(const ModelParams& params, int n_max);

/// Smallest mode count for which the analytic tail bound engages; useful to
/// size n_max. Equals ceil(alpha * sqrt((sigma-1)(Phi+1)(1+e^{-a pi}) /
/// ((2 sigma - 1)(1 - e^{-a pi})))).
int tail_bound_mode(const ModelParams& params);

Spectrum spectrum(const ModelParams& params, int n_max);

}  // namespace racetrack

#endif
