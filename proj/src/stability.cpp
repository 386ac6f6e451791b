#include "racetrack/stability.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace racetrack {

std::string to_string(ModeVerdict v) {
    switch (v) {
        case ModeVerdict::stable: return "stable";
        case ModeVerdict::unstable: return "unstable";
        case ModeVerdict::marginal: return "marginal";
    }
    return "?";
}

HomogeneousState homogeneous_state(const ModelParams& params) {
    params.validate();
    HomogeneousState st;
    st.lambda_bar = ModelParams::lambda_bar;
    st.phi_bar = params.phi_bar();
    st.w_bar = params.mu * (st.phi_bar + st.lambda_bar) / (params.sigma * st.lambda_bar);
    const double alpha = params.alpha();
    const double g_inv = 2.0 * st.lambda_bar * (1.0 - std::exp(-alpha * std::numbers::pi)) /
                         (params.F * alpha);
    st.G_pow = 1.0 / g_inv;
    st.G_bar = std::pow(g_inv, 1.0 / (1.0 - params.sigma));
    st.omega_bar = st.w_bar - params.mu * std::log(st.G_bar);
    return st;
}

double mode_coefficient(double alpha, int n) {
    if (!(alpha > 0.0)) throw std::invalid_argument("mode_coefficient: alpha must be > 0");
    const double parity = (std::abs(n) % 2 == 0) ? 1.0 : -1.0;
    const double e = std::exp(-alpha * std::numbers::pi);
    return 2.0 * alpha * (1.0 - parity * e) /
           (static_cast<double>(n) * n + alpha * alpha);
}

double stability_coefficient(const ModelParams& params, int n) {
    if (n == 0) {
        throw std::invalid_argument(
            "stability_coefficient: n = 0 is excluded (mass-conserving perturbations)");
    }
    const HomogeneousState st = homogeneous_state(params);
    const double En = mode_coefficient(params.alpha(), n);
    const double ge = st.G_pow * En;
    const double sigma = params.sigma;
    return params.mu * ge / params.F *
           ((2.0 * sigma - 1.0) / (sigma * (sigma - 1.0)) -
            (st.phi_bar + st.lambda_bar) / (sigma * params.F) * ge);
}

double stability_coefficient_limit(const ModelParams& params) {
    const double sigma = params.sigma;
    return 2.0 * params.mu * std::numbers::pi *
           (2.0 * sigma - 1.0 - (sigma - 1.0) * (params.Phi + 1.0)) /
           (sigma * (sigma - 1.0));
}

bool no_black_hole(const ModelParams& params) {
    return params.sigma / (params.sigma - 1.0) < params.Phi;
}

int tail_bound_mode(const ModelParams& params) {
    const double alpha = params.alpha();
    const double e = std::exp(-alpha * std::numbers::pi);
    const double ratio = (params.sigma - 1.0) * (params.Phi + 1.0) * (1.0 + e) /
                         ((2.0 * params.sigma - 1.0) * (1.0 - e));
    return static_cast<int>(std::ceil(alpha * std::sqrt(ratio)));
}

namespace {

// n^2 + alpha^2 > alpha^2 (sigma-1)(Phi+1)(1+e^{-a pi}) / ((2 sigma-1)(1-e^{-a pi}))
// forces the bracket of J_n positive regardless of parity.
bool tail_bound_holds(const ModelParams& params, int n) {
    const double alpha = params.alpha();
    const double e = std::exp(-alpha * std::numbers::pi);
    const double lhs = static_cast<double>(n) * n + alpha * alpha;
    const double rhs = alpha * alpha * (params.sigma - 1.0) * (params.Phi + 1.0) *
                       (1.0 + e) / ((2.0 * params.sigma - 1.0) * (1.0 - e));
    return lhs > rhs;
}

}  // namespace

int tail_instability_threshold(const ModelParams& params, int n_max) {
    if (n_max < 1) throw std::invalid_argument("tail_instability_threshold: n_max must be >= 1");
    params.validate();
    if (!tail_bound_holds(params, n_max)) {
        throw std::invalid_argument(
            "tail_instability_threshold: n_max too small, analytic tail bound does not "
            "engage before n = " + std::to_string(tail_bound_mode(params)));
    }
    int n_tilde = 0;
    for (int n = 1; n <= n_max; ++n) {
        if (!(stability_coefficient(params, n) > 0.0)) n_tilde = n;
    }
    return n_tilde;
}

Spectrum spectrum(const ModelParams& params, int n_max) {
    if (n_max < 1) throw std::invalid_argument("spectrum: n_max must be >= 1");
    params.validate();
    Spectrum result;
    result.rows.reserve(n_max);
    int fastest = 1;
    double best = -std::numeric_limits<double>::infinity();
    for (int n = 1; n <= n_max; ++n) {
        SpectrumRow row;
        row.n = n;
        row.E_n = mode_coefficient(params.alpha(), n);
        row.J_n = stability_coefficient(params, n);
        row.growth_rate = ModelParams::lambda_bar * row.J_n;
        if (std::abs(row.J_n) < marginal_tolerance) {
            row.verdict = ModeVerdict::marginal;
        } else {
            row.verdict = row.J_n > 0.0 ? ModeVerdict::unstable : ModeVerdict::stable;
        }
        if (row.growth_rate > best) {
            best = row.growth_rate;
            fastest = n;
        }
        result.rows.push_back(row);
    }
    result.fastest_mode = fastest;
    return result;
}

}  // namespace racetrack
