#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "racetrack/geometry.hpp"
#include "racetrack/stability.hpp"

using namespace racetrack;

namespace {

constexpr double pi = std::numbers::pi;

// Frozen reference values, evaluated independently from the closed forms
// (mu=0.1, sigma=5, tau=0.5, F=1, Phi=1.3 unless stated).
constexpr double g_bar_ref = 1.5839735004628537;
constexpr double e0_alpha2 = 0.998132557268292;    // E_0 at alpha=2
constexpr double e1_alpha2 = 0.8014939541853664;   // E_1 at alpha=2
constexpr double j2_ref = 0.06911503837897545;
constexpr double j_limit_ref = -0.006283185307179565;  // alpha->inf, Phi=1.3

}  // namespace

TEST_CASE("homogeneous_state closed forms") {
    ModelParams params;
    const HomogeneousState st = homogeneous_state(params);
    CHECK(st.w_bar == doctest::Approx(0.046).epsilon(1e-14));  // mu(Phi+1)/sigma
    CHECK(st.G_bar == doctest::Approx(g_bar_ref).epsilon(1e-14));
    CHECK(st.G_pow == doctest::Approx(std::pow(g_bar_ref, 4.0)).epsilon(1e-13));
    CHECK(st.omega_bar ==
          doctest::Approx(st.w_bar - params.mu * std::log(st.G_bar)).epsilon(1e-14));

    ModelParams phi3 = params;
    phi3.Phi = 3.0;
    CHECK(homogeneous_state(phi3).w_bar == doctest::Approx(0.08).epsilon(1e-14));

    ModelParams mu0 = params;
    mu0.mu = 0.0;
    const HomogeneousState st0 = homogeneous_state(mu0);
    CHECK(st0.w_bar == 0.0);
    CHECK(st0.omega_bar == 0.0);
}

TEST_CASE("mode_coefficient") {
    CHECK(mode_coefficient(2.0, 0) == doctest::Approx(e0_alpha2).epsilon(1e-15));
    CHECK(mode_coefficient(2.0, 1) == doctest::Approx(e1_alpha2).epsilon(1e-15));
    // parity symmetry
    for (int n = 1; n <= 12; ++n) {
        CHECK(mode_coefficient(2.0, n) == mode_coefficient(2.0, -n));
        CHECK(mode_coefficient(2.0, n) > 0.0);
    }
    // large-n decay bound
    for (int n : {50, 500, 5000}) {
        const double bound = 2.0 * 2.0 * (1.0 + std::exp(-2.0 * pi)) / (double(n) * n);
        CHECK(mode_coefficient(2.0, n) <= bound);
    }
    CHECK_THROWS_AS(mode_coefficient(0.0, 1), std::invalid_argument);
}

TEST_CASE("mode_coefficient matches the DFT of the discretized kernel row") {
    const Grid grid = build_grid(256);
    const double alpha = 2.0;
    const Kernel kernel = build_kernel(grid, alpha);
    for (int n = 0; n <= 16; ++n) {
        std::complex<double> acc(0.0, 0.0);
        for (int j = 0; j < grid.node_count; ++j) {
            const double theta = grid.nodes[j] - grid.nodes[0];
            acc += kernel(0, j) * std::exp(std::complex<double>(0.0, -n * theta));
        }
        const double dft = (acc * grid.dx).real();
        CHECK(std::abs(dft - mode_coefficient(alpha, n)) <= 1e-3);
    }
}

TEST_CASE("stability_coefficient") {
    ModelParams params;
    CHECK(stability_coefficient(params, 2) == doctest::Approx(j2_ref).epsilon(1e-13));
    CHECK_THROWS_AS(stability_coefficient(params, 0), std::invalid_argument);

    ModelParams mu0 = params;
    mu0.mu = 0.0;
    for (int n = 1; n <= 8; ++n) CHECK(stability_coefficient(mu0, n) == 0.0);

    // J_n = J_{-n}
    for (int n = 1; n <= 8; ++n) {
        CHECK(stability_coefficient(params, n) == stability_coefficient(params, -n));
    }
}

TEST_CASE("alpha -> infinity limit") {
    ModelParams params;
    CHECK(stability_coefficient_limit(params) == doctest::Approx(j_limit_ref).epsilon(1e-14));

    // G_pow * E_n -> 2 pi F; empirical envelope 2 n^2 / alpha^2
    for (double alpha : {10.0, 50.0, 100.0}) {
        ModelParams p = params;
        p.tau = alpha / (p.sigma - 1.0);
        const HomogeneousState st = homogeneous_state(p);
        for (int n : {1, 2, 3}) {
            const double ge = st.G_pow * mode_coefficient(alpha, n);
            const double target = two_pi * p.F;
            CHECK(std::abs(ge - target) / target <= 2.0 * n * n / (alpha * alpha));
        }
    }
}

TEST_CASE("no_black_hole classification") {
    ModelParams params;
    CHECK(no_black_hole(params));  // 1.25 < 1.3

    ModelParams boundary = params;
    boundary.Phi = 1.25;
    CHECK_FALSE(no_black_hole(boundary));  // strict inequality

    ModelParams wide{0.1, 2.0, 0.5, 1.0, 3.0};
    CHECK(no_black_hole(wide));

    // closed-economy limit sign matches the classification both ways
    CHECK(stability_coefficient_limit(params) < 0.0);
    ModelParams hole = params;
    hole.Phi = 1.2;
    CHECK_FALSE(no_black_hole(hole));
    CHECK(stability_coefficient_limit(hole) > 0.0);
}

TEST_CASE("tail_instability_threshold") {
    ModelParams params;  // all modes unstable here, so n_tilde = 0
    const int nt = tail_instability_threshold(params, 64);
    CHECK(nt == 0);
    for (int n = 1; n <= 64; ++n) CHECK(stability_coefficient(params, n) > 0.0);

    // strong decay: low modes stable, tail unstable
    ModelParams strong = params;
    strong.tau = 5.0;  // alpha = 20
    const int n_max = 10 * static_cast<int>(std::ceil(strong.alpha())) + 100;
    const int nt2 = tail_instability_threshold(strong, n_max);
    CHECK(nt2 > 0);
    CHECK(nt2 <= tail_bound_mode(strong));
    for (int n = nt2 + 1; n <= n_max; ++n) {
        CHECK(stability_coefficient(strong, n) > 0.0);
    }

    CHECK_THROWS_AS(tail_instability_threshold(strong, 2), std::invalid_argument);
}

TEST_CASE("tail threshold exists for random parameters") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> sigma_dist(1.0 + 1e-3, 10.0);
    std::uniform_real_distribution<double> tau_dist(1e-3, 2.0);
    for (double Phi : {1.3, 3.0}) {
        for (int trial = 0; trial < 20; ++trial) {
            ModelParams p;
            p.sigma = sigma_dist(rng);
            p.tau = tau_dist(rng);
            p.Phi = Phi;
            const int n_max = 10 * static_cast<int>(std::ceil(p.alpha())) + 100;
            const int nt = tail_instability_threshold(p, n_max);
            CHECK(nt >= 0);
            CHECK(nt <= tail_bound_mode(p));
            // sample 50 modes above the threshold
            for (int k = 1; k <= 50; ++k) {
                const int n = nt + 1 + (k * 977) % (n_max - nt);
                CHECK(stability_coefficient(p, n) > 0.0);
            }
        }
    }
}

TEST_CASE("spectrum") {
    ModelParams params;
    const Spectrum spec = spectrum(params, 16);
    REQUIRE(spec.rows.size() == 16);
    CHECK(spec.fastest_mode == 2);
    for (const auto& row : spec.rows) {
        CHECK(row.growth_rate ==
              doctest::Approx(ModelParams::lambda_bar * row.J_n).epsilon(1e-15));
        if (row.J_n > marginal_tolerance) CHECK(row.verdict == ModeVerdict::unstable);
        if (row.J_n < -marginal_tolerance) CHECK(row.verdict == ModeVerdict::stable);
    }

    ModelParams slow = params;
    slow.tau = 0.1;
    CHECK(spectrum(slow, 32).fastest_mode == 1);

    ModelParams mu0 = params;
    mu0.mu = 0.0;
    for (const auto& row : spectrum(mu0, 8).rows) {
        CHECK(row.growth_rate == 0.0);
        CHECK(row.verdict == ModeVerdict::marginal);
    }

    // every scanned mode above n_tilde is unstable
    ModelParams strong = params;
    strong.tau = 3.0;
    const int n_max = 10 * static_cast<int>(std::ceil(strong.alpha())) + 100;
    const int nt = tail_instability_threshold(strong, n_max);
    for (const auto& row : spectrum(strong, n_max).rows) {
        if (row.n > nt) CHECK(row.verdict == ModeVerdict::unstable);
    }
}
