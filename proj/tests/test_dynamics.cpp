#include <cmath>
#include <complex>

#include "doctest.h"
#include "racetrack/dynamics.hpp"
#include "racetrack/stability.hpp"

using namespace racetrack;

namespace {

Field homogeneous(const Grid& grid) {
    return Field(grid.node_count, ModelParams::lambda_bar);
}

Field cosine_perturbed(const Grid& grid, int n, double amplitude) {
    Field lambda(grid.node_count);
    double sum = 0.0;
    for (int i = 0; i < grid.node_count; ++i) {
        lambda[i] = ModelParams::lambda_bar * (1.0 + amplitude * std::cos(n * grid.nodes[i]));
        sum += lambda[i];
    }
    for (double& v : lambda) v /= sum * grid.dx;
    return lambda;
}

double mode_amplitude(const Grid& grid, const Field& lambda, int n) {
    std::complex<double> acc(0.0, 0.0);
    for (int i = 0; i < grid.node_count; ++i) {
        acc += lambda[i] * std::exp(std::complex<double>(0.0, -n * grid.nodes[i]));
    }
    return std::abs(acc) * grid.dx;
}

Field rotated(const Field& f, int k) {
    const int n = static_cast<int>(f.size());
    Field out(n);
    for (int i = 0; i < n; ++i) out[i] = f[(i - k % n + n) % n];
    return out;
}

}  // namespace

TEST_CASE("rhs vanishes at the homogeneous state") {
    ModelParams params;
    const Grid grid = build_grid(256);
    const Kernel kernel = build_kernel(grid, params.alpha());
    const Field r = rhs(params, kernel, grid, homogeneous(grid));
    for (double v : r) CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("rhs integrates to zero for any density") {
    ModelParams params;
    const Grid grid = build_grid(128);
    const Kernel kernel = build_kernel(grid, params.alpha());
    for (std::uint64_t seed : {1, 9, 42}) {
        const Field lambda = initial_condition(grid, seed, 0.3);
        const Field r = rhs(params, kernel, grid, lambda);
        CHECK(std::abs(integrate(grid, r)) <= 1e-12);
    }
}

TEST_CASE("rhs linearization matches the mode spectrum") {
    ModelParams params;  // sigma=5 tau=0.5 Phi=1.3
    const Grid grid = build_grid(256);
    const Kernel kernel = build_kernel(grid, params.alpha());
    for (int n : {1, 2, 4}) {
        const Field lambda = cosine_perturbed(grid, n, 1e-6);
        const Field r = rhs(params, kernel, grid, lambda);
        const double rate = ModelParams::lambda_bar * stability_coefficient(params, n);
        for (int i = 0; i < 256; ++i) {
            const double expected = rate * (lambda[i] - ModelParams::lambda_bar);
            if (std::abs(expected) > 1e-10 * ModelParams::lambda_bar) {
                CHECK(r[i] == doctest::Approx(expected).epsilon(0.05));
            }
        }
    }
}

TEST_CASE("step fixes the homogeneous state and conserves mass") {
    ModelParams params;
    const Grid grid = build_grid(256);
    const Kernel kernel = build_kernel(grid, params.alpha());

    const Field flat = homogeneous(grid);
    const Field next = step(params, kernel, grid, flat, 0.01);
    for (int i = 0; i < 256; ++i) {
        CHECK(std::abs(next[i] - flat[i]) <= 1e-14);
    }

    const Field lambda = initial_condition(grid, 5, 0.5);
    const Field advanced = step(params, kernel, grid, lambda, 0.01);
    CHECK(std::abs(integrate(grid, advanced) - 1.0) <= 1e-14);

    // pre-normalization drift stays tiny at dt = 0.01
    const Field raw = rk4_step_raw(params, kernel, grid, lambda, 0.01);
    double norm1 = 0.0;
    for (double v : raw) norm1 += std::abs(v);
    CHECK(std::abs(norm1 * grid.dx - 1.0) <= 1e-6);
}

TEST_CASE("one step grows a single mode by the predicted factor") {
    ModelParams params;
    const Grid grid = build_grid(256);
    const Kernel kernel = build_kernel(grid, params.alpha());
    const int n = 2;
    const Field lambda = cosine_perturbed(grid, n, 1e-6);
    const double before = mode_amplitude(grid, lambda, n);
    const Field after_field = step(params, kernel, grid, lambda, 0.01);
    const double after = mode_amplitude(grid, after_field, n);
    const double factor =
        std::exp(ModelParams::lambda_bar * stability_coefficient(params, n) * 0.01);
    CHECK(after / before == doctest::Approx(factor).epsilon(0.01));
}

TEST_CASE("initial_condition") {
    const Grid grid = build_grid(256);

    const Field a = initial_condition(grid, 1234, 0.01);
    const Field b = initial_condition(grid, 1234, 0.01);
    for (int i = 0; i < 256; ++i) CHECK(a[i] == b[i]);  // bit-for-bit

    const Field c = initial_condition(grid, 1235, 0.01);
    bool any_diff = false;
    for (int i = 0; i < 256; ++i) any_diff |= (a[i] != c[i]);
    CHECK(any_diff);

    CHECK(std::abs(integrate(grid, a) - 1.0) <= 1e-14);
    for (double v : a) CHECK(v > 0.0);

    const Field flat = initial_condition(grid, 7, 0.0);
    for (double v : flat) CHECK(v == ModelParams::lambda_bar);

    CHECK_THROWS_AS(initial_condition(grid, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(initial_condition(grid, 1, -0.1), std::invalid_argument);
}

TEST_CASE("simulate from the exact homogeneous state converges at step 1") {
    ModelParams params;
    const Grid grid = build_grid(256);
    const Kernel kernel = build_kernel(grid, params.alpha());
    IntegratorConfig config;
    const SimulationResult result = simulate(params, kernel, grid, config, homogeneous(grid));
    CHECK(result.converged);
    CHECK(result.steps == 1);
}

TEST_CASE("homogeneous state stays fixed for 100 steps") {
    ModelParams params;
    const Grid grid = build_grid(256);
    const Kernel kernel = build_kernel(grid, params.alpha());
    std::vector<double> lambda = homogeneous(grid);
    Stepper stepper(params, kernel, grid);
    for (int s = 0; s < 100; ++s) {
        double sup = 0.0, drift = 0.0;
        stepper.advance(lambda, 0.01, sup, drift);
        CHECK(sup < 1e-13);
    }
}

TEST_CASE("mass stays unit through long integration") {
    ModelParams params;
    const Grid grid = build_grid(64);
    const Kernel kernel = build_kernel(grid, params.alpha());
    std::vector<double> lambda = initial_condition(grid, 3, 0.01);
    Stepper stepper(params, kernel, grid);
    for (int s = 0; s < 2000; ++s) {
        double sup = 0.0, drift = 0.0;
        stepper.advance(lambda, 0.01, sup, drift);
        CHECK(drift <= 1e-6);
    }
    CHECK(std::abs(integrate(grid, lambda) - 1.0) <= 1e-12);
}

TEST_CASE("kernel application is rotation-equivariant bit-exactly") {
    ModelParams params;
    const Grid grid = build_grid(64);
    const Kernel kernel = build_kernel(grid, params.alpha());
    const int k = 13;
    const Field lambda = initial_condition(grid, 21, 0.05);
    Field out(64), out_rot(64);
    kernel.apply(lambda, out);
    kernel.apply(rotated(lambda, k), out_rot);
    const Field expect = rotated(out, k);
    for (int i = 0; i < 64; ++i) CHECK(out_rot[i] == expect[i]);
}

TEST_CASE("trajectories are rotation-equivariant to roundoff") {
    // the matvec is exactly equivariant, but the mass and omega-average
    // reductions sum in index order, so full steps agree only to roundoff
    ModelParams params;
    const Grid grid = build_grid(64);
    const Kernel kernel = build_kernel(grid, params.alpha());
    const int k = 13;
    std::vector<double> lambda = initial_condition(grid, 21, 0.05);
    std::vector<double> lambda_rot = rotated(lambda, k);
    Stepper s1(params, kernel, grid), s2(params, kernel, grid);
    double sup, drift;
    for (int s = 0; s < 50; ++s) {
        s1.advance(lambda, 0.01, sup, drift);
        s2.advance(lambda_rot, 0.01, sup, drift);
    }
    const Field expect = rotated(lambda, k);
    for (int i = 0; i < 64; ++i) {
        CHECK(lambda_rot[i] == doctest::Approx(expect[i]).epsilon(1e-12));
    }
}

TEST_CASE("simulate is deterministic") {
    ModelParams params;
    params.tau = 0.3;
    const Grid grid = build_grid(64);
    const Kernel kernel = build_kernel(grid, params.alpha());
    IntegratorConfig config;
    config.max_steps = 500;  // determinism check does not need convergence
    const Field lambda0 = initial_condition(grid, 77, 0.01);
    const SimulationResult r1 = simulate(params, kernel, grid, config, lambda0);
    const SimulationResult r2 = simulate(params, kernel, grid, config, lambda0);
    CHECK(r1.steps == r2.steps);
    CHECK(r1.converged == r2.converged);
    for (int i = 0; i < 64; ++i) CHECK(r1.lambda_star[i] == r2.lambda_star[i]);
}

TEST_CASE("snapshot sink sees the trajectory") {
    ModelParams params;
    const Grid grid = build_grid(64);
    const Kernel kernel = build_kernel(grid, params.alpha());
    IntegratorConfig config;
    config.max_steps = 100;
    config.snapshot_stride = 25;
    const Field lambda0 = initial_condition(grid, 2, 0.01);
    std::vector<long> seen;
    simulate(params, kernel, grid, config, lambda0,
             [&](long s, double, const Field&) { seen.push_back(s); });
    REQUIRE(seen.size() == 5);  // 25, 50, 75, 100 + final callback
    CHECK(seen[0] == 25);
    CHECK(seen[3] == 100);
    CHECK(seen[4] == 100);
}

TEST_CASE("config validation") {
    IntegratorConfig config;
    config.dt = 0.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = {};
    config.epsilon = -1.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = {};
    config.max_steps = 0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}
