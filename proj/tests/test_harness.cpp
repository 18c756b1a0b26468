#include <stdexcept>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "randsplit/harness.hpp"

using namespace randsplit;

namespace {

const Grid2D kGrid41 = build_grid(41, 41, Rect{});

ManufacturedProblem pulse() {
    ManufacturedProblem mp;
    mp.kind = ProblemKind::PLaplacePulse;
    return mp;
}

ManufacturedProblem gaussian(SourceMode mode = SourceMode::Discrete) {
    ManufacturedProblem mp;
    mp.kind = ProblemKind::LinearGaussian;
    mp.source_mode = mode;
    return mp;
}

ErrorRecord record(double h, double err) {
    ErrorRecord r;
    r.h = h;
    r.rel_error = err;
    return r;
}

}  // namespace

TEST_CASE("problem parameters") {
    CHECK(pulse().p() == 4.0);
    CHECK(pulse().alpha(0.3) == 1.0);
    CHECK(gaussian().p() == 2.0);
    CHECK(gaussian().alpha(0.7) == 0.1);
    CHECK(gaussian().T() == 1.0);
}

TEST_CASE("exact solution spot values") {
    // Node (0.5, 0) is (30, 20) on the 41-node grid.
    const GridFunction p0 = exact_solution(pulse(), 0.0, kGrid41);
    CHECK(p0(30, 20) == doctest::Approx(std::pow(0.03, 0.75)).epsilon(1e-14));
    CHECK(p0(30, 20) == doctest::Approx(std::exp(0.75 * std::log(0.03))).epsilon(1e-14));
    CHECK(p0(5, 35) == 0.0);
    CHECK(profile(ProblemKind::PLaplacePulse, 0.9, 0.1) == 0.0);

    const GridFunction g0 = exact_solution(gaussian(), 0.0, kGrid41);
    CHECK(g0(30, 20) == doctest::Approx(1.0).epsilon(1e-15));
    for (int k = 0; k < 41; ++k) {
        CHECK(g0(k, 0) == 0.0);
        CHECK(g0(40, k) == 0.0);
    }
}

TEST_CASE("profile gradients match finite differences") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-0.4, 0.4);
    for (ProblemKind kind : {ProblemKind::PLaplacePulse, ProblemKind::LinearGaussian})
        for (int trial = 0; trial < 50; ++trial) {
            const double x = d(rng), y = d(rng), e = 1e-6;
            const auto [gx, gy] = profile_gradient(kind, x, y);
            const double fx = (profile(kind, x + e, y) - profile(kind, x - e, y)) / (2 * e);
            const double fy = (profile(kind, x, y + e) - profile(kind, x, y - e)) / (2 * e);
            CHECK(gx == doctest::Approx(fx).epsilon(1e-6).scale(1e-6));
            CHECK(gy == doctest::Approx(fy).epsilon(1e-6).scale(1e-6));
        }
}

TEST_CASE("time derivative matches finite differences in t") {
    const Grid2D g = build_grid(21, 21, Rect{});
    for (const ManufacturedProblem& mp : {pulse(), gaussian()})
        for (double t : {0.1, 0.37, 0.8}) {
            const double e = 1e-6;
            GridFunction fd = exact_solution(mp, t + e, g) - exact_solution(mp, t - e, g);
            fd *= 1.0 / (2 * e);
            const GridFunction dt = exact_time_derivative(mp, t, g);
            CHECK(h_norm(fd - dt) <= 1e-6 * (1 + h_norm(dt)));
        }
    // The pulse support misses the far corner.
    const GridFunction dt = exact_time_derivative(pulse(), 0.0, g);
    CHECK(dt(2, 18) == 0.0);
}

TEST_CASE("analytic Gaussian source") {
    const GridFunction f = source_term(gaussian(SourceMode::Analytic), 0.0, kGrid41);
    CHECK(f(30, 20) == doctest::Approx(40.0).epsilon(1e-12));

    // du/dt - 0.1 * Laplacian by central differences in t and space.
    const ManufacturedProblem mp = gaussian(SourceMode::Analytic);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> d(-0.3, 0.3);
    for (int trial = 0; trial < 20; ++trial) {
        const double t = 0.25 + d(rng), x = 0.5 * std::cos(2 * std::numbers::pi * t) + d(rng) * 0.5,
                     y = 0.5 * std::sin(2 * std::numbers::pi * t) + d(rng) * 0.5;
        const Grid2D pt = build_grid(3, 3, Rect{x - 1e-3, x + 1e-3, y - 1e-3, y + 1e-3});
        auto u = [&](double tt, double xx, double yy) {
            return profile(ProblemKind::LinearGaussian, xx - 0.5 * std::cos(2 * std::numbers::pi * tt),
                           yy - 0.5 * std::sin(2 * std::numbers::pi * tt));
        };
        const double e = 1e-5, hs = 1e-4;
        const double ut = (u(t + e, x, y) - u(t - e, x, y)) / (2 * e);
        const double lap = (u(t, x + hs, y) + u(t, x - hs, y) + u(t, x, y + hs) + u(t, x, y - hs) - 4 * u(t, x, y)) /
                           (hs * hs);
        const double expected = ut - 0.1 * lap;
        const double got = source_term(mp, t, pt)(1, 1);
        // Peak source magnitude is 40.
        CHECK(std::abs(got - expected) <= 1e-6 * 40);
    }
    CHECK_THROWS_AS(source_term(pulse(), 0.0, kGrid41, SourceMode::Analytic), std::invalid_argument);
}

TEST_CASE("discrete source makes the sampled solution exact for tiny steps") {
    const Grid2D g = build_grid(21, 21, Rect{});
    for (const ManufacturedProblem& mp : {pulse(), gaussian()}) {
        const ProblemSpec problem = make_problem(mp, g);
        const TimeGrid time({0.0, 1e-8, 2e-8});
        const GridFunction ref = exact_solution(mp, 2e-8, g);
        CHECK(h_norm(run_backward_euler(problem, time, SolverConfig{}).final_state() - ref) <= 1e-6 * h_norm(ref));
        const Decomposition dec(3, 1, 0.2, SplitMode::PaperCompat);
        const Trajectory t = run_randomized(problem, dec, StrategySpec{}, time, SolverConfig{}, 1, 0);
        CHECK(h_norm(t.final_state() - ref) <= 1e-6 * h_norm(ref));
    }
}

TEST_CASE("single-subdomain estimator equals backward Euler and converges at order 1") {
    ExperimentConfig cfg;
    cfg.problem = gaussian();
    cfg.grid_nodes = 21;
    cfg.Mx = cfg.My = 1;
    cfg.reps = 3;
    std::vector<ErrorRecord> records;
    const Grid2D g = cfg.grid();
    for (int e = 4; e <= 8; ++e) {
        const double h = std::ldexp(1.0, -e);
        cfg.step_sizes = {h};
        const ErrorRecord r = mc_error(cfg, h, McOptions{1});
        CHECK(r.std_err <= 1e-14 * r.rel_error);
        const Trajectory be = run_backward_euler(make_problem(cfg.problem, g), TimeGrid::with_step(1.0, h), cfg.solver);
        const GridFunction ref = exact_solution(cfg.problem, 1.0, g);
        CHECK(r.rel_error == doctest::Approx(h_norm(be.final_state() - ref) / h_norm(ref)).epsilon(1e-15));
        records.push_back(r);
    }
    const ConvergenceFit fit = fit_order(records);
    CHECK(fit.slope >= 0.85);
    CHECK(fit.slope <= 1.15);
}

TEST_CASE("estimator is independent of the worker count") {
    ExperimentConfig cfg;
    cfg.problem = gaussian();
    cfg.grid_nodes = 21;
    cfg.Mx = cfg.My = 3;
    cfg.strategy.kind = StrategyKind::Predictor;
    cfg.reps = 6;
    cfg.step_sizes = {1.0 / 16};
    const ErrorRecord a = mc_error(cfg, 1.0 / 16, McOptions{1});
    const ErrorRecord b = mc_error(cfg, 1.0 / 16, McOptions{4});
    CHECK(a.rel_error == b.rel_error);
    CHECK(a.std_err == b.std_err);
    CHECK(a.std_err > 0.0);
    CHECK(a.strategy == "predictor");
    CHECK(a.param == 0.01);
    CHECK(a.reps == 6);
}

TEST_CASE("a failing realization fails the record") {
    ExperimentConfig cfg;
    cfg.problem = pulse();
    cfg.grid_nodes = 21;
    cfg.reps = 2;
    cfg.solver.newton_max_iters = 1;
    cfg.step_sizes = {0.5};
    try {
        mc_error(cfg, 0.5, McOptions{1});
        FAIL("expected a SolverError");
    } catch (const SolverError& e) {
        CHECK(e.realization() >= 0);
        CHECK(e.step() >= 1);
    }
}

TEST_CASE("fit_order on synthetic data") {
    std::vector<ErrorRecord> sqrt_h, kinked, flat;
    for (int e = 3; e <= 12; ++e) {
        const double h = std::ldexp(1.0, -e);
        sqrt_h.push_back(record(h, std::sqrt(h)));
        kinked.push_back(record(h, h));
        flat.push_back(record(h, 0.3));
    }
    const ConvergenceFit a = fit_order(sqrt_h);
    CHECK(std::abs(a.slope - 0.5) <= 1e-12);
    CHECK(a.dropped_h.empty());
    CHECK(a.residual <= 1e-12);
    CHECK(a.evaluate(0.25) == doctest::Approx(0.5).epsilon(1e-12));

    // err = h down to 2^-8, constant 2e-2 below.
    for (ErrorRecord& r : kinked)
        if (r.h < std::ldexp(1.0, -8)) r.rel_error = 2e-2;
    const ConvergenceFit b = fit_order(kinked);
    CHECK(b.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.dropped_h.size() == 4);
    CHECK(b.used_h.size() == 6);

    CHECK_THROWS_AS(fit_order(flat), std::invalid_argument);
    CHECK_THROWS_AS(fit_order({record(0.5, 0.5), record(0.25, 0.25)}), std::invalid_argument);
    CHECK_THROWS_AS(fit_order({record(0.5, 0.0), record(0.25, 0.25), record(0.125, 0.1)}), std::invalid_argument);

    const ConvergenceFit ranged = fit_order(sqrt_h, FitRange{1e-3, 0.1});
    CHECK(ranged.used_h.size() == 6);
}

TEST_CASE("experiment config validation") {
    ExperimentConfig cfg;
    cfg.step_sizes = {0.3};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.step_sizes = {0.25};
    CHECK_NOTHROW(cfg.validate());
    cfg.reps = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.reps = 1;
    cfg.problem = pulse();
    cfg.problem.source_mode = SourceMode::Analytic;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.problem.source_mode = SourceMode::Discrete;
    cfg.grid_nodes = 40;
    cfg.strategy.kind = StrategyKind::Predictor;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
