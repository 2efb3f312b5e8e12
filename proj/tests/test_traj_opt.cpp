#include <doctest.h>

#include <cmath>

#include "sdq/eigensolver.hpp"
#include "sdq/errors.hpp"
#include "sdq/traj_opt.hpp"

using namespace sdq;

namespace {

const TrapShape deep = TrapShape::gaussian(200.0);
const Numerics coarse{256, 0.05};

OptimizationConfig short_ramp(std::size_t budget) {
    OptimizationConfig c;
    c.t_r = 110.0;
    c.knots = 5;
    c.budget = budget;
    c.numerics = coarse;
    return c;
}

}  // namespace

TEST_CASE("frozen trajectory keeps the eigenstates") {
    const auto frozen = TrajectorySpec::cosine(70.0, 70.0, 50.0, 0.0);
    CHECK(leakage_objective(frozen, deep, 2, coarse) < 1e-8);
}

TEST_CASE("short cosine ramps leak out of the doublet") {
    const auto fast = TrajectorySpec::cosine(70.0, 14.35, 110.0, 0.0);
    const double f = leakage_objective(fast, deep, 2, coarse);
    CHECK(f > 0.1);
    CHECK(f <= 1.0);
    const LeakageObjective one(deep, 70.0, 1, coarse);
    CHECK(one(fast) >= 0.0);
    CHECK_THROWS_AS(one(TrajectorySpec::cosine(60.0, 14.35, 110.0, 0.0)), ValidationError);
}

TEST_CASE("cosine knots") {
    const auto k = cosine_knots(70.0, 14.35, 5);
    CHECK(k.front() == 70.0);
    CHECK(k.back() == 14.35);
    CHECK(k[2] == doctest::Approx(0.5 * (70.0 + 14.35)));
    CHECK_THROWS_AS(cosine_knots(70.0, 14.35, 2), ValidationError);
}

TEST_CASE("configuration validation") {
    auto c = short_ramp(10);
    c.knots = 2;
    CHECK_THROWS_AS(optimize_trajectory(c), ValidationError);
    c = short_ramp(0);
    CHECK_THROWS_AS(optimize_trajectory(c), ValidationError);
    c = short_ramp(10);
    c.a_min_hard = 80.0;
    CHECK_THROWS_AS(optimize_trajectory(c), ValidationError);
}

TEST_CASE("optimizer contract on a short ramp") {
    const auto small = optimize_trajectory(short_ramp(15));
    const auto large = optimize_trajectory(short_ramp(30));

    CHECK(small.infidelity <= small.baseline_infidelity);
    CHECK(large.infidelity <= small.infidelity);
    CHECK(small.evaluations <= 15);
    CHECK(large.infidelity >= 0.0);
    CHECK(large.infidelity <= 1.0);
    // The bound on this ramp length is meaningful: ten times shorter than the
    // long-ramp target still leaks more than 1%.
    CHECK(large.infidelity >= 0.01);

    for (std::size_t k = 1; k < large.history.size(); ++k) CHECK(large.history[k] <= large.history[k - 1]);
    CHECK(large.history.front() == large.baseline_infidelity);

    const SeparationCurve curve(large.trajectory);
    for (double t = 0.0; t <= large.trajectory.duration(); t += 0.5) {
        CHECK(curve(t) >= 14.35 - 1e-12);
        CHECK(curve(t) <= 70.0 + 1e-12);
    }
    CHECK(separation_at(large.trajectory, 0.0) == doctest::Approx(70.0));

    // Reported value is the objective of the returned trajectory.
    CHECK(leakage_objective(large.trajectory, deep, 2, coarse) == large.infidelity);
}

TEST_CASE("optimizer is deterministic for a seed, with any thread count") {
    auto c = short_ramp(12);
    const auto a = optimize_trajectory(c);
    c.threads = 3;
    const auto b = optimize_trajectory(c);
    CHECK(a.infidelity == b.infidelity);
    CHECK(a.history == b.history);
    REQUIRE(a.trajectory.knots.size() == b.trajectory.knots.size());
    for (std::size_t k = 0; k < a.trajectory.knots.size(); ++k) CHECK(a.trajectory.knots[k] == b.trajectory.knots[k]);
}

TEST_CASE("harmonic ramps are easy") {
    OptimizationConfig c;
    c.shape = TrapShape::harmonic();
    c.a_max = 5.0;
    c.a_min_hard = 1.8;
    c.t_r = 40.0;
    c.knots = 4;
    c.budget = 10;
    c.numerics = {256, 5e-3};
    const auto r = optimize_trajectory(c);
    CHECK(r.infidelity < 1e-3);
    CHECK(r.converged);
    const auto grid = default_grid(c.shape, 5.0, 256);
    CHECK(r.hold_omega == doctest::Approx(splitting_frequency(double_well_family(c.shape), 1.8, grid)));
}

TEST_CASE("Rabi oscillations after a slow ramp") {
    // The cosine ramp at t_r = 1100 already stays in the doublet at the 1e-3 level.
    OptimizationResult slow;
    slow.trajectory = TrajectorySpec::cosine(70.0, 14.35, 1100.0, 0.0);
    const auto grid = default_grid(deep, 70.0, coarse.n);
    const double omega = splitting_frequency(double_well_family(deep), 14.35, grid);
    const double period = 2.0 * std::numbers::pi / omega;
    std::vector<double> t_i;
    for (int k = 0; k < 14; ++k) t_i.push_back(period * k / 7.0);

    const auto c0 = rabi_after_optimized_ramp(slow, deep, t_i, coarse);
    const auto c1 = rabi_after_optimized_ramp(slow, deep, t_i, coarse, InitialQubitState::one());
    CHECK(c0.rho0[0] + c0.rho1[0] > 0.99);
    for (std::size_t k = 0; k < t_i.size(); ++k) {
        CHECK(std::abs(c0.rho1[k] - c1.rho0[k]) < 1e-9);
        CHECK(std::abs(c0.rho0[k] - c1.rho1[k]) < 1e-9);
    }
    const double w = fit_frequency(c0.t_i, c0.rho1, 0.5 * omega, 1.5 * omega);
    CHECK(std::abs(w / omega - 1.0) < 0.05);
    CHECK_THROWS_AS(rabi_after_optimized_ramp(slow, deep, {}, coarse), ValidationError);
}
