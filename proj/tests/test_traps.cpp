#include <doctest.h>

#include <cmath>

#include "sdq/eigensolver.hpp"
#include "sdq/errors.hpp"
#include "sdq/splitting_table.hpp"
#include "sdq/traps.hpp"

using namespace sdq;

TEST_CASE("piecewise harmonic double well values") {
    const auto grid = Grid1D::symmetric(8.0, 256);
    const auto shape = TrapShape::harmonic();
    const double a = 2.5;
    const auto v = potential_double_well(shape, a, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = std::abs(grid.x(i)) - a;
        CHECK(v[i] == doctest::Approx(0.5 * d * d).epsilon(1e-14));
    }
    // x = 0 is a grid point for even n on a symmetric box.
    CHECK(v[grid.size() / 2] == doctest::Approx(0.5 * a * a));
}

TEST_CASE("gaussian double well values") {
    const auto grid = Grid1D::symmetric(10.0, 256);
    const auto shape = TrapShape::gaussian(200.0);
    const auto v0 = potential_double_well(shape, 0.0, grid);
    CHECK(v0[grid.size() / 2] == doctest::Approx(-400.0));

    const auto single = potential_single_well(shape, 0.0, grid);
    for (double x : {0.05, 0.1, 0.2}) {
        const std::size_t i = grid.size() / 2 + static_cast<std::size_t>(std::lround(x / grid.dx()));
        const double xi = grid.x(i);
        CHECK(single[i] == doctest::Approx(-200.0 + 0.5 * xi * xi).epsilon(1e-6));
    }
}

TEST_CASE("double wells are mirror symmetric") {
    const auto grid = Grid1D::symmetric(9.0, 128);
    for (const auto& shape : {TrapShape::harmonic(), TrapShape::gaussian(50.0)})
        for (double a : {0.0, 0.7, 3.3}) {
            const auto v = potential_double_well(shape, a, grid);
            // x(i) and x(n - i) are mirror images; x(0) has no partner.
            for (std::size_t i = 1; i < grid.size(); ++i) CHECK(v[i] == doctest::Approx(v[grid.size() - i]).epsilon(1e-13));
        }
}

TEST_CASE("gaussian spectrum approaches the harmonic one as the depth grows") {
    const auto grid = Grid1D::symmetric(12.0, 256);
    double previous = 1e300;
    for (double depth : {50.0, 100.0, 200.0}) {
        const auto shape = TrapShape::gaussian(depth);
        const auto s = stationary_states(grid, potential_single_well(shape, 0.0, grid), 2);
        const double err = std::abs(s[0].energy + depth - 0.5) + std::abs(s[1].energy + depth - 1.5);
        CHECK(err < previous);
        previous = err;
    }
    CHECK(previous < 1e-2);
}

TEST_CASE("trap shape validation") {
    CHECK_THROWS_AS(TrapShape::gaussian(0.0).validate(), ValidationError);
    CHECK_THROWS_AS(TrapShape::gaussian(-1.0).validate(), ValidationError);
    TrapShape bad;
    bad.omega = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    const auto grid = Grid1D::symmetric(5.0, 64);
    CHECK_THROWS_AS(potential_double_well(TrapShape::harmonic(), -1.0, grid), ValidationError);
}

TEST_CASE("cosine trajectory endpoints and symmetry") {
    const auto traj = TrajectorySpec::cosine(5.0, 1.8, 40.0, 12.0);
    CHECK(traj.duration() == doctest::Approx(92.0));
    CHECK(separation_at(traj, 0.0) == doctest::Approx(5.0));
    CHECK(separation_at(traj, 40.0) == doctest::Approx(1.8));
    CHECK(separation_at(traj, 46.0) == doctest::Approx(1.8));
    CHECK(separation_at(traj, 20.0) == doctest::Approx(1.8 + 3.2 / 2.0));
    CHECK(separation_at(traj, 92.0) == doctest::Approx(5.0));
    for (double t = 0.0; t <= 92.0; t += 0.37)
        CHECK(separation_at(traj, 92.0 - t) == doctest::Approx(separation_at(traj, t)).epsilon(1e-13));
    CHECK_THROWS_AS(separation_at(traj, -0.1), ValidationError);
    CHECK_THROWS_AS(separation_at(traj, 92.5), ValidationError);
}

TEST_CASE("trajectory validation") {
    CHECK_THROWS_AS(TrajectorySpec::cosine(5.0, 0.0, 40.0, 0.0), ValidationError);
    CHECK_THROWS_AS(TrajectorySpec::cosine(1.0, 2.0, 40.0, 0.0), ValidationError);
    CHECK_THROWS_AS(TrajectorySpec::cosine(5.0, 1.8, 0.0, 0.0), ValidationError);
    CHECK_THROWS_AS(TrajectorySpec::cosine(5.0, 1.8, 10.0, -1.0), ValidationError);
    CHECK_THROWS_AS(TrajectorySpec::spline(5.0, {5.0, 2.0}, 10.0, 0.0, 1.0), ValidationError);
    CHECK_NOTHROW(TrajectorySpec::cosine(5.0, 5.0, 10.0, 0.0));
}

TEST_CASE("spline trajectory") {
    const auto traj = TrajectorySpec::spline(70.0, {70.0, 60.0, 20.0, 13.0, 14.35}, 100.0, 10.0, 14.0);
    CHECK(traj.a_min == doctest::Approx(14.35));
    CHECK(separation_at(traj, 0.0) == doctest::Approx(70.0));
    CHECK(separation_at(traj, 25.0) == doctest::Approx(60.0));
    CHECK(separation_at(traj, 100.0) == doctest::Approx(14.35));
    CHECK(separation_at(traj, 105.0) == doctest::Approx(14.35));

    const SeparationCurve curve(traj);
    double prev = curve(0.0);
    for (double t = 1e-3; t <= traj.duration(); t += 1e-3) {
        const double a = curve(t);
        // Clamped to the floor where the knot at 13 dips below it.
        CHECK(a >= 14.0 - 1e-12);
        CHECK(a <= 70.0 + 1e-12);
        CHECK(std::abs(a - prev) < 0.1);
        prev = a;
    }
    for (double t = 0.0; t <= traj.duration(); t += 1.3)
        CHECK(curve(traj.duration() - t) == doctest::Approx(curve(t)).epsilon(1e-12));
}

TEST_CASE("sampler matches the instantaneous double well") {
    const auto shape = TrapShape::harmonic();
    const auto traj = TrajectorySpec::cosine(5.0, 1.8, 10.0, 3.0);
    const auto grid = default_grid(shape, 5.0, 128);
    CHECK(grid.x_min() == doctest::Approx(-13.0));
    const auto sampler = make_sampler(shape, traj, grid);
    std::vector<double> v(grid.size());
    sampler(7.5, v);
    const auto ref = potential_double_well(shape, separation_at(traj, 7.5), grid);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == ref[i]);
}

TEST_CASE("splitting table against direct eigensolves") {
    const auto shape = TrapShape::harmonic();
    const auto grid = default_grid(shape, 5.0, 256);
    const SplittingTable table(shape, grid, 1.8, 5.0, 25);
    const auto family = double_well_family(shape);
    const auto& a = table.separations();
    // midpoints are the worst case for the interpolant
    for (std::size_t k = 0; k + 1 < a.size(); k += 3) {
        const double mid = 0.5 * (a[k] + a[k + 1]);
        if (mid > 4.0) break;  // beyond this Omega is below 1e-7 and roundoff-limited
        CHECK(table(mid) == doctest::Approx(splitting_frequency(family, mid, grid)).epsilon(1e-3));
    }
    CHECK(table(a[3]) == doctest::Approx(splitting_frequency(family, a[3], grid)).epsilon(1e-12));

    // Over a hold the integral is Omega(a_min) t_i.
    const SeparationCurve hold(TrajectorySpec::cosine(5.0, 1.8, 10.0, 6.0));
    CHECK(table.integrate(hold, 10.0, 16.0) == doctest::Approx(6.0 * table(1.8)).epsilon(1e-12));
}
