#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sdq/errors.hpp"
#include "sdq/gates_two.hpp"

using namespace sdq;

namespace {

const Numerics coarse{128, 1e-2};
const TrapShape harmonic = TrapShape::harmonic();
constexpr double lab_g1d = 0.435264;

const TwoAtomSimulator& pair() {
    static const TwoAtomSimulator s(harmonic, 5.0, coarse);
    return s;
}

// 2 pi return at t_r = 10 on the coarse grid, calibrated once.
const TrajectorySpec& return_pulse() {
    static const TrajectorySpec t = [] {
        const auto c = calibrate_pulse(pair().single(), 1.8, 10.0, PulseArea::full_flops(1), 2e-3);
        return TrajectorySpec::cosine(5.0, 1.8, 10.0, c.t_i);
    }();
    return t;
}

// Trapezoid quadrature of |chi|^4 for a unit-mass oscillator ground state.
double quartic_integral(double omega) {
    const double h = 1e-3;
    double s = 0.0;
    for (double y = -12.0; y <= 12.0; y += h) {
        const double chi2 = std::sqrt(omega / std::numbers::pi) * std::exp(-omega * y * y);
        s += chi2 * chi2 * h;
    }
    return s;
}

}  // namespace

TEST_CASE("effective coupling against the transverse overlap integral") {
    const UnitSystem iso(2e5, 2e5, 2e5);
    CHECK(effective_1d_coupling(iso, iso.alpha_inv()) == doctest::Approx(2.0).epsilon(1e-12));
    const double quad = 4.0 * std::numbers::pi * quartic_integral(1.0) * quartic_integral(1.0);
    CHECK(quad == doctest::Approx(2.0).epsilon(1e-9));

    const UnitSystem lab(2e5, 2e5, 1.1e6);
    const double a_t = 106.0 * constants::bohr_radius;
    const double numeric = 4.0 * std::numbers::pi * (a_t / lab.alpha_inv()) * quartic_integral(lab.ratio_y()) *
                           quartic_integral(lab.ratio_z());
    CHECK(effective_1d_coupling(lab, a_t) == doctest::Approx(numeric).epsilon(1e-9));
    CHECK(lab.alpha_inv() * 1e9 == doctest::Approx(60.4457).epsilon(1e-5));
    CHECK(effective_1d_coupling(lab, a_t) == doctest::Approx(lab_g1d).epsilon(1e-5));

    CHECK(effective_1d_coupling(lab, 0.0) == 0.0);
    CHECK_THROWS_AS(effective_1d_coupling(lab, -1e-9), ValidationError);
    CHECK(InteractionParams::from_scattering_length(lab, a_t).g1d == effective_1d_coupling(lab, a_t));
}

TEST_CASE("fidelity formula and phase helpers") {
    CHECK(gate_fidelity(1.0, std::numbers::pi) == doctest::Approx(1.0));
    CHECK(gate_fidelity(1.0, 0.0) == doctest::Approx(0.0));
    CHECK(gate_fidelity(0.5, std::numbers::pi) == doctest::Approx(0.5));
    CHECK(wrap_phase(3.0 * std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(wrap_phase(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(wrap_phase(0.1 - 4.0 * std::numbers::pi) == doctest::Approx(0.1));
    CHECK(unwrap_nearest(-3.0, 3.0) == doctest::Approx(2.0 * std::numbers::pi - 3.0));
}

TEST_CASE("no collisions, no collisional phase") {
    const auto r = pair().run_collisional_hold(return_pulse(), 0.0);
    CHECK(r.single_return > 0.99);
    CHECK(std::abs(r.phi_c) < 1e-4);
    CHECK(r.fidelity < 1e-6);
    CHECK(std::abs(wrap_phase(r.phi_free - 2.0 * r.phi_s)) < 1e-4);
    CHECK(r.fidelity == gate_fidelity(r.rho, r.phi_c));
}

TEST_CASE("collisional phase grows with the coupling") {
    double previous = 0.0;
    for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const auto row = pair().hold_curve(1.8, 10.0, {return_pulse().t_i}, s * lab_g1d);
        const auto& c = row.cells.front();
        const double phi = unwrap_nearest(c.phi_c, previous);
        if (s > 0.0) CHECK(phi > previous);
        previous = phi;
        CHECK(c.fidelity == gate_fidelity(c.rho, c.phi_c));
    }
    // Lag convention: a repulsive contact pushes the phase beyond pi here.
    CHECK(previous > 2.5);
}

TEST_CASE("hold curve agrees with direct runs") {
    const auto& traj = return_pulse();
    const auto direct = pair().run_collisional_hold(traj, lab_g1d);
    const auto row = pair().hold_curve(1.8, 10.0, {traj.t_i}, lab_g1d);
    // The curve snaps t_i to whole steps; the direct run uses the same count.
    REQUIRE(std::abs(row.t_i.front() - traj.t_i) <= 0.5 * coarse.dt + 1e-12);
    const auto snapped = TrajectorySpec::cosine(5.0, 1.8, 10.0, row.t_i.front());
    const auto exact = pair().run_collisional_hold(snapped, lab_g1d);
    const auto& c = row.cells.front();
    CHECK(c.rho == doctest::Approx(exact.rho).epsilon(1e-8));
    CHECK(std::abs(wrap_phase(c.phi_c - exact.phi_c)) < 1e-7);
    CHECK(std::abs(direct.rho - exact.rho) < 1e-2);
    CHECK(exact.double_occupation >= 0.0);
    CHECK(exact.double_occupation <= 1.0);
}

TEST_CASE("miscalibrated pulses are rejected") {
    const auto half = TrajectorySpec::cosine(5.0, 1.8, 10.0, 0.5 * return_pulse().t_i);
    CHECK_THROWS_AS(pair().run_collisional_hold(half, lab_g1d), MiscalibratedPulseError);
    CHECK_THROWS_AS(pair().run_collisional_hold(return_pulse(), -1.0), ValidationError);
}

TEST_CASE("fidelity map rows are aligned and validated") {
    const auto map = sweep_fidelity_map(harmonic, 5.0, 1.8, {8.0, 10.0}, {0.0, 1.0, 2.0}, lab_g1d, coarse);
    REQUIRE(map.cells.size() == 2);
    CHECK(map.cells[0].size() == 3);
    CHECK(std::abs(map.cells[1][0].phi_c - map.cells[0][0].phi_c) <= std::numbers::pi);
    for (const auto& row : map.cells)
        for (const auto& c : row) CHECK(c.fidelity == gate_fidelity(c.rho, c.phi_c));
    CHECK_THROWS_AS(sweep_fidelity_map(harmonic, 5.0, 1.8, {}, {1.0}, lab_g1d, coarse), ValidationError);
    CHECK_THROWS_AS(sweep_fidelity_map(harmonic, 5.0, 1.8, {1.0}, {}, lab_g1d, coarse), ValidationError);
}

TEST_CASE("phase table bookkeeping") {
    const auto pi = calibrate_pulse(pair().single(), 1.8, 10.0, PulseArea::pi(), 2e-2);
    const PulseSequence seq{TrajectorySpec::cosine(5.0, 1.8, 10.0, pi.t_i), return_pulse()};

    SUBCASE("without interaction the gate is trivial") {
        const auto t = run_phase_gate(Arrangement::in_line, harmonic, seq, 0.0, coarse, 1.0);
        CHECK(t.absorbed[0] == 0.0);
        CHECK(std::abs(t.absorbed[3]) < 1e-3);
        CHECK_FALSE(t.success);
        CHECK(t.steps.size() == 4);
        for (double p : t.populations) CHECK(p > 0.9);
    }
    SUBCASE("both arrangements fold the collision into input 11") {
        const auto a = run_phase_gate(Arrangement::in_line, harmonic, seq, lab_g1d, coarse, 1.0);
        const auto b = run_phase_gate(Arrangement::side_by_side, harmonic, seq, lab_g1d, coarse, 1.0);
        const auto hold = pair().run_collisional_hold(return_pulse(), lab_g1d);
        // In line, whatever the pi pulse leaves behind takes the unshifted path
        // in each of the four entries.
        CHECK(std::abs(wrap_phase(a.absorbed[3] + hold.phi_c)) < 4.0 * (1.0 - pi.check.rho1) + 1e-3);
        CHECK(std::abs(wrap_phase(b.absorbed[3] + hold.phi_c)) < 1e-3);
        CHECK(a.deviation == doctest::Approx(std::abs(wrap_phase(a.absorbed[3] - std::numbers::pi))));
        CHECK(b.steps.size() == 2);
    }
    SUBCASE("leaky steps raise") {
        CHECK_THROWS_AS(run_phase_gate(Arrangement::in_line, harmonic, seq, lab_g1d, coarse, 1e-6), GateLeakageError);
    }
}
