#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "sdq/gates_single.hpp"
#include "sdq/units.hpp"

namespace sdq {

/// g1d = 2 a_t alpha sqrt(omega_y omega_z) / omega_x, in units of hbar omega_x / alpha.
double effective_1d_coupling(const UnitSystem& units, double a_t);

struct InteractionParams {
    double a_t = 0.0;  // m
    double g1d = 0.0;

    static InteractionParams from_scattering_length(const UnitSystem& units, double a_t);
};

/// Phases are phase lags: an amplitude c carries phase -arg(c), so a repulsive
/// contact term makes phi_c grow with g1d from 0.
struct PhaseGateResult {
    double rho = 0.0;
    double phi_s = 0.0;
    double phi = 0.0;
    double phi_c = 0.0;
    double fidelity = 0.0;
    double single_return = 0.0;      // |<L|U|L>|^2 of the 1D run
    double phi_free = 0.0;           // two-particle phase with g = 0
    double double_occupation = 0.0;  // max over the hold of P(both atoms in one trap)
};

/// F = rho (cos(phi_c - pi) + 1) / 2.
double gate_fidelity(double rho, double phi_c) noexcept;

/// Wraps into (-pi, pi].
double wrap_phase(double phi) noexcept;
/// phi + 2 pi k closest to `reference`.
double unwrap_nearest(double phi, double reference) noexcept;

/// Two atoms in one double well; the left trap plays A_1 and the right B_0.
class TwoAtomSimulator {
public:
    TwoAtomSimulator(const TrapShape& shape, double a_max, Numerics numerics = Numerics::two_dimensional());

    const Grid1D& grid() const noexcept { return single_.grid(); }
    const SingleQubitSimulator& single() const noexcept { return single_; }
    const Numerics& numerics() const noexcept { return single_.numerics(); }

    /// Bosonic pair, one atom in each isolated trap ground state.
    Wavefunction2D initial_pair() const;

    /// Three runs of the same cycle: 2D with g1d, 2D with g = 0, and 1D.
    /// Throws MiscalibratedPulseError if the single atom returns with < 0.99.
    PhaseGateResult run_collisional_hold(const TrajectorySpec& traj, double g1d) const;

    /// Whole t_i curve for one t_r from a single ramp-in and hold. For real H
    /// and a palindromic cycle the release is the transpose of the ramp-in, so
    /// <init|U_out U_hold U_in|init> = (U_in init)^T U_hold (U_in init).
    /// Hold times are rounded to multiples of dt; the rounded values are returned.
    struct Row {
        std::vector<double> t_i;
        std::vector<PhaseGateResult> cells;
    };
    Row hold_curve(double a_min, double t_r, const std::vector<double>& t_i_grid, double g1d) const;

private:
    SingleQubitSimulator single_;
};

PhaseGateResult run_collisional_hold(const TrapShape& shape, const TrajectorySpec& traj, double g1d,
                                     Numerics numerics = Numerics::two_dimensional());

struct FidelityMap {
    std::vector<double> t_r;
    std::vector<double> t_i;
    std::vector<std::vector<PhaseGateResult>> cells;  // [t_r][t_i], phi_c unwrapped along rows
};

FidelityMap sweep_fidelity_map(const TrapShape& shape, double a_max, double a_min, const std::vector<double>& t_r_grid,
                               const std::vector<double>& t_i_grid, double g1d,
                               Numerics numerics = Numerics::two_dimensional(), unsigned threads = 1);

enum class Arrangement { in_line, side_by_side };

/// Calibrated cycles for the phase gate: a pi pulse on qubit B (in-line only)
/// and an n*2pi collision pulse on the pair of traps that meet.
struct PulseSequence {
    TrajectorySpec pi_pulse;
    TrajectorySpec collision;
};

/// Logical phases theta_ij for inputs |i>_A |j>_B, and the same after
/// absorbing single-particle phases into |1>_A, |1>_B and a global phase:
/// (0, 0, 0, theta_11 - theta_01 - theta_10 + theta_00).
struct PhaseTable {
    std::array<double, 4> raw{};
    std::array<double, 4> absorbed{};
    std::array<double, 4> populations{};  // |M_ii|^2
    double offdiagonal = 0.0;             // Frobenius norm of M minus its diagonal
    std::vector<StepLeakage> steps;
    double deviation = 0.0;               // |wrap(absorbed[3] - pi)|
    bool success = false;
};

PhaseTable run_phase_gate(Arrangement arrangement, const TrapShape& shape, const PulseSequence& pulses, double g1d,
                          Numerics numerics = Numerics::two_dimensional(), double leakage_threshold = 1e-2,
                          double tolerance = 0.05);

/// Logical-state index for |i>_A |j>_B.
constexpr std::size_t logical_index(int i, int j) noexcept { return static_cast<std::size_t>(2 * i + j); }

}  // namespace sdq
