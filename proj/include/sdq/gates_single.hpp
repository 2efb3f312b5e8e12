#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sdq/errors.hpp"
#include "sdq/splitting_table.hpp"
#include "sdq/traps.hpp"
#include "sdq/wavefunction.hpp"

namespace sdq {

struct Numerics {
    std::size_t n = 512;
    double dt = 2e-3;

    static Numerics one_dimensional() { return {512, 2e-3}; }
    static Numerics two_dimensional() { return {256, 5e-3}; }
    void validate() const;
};

/// Ground states of the isolated left and right traps at +-a_max.
struct QubitBasis {
    Wavefunction1D left_state;
    Wavefunction1D right_state;

    static QubitBasis isolated(const TrapShape& shape, double a_max, const Grid1D& grid);
};

struct InitialQubitState {
    Complex c0{1.0, 0.0};
    Complex c1{0.0, 0.0};

    static InitialQubitState zero() { return {}; }
    static InitialQubitState one() { return {0.0, 1.0}; }
    static InitialQubitState superposition(Complex c0, Complex c1) { return {c0, c1}; }
    void validate() const;
};

struct GateRunResult {
    double rho0 = 0.0;
    double rho1 = 0.0;
    double leakage = 0.0;
    Wavefunction1D final_state;
    double phase0 = 0.0;
    double phase1 = 0.0;
    Complex amp0{}, amp1{};
};

/// One trap shape, a_max and grid; runs any trajectory that starts and ends at a_max.
class SingleQubitSimulator {
public:
    SingleQubitSimulator(const TrapShape& shape, double a_max, Numerics numerics = {});

    const TrapShape& shape() const noexcept { return shape_; }
    const Grid1D& grid() const noexcept { return grid_; }
    const QubitBasis& basis() const noexcept { return basis_; }
    const Numerics& numerics() const noexcept { return numerics_; }
    double a_max() const noexcept { return a_max_; }

    Wavefunction1D prepare(const InitialQubitState& initial) const;
    GateRunResult measure(const Wavefunction1D& psi) const;

    /// Ramp [0, t_r] only; the first segment of every cycle.
    Wavefunction1D ramp_in(const TrajectorySpec& traj, const Wavefunction1D& psi) const;
    /// Hold and release, continuing from ramp_in's output.
    Wavefunction1D finish(const TrajectorySpec& traj, const Wavefunction1D& after_ramp) const;

    GateRunResult run(const TrajectorySpec& traj, const InitialQubitState& initial) const;

    /// 2x2 transfer matrix T[b][c] = <b|U|c> in the {left, right} basis.
    std::array<std::array<Complex, 2>, 2> transfer(const TrajectorySpec& traj) const;

private:
    void check_trajectory(const TrajectorySpec& traj) const;

    TrapShape shape_;
    double a_max_;
    Numerics numerics_;
    Grid1D grid_;
    QubitBasis basis_;
};

GateRunResult run_single_qubit(const TrapShape& shape, const TrajectorySpec& traj,
                               const InitialQubitState& initial, Numerics numerics = {});

struct SweepCell {
    double t_r = 0.0;
    double t_i = 0.0;
    std::optional<GateRunResult> result;
    std::string error;
};

/// cells[r][i] for t_r_grid[r], t_i_grid[i], starting from |0>.
struct RabiMap {
    std::vector<double> t_r;
    std::vector<double> t_i;
    std::vector<std::vector<SweepCell>> cells;
};

RabiMap sweep_rabi_map(const TrapShape& shape, double a_max, double a_min, const std::vector<double>& t_r_grid,
                       const std::vector<double>& t_i_grid, Numerics numerics = {}, unsigned threads = 1);

/// Pulse area in units of pi; `flops` > 0 marks an n*2pi return pulse.
struct PulseArea {
    double area = 1.0;  // radians / pi

    static PulseArea half_pi() { return {0.5}; }
    static PulseArea pi() { return {1.0}; }
    static PulseArea full_flops(int n) { return {2.0 * n}; }
    bool is_return() const noexcept;
    double radians() const noexcept;
};

struct Calibration {
    double t_i = 0.0;
    double guess = 0.0;  // from the Omega integral
    std::vector<CalibrationSample> trace;
    GateRunResult check;  // run from |0> at the returned t_i
};

Calibration calibrate_pulse(const SingleQubitSimulator& sim, double a_min, double t_r, PulseArea target,
                            double tolerance = 1e-3);
Calibration calibrate_pulse(const TrapShape& shape, double a_max, double a_min, double t_r, PulseArea target,
                            Numerics numerics = {});

/// Least-squares fit of y = c + p cos(w t) + q sin(w t) with w scanned over
/// [w_lo, w_hi] and polished by Brent. Returns w.
double fit_frequency(const std::vector<double>& t, const std::vector<double>& y, double w_lo, double w_hi);

}  // namespace sdq
