#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sdq/gates_single.hpp"
#include "sdq/traps.hpp"

namespace sdq {

struct OptimizationConfig {
    TrapShape shape = TrapShape::gaussian(200.0);
    double a_max = 70.0;
    double a_min_hard = 14.35;  // lower bound for every knot; the last knot sits here
    double t_r = 1100.0;
    std::size_t knots = 8;
    std::size_t objective_states = 2;
    std::size_t budget = 300;  // objective evaluations
    std::uint64_t seed = 1;
    Numerics numerics{512, 0.05};
    unsigned threads = 1;

    void validate() const;
};

struct OptimizationResult {
    TrajectorySpec trajectory;
    double infidelity = 1.0;
    double baseline_infidelity = 1.0;  // cosine ramp, same endpoints and t_r
    std::vector<double> history;       // best value after each simplex iteration
    std::size_t evaluations = 0;
    bool converged = false;
    double hold_omega = 0.0;  // ground doublet gap at the final separation
};

/// 1 - mean overlap of the k lowest eigenstates at a_max, carried through the
/// ramp, with the span of the k lowest eigenstates at the ramp's end point.
class LeakageObjective {
public:
    LeakageObjective(const TrapShape& shape, double a_max, std::size_t states, Numerics numerics);

    double operator()(const TrajectorySpec& traj) const;

    const Grid1D& grid() const noexcept { return grid_; }

private:
    TrapShape shape_;
    double a_max_;
    std::size_t states_;
    Numerics numerics_;
    Grid1D grid_;
    std::vector<Wavefunction1D> initial_;
};

double leakage_objective(const TrajectorySpec& traj, const TrapShape& shape, std::size_t objective_states,
                         Numerics numerics = {512, 0.05});

/// Knot values (first = a_max, last = a_min_hard) sampled from the cosine ramp.
std::vector<double> cosine_knots(double a_max, double a_min, std::size_t knots);

OptimizationResult optimize_trajectory(const OptimizationConfig& config);

struct RabiCurve {
    std::vector<double> t_i;
    std::vector<double> rho0;
    std::vector<double> rho1;
};

/// Full cycles (ramp, hold t_i, mirrored release) from `initial`.
RabiCurve rabi_after_optimized_ramp(const OptimizationResult& result, const TrapShape& shape,
                                    const std::vector<double>& t_i_grid, Numerics numerics = {512, 0.05},
                                    InitialQubitState initial = {}, unsigned threads = 1);

}  // namespace sdq
