#pragma once

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "sdq/eigensolver.hpp"
#include "sdq/grid.hpp"
#include "sdq/propagator.hpp"

namespace sdq {

enum class TrapKind { piecewise_harmonic, gaussian };

struct TrapShape {
    TrapKind kind = TrapKind::piecewise_harmonic;
    double omega = 1.0;  // trap frequency in units of omega_x
    double v0 = 0.0;     // well depth, gaussian only

    static TrapShape harmonic() { return {}; }
    static TrapShape gaussian(double depth) { return {TrapKind::gaussian, 1.0, depth}; }
    void validate() const;
};

/// V(x) for two wells centred at +-a.
/// piecewise harmonic: omega^2 (|x| - a)^2 / 2; gaussian: sum of two
/// -v0 exp(-omega^2 (x -+ a)^2 / (2 v0)).
std::vector<double> potential_double_well(const TrapShape& shape, double a, const Grid1D& grid);
void potential_double_well(const TrapShape& shape, double a, const Grid1D& grid, std::span<double> out);

/// One isolated well centred at `centre`.
std::vector<double> potential_single_well(const TrapShape& shape, double centre, const Grid1D& grid);

PotentialFamily double_well_family(const TrapShape& shape);

enum class ProfileKind { cosine, spline };

/// Half-separation a(t): approach on [0, t_r], hold at a_min for t_i, then the
/// time-mirrored release. A spline profile interpolates (time, a) knots on
/// [0, t_r] monotonically (PCHIP, zero slope at both ends) and is clamped to
/// [a_floor, a_max].
struct TrajectorySpec {
    double a_max = 5.0;
    double a_min = 1.8;
    double t_r = 40.0;
    double t_i = 0.0;
    ProfileKind profile = ProfileKind::cosine;
    std::vector<std::pair<double, double>> knots;
    double a_floor = 0.0;

    static TrajectorySpec cosine(double a_max, double a_min, double t_r, double t_i);
    /// Knots at uniform times over [0, t_r]; the hold separation is the last value.
    static TrajectorySpec spline(double a_max, const std::vector<double>& values, double t_r, double t_i,
                                 double a_floor);

    double duration() const noexcept { return 2.0 * t_r + t_i; }
    void validate() const;
};

double separation_at(const TrajectorySpec& traj, double t);

/// Evaluator with the spline built once; cheap to call per step.
class SeparationCurve {
public:
    explicit SeparationCurve(const TrajectorySpec& traj);
    double operator()(double t) const;
    const TrajectorySpec& spec() const noexcept { return traj_; }

private:
    double ramp(double t) const;

    struct Spline;
    TrajectorySpec traj_;
    std::shared_ptr<const Spline> spline_;
};

/// V(x, t) = double well at separation a(t).
PotentialSampler make_sampler(const TrapShape& shape, const TrajectorySpec& traj, const Grid1D& grid);

/// Default box for a trajectory: [-(a_max + margin), a_max + margin].
Grid1D default_grid(const TrapShape& shape, double a_max, std::size_t n);

}  // namespace sdq
