#include "sdq/traps.hpp"

#include <algorithm>
#include <boost/math/interpolators/cubic_hermite.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "sdq/errors.hpp"

namespace sdq {

void TrapShape::validate() const {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw ValidationError("shape.omega", "must be > 0");
    if (kind == TrapKind::gaussian && (!(v0 > 0.0) || !std::isfinite(v0)))
        throw ValidationError("shape.v0", "gaussian depth must be > 0");
}

void potential_double_well(const TrapShape& shape, double a, const Grid1D& grid, std::span<double> out) {
    const std::size_t n = grid.size();
    const double w2 = shape.omega * shape.omega;
    if (shape.kind == TrapKind::piecewise_harmonic) {
        for (std::size_t i = 0; i < n; ++i) {
            const double d = std::abs(grid.x(i)) - a;
            out[i] = 0.5 * w2 * d * d;
        }
    } else {
        const double c = -0.5 * w2 / shape.v0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = grid.x(i);
            out[i] = -shape.v0 * (std::exp(c * (x - a) * (x - a)) + std::exp(c * (x + a) * (x + a)));
        }
    }
}

std::vector<double> potential_double_well(const TrapShape& shape, double a, const Grid1D& grid) {
    shape.validate();
    if (!(a >= 0.0) || !std::isfinite(a)) throw ValidationError("a", "half-separation must be >= 0");
    std::vector<double> v(grid.size());
    potential_double_well(shape, a, grid, v);
    return v;
}

std::vector<double> potential_single_well(const TrapShape& shape, double centre, const Grid1D& grid) {
    shape.validate();
    std::vector<double> v(grid.size());
    const double w2 = shape.omega * shape.omega;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = grid.x(i) - centre;
        v[i] = shape.kind == TrapKind::piecewise_harmonic ? 0.5 * w2 * d * d
                                                          : -shape.v0 * std::exp(-0.5 * w2 * d * d / shape.v0);
    }
    return v;
}

PotentialFamily double_well_family(const TrapShape& shape) {
    return [shape](double a, const Grid1D& grid) { return potential_double_well(shape, a, grid); };
}

// ----------------------------------------------------------------------------- trajectories

TrajectorySpec TrajectorySpec::cosine(double a_max, double a_min, double t_r, double t_i) {
    TrajectorySpec t;
    t.a_max = a_max;
    t.a_min = a_min;
    t.t_r = t_r;
    t.t_i = t_i;
    t.validate();
    return t;
}

TrajectorySpec TrajectorySpec::spline(double a_max, const std::vector<double>& values, double t_r, double t_i,
                                      double a_floor) {
    if (values.size() < 3) throw ValidationError("knots", "spline needs at least 3 knots");
    TrajectorySpec t;
    t.a_max = a_max;
    t.a_min = values.back();
    t.t_r = t_r;
    t.t_i = t_i;
    t.profile = ProfileKind::spline;
    t.a_floor = a_floor;
    const double last = static_cast<double>(values.size() - 1);
    for (std::size_t k = 0; k < values.size(); ++k)
        t.knots.emplace_back(t_r * static_cast<double>(k) / last, values[k]);
    t.validate();
    return t;
}

void TrajectorySpec::validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(a_max) || !finite(a_min) || !(a_min > 0.0)) throw ValidationError("a_min", "must be > 0");
    if (!(a_min <= a_max)) throw ValidationError("a_max", "must be >= a_min");
    if (!(t_r > 0.0) || !finite(t_r)) throw ValidationError("t_r", "ramp time must be > 0");
    if (!(t_i >= 0.0) || !finite(t_i)) throw ValidationError("t_i", "hold time must be >= 0");
    if (profile == ProfileKind::spline) {
        if (knots.size() < 3) throw ValidationError("knots", "spline needs at least 3 knots");
        if (!(a_floor >= 0.0) || a_floor > a_min) throw ValidationError("a_floor", "must lie in [0, a_min]");
        if (std::abs(knots.front().first) > 1e-12 || std::abs(knots.back().first - t_r) > 1e-9 * t_r)
            throw ValidationError("knots", "knot times must span [0, t_r]");
        for (std::size_t k = 1; k < knots.size(); ++k)
            if (!(knots[k].first > knots[k - 1].first)) throw ValidationError("knots", "knot times must ascend");
        for (const auto& [t, a] : knots)
            if (!finite(a)) throw ValidationError("knots", "knot values must be finite");
    }
}

struct SeparationCurve::Spline {
    boost::math::interpolators::cubic_hermite<std::vector<double>> curve;
    double t_first, t_last;
};

SeparationCurve::SeparationCurve(const TrajectorySpec& traj) : traj_(traj) {
    traj_.validate();
    if (traj_.profile != ProfileKind::spline) return;
    std::vector<double> kt, ka;
    for (const auto& [t, a] : traj_.knots) {
        kt.push_back(t);
        ka.push_back(a);
    }
    // Fritsch-Carlson slopes; zero at both ends so the traps start and stop at rest.
    const std::size_t m = kt.size();
    std::vector<double> slope(m, 0.0);
    for (std::size_t k = 1; k + 1 < m; ++k) {
        const double h0 = kt[k] - kt[k - 1], h1 = kt[k + 1] - kt[k];
        const double d0 = (ka[k] - ka[k - 1]) / h0, d1 = (ka[k + 1] - ka[k]) / h1;
        if (d0 * d1 <= 0.0) continue;
        const double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
        slope[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
    }
    const double first = kt.front(), last = kt.back();
    spline_ = std::make_shared<const Spline>(
        Spline{{std::move(kt), std::move(ka), std::move(slope)}, first, last});
}

double SeparationCurve::ramp(double t) const {
    if (traj_.profile == ProfileKind::cosine)
        return traj_.a_min + (traj_.a_max - traj_.a_min) * 0.5 * (1.0 + std::cos(std::numbers::pi * t / traj_.t_r));
    const double a = spline_->curve(std::clamp(t, spline_->t_first, spline_->t_last));
    return std::clamp(a, traj_.a_floor, traj_.a_max);
}

double SeparationCurve::operator()(double t) const {
    const double total = traj_.duration();
    const double eps = 1e-12 * std::max(1.0, total);
    if (!(t >= -eps) || !(t <= total + eps))
        throw ValidationError("t", "time " + std::to_string(t) + " outside trajectory [0, " + std::to_string(total) + "]");
    t = std::clamp(t, 0.0, total);
    if (t <= traj_.t_r) return ramp(t);
    if (t <= traj_.t_r + traj_.t_i) return ramp(traj_.t_r);
    return ramp(total - t);
}

double separation_at(const TrajectorySpec& traj, double t) { return SeparationCurve(traj)(t); }

PotentialSampler make_sampler(const TrapShape& shape, const TrajectorySpec& traj, const Grid1D& grid) {
    shape.validate();
    auto curve = std::make_shared<SeparationCurve>(traj);
    return [shape, curve, grid](double t, std::span<double> v) {
        potential_double_well(shape, (*curve)(t), grid, v);
    };
}

Grid1D default_grid(const TrapShape& shape, double a_max, std::size_t n) {
    shape.validate();
    return Grid1D::symmetric(a_max + 8.0 / std::sqrt(shape.omega), n);
}

}  // namespace sdq
