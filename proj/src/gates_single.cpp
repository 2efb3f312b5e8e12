#include "sdq/gates_single.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <thread>

#include "sdq/errors.hpp"
#include "sdq/propagator.hpp"

namespace sdq {

void Numerics::validate() const {
    if (n < 64 || (n & (n - 1)) != 0) throw ValidationError("numerics.n", "must be a power of two >= 64");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("numerics.dt", "must be > 0");
}

QubitBasis QubitBasis::isolated(const TrapShape& shape, double a_max, const Grid1D& grid) {
    auto left = stationary_states(grid, potential_single_well(shape, -a_max, grid), 1).front().state;
    // x(i) -> -x(i) maps the grid onto itself, so the right state is an exact mirror.
    auto right = left.mirrored();
    return {std::move(left), std::move(right)};
}

void InitialQubitState::validate() const {
    const double norm = std::norm(c0) + std::norm(c1);
    if (std::abs(norm - 1.0) > 1e-9) throw ValidationError("initial", "|c0|^2 + |c1|^2 must be 1");
}

SingleQubitSimulator::SingleQubitSimulator(const TrapShape& shape, double a_max, Numerics numerics)
    : shape_(shape),
      a_max_(a_max),
      numerics_(numerics),
      grid_((numerics.validate(), default_grid(shape, a_max, numerics.n))),
      basis_(QubitBasis::isolated(shape, a_max, grid_)) {}

Wavefunction1D SingleQubitSimulator::prepare(const InitialQubitState& initial) const {
    initial.validate();
    Wavefunction1D psi = initial.c0 * basis_.left_state;
    psi += initial.c1 * basis_.right_state;
    psi.normalize();
    return psi;
}

GateRunResult SingleQubitSimulator::measure(const Wavefunction1D& psi) const {
    const Complex amp0 = overlap(basis_.left_state, psi);
    const Complex amp1 = overlap(basis_.right_state, psi);
    const double rho0 = std::norm(amp0), rho1 = std::norm(amp1);
    return {rho0, rho1, 1.0 - rho0 - rho1, psi, std::arg(amp0), std::arg(amp1), amp0, amp1};
}

void SingleQubitSimulator::check_trajectory(const TrajectorySpec& traj) const {
    traj.validate();
    if (std::abs(traj.a_max - a_max_) > 1e-12)
        throw ValidationError("a_max", "trajectory a_max differs from the simulator's qubit basis");
}

Wavefunction1D SingleQubitSimulator::ramp_in(const TrajectorySpec& traj, const Wavefunction1D& psi) const {
    check_trajectory(traj);
    SplitStepPropagator1D prop(grid_);
    prop.load(0, psi);
    prop.evolve(make_sampler(shape_, traj, grid_), 0.0, traj.t_r, numerics_.dt);
    return prop.state();
}

Wavefunction1D SingleQubitSimulator::finish(const TrajectorySpec& traj, const Wavefunction1D& after_ramp) const {
    check_trajectory(traj);
    SplitStepPropagator1D prop(grid_);
    prop.load(0, after_ramp);
    if (traj.t_i > 0.0)
        prop.evolve_static(potential_double_well(shape_, traj.a_min, grid_), traj.t_i, numerics_.dt);
    const double t1 = traj.t_r + traj.t_i;
    prop.evolve(make_sampler(shape_, traj, grid_), t1, t1 + traj.t_r, numerics_.dt);
    return prop.state();
}

GateRunResult SingleQubitSimulator::run(const TrajectorySpec& traj, const InitialQubitState& initial) const {
    return measure(finish(traj, ramp_in(traj, prepare(initial))));
}

std::array<std::array<Complex, 2>, 2> SingleQubitSimulator::transfer(const TrajectorySpec& traj) const {
    const auto out0 = finish(traj, ramp_in(traj, basis_.left_state));
    const auto out1 = finish(traj, ramp_in(traj, basis_.right_state));
    std::array<std::array<Complex, 2>, 2> t{};
    t[0][0] = overlap(basis_.left_state, out0);
    t[1][0] = overlap(basis_.right_state, out0);
    t[0][1] = overlap(basis_.left_state, out1);
    t[1][1] = overlap(basis_.right_state, out1);
    return t;
}

GateRunResult run_single_qubit(const TrapShape& shape, const TrajectorySpec& traj,
                               const InitialQubitState& initial, Numerics numerics) {
    return SingleQubitSimulator(shape, traj.a_max, numerics).run(traj, initial);
}

// ----------------------------------------------------------------------------- sweeps

RabiMap sweep_rabi_map(const TrapShape& shape, double a_max, double a_min, const std::vector<double>& t_r_grid,
                       const std::vector<double>& t_i_grid, Numerics numerics, unsigned threads) {
    auto ascending = [](const std::vector<double>& v) { return std::is_sorted(v.begin(), v.end()); };
    if (t_r_grid.empty()) throw ValidationError("t_r_grid", "must not be empty");
    if (t_i_grid.empty()) throw ValidationError("t_i_grid", "must not be empty");
    if (!ascending(t_r_grid)) throw ValidationError("t_r_grid", "must be ascending");
    if (!ascending(t_i_grid)) throw ValidationError("t_i_grid", "must be ascending");
    TrajectorySpec::cosine(a_max, a_min, t_r_grid.front(), t_i_grid.front());  // validates bounds

    const SingleQubitSimulator sim(shape, a_max, numerics);
    RabiMap map{t_r_grid, t_i_grid, {}};
    map.cells.resize(t_r_grid.size());
    const auto zero = sim.prepare(InitialQubitState::zero());

    // Rows share their ramp-in; cells differ only in hold and release.
    auto do_row = [&](std::size_t r) {
        auto& row = map.cells[r];
        row.resize(t_i_grid.size());
        std::optional<Wavefunction1D> ramped;
        std::string ramp_error;
        try {
            ramped = sim.ramp_in(TrajectorySpec::cosine(a_max, a_min, t_r_grid[r], 0.0), zero);
        } catch (const std::exception& e) {
            ramp_error = e.what();
        }
        for (std::size_t i = 0; i < t_i_grid.size(); ++i) {
            auto& cell = row[i];
            cell.t_r = t_r_grid[r];
            cell.t_i = t_i_grid[i];
            if (!ramped) {
                cell.error = ramp_error;
                continue;
            }
            try {
                cell.result = sim.measure(sim.finish(TrajectorySpec::cosine(a_max, a_min, cell.t_r, cell.t_i), *ramped));
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(t_r_grid.size()));
    if (threads <= 1) {
        for (std::size_t r = 0; r < t_r_grid.size(); ++r) do_row(r);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t r; (r = next++) < t_r_grid.size();) do_row(r);
            });
    }
    return map;
}

// ----------------------------------------------------------------------------- calibration

bool PulseArea::is_return() const noexcept {
    const double k = area / 2.0;
    return area > 0.0 && std::abs(k - std::round(k)) < 1e-12;
}

double PulseArea::radians() const noexcept { return area * std::numbers::pi; }

namespace {

double target_rho1(double theta) {
    const double s = std::sin(0.5 * theta);
    return s * s;
}

// Smallest area >= floor with the same transfer as theta; exact count for returns.
double next_equivalent_area(PulseArea target, double floor) {
    const double two_pi = 2.0 * std::numbers::pi;
    const double theta = target.radians();
    if (target.is_return()) return theta;
    const double base = std::fmod(theta, two_pi);
    double best = std::numeric_limits<double>::infinity();
    for (double root : {base, two_pi - base}) {
        double k = std::ceil((floor - root) / two_pi);
        best = std::min(best, root + std::max(0.0, k) * two_pi);
    }
    return best;
}

bool is_extremum(PulseArea target) {
    const double k = target.area;
    return std::abs(k - std::round(k)) < 1e-12;
}

}  // namespace

Calibration calibrate_pulse(const SingleQubitSimulator& sim, double a_min, double t_r, PulseArea target,
                            double tolerance) {
    if (!(target.area > 0.0)) throw ValidationError("target_area", "must be > 0");
    const auto probe = TrajectorySpec::cosine(sim.a_max(), a_min, t_r, 0.0);
    const double omega_hold = splitting_frequency(double_well_family(sim.shape()), a_min, sim.grid());
    // Holds longer than this are not a pulse anyone would run.
    constexpr double longest_period = 1e6;
    if (!(omega_hold > 2.0 * std::numbers::pi / longest_period))
        throw CalibrationFailedError("no usable tunneling at a_min (Omega = " + std::to_string(omega_hold) + ")", {});
    double ramp_area = 0.0;
    if (a_min < sim.a_max()) {
        const SplittingTable table(sim.shape(), sim.grid(), a_min, sim.a_max(), 25);
        ramp_area = 2.0 * table.integrate(SeparationCurve(probe), 0.0, t_r);
    }

    const double theta = next_equivalent_area(target, ramp_area);
    const double guess = (theta - ramp_area) / omega_hold;
    std::vector<CalibrationSample> trace;
    if (guess < -0.25 * 2 * std::numbers::pi / omega_hold)
        throw CalibrationFailedError("ramps alone exceed the requested area (" + std::to_string(ramp_area) +
                                         " rad > " + std::to_string(theta) + " rad)",
                                     {});

    const auto ramped = sim.ramp_in(probe, sim.prepare(InitialQubitState::zero()));
    auto evaluate = [&](double t_i) {
        auto r = sim.measure(sim.finish(TrajectorySpec::cosine(sim.a_max(), a_min, t_r, t_i), ramped));
        trace.push_back({t_i, r.rho0, r.rho1});
        return r;
    };

    const double quarter = 0.25 * 2.0 * std::numbers::pi / omega_hold;
    double lo = std::max(0.0, guess - quarter);
    double hi = std::max(lo + quarter, guess + quarter);
    const double want = target_rho1(target.radians());
    double t_best = 0.0;
    if (is_extremum(target)) {
        // Maximize the population that should be 1.
        auto objective = [&](double t) {
            const auto r = evaluate(t);
            return target.is_return() || want < 0.5 ? -r.rho0 : -r.rho1;
        };
        t_best = boost::math::tools::brent_find_minima(objective, lo, hi, 30).first;
    } else {
        auto f = [&](double t) { return evaluate(t).rho1 - want; };
        const double f_lo = f(lo), f_hi = f(hi);
        if (f_lo * f_hi > 0.0) throw CalibrationFailedError("no crossing of the target population in the bracket", trace);
        std::uintmax_t iters = 60;
        auto tol = [&](double a, double b) { return std::abs(b - a) < 1e-7 * std::max(1.0, std::abs(a)); };
        const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, iters);
        t_best = 0.5 * (a + b);
    }

    auto check = evaluate(t_best);
    const bool ok = target.is_return() ? check.rho0 > 1.0 - tolerance : std::abs(check.rho1 - want) < tolerance;
    if (!ok)
        throw CalibrationFailedError("best t_i = " + std::to_string(t_best) + " gives rho0 = " +
                                         std::to_string(check.rho0) + ", rho1 = " + std::to_string(check.rho1),
                                     trace);
    return {t_best, guess, std::move(trace), std::move(check)};
}

Calibration calibrate_pulse(const TrapShape& shape, double a_max, double a_min, double t_r, PulseArea target,
                            Numerics numerics) {
    return calibrate_pulse(SingleQubitSimulator(shape, a_max, numerics), a_min, t_r, target);
}

// ----------------------------------------------------------------------------- fitting

double fit_frequency(const std::vector<double>& t, const std::vector<double>& y, double w_lo, double w_hi) {
    if (t.size() != y.size() || t.size() < 4) throw ValidationError("samples", "need >= 4 paired samples");
    if (!(w_hi > w_lo) || !(w_lo > 0.0)) throw ValidationError("w_hi", "frequency window must satisfy 0 < lo < hi");
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    auto residual = [&](double w) {
        Eigen::MatrixXd a(static_cast<Eigen::Index>(t.size()), 3);
        for (std::size_t k = 0; k < t.size(); ++k) {
            const auto r = static_cast<Eigen::Index>(k);
            a(r, 0) = 1.0;
            a(r, 1) = std::cos(w * t[k]);
            a(r, 2) = std::sin(w * t[k]);
        }
        const Eigen::VectorXd c = a.colPivHouseholderQr().solve(yv);
        return (a * c - yv).squaredNorm();
    };
    constexpr int scan = 400;
    const double step = (w_hi - w_lo) / scan;
    int best = 0;
    double best_r = residual(w_lo);
    for (int k = 1; k <= scan; ++k) {
        const double r = residual(w_lo + step * k);
        if (r < best_r) best_r = r, best = k;
    }
    const double lo = std::max(w_lo, w_lo + step * (best - 1));
    const double hi = std::min(w_hi, w_lo + step * (best + 1));
    return boost::math::tools::brent_find_minima(residual, lo, hi, 40).first;
}

}  // namespace sdq
