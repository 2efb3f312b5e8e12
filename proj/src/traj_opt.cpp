#include "sdq/traj_opt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "sdq/eigensolver.hpp"
#include "sdq/errors.hpp"
#include "sdq/propagator.hpp"

namespace sdq {

namespace {

template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < count;) body(i);
        });
}

// Uniform in [0, 1) from the raw engine output, identical on every platform.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

void OptimizationConfig::validate() const {
    shape.validate();
    numerics.validate();
    if (knots < 3) throw ValidationError("knots", "need at least 3 knots");
    if (budget < 1) throw ValidationError("budget", "must be >= 1");
    if (objective_states < 1) throw ValidationError("objective_states", "must be >= 1");
    if (!(a_min_hard > 0.0) || !(a_min_hard < a_max) || !std::isfinite(a_max))
        throw ValidationError("a_min_hard", "must satisfy 0 < a_min_hard < a_max");
    if (!(t_r > 0.0) || !std::isfinite(t_r)) throw ValidationError("t_r", "ramp time must be > 0");
}

// ----------------------------------------------------------------------------- objective

LeakageObjective::LeakageObjective(const TrapShape& shape, double a_max, std::size_t states, Numerics numerics)
    : shape_(shape), a_max_(a_max), states_(states), numerics_(numerics),
      grid_(default_grid(shape, a_max, numerics.n)) {
    numerics_.validate();
    if (states_ < 1) throw ValidationError("objective_states", "must be >= 1");
    for (auto& pair : stationary_states(grid_, potential_double_well(shape_, a_max_, grid_), states_))
        initial_.push_back(std::move(pair.state));
}

double LeakageObjective::operator()(const TrajectorySpec& traj) const {
    traj.validate();
    if (std::abs(traj.a_max - a_max_) > 1e-12)
        throw ValidationError("a_max", "trajectory a_max differs from the objective's");

    SplitStepPropagator1D prop(grid_, states_);
    for (std::size_t s = 0; s < states_; ++s) prop.load(s, initial_[s]);
    prop.evolve(make_sampler(shape_, traj, grid_), 0.0, traj.t_r, numerics_.dt);

    const double a_end = separation_at(traj, traj.t_r);
    const auto target = stationary_states(grid_, potential_double_well(shape_, a_end, grid_), states_);
    double kept = 0.0;
    for (std::size_t s = 0; s < states_; ++s) {
        const auto psi = prop.state(s);
        for (const auto& t : target) kept += std::norm(overlap(t.state, psi));
    }
    return std::clamp(1.0 - kept / static_cast<double>(states_), 0.0, 1.0);
}

double leakage_objective(const TrajectorySpec& traj, const TrapShape& shape, std::size_t objective_states,
                         Numerics numerics) {
    return LeakageObjective(shape, traj.a_max, objective_states, numerics)(traj);
}

std::vector<double> cosine_knots(double a_max, double a_min, std::size_t knots) {
    if (knots < 3) throw ValidationError("knots", "need at least 3 knots");
    std::vector<double> v(knots);
    const double last = static_cast<double>(knots - 1);
    for (std::size_t k = 0; k < knots; ++k)
        v[k] = a_min + (a_max - a_min) * 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(k) / last));
    v.front() = a_max;
    v.back() = a_min;
    return v;
}

// ----------------------------------------------------------------------------- optimizer

namespace {

// Nelder-Mead over the interior knots, parametrized as z in [0, 1] of the
// allowed band; restarts rebuild the simplex around the incumbent.
class SimplexSearch {
public:
    SimplexSearch(const OptimizationConfig& cfg, const LeakageObjective& objective)
        : cfg_(cfg), objective_(objective), rng_(cfg.seed) {}

    TrajectorySpec trajectory(const std::vector<double>& z) const {
        std::vector<double> values(cfg_.knots);
        values.front() = cfg_.a_max;
        values.back() = cfg_.a_min_hard;
        for (std::size_t k = 0; k < z.size(); ++k)
            values[k + 1] = cfg_.a_min_hard + (cfg_.a_max - cfg_.a_min_hard) * std::clamp(z[k], 0.0, 1.0);
        return TrajectorySpec::spline(cfg_.a_max, values, cfg_.t_r, 0.0, cfg_.a_min_hard);
    }

    bool exhausted() const noexcept { return evaluations_ >= cfg_.budget; }
    std::size_t evaluations() const noexcept { return evaluations_; }
    double best() const noexcept { return best_f_; }
    const std::vector<double>& best_point() const noexcept { return best_z_; }
    std::vector<double>& history() noexcept { return history_; }

    // The baseline run counts against the budget.
    void seed_incumbent(double f) {
        best_f_ = f;
        evaluations_ = 1;
    }

    // Evaluates as many points as the budget allows, in parallel; missing
    // entries are +inf. Results are consumed in index order.
    std::vector<double> evaluate(const std::vector<std::vector<double>>& points) {
        const std::size_t take = std::min(points.size(), cfg_.budget - std::min(cfg_.budget, evaluations_));
        std::vector<double> f(points.size(), std::numeric_limits<double>::infinity());
        parallel_for(take, cfg_.threads, [&](std::size_t i) { f[i] = objective_(trajectory(points[i])); });
        evaluations_ += take;
        for (std::size_t i = 0; i < take; ++i)
            if (f[i] < best_f_) {
                best_f_ = f[i];
                best_z_ = points[i];
            }
        return f;
    }

    /// One Nelder-Mead descent from `start` with initial edge `step`.
    void descend(const std::vector<double>& start, double step, bool randomize) {
        const std::size_t m = start.size();
        std::vector<std::vector<double>> x(m + 1, start);
        for (std::size_t i = 0; i < m; ++i) {
            double s = step;
            if (randomize) s *= (unit_uniform(rng_) < 0.5 ? -1.0 : 1.0) * (0.5 + unit_uniform(rng_));
            if (x[i + 1][i] + s > 1.0 || x[i + 1][i] + s < 0.0) s = -s;
            x[i + 1][i] += s;
        }
        auto f = evaluate(x);

        while (!exhausted()) {
            std::vector<std::size_t> order(m + 1);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return f[a] < f[b]; });
            const auto lo = order.front(), hi = order.back(), second = order[m - 1];
            history_.push_back(best_f_);

            double size = 0.0;
            for (std::size_t i = 0; i <= m; ++i)
                for (std::size_t d = 0; d < m; ++d) size = std::max(size, std::abs(x[i][d] - x[lo][d]));
            if (size < 1e-4 || f[hi] - f[lo] < 1e-3 * std::abs(f[lo]) + 1e-12) return;

            std::vector<double> centroid(m, 0.0);
            for (std::size_t i = 0; i <= m; ++i)
                if (i != hi)
                    for (std::size_t d = 0; d < m; ++d) centroid[d] += x[i][d] / static_cast<double>(m);
            auto along = [&](double c) {
                std::vector<double> p(m);
                for (std::size_t d = 0; d < m; ++d) p[d] = std::clamp(centroid[d] + c * (x[hi][d] - centroid[d]), 0.0, 1.0);
                return p;
            };

            const auto xr = along(-1.0);
            const double fr = evaluate({xr})[0];
            if (fr < f[lo]) {
                const auto xe = along(-2.0);
                const double fe = evaluate({xe})[0];
                if (fe < fr) {
                    x[hi] = xe;
                    f[hi] = fe;
                } else {
                    x[hi] = xr;
                    f[hi] = fr;
                }
                continue;
            }
            if (fr < f[second]) {
                x[hi] = xr;
                f[hi] = fr;
                continue;
            }
            const bool outside = fr < f[hi];
            const auto xc = along(outside ? -0.5 : 0.5);
            const double fc = evaluate({xc})[0];
            if (fc < (outside ? fr : f[hi])) {
                x[hi] = xc;
                f[hi] = fc;
                continue;
            }
            std::vector<std::vector<double>> shrunk;
            std::vector<std::size_t> which;
            for (std::size_t i = 0; i <= m; ++i) {
                if (i == lo) continue;
                for (std::size_t d = 0; d < m; ++d) x[i][d] = x[lo][d] + 0.5 * (x[i][d] - x[lo][d]);
                shrunk.push_back(x[i]);
                which.push_back(i);
            }
            const auto fs = evaluate(shrunk);
            for (std::size_t k = 0; k < which.size(); ++k) f[which[k]] = fs[k];
        }
    }

private:
    const OptimizationConfig& cfg_;
    const LeakageObjective& objective_;
    std::mt19937_64 rng_;
    std::size_t evaluations_ = 0;
    double best_f_ = std::numeric_limits<double>::infinity();
    std::vector<double> best_z_;
    std::vector<double> history_;
};

}  // namespace

OptimizationResult optimize_trajectory(const OptimizationConfig& config) {
    config.validate();
    const LeakageObjective objective(config.shape, config.a_max, config.objective_states, config.numerics);
    SimplexSearch search(config, objective);

    OptimizationResult result;
    const auto baseline = TrajectorySpec::cosine(config.a_max, config.a_min_hard, config.t_r, 0.0);
    result.baseline_infidelity = objective(baseline);
    search.seed_incumbent(result.baseline_infidelity);
    search.history().push_back(result.baseline_infidelity);

    // Warm start: interior knots on the cosine profile.
    const auto warm = cosine_knots(config.a_max, config.a_min_hard, config.knots);
    std::vector<double> start;
    for (std::size_t k = 1; k + 1 < warm.size(); ++k)
        start.push_back((warm[k] - config.a_min_hard) / (config.a_max - config.a_min_hard));

    double before = search.best();
    double step = 0.1;
    bool first = true;
    bool stalled = false;
    while (!search.exhausted()) {
        const auto& from = search.best_point().empty() ? start : search.best_point();
        search.descend(from, step, !first);
        first = false;
        const double gain = before - search.best();
        if (std::isfinite(before) && gain < 1e-5) {
            stalled = true;
            break;
        }
        before = search.best();
        step = std::max(0.02, step * 0.5);
    }

    result.evaluations = search.evaluations();
    result.history = std::move(search.history());
    if (!search.best_point().empty() && search.best() < result.baseline_infidelity) {
        result.trajectory = search.trajectory(search.best_point());
        result.infidelity = search.best();
    } else {
        result.trajectory = baseline;
        result.infidelity = result.baseline_infidelity;
    }
    result.converged = stalled || result.infidelity < 1e-3;
    const double a_end = separation_at(result.trajectory, result.trajectory.t_r);
    result.hold_omega = splitting_frequency(double_well_family(config.shape), a_end, objective.grid());
    return result;
}

// ----------------------------------------------------------------------------- Rabi curve

RabiCurve rabi_after_optimized_ramp(const OptimizationResult& result, const TrapShape& shape,
                                    const std::vector<double>& t_i_grid, Numerics numerics,
                                    InitialQubitState initial, unsigned threads) {
    if (t_i_grid.empty()) throw ValidationError("t_i_grid", "must not be empty");
    for (double t : t_i_grid)
        if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("t_i_grid", "hold times must be >= 0");
    const SingleQubitSimulator sim(shape, result.trajectory.a_max, numerics);
    const auto ramped = sim.ramp_in(result.trajectory, sim.prepare(initial));

    RabiCurve curve{t_i_grid, std::vector<double>(t_i_grid.size()), std::vector<double>(t_i_grid.size())};
    parallel_for(t_i_grid.size(), threads, [&](std::size_t i) {
        auto traj = result.trajectory;
        traj.t_i = t_i_grid[i];
        const auto r = sim.measure(sim.finish(traj, ramped));
        curve.rho0[i] = r.rho0;
        curve.rho1[i] = r.rho1;
    });
    return curve;
}

}  // namespace sdq
