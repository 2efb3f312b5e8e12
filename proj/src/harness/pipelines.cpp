#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <thread>

#include "sdq/entangler.hpp"
#include "sdq/errors.hpp"
#include "sdq/gates_two.hpp"
#include "sdq/harness/run.hpp"
#include "sdq/traj_opt.hpp"

namespace sdq::harness {

using nlohmann::json;

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

PipelineOutput fig1(const ExperimentConfig& c) {
    const auto map = sweep_rabi_map(c.shape, c.a_max, c.a_min, c.t_r_grid, c.t_i_grid, c.numerics,
                                    resolve_threads(c.threads));
    PipelineOutput out;
    Table t{"fig1", {"t_r", "t_i", "rho0", "rho1", "leakage"}, {}};
    double drift = 0.0, worst_leak = 0.0;
    std::vector<double> column_max(map.t_r.size(), 0.0);
    for (std::size_t r = 0; r < map.t_r.size(); ++r)
        for (std::size_t i = 0; i < map.t_i.size(); ++i) {
            const auto& cell = map.cells[r][i];
            if (!cell.result) {
                out.errors.push_back("t_r=" + std::to_string(cell.t_r) + " t_i=" + std::to_string(cell.t_i) + ": " +
                                     cell.error);
                t.rows.push_back({cell.t_r, cell.t_i, nan, nan, nan});
                continue;
            }
            const auto& g = *cell.result;
            t.rows.push_back({cell.t_r, cell.t_i, g.rho0, g.rho1, g.leakage});
            drift = std::max(drift, std::abs(g.final_state.norm_squared() - 1.0));
            worst_leak = std::max(worst_leak, g.leakage);
            column_max[r] = std::max(column_max[r], g.leakage);
        }
    const SingleQubitSimulator sim(c.shape, c.a_max, c.numerics);
    out.diagnostics = {{"norm_drift", drift},
                       {"max_leakage", worst_leak},
                       {"max_leakage_per_t_r", column_max},
                       {"omega_a_min", splitting_frequency(double_well_family(c.shape), c.a_min, sim.grid())}};
    out.tables.push_back(std::move(t));
    return out;
}

PipelineOutput fig2(const ExperimentConfig& c) {
    const double g1d = effective_1d_coupling(c.units, c.a_t);
    const TwoAtomSimulator sim(c.shape, c.a_max, c.numerics);
    const std::size_t rows = c.t_r_grid.size();
    std::vector<std::optional<TwoAtomSimulator::Row>> result(rows);
    std::vector<std::string> errors(rows);

    auto do_row = [&](std::size_t r) {
        try {
            result[r] = sim.hold_curve(c.a_min, c.t_r_grid[r], c.t_i_grid, g1d);
        } catch (const std::exception& e) {
            errors[r] = e.what();
        }
    };
    const unsigned threads = std::min<unsigned>(resolve_threads(c.threads), static_cast<unsigned>(rows));
    if (threads <= 1) {
        for (std::size_t r = 0; r < rows; ++r) do_row(r);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t r; (r = next++) < rows;) do_row(r);
            });
    }

    PipelineOutput out;
    Table t{"fig2", {"t_r", "t_i", "rho", "phi_c", "fidelity"}, {}};
    double best = -1.0, best_t_r = nan, best_t_i = nan;
    std::optional<double> anchor;
    json returns = json::array();
    for (std::size_t r = 0; r < rows; ++r) {
        if (!result[r]) {
            out.errors.push_back("t_r=" + std::to_string(c.t_r_grid[r]) + ": " + errors[r]);
            for (double ti : c.t_i_grid) t.rows.push_back({c.t_r_grid[r], ti, nan, nan, nan});
            continue;
        }
        auto& row = *result[r];
        // Align each row's unwrapped start with the previous good row.
        const double shift = anchor ? unwrap_nearest(row.cells[0].phi_c, *anchor) - row.cells[0].phi_c : 0.0;
        anchor = row.cells[0].phi_c + shift;
        for (std::size_t i = 0; i < row.t_i.size(); ++i) {
            const auto& cell = row.cells[i];
            t.rows.push_back({c.t_r_grid[r], row.t_i[i], cell.rho, cell.phi_c + shift, cell.fidelity});
            if (cell.fidelity > best) {
                best = cell.fidelity;
                best_t_r = c.t_r_grid[r];
                best_t_i = row.t_i[i];
            }
        }
        // Where the n-flop single-atom return falls on this row.
        try {
            const auto cal = calibrate_pulse(sim.single(), c.a_min, c.t_r_grid[r], PulseArea::full_flops(c.flops));
            const auto near = std::min_element(row.t_i.begin(), row.t_i.end(), [&](double a, double b) {
                return std::abs(a - cal.t_i) < std::abs(b - cal.t_i);
            });
            const auto& cell = row.cells[static_cast<std::size_t>(near - row.t_i.begin())];
            returns.push_back({{"t_r", c.t_r_grid[r]},
                               {"t_i_return", cal.t_i},
                               {"t_i_cell", *near},
                               {"rho", cell.rho},
                               {"phi_c_mod_2pi", std::fmod(std::fmod(cell.phi_c, 2 * std::numbers::pi) + 2 * std::numbers::pi,
                                                           2 * std::numbers::pi)},
                               {"fidelity", cell.fidelity},
                               {"double_occupation", cell.double_occupation}});
        } catch (const std::exception& e) {
            returns.push_back({{"t_r", c.t_r_grid[r]}, {"error", e.what()}});
        }
    }
    out.diagnostics = {{"g1d", g1d},
                       {"max_fidelity", finite_or_null(best)},
                       {"max_fidelity_t_r", finite_or_null(best_t_r)},
                       {"max_fidelity_t_i", finite_or_null(best_t_i)},
                       {"single_atom_returns", returns}};
    out.tables.push_back(std::move(t));
    return out;
}

PipelineOutput fig3(const ExperimentConfig& c) {
    const auto traj = TrajectorySpec::cosine(c.a_max, c.a_min, c.t_r, c.t_i);
    const auto h = hubbard_from_traps(c.shape, traj, c.units, c.a_t, c.numerics);
    const auto samples = evolve_two_boson(h, EntanglerState::initial(), c.series_dt, c.sample_every);

    PipelineOutput out;
    Table t{"fig3", {"t", "rho00", "rho01", "rho10", "rho11", "rho_dq", "rho_dt", "bell_fidelity"}, {}};
    double drift = 0.0, symmetry = 0.0;
    for (const auto& s : samples) {
        const auto p = populations(s);
        t.rows.push_back({s.t, p.rho00, p.rho01, p.rho10, p.rho11, p.rho_dq, p.rho_dt, bell_fidelity(s)});
        drift = std::max(drift, std::abs(p.total() - 1.0));
        symmetry = std::max({symmetry, std::abs(p.rho00 - p.rho11), std::abs(p.rho00 - 0.5 * p.rho_dq)});
    }
    const auto last = populations(samples.back());
    out.diagnostics = {{"u", h.u},
                       {"j_peak", h.j_x(c.t_r + 0.5 * c.t_i)},
                       {"norm_drift", drift},
                       {"symmetry_deviation", symmetry},
                       {"final_bell_fidelity", bell_fidelity(samples.back())},
                       {"final_rho_dt", last.rho_dt},
                       {"nodes", oscillation_nodes(samples)}};
    out.tables.push_back(std::move(t));
    return out;
}

PipelineOutput fig4(const ExperimentConfig& c) {
    OptimizationConfig oc;
    oc.shape = c.shape;
    oc.a_max = c.a_max;
    oc.a_min_hard = c.a_min;
    oc.t_r = c.t_r;
    oc.knots = c.knots;
    oc.objective_states = c.objective_states;
    oc.budget = c.budget;
    oc.seed = c.seed;
    oc.numerics = c.numerics;
    oc.threads = resolve_threads(c.threads);
    const auto r = optimize_trajectory(oc);
    const auto rabi = rabi_after_optimized_ramp(r, c.shape, c.t_i_grid, c.numerics, InitialQubitState::zero(),
                                                oc.threads);

    PipelineOutput out;
    Table traj{"fig4_trajectory", {"t", "a"}, {}};
    const SeparationCurve curve(r.trajectory);
    const int samples = 200;
    for (int k = 0; k <= samples; ++k) {
        const double t = c.t_r * k / samples;
        traj.rows.push_back({t, curve(t)});
    }
    Table rabi_t{"fig4_rabi", {"t_i", "rho1"}, {}};
    double leak = 0.0;
    for (std::size_t k = 0; k < rabi.t_i.size(); ++k) {
        rabi_t.rows.push_back({rabi.t_i[k], rabi.rho1[k]});
        leak = std::max(leak, 1.0 - rabi.rho0[k] - rabi.rho1[k]);
    }
    json knots = json::array();
    for (auto [time, a] : r.trajectory.knots) knots.push_back({time, a});
    out.documents.emplace_back("fig4_optimization", json{{"knots", knots},
                                                         {"a_floor", r.trajectory.a_floor},
                                                         {"t_r", c.t_r},
                                                         {"infidelity", r.infidelity},
                                                         {"baseline_infidelity", r.baseline_infidelity},
                                                         {"history", r.history},
                                                         {"evaluations", r.evaluations},
                                                         {"converged", r.converged},
                                                         {"hold_omega", r.hold_omega},
                                                         {"seed", c.seed}});
    out.diagnostics = {{"infidelity", r.infidelity},
                       {"baseline_infidelity", r.baseline_infidelity},
                       {"converged", r.converged},
                       {"hold_omega", r.hold_omega},
                       {"rabi_max_leakage", leak}};
    out.tables.push_back(std::move(traj));
    out.tables.push_back(std::move(rabi_t));
    return out;
}

// One cycle traced through time: (t, a, rho0, rho1, leakage).
PipelineOutput custom(const ExperimentConfig& c) {
    const auto traj = TrajectorySpec::cosine(c.a_max, c.a_min, c.t_r, c.t_i);
    const SingleQubitSimulator sim(c.shape, c.a_max, c.numerics);
    const auto& grid = sim.grid();
    const auto left = sim.basis().left_state.amplitudes();
    const auto right = sim.basis().right_state.amplitudes();
    const SeparationCurve curve(traj);

    Table t{"custom", {"t", "a", "rho0", "rho1", "leakage"}, {}};
    auto record = [&](double time, std::span<const Complex> psi) {
        Complex p0 = 0.0, p1 = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            p0 += std::conj(left[i]) * psi[i];
            p1 += std::conj(right[i]) * psi[i];
        }
        const double r0 = std::norm(p0 * grid.dx()), r1 = std::norm(p1 * grid.dx());
        t.rows.push_back({time, curve(time), r0, r1, 1.0 - r0 - r1});
    };
    SplitStepPropagator1D prop(grid);
    prop.load(0, sim.prepare(InitialQubitState::zero()));
    record(0.0, prop.row(0));
    const auto steps = step_count(traj.duration(), c.numerics.dt);
    prop.evolve(make_sampler(c.shape, traj, grid), 0.0, traj.duration(), c.numerics.dt,
                [&](std::size_t s, double time, std::span<const Complex> psi) {
                    if (s % c.sample_every == 0 || s == steps) record(time, psi);
                });
    PipelineOutput out;
    const auto& end = t.rows.back();
    out.diagnostics = {{"final_rho0", end[2]}, {"final_rho1", end[3]}, {"final_leakage", end[4]},
                       {"norm_drift", std::abs(prop.state(0).norm_squared() - 1.0)}};
    out.tables.push_back(std::move(t));
    return out;
}

}  // namespace

PipelineOutput run_pipeline(const ExperimentConfig& config) {
    config.validate();
    switch (config.experiment) {
        case Experiment::fig1_sweep: return fig1(config);
        case Experiment::fig2_fidelity_map: return fig2(config);
        case Experiment::fig3_entangler: return fig3(config);
        case Experiment::fig4_optimize: return fig4(config);
        case Experiment::custom: return custom(config);
    }
    throw ValidationError("experiment", "unknown");
}

}  // namespace sdq::harness
