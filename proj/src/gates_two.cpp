#include "sdq/gates_two.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "sdq/errors.hpp"
#include "sdq/propagator.hpp"

namespace sdq {

double effective_1d_coupling(const UnitSystem& units, double a_t) {
    if (!(a_t >= 0.0) || !std::isfinite(a_t)) throw ValidationError("a_t", "scattering length must be >= 0");
    const double alpha_a = a_t / units.alpha_inv();
    return 2.0 * alpha_a * std::sqrt(units.ratio_y() * units.ratio_z());
}

InteractionParams InteractionParams::from_scattering_length(const UnitSystem& units, double a_t) {
    return {a_t, effective_1d_coupling(units, a_t)};
}

double gate_fidelity(double rho, double phi_c) noexcept {
    return rho * (std::cos(phi_c - std::numbers::pi) + 1.0) / 2.0;
}

double wrap_phase(double phi) noexcept {
    const double two_pi = 2.0 * std::numbers::pi;
    double w = std::remainder(phi, two_pi);
    if (w <= -std::numbers::pi) w += two_pi;
    return w;
}

double unwrap_nearest(double phi, double reference) noexcept {
    return reference + wrap_phase(phi - reference);
}

namespace {

// P(both atoms on the same side of x = 0); the x = 0 column counts half.
double same_side_probability(std::span<const Complex> psi, const Grid1D& grid) {
    const std::size_t n = grid.size();
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = grid.x(i) < 0.0 ? 1.0 : (grid.x(i) == 0.0 ? 0.5 : 0.0);
    double p = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            p += std::norm(psi[i * n + j]) * (w[i] * w[j] + (1.0 - w[i]) * (1.0 - w[j]));
    return p * grid.dx() * grid.dx();
}

constexpr std::size_t occupancy_stride = 50;

}  // namespace

TwoAtomSimulator::TwoAtomSimulator(const TrapShape& shape, double a_max, Numerics numerics)
    : single_(shape, a_max, numerics) {}

Wavefunction2D TwoAtomSimulator::initial_pair() const {
    return Wavefunction2D::symmetrized_product(single_.basis().left_state, single_.basis().right_state);
}

PhaseGateResult TwoAtomSimulator::run_collisional_hold(const TrajectorySpec& traj, double g1d) const {
    traj.validate();
    if (!(g1d >= 0.0)) throw ValidationError("g1d", "must be >= 0");
    const auto& g = grid();
    const auto& shape = single_.shape();
    const double dt = numerics().dt;
    const auto init = initial_pair();
    const auto sampler = make_sampler(shape, traj, g);
    const auto hold = potential_double_well(shape, traj.a_min, g);

    auto cycle = [&](double coupling, double* occupancy) {
        SplitStepPropagator2D prop(g, coupling);
        prop.load(init);
        prop.evolve(sampler, 0.0, traj.t_r, dt);
        double worst = same_side_probability(prop.amplitudes(), g);
        if (traj.t_i > 0.0)
            prop.evolve_static(hold, traj.t_i, dt, [&](std::size_t s, double, std::span<const Complex> psi) {
                if (occupancy && s % occupancy_stride == 0) worst = std::max(worst, same_side_probability(psi, g));
            });
        if (occupancy) *occupancy = std::max(worst, same_side_probability(prop.amplitudes(), g));
        const double t1 = traj.t_r + traj.t_i;
        prop.evolve(sampler, t1, t1 + traj.t_r, dt);
        return overlap(init, prop.state());
    };

    PhaseGateResult r;
    const Complex single = overlap(single_.basis().left_state,
                                   single_.finish(traj, single_.ramp_in(traj, single_.basis().left_state)));
    r.single_return = std::norm(single);
    if (r.single_return < 0.99) throw MiscalibratedPulseError(r.single_return);

    const Complex with_g = cycle(g1d, &r.double_occupation);
    const Complex without = cycle(0.0, nullptr);
    r.rho = std::norm(with_g);
    r.phi = -std::arg(with_g);
    r.phi_s = -std::arg(single);
    r.phi_free = -std::arg(without);
    r.phi_c = wrap_phase(r.phi - 2.0 * r.phi_s);
    r.fidelity = gate_fidelity(r.rho, r.phi_c);
    return r;
}

TwoAtomSimulator::Row TwoAtomSimulator::hold_curve(double a_min, double t_r, const std::vector<double>& t_i_grid,
                                                   double g1d) const {
    if (t_i_grid.empty()) throw ValidationError("t_i_grid", "must not be empty");
    if (!std::is_sorted(t_i_grid.begin(), t_i_grid.end()) || t_i_grid.front() < 0.0)
        throw ValidationError("t_i_grid", "must be ascending and >= 0");
    const auto traj = TrajectorySpec::cosine(single_.a_max(), a_min, t_r, 0.0);
    const auto& g = grid();
    const auto& shape = single_.shape();
    const double dt = numerics().dt;

    std::vector<std::size_t> steps;
    for (double t : t_i_grid) steps.push_back(static_cast<std::size_t>(std::llround(t / dt)));
    const std::size_t last = steps.back();
    const double hold_time = static_cast<double>(last) * dt;
    const auto hold = potential_double_well(shape, a_min, g);

    Row row;
    for (auto s : steps) row.t_i.push_back(static_cast<double>(s) * dt);
    std::vector<Complex> pair_amp(steps.size()), single_amp(steps.size());
    std::vector<double> occupancy(steps.size());

    {
        SplitStepPropagator2D prop(g, g1d);
        prop.load(initial_pair());
        prop.evolve(make_sampler(shape, traj, g), 0.0, t_r, dt);
        const auto in = prop.state();
        const double w = g.dx() * g.dx();
        double worst = same_side_probability(in.amplitudes(), g);
        std::size_t k = 0;
        auto record = [&](std::size_t s, std::span<const Complex> psi) {
            if (s % occupancy_stride == 0) worst = std::max(worst, same_side_probability(psi, g));
            for (; k < steps.size() && steps[k] == s; ++k) {
                pair_amp[k] = bilinear(in.amplitudes(), psi, w);
                occupancy[k] = std::max(worst, same_side_probability(psi, g));
            }
        };
        record(0, in.amplitudes());
        if (last > 0) prop.evolve_static(hold, hold_time, dt, [&](std::size_t s, double, auto psi) { record(s, psi); });
    }
    {
        SplitStepPropagator1D prop(g);
        prop.load(0, single_.basis().left_state);
        prop.evolve(make_sampler(shape, traj, g), 0.0, t_r, dt);
        const auto in = prop.state();
        std::size_t k = 0;
        auto record = [&](std::size_t s, std::span<const Complex> psi) {
            for (; k < steps.size() && steps[k] == s; ++k) single_amp[k] = bilinear(in.amplitudes(), psi, g.dx());
        };
        record(0, in.amplitudes());
        if (last > 0) prop.evolve_static(hold, hold_time, dt, [&](std::size_t s, double, auto psi) { record(s, psi); });
    }

    double previous = 0.0;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        PhaseGateResult r;
        r.rho = std::norm(pair_amp[k]);
        r.phi = -std::arg(pair_amp[k]);
        r.phi_s = -std::arg(single_amp[k]);
        r.single_return = std::norm(single_amp[k]);
        r.phi_c = k == 0 ? wrap_phase(r.phi - 2.0 * r.phi_s) : unwrap_nearest(r.phi - 2.0 * r.phi_s, previous);
        previous = r.phi_c;
        r.fidelity = gate_fidelity(r.rho, r.phi_c);
        r.phi_free = std::numeric_limits<double>::quiet_NaN();
        r.double_occupation = occupancy[k];
        row.cells.push_back(r);
    }
    return row;
}

PhaseGateResult run_collisional_hold(const TrapShape& shape, const TrajectorySpec& traj, double g1d,
                                     Numerics numerics) {
    return TwoAtomSimulator(shape, traj.a_max, numerics).run_collisional_hold(traj, g1d);
}

FidelityMap sweep_fidelity_map(const TrapShape& shape, double a_max, double a_min, const std::vector<double>& t_r_grid,
                               const std::vector<double>& t_i_grid, double g1d, Numerics numerics, unsigned threads) {
    if (t_r_grid.empty()) throw ValidationError("t_r_grid", "must not be empty");
    if (!std::is_sorted(t_r_grid.begin(), t_r_grid.end())) throw ValidationError("t_r_grid", "must be ascending");
    const TwoAtomSimulator sim(shape, a_max, numerics);
    FidelityMap map;
    map.t_r = t_r_grid;
    map.cells.resize(t_r_grid.size());
    std::vector<std::vector<double>> snapped(t_r_grid.size());

    auto do_row = [&](std::size_t r) {
        auto row = sim.hold_curve(a_min, t_r_grid[r], t_i_grid, g1d);
        map.cells[r] = std::move(row.cells);
        snapped[r] = std::move(row.t_i);
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
    map.t_i = snapped.front();

    // Rows were unwrapped independently; align each row start with the previous row.
    for (std::size_t r = 1; r < map.cells.size(); ++r) {
        const double shift = unwrap_nearest(map.cells[r][0].phi_c, map.cells[r - 1][0].phi_c) - map.cells[r][0].phi_c;
        for (auto& c : map.cells[r]) c.phi_c += shift;
    }
    return map;
}

// ----------------------------------------------------------------------------- phase gate

PhaseTable run_phase_gate(Arrangement arrangement, const TrapShape& shape, const PulseSequence& pulses, double g1d,
                          Numerics numerics, double leakage_threshold, double tolerance) {
    const TwoAtomSimulator pair(shape, pulses.collision.a_max, numerics);
    const auto& single = pair.single();
    const auto& g = single.grid();
    const double e0 = stationary_states(g, potential_single_well(shape, -single.a_max(), g), 1).front().energy;
    auto idle = [e0](double duration) { return std::polar(1.0, -e0 * duration); };

    PhaseTable table;
    using Matrix4 = Eigen::Matrix4cd;
    Matrix4 m = Matrix4::Identity();

    // Basis order |i>_A |j>_B -> 2i + j; i, j also label the occupied trap of each qubit.
    auto pi_on_b = [&](const std::array<std::array<Complex, 2>, 2>& t, double duration) {
        Matrix4 s = Matrix4::Zero();
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int jp = 0; jp < 2; ++jp)
                    s(static_cast<Eigen::Index>(logical_index(i, jp)), static_cast<Eigen::Index>(logical_index(i, j))) =
                        idle(duration) * t[jp][j];
        return s;
    };

    std::array<std::array<Complex, 2>, 2> t_pi{};
    if (arrangement == Arrangement::in_line) {
        t_pi = single.transfer(pulses.pi_pulse);
        double leak = 0.0;
        for (int c = 0; c < 2; ++c) leak = std::max(leak, 1.0 - std::norm(t_pi[0][c]) - std::norm(t_pi[1][c]));
        table.steps.push_back({"pi pulse on B", leak});
    }

    // Collision step. In-line: A_1 (left of the pair) meets B_0, so qubit B
    // takes part when j = 0. Side by side: A_1 meets B_1.
    const auto t_c = single.transfer(pulses.collision);
    const double duration_c = pulses.collision.duration();
    const auto hold = pair.run_collisional_hold(pulses.collision, g1d);
    const Complex both = std::polar(std::sqrt(hold.rho), -hold.phi);
    const int b_in_pair = arrangement == Arrangement::in_line ? 0 : 1;
    Matrix4 collide = Matrix4::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const bool a_in = i == 1, b_in = j == b_in_pair;
            Complex amp = idle(duration_c) * idle(duration_c);
            if (a_in && b_in) amp = both;
            else if (a_in) amp = t_c[0][0] * idle(duration_c);
            else if (b_in) amp = t_c[1][1] * idle(duration_c);
            const auto k = static_cast<Eigen::Index>(logical_index(i, j));
            collide(k, k) = amp;
        }
    table.steps.push_back({"collision pulse, one atom", 1.0 - std::norm(t_c[0][0])});
    table.steps.push_back({"collision pulse, two atoms", 1.0 - hold.rho});

    if (arrangement == Arrangement::in_line) {
        const auto s = pi_on_b(t_pi, pulses.pi_pulse.duration());
        m = s * collide * s;
        table.steps.push_back({"pi pulse on B (return)", table.steps.front().leakage});
    } else {
        m = collide;
    }

    for (const auto& st : table.steps)
        if (st.leakage > leakage_threshold) throw GateLeakageError("leakage above " + std::to_string(leakage_threshold), table.steps);

    for (std::size_t k = 0; k < 4; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        table.raw[k] = std::arg(m(kk, kk));
        table.populations[k] = std::norm(m(kk, kk));
    }
    Matrix4 off = m;
    off.diagonal().setZero();
    table.offdiagonal = off.norm();
    const auto& r = table.raw;
    table.absorbed = {0.0, 0.0, 0.0, wrap_phase(r[3] - r[1] - r[2] + r[0])};
    table.deviation = std::abs(wrap_phase(table.absorbed[3] - std::numbers::pi));
    table.success = table.deviation < tolerance;
    return table;
}

}  // namespace sdq
