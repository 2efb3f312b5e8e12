#include "sdq/entangler.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <memory>

#include "sdq/errors.hpp"
#include "sdq/gates_two.hpp"
#include "sdq/propagator.hpp"

namespace sdq {

double onsite_interaction(const TrapShape& shape, double a_max, double g1d, Numerics numerics) {
    const auto grid = default_grid(shape, a_max, numerics.n);
    const auto phi = stationary_states(grid, potential_single_well(shape, 0.0, grid), 1).front().state;
    double s = 0.0;
    for (const auto& c : phi.amplitudes()) s += std::norm(c) * std::norm(c);
    return g1d * s * grid.dx();
}

HubbardParams hubbard_from_traps(const TrapShape& shape, const TrajectorySpec& traj, const UnitSystem& units,
                                 double a_t, Numerics numerics) {
    traj.validate();
    numerics.validate();
    const auto grid = default_grid(shape, traj.a_max, numerics.n);
    const double u = onsite_interaction(shape, traj.a_max, effective_1d_coupling(units, a_t), numerics);
    // Spline ramps may dip to their floor, below the hold separation.
    const double lowest = traj.profile == ProfileKind::spline ? std::min(traj.a_min, traj.a_floor) : traj.a_min;
    if (!(lowest < traj.a_max)) {
        const double j = 0.5 * splitting_frequency(double_well_family(shape), traj.a_max, grid);
        auto constant = [j](double) { return j; };
        return {constant, constant, u, traj.duration()};
    }
    auto table = std::make_shared<const SplittingTable>(shape, grid, lowest, traj.a_max, 41);
    auto curve = std::make_shared<const SeparationCurve>(traj);
    auto j = [table, curve](double t) { return 0.5 * (*table)((*curve)(t)); };
    return {j, j, u, traj.duration()};
}

const std::array<std::array<int, 4>, EntanglerState::size>& fock_basis() {
    static const std::array<std::array<int, 4>, EntanglerState::size> basis = {{
        {1, 0, 1, 0},  // 00: A0 B0
        {1, 0, 0, 1},  // 01: A0 B1
        {0, 1, 1, 0},  // 10: A1 B0
        {0, 1, 0, 1},  // 11: A1 B1
        {1, 1, 0, 0},  // A: A0 A1
        {0, 0, 1, 1},  // B: B0 B1
        {2, 0, 0, 0},
        {0, 2, 0, 0},
        {0, 0, 2, 0},
        {0, 0, 0, 2},
    }};
    return basis;
}

EntanglerState EntanglerState::initial() {
    EntanglerState s;
    s.amp[c01] = 1.0;
    return s;
}

double EntanglerState::norm_squared() const noexcept {
    double n = 0.0;
    for (const auto& c : amp) n += std::norm(c);
    return n;
}

Populations populations(const EntanglerState& s) {
    using E = EntanglerState;
    const auto p = [&](std::size_t k) { return std::norm(s.amp[k]); };
    return {p(E::c00), p(E::c01), p(E::c10), p(E::c11), p(E::cA) + p(E::cB),
            p(E::dA0) + p(E::dA1) + p(E::dB0) + p(E::dB1)};
}

double bell_fidelity(const EntanglerState& s) {
    const double a = std::abs(s.amp[EntanglerState::c01]) + std::abs(s.amp[EntanglerState::c10]);
    return 0.5 * a * a;
}

double bell_phase(const EntanglerState& s) {
    return std::arg(s.amp[EntanglerState::c10] * std::conj(s.amp[EntanglerState::c01]));
}

namespace {

using Matrix10 = Eigen::Matrix<double, EntanglerState::size, EntanglerState::size>;

struct Edge {
    std::size_t a, b;
    bool horizontal;
};
constexpr std::array<Edge, 4> edges = {{{A0, A1, true}, {B0, B1, true}, {A0, B0, false}, {A1, B1, false}}};

Matrix10 hopping(bool horizontal) {
    const auto& basis = fock_basis();
    Matrix10 h = Matrix10::Zero();
    for (std::size_t col = 0; col < basis.size(); ++col)
        for (const auto& e : edges) {
            if (e.horizontal != horizontal) continue;
            for (auto [from, to] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
                if (basis[col][from] == 0) continue;
                auto occ = basis[col];
                const double amp = std::sqrt(double(occ[from])) * std::sqrt(double(occ[to] + 1));
                --occ[from];
                ++occ[to];
                for (std::size_t row = 0; row < basis.size(); ++row)
                    if (basis[row] == occ) h(row, col) -= amp;
            }
        }
    return h;
}

Matrix10 onsite(double u) {
    Matrix10 h = Matrix10::Zero();
    const auto& basis = fock_basis();
    for (std::size_t k = 0; k < basis.size(); ++k) {
        double e = 0.0;
        for (int nk : basis[k]) e += 0.5 * u * nk * (nk - 1);
        h(k, k) = e;
    }
    return h;
}

template <int N>
Eigen::Matrix<std::complex<double>, N, N> expm_hermitian(const Eigen::Matrix<double, N, N>& h, double step) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> es(h);
    Eigen::Matrix<std::complex<double>, N, 1> phase;
    for (int k = 0; k < N; ++k) phase(k) = std::polar(1.0, -es.eigenvalues()(k) * step);
    const Eigen::Matrix<std::complex<double>, N, N> v = es.eigenvectors().template cast<std::complex<double>>();
    return v * phase.asDiagonal() * v.adjoint();
}

}  // namespace

std::vector<EntanglerState> evolve_two_boson(const HubbardParams& params, const EntanglerState& initial, double dt,
                                             std::size_t sample_every) {
    if (!(dt > 0.0)) throw ValidationError("dt", "must be > 0");
    if (!(params.duration >= 0.0)) throw ValidationError("duration", "must be >= 0");
    if (sample_every == 0) sample_every = 1;
    const Matrix10 hx = hopping(true), hy = hopping(false), hu = onsite(params.u);
    Eigen::Matrix<std::complex<double>, EntanglerState::size, 1> psi;
    for (std::size_t k = 0; k < EntanglerState::size; ++k) psi(k) = initial.amp[k];

    std::vector<EntanglerState> out{initial};
    out.front().t = 0.0;
    const std::size_t steps = step_count(params.duration, dt);
    const double h = steps ? params.duration / double(steps) : 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
        const double tm = (double(s) + 0.5) * h;
        psi = expm_hermitian<EntanglerState::size>(params.j_x(tm) * hx + params.j_y(tm) * hy + hu, h) * psi;
        if ((s + 1) % sample_every == 0 || s + 1 == steps) {
            EntanglerState st;
            st.t = double(s + 1) * h;
            for (std::size_t k = 0; k < EntanglerState::size; ++k) st.amp[k] = psi(k);
            if (!std::isfinite(st.norm_squared())) throw PropagationDivergedError(st.t);
            out.push_back(st);
        }
    }
    return out;
}

std::vector<double> oscillation_nodes(const std::vector<EntanglerState>& samples, double threshold) {
    std::vector<double> nodes;
    for (std::size_t k = 1; k + 1 < samples.size(); ++k) {
        const double p = populations(samples[k]).rho00;
        if (p < threshold && p <= populations(samples[k - 1]).rho00 && p <= populations(samples[k + 1]).rho00)
            nodes.push_back(samples[k].t);
    }
    return nodes;
}

std::vector<TwoSiteState> evolve_two_site(const std::function<double(double)>& j, double u, double duration,
                                          double dt, std::size_t sample_every) {
    if (!(dt > 0.0)) throw ValidationError("dt", "must be > 0");
    if (sample_every == 0) sample_every = 1;
    // Basis |LR>, |LL>, |RR>; <LL|b_L^dag b_R|LR> = sqrt2.
    Eigen::Matrix3d hop;
    hop << 0, -std::sqrt(2.0), -std::sqrt(2.0), -std::sqrt(2.0), 0, 0, -std::sqrt(2.0), 0, 0;
    const Eigen::Matrix3d hu = Eigen::Vector3d(0, u, u).asDiagonal();
    Eigen::Vector3cd psi(1, 0, 0);
    std::vector<TwoSiteState> out{{0.0, {1.0, 0.0, 0.0}}};
    const std::size_t steps = step_count(duration, dt);
    const double h = steps ? duration / double(steps) : 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
        const double tm = (double(s) + 0.5) * h;
        psi = expm_hermitian<3>(j(tm) * hop + hu, h) * psi;
        if ((s + 1) % sample_every == 0 || s + 1 == steps) out.push_back({double(s + 1) * h, {psi(0), psi(1), psi(2)}});
    }
    return out;
}

TwoSiteComparison compare_two_site(const TrapShape& shape, const TrajectorySpec& traj, double g1d, Numerics numerics,
                                   std::size_t samples) {
    traj.validate();
    numerics.validate();
    if (samples < 2) throw ValidationError("samples", "need >= 2");
    const TwoAtomSimulator sim(shape, traj.a_max, numerics);
    const auto& grid = sim.grid();
    const double total = traj.duration();
    const SeparationCurve curve(traj);
    const SplittingTable table(shape, grid, traj.a_min, traj.a_max, 41);
    const double u = onsite_interaction(shape, traj.a_max, g1d, numerics);

    // Sample times on the propagator's step grid.
    const std::size_t steps = step_count(total, numerics.dt);
    const std::size_t stride = std::max<std::size_t>(1, steps / (samples - 1));
    const double h = total / double(steps);

    TwoSiteComparison cmp;
    auto project = [&](double t, std::span<const Complex> psi) {
        const auto es = stationary_states(grid, potential_double_well(shape, curve(t), grid), 2);
        Wavefunction1D wl = es[0].state + es[1].state, wr = es[0].state + Complex(-1.0) * es[1].state;
        wl *= 1.0 / std::sqrt(2.0);
        wr *= 1.0 / std::sqrt(2.0);
        const Wavefunction2D state(grid, std::vector<Complex>(psi.begin(), psi.end()));
        const double lr = std::norm(overlap(Wavefunction2D::symmetrized_product(wl, wr), state));
        const double ll = std::norm(overlap(Wavefunction2D::product(wl, wl), state));
        const double rr = std::norm(overlap(Wavefunction2D::product(wr, wr), state));
        cmp.t.push_back(t);
        cmp.grid_split.push_back(lr);
        cmp.grid_double.push_back(ll + rr);
    };

    SplitStepPropagator2D prop(grid, g1d);
    prop.load(sim.initial_pair());
    project(0.0, prop.amplitudes());
    prop.evolve(make_sampler(shape, traj, grid), 0.0, total, numerics.dt, [&](std::size_t s, double, auto psi) {
        if (s % stride == 0 || s == steps) project(double(s) * h, psi);
    });

    const auto model = evolve_two_site([&](double t) { return 0.5 * table(curve(t)); }, u, total, numerics.dt, stride);
    for (std::size_t k = 0; k < cmp.t.size() && k < model.size(); ++k) {
        cmp.hubbard_split.push_back(std::norm(model[k].amp[0]));
        cmp.hubbard_double.push_back(std::norm(model[k].amp[1]) + std::norm(model[k].amp[2]));
        cmp.max_deviation = std::max({cmp.max_deviation, std::abs(cmp.hubbard_split[k] - cmp.grid_split[k]),
                                      std::abs(cmp.hubbard_double[k] - cmp.grid_double[k])});
    }
    return cmp;
}

}  // namespace sdq
