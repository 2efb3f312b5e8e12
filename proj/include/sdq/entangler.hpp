#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "sdq/gates_single.hpp"
#include "sdq/splitting_table.hpp"
#include "sdq/units.hpp"

namespace sdq {

/// Square of four traps: A0 upper left, A1 upper right, B0 lower left,
/// B1 lower right. Qubit A tunnels along the top edge, B along the bottom
/// edge (separation a), and A0-B0, A1-B1 along the vertical edges (separation b).
enum Site : std::size_t { A0 = 0, A1 = 1, B0 = 2, B1 = 3 };

struct HubbardParams {
    std::function<double(double)> j_x;  // top and bottom edges
    std::function<double(double)> j_y;  // left and right edges
    double u = 0.0;
    double duration = 0.0;
};

/// J(t) = Omega(a(t))/2 from a tabulated splitting for both axes (a = b),
/// U = g1d * integral |phi_x|^4 dx over the isolated-trap ground state.
HubbardParams hubbard_from_traps(const TrapShape& shape, const TrajectorySpec& traj, const UnitSystem& units,
                                 double a_t, Numerics numerics = {});

/// On-site energy from the same integral, exposed for the closed-form check.
double onsite_interaction(const TrapShape& shape, double a_max, double g1d, Numerics numerics = {});

/// Two bosons on four sites; the ten Fock states in a fixed order.
struct EntanglerState {
    enum Index : std::size_t {
        c00, c01, c10, c11,  // one atom per qubit: |i>_A |j>_B
        cA, cB,              // both atoms in one qubit's two traps
        dA0, dA1, dB0, dB1,  // both atoms in one trap
        size
    };
    double t = 0.0;
    std::array<std::complex<double>, size> amp{};

    static EntanglerState initial();  // |0>_A |1>_B
    double norm_squared() const noexcept;
};

struct Populations {
    double rho00, rho01, rho10, rho11, rho_dq, rho_dt;
    double total() const noexcept { return rho00 + rho01 + rho10 + rho11 + rho_dq + rho_dt; }
};

Populations populations(const EntanglerState& s);
/// max over phi of |<(01 + e^{i phi} 10)/sqrt2 | psi>|^2 = (|c01| + |c10|)^2 / 2.
double bell_fidelity(const EntanglerState& s);
/// arg(c10) - arg(c01), the phase of the closest Bell state.
double bell_phase(const EntanglerState& s);

/// Occupation numbers of each basis state.
const std::array<std::array<int, 4>, EntanglerState::size>& fock_basis();

/// Midpoint exponential integrator on [0, params.duration]; returns the
/// initial state and every `sample_every`-th step including the last.
std::vector<EntanglerState> evolve_two_boson(const HubbardParams& params, const EntanglerState& initial, double dt,
                                             std::size_t sample_every = 1);

/// Times where rho00 has a local minimum below `threshold`.
std::vector<double> oscillation_nodes(const std::vector<EntanglerState>& samples, double threshold = 1e-3);

/// Two atoms, two sites: amplitudes of |LR>, |LL>, |RR>.
struct TwoSiteState {
    double t = 0.0;
    std::array<std::complex<double>, 3> amp{};
};
std::vector<TwoSiteState> evolve_two_site(const std::function<double(double)>& j, double u, double duration,
                                          double dt, std::size_t sample_every = 1);

/// Grid reference for the two-site model: the 2D two-particle run over the
/// same cycle, projected at each sample onto symmetrized instantaneous
/// Wannier pairs. Returns rows (t, P_LR, P_LL + P_RR).
struct TwoSiteComparison {
    std::vector<double> t;
    std::vector<double> hubbard_split, grid_split;    // one atom per trap
    std::vector<double> hubbard_double, grid_double;  // both in one trap
    double max_deviation = 0.0;
};
TwoSiteComparison compare_two_site(const TrapShape& shape, const TrajectorySpec& traj, double g1d,
                                   Numerics numerics = Numerics::two_dimensional(), std::size_t samples = 80);

}  // namespace sdq
