#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "sdq/grid.hpp"
#include "sdq/wavefunction.hpp"

namespace sdq {

struct EigenPair {
    double energy;
    Wavefunction1D state;
};

/// Dense matrix of the periodic spectral kinetic operator -1/2 d^2/dx^2 on the
/// grid (column-major, n x n). This is the exact matrix of the kinetic step in
/// the split-step propagator.
std::vector<double> kinetic_matrix(const Grid1D& grid);

/// H psi with the spectral kinetic operator.
Wavefunction1D apply_hamiltonian(const Wavefunction1D& psi, std::span<const double> potential);

/// The k lowest eigenpairs of H = -1/2 d^2/dx^2 + V in ascending energy.
///
/// States are unit-norm with a fixed sign: the amplitude sum over x < 0 is
/// positive (for states that vanish there, the total sum is positive), so
/// (S + A)/sqrt(2) is the left-localized state of a symmetric double well.
/// Throws NoBoundStatesError when fewer than k energies lie below the
/// potential at the box edge.
std::vector<EigenPair> stationary_states(const Grid1D& grid, std::span<const double> potential,
                                         std::size_t k);

/// Samples V(x) for half-separation a.
using PotentialFamily = std::function<std::vector<double>(double a, const Grid1D& grid)>;

/// Omega(a) = E_A(a) - E_S(a), clamped at zero against roundoff.
double splitting_frequency(const PotentialFamily& family, double a, const Grid1D& grid);

}  // namespace sdq
