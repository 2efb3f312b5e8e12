#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "sdq/grid.hpp"

namespace sdq {

using Complex = std::complex<double>;

/// One particle on a Grid1D. Norm is sum |psi_i|^2 dx.
class Wavefunction1D {
public:
    explicit Wavefunction1D(Grid1D grid);
    Wavefunction1D(Grid1D grid, std::vector<Complex> amplitudes);

    const Grid1D& grid() const noexcept { return grid_; }
    std::span<Complex> amplitudes() noexcept { return amplitudes_; }
    std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
    Complex& operator[](std::size_t i) noexcept { return amplitudes_[i]; }
    const Complex& operator[](std::size_t i) const noexcept { return amplitudes_[i]; }

    double norm_squared() const noexcept;
    /// Rescales to unit norm; returns the norm before rescaling.
    double normalize();
    bool is_finite() const noexcept;

    /// psi(x) -> psi(-x) on a symmetric grid.
    Wavefunction1D mirrored() const;
    /// Probability for x > 0 (points at x = 0 count half).
    double right_probability() const noexcept;

    Wavefunction1D& operator+=(const Wavefunction1D& other);
    Wavefunction1D& operator*=(Complex factor) noexcept;

private:
    Grid1D grid_;
    std::vector<Complex> amplitudes_;
};

Wavefunction1D operator+(Wavefunction1D a, const Wavefunction1D& b);
Wavefunction1D operator*(Complex factor, Wavefunction1D a);

/// Two particles, both coordinates on the same grid; row-major psi[i1 * n + i2].
class Wavefunction2D {
public:
    explicit Wavefunction2D(Grid1D grid);
    Wavefunction2D(Grid1D grid, std::vector<Complex> amplitudes);

    /// a(x1) b(x2).
    static Wavefunction2D product(const Wavefunction1D& a, const Wavefunction1D& b);
    /// Normalized bosonic state a(x1) b(x2) + b(x1) a(x2).
    static Wavefunction2D symmetrized_product(const Wavefunction1D& a, const Wavefunction1D& b);

    const Grid1D& grid() const noexcept { return grid_; }
    std::size_t side() const noexcept { return grid_.size(); }
    std::span<Complex> amplitudes() noexcept { return amplitudes_; }
    std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
    Complex& operator()(std::size_t i1, std::size_t i2) noexcept { return amplitudes_[i1 * side() + i2]; }
    const Complex& operator()(std::size_t i1, std::size_t i2) const noexcept {
        return amplitudes_[i1 * side() + i2];
    }

    double norm_squared() const noexcept;
    double normalize();
    bool is_finite() const noexcept;

    /// Norm of the exchange-antisymmetric part (psi - P psi)/2.
    double antisymmetric_norm() const noexcept;

private:
    Grid1D grid_;
    std::vector<Complex> amplitudes_;
};

/// <a|b> = sum conj(a_i) b_i dx. Throws GridMismatchError on different grids.
Complex overlap(const Wavefunction1D& a, const Wavefunction1D& b);
/// <a|b> with dx^2 weight.
Complex overlap(const Wavefunction2D& a, const Wavefunction2D& b);

/// Bilinear form sum a_i b_i dx (no conjugation). Used for time-mirrored cycles.
Complex bilinear(std::span<const Complex> a, std::span<const Complex> b, double weight);

}  // namespace sdq
