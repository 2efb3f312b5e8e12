#include "sdq/wavefunction.hpp"

#include <cmath>

#include "sdq/errors.hpp"

namespace sdq {

namespace {

double sum_norm(std::span<const Complex> v) noexcept {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return s;
}

bool all_finite(std::span<const Complex> v) noexcept {
    for (const auto& c : v)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

Complex sum_conj_product(std::span<const Complex> a, std::span<const Complex> b) noexcept {
    // Split accumulators keep the sum vectorizable.
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        re += ar * br + ai * bi;
        im += ar * bi - ai * br;
    }
    return {re, im};
}

}  // namespace

Wavefunction1D::Wavefunction1D(Grid1D grid) : grid_(grid), amplitudes_(grid.size()) {}

Wavefunction1D::Wavefunction1D(Grid1D grid, std::vector<Complex> amplitudes)
    : grid_(grid), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != grid_.size())
        throw GridMismatchError("amplitude count does not match grid size");
}

double Wavefunction1D::norm_squared() const noexcept { return sum_norm(amplitudes_) * grid_.dx(); }

double Wavefunction1D::normalize() {
    const double norm = std::sqrt(norm_squared());
    if (!(norm > 0.0)) throw ValidationError("wavefunction", "cannot normalize a zero state");
    for (auto& c : amplitudes_) c /= norm;
    return norm;
}

bool Wavefunction1D::is_finite() const noexcept { return all_finite(amplitudes_); }

Wavefunction1D Wavefunction1D::mirrored() const {
    Wavefunction1D out(grid_);
    for (std::size_t i = 0; i < grid_.size(); ++i) out[grid_.mirror_index(i)] = amplitudes_[i];
    return out;
}

double Wavefunction1D::right_probability() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const double x = grid_.x(i);
        if (x > 0.0) s += std::norm(amplitudes_[i]);
        else if (x == 0.0) s += 0.5 * std::norm(amplitudes_[i]);
    }
    return s * grid_.dx();
}

Wavefunction1D& Wavefunction1D::operator+=(const Wavefunction1D& other) {
    if (!(grid_ == other.grid_)) throw GridMismatchError("wavefunction grids differ");
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) amplitudes_[i] += other.amplitudes_[i];
    return *this;
}

Wavefunction1D& Wavefunction1D::operator*=(Complex factor) noexcept {
    for (auto& c : amplitudes_) c *= factor;
    return *this;
}

Wavefunction1D operator+(Wavefunction1D a, const Wavefunction1D& b) { return a += b; }
Wavefunction1D operator*(Complex factor, Wavefunction1D a) { return a *= factor; }

Wavefunction2D::Wavefunction2D(Grid1D grid) : grid_(grid), amplitudes_(grid.size() * grid.size()) {}

Wavefunction2D::Wavefunction2D(Grid1D grid, std::vector<Complex> amplitudes)
    : grid_(grid), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != grid_.size() * grid_.size())
        throw GridMismatchError("amplitude count does not match grid size squared");
}

Wavefunction2D Wavefunction2D::product(const Wavefunction1D& a, const Wavefunction1D& b) {
    if (!(a.grid() == b.grid())) throw GridMismatchError("product of states on different grids");
    Wavefunction2D out(a.grid());
    const std::size_t n = a.grid().size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = a[i] * b[j];
    return out;
}

Wavefunction2D Wavefunction2D::symmetrized_product(const Wavefunction1D& a, const Wavefunction1D& b) {
    if (!(a.grid() == b.grid())) throw GridMismatchError("product of states on different grids");
    Wavefunction2D out(a.grid());
    const std::size_t n = a.grid().size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = a[i] * b[j] + b[i] * a[j];
    out.normalize();
    return out;
}

double Wavefunction2D::norm_squared() const noexcept {
    return sum_norm(amplitudes_) * grid_.dx() * grid_.dx();
}

double Wavefunction2D::normalize() {
    const double norm = std::sqrt(norm_squared());
    if (!(norm > 0.0)) throw ValidationError("wavefunction", "cannot normalize a zero state");
    for (auto& c : amplitudes_) c /= norm;
    return norm;
}

bool Wavefunction2D::is_finite() const noexcept { return all_finite(amplitudes_); }

double Wavefunction2D::antisymmetric_norm() const noexcept {
    const std::size_t n = side();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * std::norm(0.5 * ((*this)(i, j) - (*this)(j, i)));
    return std::sqrt(s) * grid_.dx();
}

Complex overlap(const Wavefunction1D& a, const Wavefunction1D& b) {
    if (!(a.grid() == b.grid())) throw GridMismatchError("overlap of states on different grids");
    return sum_conj_product(a.amplitudes(), b.amplitudes()) * a.grid().dx();
}

Complex overlap(const Wavefunction2D& a, const Wavefunction2D& b) {
    if (!(a.grid() == b.grid())) throw GridMismatchError("overlap of states on different grids");
    const double dx = a.grid().dx();
    return sum_conj_product(a.amplitudes(), b.amplitudes()) * (dx * dx);
}

Complex bilinear(std::span<const Complex> a, std::span<const Complex> b, double weight) {
    if (a.size() != b.size()) throw GridMismatchError("bilinear form of different sizes");
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        re += a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
    }
    return Complex{re, im} * weight;
}

}  // namespace sdq
