#pragma once

#include <cstddef>
#include <vector>

namespace sdq {

/// Uniform periodic grid x_i = x_min + i*dx, i = 0..n-1, dx = (x_max - x_min)/n.
/// n is a power of two >= 64 so the spectral kinetic step stays cheap.
class Grid1D {
public:
    Grid1D(double x_min, double x_max, std::size_t n);

    /// Box [-half_width, half_width].
    static Grid1D symmetric(double half_width, std::size_t n);

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    std::size_t size() const noexcept { return n_; }
    double dx() const noexcept { return dx_; }
    double x(std::size_t i) const noexcept { return x_min_ + static_cast<double>(i) * dx_; }
    std::vector<double> points() const;

    /// Index of the grid point at -x(i). Only meaningful for symmetric boxes.
    std::size_t mirror_index(std::size_t i) const noexcept { return (n_ - i) % n_; }
    bool is_symmetric() const noexcept;

    /// Angular wavenumbers in FFT order (0, 1, ..., n/2-1, -n/2, ..., -1) * 2pi/L.
    std::vector<double> wavenumbers() const;

    bool operator==(const Grid1D&) const = default;

private:
    double x_min_;
    double x_max_;
    std::size_t n_;
    double dx_;
};

}  // namespace sdq
