#include "sdq/grid.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "sdq/errors.hpp"

namespace sdq {

Grid1D::Grid1D(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n) {
    if (n < 64 || !std::has_single_bit(n))
        throw ValidationError("n", "grid size must be a power of two >= 64, got " + std::to_string(n));
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min))
        throw ValidationError("x_max", "grid requires finite x_min < x_max");
    dx_ = (x_max - x_min) / static_cast<double>(n);
}

Grid1D Grid1D::symmetric(double half_width, std::size_t n) { return {-half_width, half_width, n}; }

std::vector<double> Grid1D::points() const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = x(i);
    return out;
}

bool Grid1D::is_symmetric() const noexcept {
    return std::abs(x_min_ + x_max_) <= 1e-12 * (std::abs(x_min_) + std::abs(x_max_));
}

std::vector<double> Grid1D::wavenumbers() const {
    std::vector<double> k(n_);
    const double dk = 2.0 * std::numbers::pi / (x_max_ - x_min_);
    const auto half = static_cast<std::ptrdiff_t>(n_ / 2);
    for (std::size_t i = 0; i < n_; ++i) {
        auto m = static_cast<std::ptrdiff_t>(i);
        if (m >= half) m -= static_cast<std::ptrdiff_t>(n_);
        k[i] = dk * static_cast<double>(m);
    }
    return k;
}

}  // namespace sdq
