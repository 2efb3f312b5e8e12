#include "sdq/eigensolver.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sdq/errors.hpp"
#include "sdq/fft.hpp"

namespace sdq {

std::vector<double> kinetic_matrix(const Grid1D& grid) {
    const std::size_t n = grid.size();
    const double dx = grid.dx();
    const double nn = static_cast<double>(n);
    const double pi2 = std::numbers::pi * std::numbers::pi;

    // Periodic sinc-DVR kernel for even n, a function of (i - j) mod n only.
    std::vector<double> kernel(n);
    kernel[0] = pi2 / (6.0 * dx * dx) * (1.0 + 2.0 / (nn * nn));
    for (std::size_t d = 1; d < n; ++d) {
        const double s = std::sin(std::numbers::pi * static_cast<double>(d) / nn);
        const double sign = (d % 2 == 0) ? 1.0 : -1.0;
        kernel[d] = sign * pi2 / (nn * nn * dx * dx * s * s);
    }

    std::vector<double> t(n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) t[j * n + i] = kernel[(i + n - j) % n];
    return t;
}

Wavefunction1D apply_hamiltonian(const Wavefunction1D& psi, std::span<const double> potential) {
    const auto& grid = psi.grid();
    const std::size_t n = grid.size();
    if (potential.size() != n) throw GridMismatchError("potential size does not match grid");

    fft::AlignedBuffer buf(n);
    fft::RowTransform transform(buf, n, 1);
    std::copy(psi.amplitudes().begin(), psi.amplitudes().end(), buf.data());
    transform.forward();
    const auto k = grid.wavenumbers();
    for (std::size_t i = 0; i < n; ++i) buf.data()[i] *= 0.5 * k[i] * k[i] / static_cast<double>(n);
    transform.backward();

    Wavefunction1D out(grid);
    for (std::size_t i = 0; i < n; ++i) out[i] = buf.data()[i] + potential[i] * psi[i];
    return out;
}

namespace {

void fix_sign(std::span<Complex> v, const Grid1D& grid) {
    double left = 0.0, total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        total += v[i].real();
        if (grid.x(i) < 0.0) left += v[i].real();
    }
    double peak = 0.0;
    for (const auto& c : v) peak = std::max(peak, std::abs(c.real()));
    // "Vanishes on the left" is judged relative to the largest amplitude.
    const double ref = (std::abs(left) > 1e-8 * peak * static_cast<double>(v.size())) ? left : total;
    if (ref < 0.0)
        for (auto& c : v) c = -c;
}

bool mirror_symmetric(const Grid1D& grid, std::span<const double> v) {
    if (!grid.is_symmetric()) return false;
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    for (std::size_t i = 0; i < v.size(); ++i)
        if (std::abs(v[i] - v[grid.mirror_index(i)]) > 1e-12 * std::max(1.0, scale)) return false;
    return true;
}

// Nearly degenerate doublets of a mirror-symmetric potential come back as an
// arbitrary mix; rotate each such pair into its even and odd combinations.
void split_parity(const Grid1D& grid, std::span<const double> w, std::vector<double>& z, std::size_t k) {
    const std::size_t n = grid.size();
    auto parity = [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += z[a * n + i] * z[b * n + grid.mirror_index(i)];
        return s;
    };
    for (std::size_t s = 0; s + 1 < k; ++s) {
        if (w[s + 1] - w[s] > 1e-7 * std::max(1.0, std::abs(w[s]))) continue;
        const double paa = parity(s, s), pbb = parity(s + 1, s + 1), pab = parity(s, s + 1);
        // Eigenvector of the 2x2 parity matrix with eigenvalue +1.
        const double theta = 0.5 * std::atan2(2.0 * pab, paa - pbb);
        const double c = std::cos(theta), sn = std::sin(theta);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = z[s * n + i], b = z[(s + 1) * n + i];
            z[s * n + i] = c * a + sn * b;
            z[(s + 1) * n + i] = -sn * a + c * b;
        }
        ++s;
    }
}

}  // namespace

std::vector<EigenPair> stationary_states(const Grid1D& grid, std::span<const double> potential,
                                         std::size_t k) {
    const std::size_t n = grid.size();
    if (k < 1 || k > n) throw ValidationError("k", "requested state count must be in [1, n]");
    if (potential.size() != n) throw GridMismatchError("potential size does not match grid");
    for (double v : potential)
        if (!std::isfinite(v)) throw ValidationError("potential", "must be finite on the grid");

    auto h = kinetic_matrix(grid);
    for (std::size_t i = 0; i < n; ++i) h[i * n + i] += potential[i];

    const auto ni = static_cast<lapack_int>(n);
    const auto ki = static_cast<lapack_int>(k);
    lapack_int found = 0;
    std::vector<double> w(n);
    std::vector<double> z(n * k);
    std::vector<lapack_int> support(2 * k);
    const lapack_int info =
        LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', ni, h.data(), ni, 0.0, 0.0, 1, ki,
                       LAPACKE_dlamch('S'), &found, w.data(), z.data(), ni, support.data());
    if (info != 0) throw Error("dsyevr failed with info = " + std::to_string(info));

    const double boundary = std::min(potential.front(), potential.back());
    std::size_t bound = 0;
    while (bound < static_cast<std::size_t>(found) && w[bound] < boundary) ++bound;
    if (bound < k) throw NoBoundStatesError(k, bound);

    if (mirror_symmetric(grid, potential)) split_parity(grid, w, z, k);

    std::vector<EigenPair> out;
    out.reserve(k);
    const double scale = 1.0 / std::sqrt(grid.dx());
    for (std::size_t s = 0; s < k; ++s) {
        Wavefunction1D state(grid);
        for (std::size_t i = 0; i < n; ++i) state[i] = z[s * n + i] * scale;
        fix_sign(state.amplitudes(), grid);
        out.push_back({w[s], std::move(state)});
    }
    return out;
}

double splitting_frequency(const PotentialFamily& family, double a, const Grid1D& grid) {
    if (!(a >= 0.0)) throw ValidationError("a", "half-separation must be >= 0");
    const auto v = family(a, grid);
    const auto states = stationary_states(grid, v, 2);
    return std::max(0.0, states[1].energy - states[0].energy);
}

}  // namespace sdq
