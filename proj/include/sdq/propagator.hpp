#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "sdq/fft.hpp"
#include "sdq/grid.hpp"
#include "sdq/wavefunction.hpp"

namespace sdq {

/// Writes V(x_i, t) into `v` (length n).
using PotentialSampler = std::function<void(double t, std::span<double> v)>;

/// Called after every completed step with the step index (1-based), the time
/// reached, and the full state buffer.
using StepObserver = std::function<void(std::size_t step, double t, std::span<const Complex> state)>;

/// Number of equal steps of size <= dt covering `duration` (0 for an empty span).
std::size_t step_count(double duration, double dt);

/// Strang split-step evolution, exp(-iV h/2) exp(-iT h) exp(-iV h/2), with the
/// kinetic factor applied in Fourier space. The potential is sampled at the
/// midpoint of each step, so a time-mirrored sampler replays the same step
/// sequence in reverse. Holds `batch` states of one grid, evolved together.
class SplitStepPropagator1D {
public:
    explicit SplitStepPropagator1D(const Grid1D& grid, std::size_t batch = 1);

    const Grid1D& grid() const noexcept { return grid_; }
    std::size_t batch() const noexcept { return batch_; }

    void load(std::size_t row, std::span<const Complex> amplitudes);
    void load(std::size_t row, const Wavefunction1D& psi) { load(row, psi.amplitudes()); }
    std::span<const Complex> row(std::size_t r) const noexcept;
    Wavefunction1D state(std::size_t r = 0) const;

    void evolve(const PotentialSampler& potential, double t0, double t1, double dt,
                const StepObserver& observer = {});
    void evolve_static(std::span<const double> potential, double duration, double dt,
                       const StepObserver& observer = {});

private:
    void prepare_kinetic(double h);
    void half_potential(std::span<const double> v, double h);
    void apply_half_phase() noexcept;
    void kinetic_step() noexcept;
    void check_finite(double t) const;

    Grid1D grid_;
    std::size_t batch_;
    fft::AlignedBuffer buffer_;
    fft::RowTransform transform_;
    std::vector<double> k2_;
    std::vector<Complex> kinetic_;
    double kinetic_h_ = -1.0;
    std::vector<double> v_;
    std::vector<Complex> phase_;
};

/// Two particles on one grid, H = T1 + T2 + V(x1) + V(x2) + g delta_dx(x1 - x2),
/// where delta_dx is 1/dx on the diagonal x1 = x2. 2D transforms are row FFTs
/// with an in-place transpose; the kinetic factor is symmetric in (k1, k2) so
/// it is applied in the transposed layout.
class SplitStepPropagator2D {
public:
    SplitStepPropagator2D(const Grid1D& grid, double g);

    const Grid1D& grid() const noexcept { return grid_; }
    double coupling() const noexcept { return g_; }

    void load(const Wavefunction2D& psi);
    std::span<const Complex> amplitudes() const noexcept { return buffer_.span(); }
    Wavefunction2D state() const;

    void evolve(const PotentialSampler& potential, double t0, double t1, double dt,
                const StepObserver& observer = {});
    void evolve_static(std::span<const double> potential, double duration, double dt,
                       const StepObserver& observer = {});

private:
    void prepare_kinetic(double h);
    void half_potential(std::span<const double> v, double h);
    void apply_half_phase() noexcept;
    void kinetic_step() noexcept;
    void check_finite(double t) const;

    Grid1D grid_;
    double g_;
    fft::AlignedBuffer buffer_;
    fft::RowTransform transform_;
    std::vector<double> k2_;
    std::vector<Complex> kinetic_;
    double kinetic_h_ = -1.0;
    std::vector<double> v_;
    std::vector<Complex> phase_;
    Complex diagonal_phase_{1.0, 0.0};
};

Wavefunction1D propagate_1d(const Wavefunction1D& psi, const PotentialSampler& potential, double t0,
                            double t1, double dt);
Wavefunction2D propagate_2d(const Wavefunction2D& psi, const PotentialSampler& potential, double g,
                            double t0, double t1, double dt);

/// <psi|H|psi> for a static potential.
double energy_expectation(const Wavefunction1D& psi, std::span<const double> potential);

}  // namespace sdq
