#include "sdq/propagator.hpp"

#include <algorithm>
#include <cmath>

#include "sdq/eigensolver.hpp"
#include "sdq/errors.hpp"

namespace sdq {

namespace {

void validate_span(double t0, double t1, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt", "time step must be > 0");
    if (!std::isfinite(t0) || !std::isfinite(t1) || (t1 - t0) / dt < 1.0 - 1e-12)
        throw ValidationError("t1", "propagation span must cover at least one step");
}

bool finite(std::span<const Complex> v) noexcept {
    for (const auto& c : v)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

}  // namespace

std::size_t step_count(double duration, double dt) {
    if (!(duration > 0.0)) return 0;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(duration / dt - 1e-9)));
}

// ----------------------------------------------------------------------------- 1D

SplitStepPropagator1D::SplitStepPropagator1D(const Grid1D& grid, std::size_t batch)
    : grid_(grid),
      batch_(batch),
      buffer_(grid.size() * batch),
      transform_(buffer_, grid.size(), batch),
      k2_(grid.size()),
      kinetic_(grid.size()),
      v_(grid.size()),
      phase_(grid.size()) {
    if (batch == 0) throw ValidationError("batch", "must be >= 1");
    const auto k = grid.wavenumbers();
    for (std::size_t i = 0; i < k.size(); ++i) k2_[i] = k[i] * k[i];
}

void SplitStepPropagator1D::load(std::size_t r, std::span<const Complex> amplitudes) {
    if (r >= batch_) throw ValidationError("row", "batch index out of range");
    if (amplitudes.size() != grid_.size()) throw GridMismatchError("state size does not match grid");
    std::copy(amplitudes.begin(), amplitudes.end(), buffer_.data() + r * grid_.size());
}

std::span<const Complex> SplitStepPropagator1D::row(std::size_t r) const noexcept {
    return {buffer_.data() + r * grid_.size(), grid_.size()};
}

Wavefunction1D SplitStepPropagator1D::state(std::size_t r) const {
    const auto v = row(r);
    return Wavefunction1D(grid_, std::vector<Complex>(v.begin(), v.end()));
}

void SplitStepPropagator1D::prepare_kinetic(double h) {
    if (h == kinetic_h_) return;
    const double inv_n = 1.0 / static_cast<double>(grid_.size());
    for (std::size_t i = 0; i < k2_.size(); ++i) kinetic_[i] = std::polar(inv_n, -0.5 * k2_[i] * h);
    kinetic_h_ = h;
}

void SplitStepPropagator1D::half_potential(std::span<const double> v, double h) {
    for (std::size_t i = 0; i < v.size(); ++i) phase_[i] = std::polar(1.0, -0.5 * v[i] * h);
}

void SplitStepPropagator1D::apply_half_phase() noexcept {
    const std::size_t n = grid_.size();
    Complex* data = buffer_.data();
    for (std::size_t r = 0; r < batch_; ++r)
        for (std::size_t i = 0; i < n; ++i) data[r * n + i] *= phase_[i];
}

void SplitStepPropagator1D::kinetic_step() noexcept {
    const std::size_t n = grid_.size();
    transform_.forward();
    Complex* data = buffer_.data();
    for (std::size_t r = 0; r < batch_; ++r)
        for (std::size_t i = 0; i < n; ++i) data[r * n + i] *= kinetic_[i];
    transform_.backward();
}

void SplitStepPropagator1D::check_finite(double t) const {
    if (!finite(buffer_.span())) throw PropagationDivergedError(t);
}

void SplitStepPropagator1D::evolve(const PotentialSampler& potential, double t0, double t1, double dt,
                                   const StepObserver& observer) {
    const std::size_t steps = step_count(t1 - t0, dt);
    if (steps == 0) return;
    const double h = (t1 - t0) / static_cast<double>(steps);
    prepare_kinetic(h);
    for (std::size_t s = 0; s < steps; ++s) {
        potential(t0 + (static_cast<double>(s) + 0.5) * h, v_);
        half_potential(v_, h);
        apply_half_phase();
        kinetic_step();
        apply_half_phase();
        if (observer) observer(s + 1, t0 + static_cast<double>(s + 1) * h, buffer_.span());
    }
    check_finite(t1);
}

void SplitStepPropagator1D::evolve_static(std::span<const double> potential, double duration, double dt,
                                          const StepObserver& observer) {
    if (potential.size() != grid_.size()) throw GridMismatchError("potential size does not match grid");
    const std::size_t steps = step_count(duration, dt);
    if (steps == 0) return;
    const double h = duration / static_cast<double>(steps);
    prepare_kinetic(h);
    half_potential(potential, h);
    for (std::size_t s = 0; s < steps; ++s) {
        apply_half_phase();
        kinetic_step();
        apply_half_phase();
        if (observer) observer(s + 1, static_cast<double>(s + 1) * h, buffer_.span());
    }
    check_finite(duration);
}

// ----------------------------------------------------------------------------- 2D

SplitStepPropagator2D::SplitStepPropagator2D(const Grid1D& grid, double g)
    : grid_(grid),
      g_(g),
      buffer_(grid.size() * grid.size()),
      transform_(buffer_, grid.size(), grid.size()),
      k2_(grid.size()),
      kinetic_(grid.size() * grid.size()),
      v_(grid.size()),
      phase_(grid.size()) {
    if (!std::isfinite(g)) throw ValidationError("g", "contact strength must be finite");
    const auto k = grid.wavenumbers();
    for (std::size_t i = 0; i < k.size(); ++i) k2_[i] = k[i] * k[i];
}

void SplitStepPropagator2D::load(const Wavefunction2D& psi) {
    if (!(psi.grid() == grid_)) throw GridMismatchError("state grid does not match propagator");
    std::copy(psi.amplitudes().begin(), psi.amplitudes().end(), buffer_.data());
}

Wavefunction2D SplitStepPropagator2D::state() const {
    const auto v = buffer_.span();
    return Wavefunction2D(grid_, std::vector<Complex>(v.begin(), v.end()));
}

void SplitStepPropagator2D::prepare_kinetic(double h) {
    if (h == kinetic_h_) return;
    const std::size_t n = grid_.size();
    const double inv = 1.0 / static_cast<double>(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) kinetic_[a * n + b] = std::polar(inv, -0.5 * (k2_[a] + k2_[b]) * h);
    kinetic_h_ = h;
}

void SplitStepPropagator2D::half_potential(std::span<const double> v, double h) {
    for (std::size_t i = 0; i < v.size(); ++i) phase_[i] = std::polar(1.0, -0.5 * v[i] * h);
    diagonal_phase_ = std::polar(1.0, -0.5 * (g_ / grid_.dx()) * h);
}

void SplitStepPropagator2D::apply_half_phase() noexcept {
    const std::size_t n = grid_.size();
    Complex* data = buffer_.data();
    for (std::size_t i = 0; i < n; ++i) {
        const Complex pi = phase_[i];
        Complex* row = data + i * n;
        for (std::size_t j = 0; j < n; ++j) row[j] *= pi * phase_[j];
        row[i] *= diagonal_phase_;
    }
}

void SplitStepPropagator2D::kinetic_step() noexcept {
    const std::size_t n = grid_.size();
    Complex* data = buffer_.data();
    transform_.forward();
    fft::transpose_square(data, n);
    transform_.forward();
    for (std::size_t i = 0; i < n * n; ++i) data[i] *= kinetic_[i];
    transform_.backward();
    fft::transpose_square(data, n);
    transform_.backward();
}

void SplitStepPropagator2D::check_finite(double t) const {
    if (!finite(buffer_.span())) throw PropagationDivergedError(t);
}

void SplitStepPropagator2D::evolve(const PotentialSampler& potential, double t0, double t1, double dt,
                                   const StepObserver& observer) {
    const std::size_t steps = step_count(t1 - t0, dt);
    if (steps == 0) return;
    const double h = (t1 - t0) / static_cast<double>(steps);
    prepare_kinetic(h);
    for (std::size_t s = 0; s < steps; ++s) {
        potential(t0 + (static_cast<double>(s) + 0.5) * h, v_);
        half_potential(v_, h);
        apply_half_phase();
        kinetic_step();
        apply_half_phase();
        if (observer) observer(s + 1, t0 + static_cast<double>(s + 1) * h, buffer_.span());
    }
    check_finite(t1);
}

void SplitStepPropagator2D::evolve_static(std::span<const double> potential, double duration, double dt,
                                          const StepObserver& observer) {
    if (potential.size() != grid_.size()) throw GridMismatchError("potential size does not match grid");
    const std::size_t steps = step_count(duration, dt);
    if (steps == 0) return;
    const double h = duration / static_cast<double>(steps);
    prepare_kinetic(h);
    half_potential(potential, h);
    for (std::size_t s = 0; s < steps; ++s) {
        apply_half_phase();
        kinetic_step();
        apply_half_phase();
        if (observer) observer(s + 1, static_cast<double>(s + 1) * h, buffer_.span());
    }
    check_finite(duration);
}

// ----------------------------------------------------------------------------- free functions

Wavefunction1D propagate_1d(const Wavefunction1D& psi, const PotentialSampler& potential, double t0,
                            double t1, double dt) {
    validate_span(t0, t1, dt);
    SplitStepPropagator1D prop(psi.grid());
    prop.load(0, psi);
    prop.evolve(potential, t0, t1, dt);
    return prop.state();
}

Wavefunction2D propagate_2d(const Wavefunction2D& psi, const PotentialSampler& potential, double g,
                            double t0, double t1, double dt) {
    validate_span(t0, t1, dt);
    SplitStepPropagator2D prop(psi.grid(), g);
    prop.load(psi);
    prop.evolve(potential, t0, t1, dt);
    return prop.state();
}

double energy_expectation(const Wavefunction1D& psi, std::span<const double> potential) {
    return overlap(psi, apply_hamiltonian(psi, potential)).real();
}

}  // namespace sdq
