#pragma once

#include <memory>
#include <vector>

#include "sdq/traps.hpp"

namespace sdq {

/// Omega(a) sampled on a uniform grid of separations and interpolated in
/// log(Omega) with PCHIP. Omega falls off roughly exponentially in a, so the
/// log form keeps relative error small across the whole range.
class SplittingTable {
public:
    SplittingTable(const TrapShape& shape, const Grid1D& grid, double a_lo, double a_hi, std::size_t samples = 41);

    double operator()(double a) const;
    double a_lo() const noexcept { return a_.front(); }
    double a_hi() const noexcept { return a_.back(); }
    const std::vector<double>& separations() const noexcept { return a_; }
    const std::vector<double>& values() const noexcept { return omega_; }

    /// Integral of Omega(a(t)) over [t0, t1] (Simpson, `panels` even).
    double integrate(const SeparationCurve& curve, double t0, double t1, std::size_t panels = 400) const;

private:
    struct Interp;
    std::vector<double> a_, omega_;
    std::shared_ptr<const Interp> interp_;
};

}  // namespace sdq
