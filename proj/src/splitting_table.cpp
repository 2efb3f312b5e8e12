#include "sdq/splitting_table.hpp"

#include <algorithm>
#include <math.h>  // boost 1.74 pchip calls unqualified isnan
#include <boost/math/interpolators/pchip.hpp>
#include <cmath>

#include "sdq/errors.hpp"

namespace sdq {

struct SplittingTable::Interp {
    boost::math::interpolators::pchip<std::vector<double>> log_omega;
};

namespace {
// Omega below this is roundoff in E_A - E_S.
constexpr double omega_floor = 1e-14;
}

SplittingTable::SplittingTable(const TrapShape& shape, const Grid1D& grid, double a_lo, double a_hi,
                               std::size_t samples) {
    if (!(a_lo >= 0.0) || !(a_hi > a_lo)) throw ValidationError("a_hi", "table range must satisfy 0 <= a_lo < a_hi");
    if (samples < 4) throw ValidationError("samples", "need at least 4 table points");
    const auto family = double_well_family(shape);
    std::vector<double> logs;
    for (std::size_t k = 0; k < samples; ++k) {
        const double a = a_lo + (a_hi - a_lo) * static_cast<double>(k) / static_cast<double>(samples - 1);
        const double w = splitting_frequency(family, a, grid);
        a_.push_back(a);
        omega_.push_back(w);
        logs.push_back(std::log(std::max(w, omega_floor)));
    }
    auto x = a_;
    interp_ = std::make_shared<const Interp>(Interp{{std::move(x), std::move(logs)}});
}

double SplittingTable::operator()(double a) const {
    const double w = std::exp(interp_->log_omega(std::clamp(a, a_.front(), a_.back())));
    return w <= omega_floor ? 0.0 : w;
}

double SplittingTable::integrate(const SeparationCurve& curve, double t0, double t1, std::size_t panels) const {
    if (t1 <= t0) return 0.0;
    panels += panels % 2;
    const double h = (t1 - t0) / static_cast<double>(panels);
    double sum = (*this)(curve(t0)) + (*this)(curve(t1));
    for (std::size_t k = 1; k < panels; ++k) sum += (k % 2 ? 4.0 : 2.0) * (*this)(curve(t0 + h * static_cast<double>(k)));
    return sum * h / 3.0;
}

}  // namespace sdq
