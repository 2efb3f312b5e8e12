#include "sdq/units.hpp"

#include <cmath>

#include "sdq/errors.hpp"

namespace sdq {

UnitSystem::UnitSystem(double omega_x, double omega_y, double omega_z, double mass)
    : omega_x_(omega_x), omega_y_(omega_y), omega_z_(omega_z), mass_(mass) {
    if (!(omega_x > 0.0) || !std::isfinite(omega_x)) throw ValidationError("omega_x", "must be > 0");
    if (!(omega_y > 0.0) || !std::isfinite(omega_y)) throw ValidationError("omega_y", "must be > 0");
    if (!(omega_z > 0.0) || !std::isfinite(omega_z)) throw ValidationError("omega_z", "must be > 0");
    if (!(mass > 0.0) || !std::isfinite(mass)) throw ValidationError("mass", "must be > 0");
    alpha_inv_ = std::sqrt(constants::hbar / (mass_ * omega_x_));
}

}  // namespace sdq
