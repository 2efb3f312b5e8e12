#pragma once

namespace sdq {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double bohr_radius = 5.29177210903e-11;  // m
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double boltzmann = 1.380649e-23;         // J/K
inline constexpr double rb87_mass = 86.909180527 * atomic_mass_unit;
}  // namespace constants

/// Physical trap frequencies and atomic mass. Everything downstream works in
/// oscillator units of the x trap: hbar = m = omega_x = 1, lengths in
/// alpha^-1 = sqrt(hbar / (m omega_x)).
class UnitSystem {
public:
    UnitSystem(double omega_x, double omega_y, double omega_z,
               double mass = constants::rb87_mass);

    double omega_x() const noexcept { return omega_x_; }
    double omega_y() const noexcept { return omega_y_; }
    double omega_z() const noexcept { return omega_z_; }
    double mass() const noexcept { return mass_; }
    /// Oscillator length in metres.
    double alpha_inv() const noexcept { return alpha_inv_; }

    double length_to_si(double dimensionless) const noexcept { return dimensionless * alpha_inv_; }
    double length_from_si(double metres) const noexcept { return metres / alpha_inv_; }
    double time_to_si(double dimensionless) const noexcept { return dimensionless / omega_x_; }
    double time_from_si(double seconds) const noexcept { return seconds * omega_x_; }
    double energy_to_si(double dimensionless) const noexcept {
        return dimensionless * constants::hbar * omega_x_;
    }
    double energy_from_si(double joules) const noexcept {
        return joules / (constants::hbar * omega_x_);
    }

    /// Frequency ratios omega_y / omega_x and omega_z / omega_x.
    double ratio_y() const noexcept { return omega_y_ / omega_x_; }
    double ratio_z() const noexcept { return omega_z_ / omega_x_; }

    bool operator==(const UnitSystem&) const = default;

private:
    double omega_x_;
    double omega_y_;
    double omega_z_;
    double mass_;
    double alpha_inv_;
};

}  // namespace sdq
