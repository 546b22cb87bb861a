// units.hpp — Physical-unit conversions. The library works in units of the
// coupling (g = 1); the CLI accepts physical couplings and normalizes.

#pragma once

#include <cmath>
#include <numbers>

namespace cavsim {

struct PhysicalUnits {
    double g_khz = 50.0;              // g / 2π in kHz
    double cavity_decay_time_s = 0.0;  // photon decay time Tc; 0 = lossless

    double g_rad_per_s() const { return 2.0 * std::numbers::pi * g_khz * 1e3; }
    // convert a duration expressed in g = 1 units to seconds
    double seconds(double t_g_units) const { return t_g_units / g_rad_per_s(); }
    // cavity decay rate kappa in g = 1 units
    double kappa_g_units() const {
        return cavity_decay_time_s > 0.0 ? 1.0 / (cavity_decay_time_s * g_rad_per_s()) : 0.0;
    }
};

// The microwave-cavity operating point used for the timescale sanity checks:
// g = 2π × 50 kHz, photon decay time Tc = 1 ms.
inline PhysicalUnits microwave_preset() {
    PhysicalUnits u;
    u.g_khz = 50.0;
    u.cavity_decay_time_s = 1e-3;
    return u;
}

}  // namespace cavsim
