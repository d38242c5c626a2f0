// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <numbers>
#include <string>
#include <string_view>

#include "ngso/error.hpp"

namespace ngso {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kBoltzmann = 1.380649e-23;     // J/K
inline constexpr double kReferenceTemperature = 290.0;  // K, noise-figure reference

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Physical constants shared by every geometric and link computation.
///
/// Two Earth-radius conventions are provided: a spherical mean radius for
/// link and coverage geometry and the WGS-84 equatorial radius, which is the
/// convention under which the 15- and 13-revolution repeat altitudes land at
/// 554 km and 1248 km.
struct PhysicalConstants {
    double gravitational_parameter = 3.986004418e14;  // G*M_E, m^3/s^2
    double earth_radius_m = 6371.0e3;
    double sidereal_day_s = 86164.0;  // equinoctial day T_E
    double speed_of_light_mps = 299792458.0;

    static constexpr PhysicalConstants spherical() { return {}; }

    static constexpr PhysicalConstants wgs_equatorial() {
        PhysicalConstants k;
        k.earth_radius_m = 6378.137e3;
        return k;
    }

    static PhysicalConstants by_name(std::string_view name) {
        if (name == "spherical") {
            return spherical();
        }
        if (name == "wgs-equatorial") {
            return wgs_equatorial();
        }
        throw LookupError("unknown constants set '" + std::string(name) +
                          "' (expected spherical | wgs-equatorial)");
    }

    constexpr double earth_rotation_rate() const { return kTwoPi / sidereal_day_s; }
};

}  // namespace ngso
