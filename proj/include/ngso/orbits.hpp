// SPDX-License-Identifier: Apache-2.0
//
// Walker star / delta constellation construction and circular-orbit
// propagation in an Earth-fixed frame.
//
// Assumptions:
// - ideal circular Keplerian orbits, no J2 or drag
// - uniform Earth rotation about +z with period T_E
// - the Earth-fixed and inertial frames coincide at t = 0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ngso/constants.hpp"
#include "ngso/error.hpp"
#include "ngso/vec3.hpp"

namespace ngso {

// ---------------------------------------------------------------------------
// Closed-form orbital quantities
// ---------------------------------------------------------------------------

/// Circular orbital speed at altitude h.
inline double orbital_velocity(double altitude_m, const PhysicalConstants& k = PhysicalConstants::spherical()) {
    detail::require(altitude_m > 0.0, "orbital_velocity: altitude must be positive");
    return std::sqrt(k.gravitational_parameter / (k.earth_radius_m + altitude_m));
}

/// Orbital period at altitude h, T_o = 2*pi*(R_E + h) / v_o.
inline double orbital_period(double altitude_m, const PhysicalConstants& k = PhysicalConstants::spherical()) {
    detail::require(altitude_m > 0.0, "orbital_period: altitude must be positive");
    return kTwoPi * (k.earth_radius_m + altitude_m) / orbital_velocity(altitude_m, k);
}

// Kepler's third law form of the same period; kept as an independent route.
inline double orbital_period_kepler(double altitude_m, const PhysicalConstants& k = PhysicalConstants::spherical()) {
    detail::require(altitude_m > 0.0, "orbital_period: altitude must be positive");
    const double a = k.earth_radius_m + altitude_m;
    return std::sqrt(4.0 * kPi * kPi / k.gravitational_parameter * a * a * a);
}

/// Altitude whose ground track repeats after n revolutions in m sidereal days
/// (n * T_o = m * T_E).
inline double recursive_altitude(int revolutions, int days, const PhysicalConstants& k = PhysicalConstants::spherical()) {
    detail::require(revolutions >= 1 && days >= 1, "recursive_altitude: n and m must be >= 1");
    const double mt = days * k.sidereal_day_s;
    const double two_n_pi = 2.0 * revolutions * kPi;
    return std::cbrt(mt * mt * k.gravitational_parameter / (two_n_pi * two_n_pi)) - k.earth_radius_m;
}

/// Distance between in-plane neighbours, 2 (R_E + h) sin(pi / N_op).
inline double intra_plane_distance(int sats_per_plane, double altitude_m,
                                   const PhysicalConstants& k = PhysicalConstants::spherical()) {
    detail::require(sats_per_plane >= 2, "intra_plane_distance: need at least 2 satellites per plane");
    return 2.0 * (k.earth_radius_m + altitude_m) * std::sin(kPi / sats_per_plane);
}

/// Chord between two points on the sphere of radius R_E + h given polar
/// (colatitude) and azimuth angles.
inline double spherical_distance(double polar_u, double polar_v, double azimuth_u, double azimuth_v,
                                 double altitude_m, const PhysicalConstants& k = PhysicalConstants::spherical()) {
    const double r = k.earth_radius_m + altitude_m;
    // 1 - cos tu cos tv - cos dphi sin tu sin tv, rewritten with half-angle
    // sines so that nearby points do not cancel.
    const double sp = std::sin(0.5 * (polar_u - polar_v));
    const double sa = std::sin(0.5 * (azimuth_u - azimuth_v));
    const double c = 2.0 * sp * sp + 2.0 * std::sin(polar_u) * std::sin(polar_v) * sa * sa;
    return std::sqrt(2.0 * r * r * std::max(c, 0.0));
}

/// Inter-plane distance when neighbours sit exactly on the Equator.
inline double aligned_inter_plane_distance(int planes, double altitude_m,
                                           const PhysicalConstants& k = PhysicalConstants::spherical()) {
    detail::require(planes >= 1, "aligned_inter_plane_distance: need at least one plane");
    return 2.0 * (k.earth_radius_m + altitude_m) * std::sin(kPi / (2.0 * planes));
}

/// Upper bound on the distance to the nearest satellite in the neighbouring
/// plane: satellite u on the Equator, v displaced by half the in-plane spacing.
inline double max_inter_plane_distance(int sats_per_plane, int planes, double altitude_m,
                                       const PhysicalConstants& k = PhysicalConstants::spherical()) {
    detail::require(sats_per_plane >= 2 && planes >= 2,
                    "max_inter_plane_distance: need N_op >= 2 and P >= 2");
    const double r = k.earth_radius_m + altitude_m;
    // sin(pi/2 + x) == sin(pi/2 - x); the "+" branch is used.
    const double s = std::sin(kPi / 2.0 + kPi / sats_per_plane);
    return r * std::sqrt(2.0 - 2.0 * std::cos(kPi / planes) * s);
}

// ---------------------------------------------------------------------------
// Constellation description
// ---------------------------------------------------------------------------

enum class Geometry { star, delta };

inline std::string_view to_string(Geometry g) { return g == Geometry::star ? "star" : "delta"; }

inline Geometry geometry_from_string(std::string_view s) {
    if (s == "star") {
        return Geometry::star;
    }
    if (s == "delta") {
        return Geometry::delta;
    }
    throw ConfigError("geometry must be 'star' or 'delta', got '" + std::string(s) + "'");
}

/// Walker parameters of one orbital shell.
struct ShellConfig {
    Geometry geometry = Geometry::star;
    int n_sats = 0;
    int n_planes = 0;
    double altitude_m = 0.0;
    double inclination_rad = 0.0;
    // Fraction of the in-plane spacing by which plane a+1 leads plane a.
    double inter_plane_phasing = 0.0;
    // Orbital separation: additive altitude per plane; empty means all zero.
    std::vector<double> per_plane_altitude_offset_m;

    int sats_per_plane() const { return n_planes > 0 ? n_sats / n_planes : 0; }

    double plane_altitude(int plane) const {
        if (per_plane_altitude_offset_m.empty()) {
            return altitude_m;
        }
        return altitude_m + per_plane_altitude_offset_m.at(static_cast<std::size_t>(plane));
    }

    double raan_step() const { return (geometry == Geometry::star ? kPi : kTwoPi) / n_planes; }

    void validate() const {
        if (n_planes < 1) {
            throw ConfigError("shell: n_planes must be >= 1");
        }
        if (n_sats < 1 || n_sats % n_planes != 0) {
            throw ConfigError("shell: n_sats (" + std::to_string(n_sats) + ") must be a positive multiple of n_planes (" +
                              std::to_string(n_planes) + ")");
        }
        if (!(altitude_m > 0.0)) {
            throw ConfigError("shell: altitude_m must be positive");
        }
        // Retrograde sun-synchronous shells (e.g. 98.6 deg) are legitimate.
        if (!(inclination_rad > 0.0 && inclination_rad < kPi)) {
            throw ConfigError("shell: inclination must lie in (0, 180) degrees");
        }
        if (!(inter_plane_phasing >= 0.0 && inter_plane_phasing < 1.0)) {
            throw ConfigError("shell: inter_plane_phasing must lie in [0, 1)");
        }
        if (!per_plane_altitude_offset_m.empty()) {
            if (per_plane_altitude_offset_m.size() != static_cast<std::size_t>(n_planes)) {
                throw ConfigError("shell: per_plane_altitude_offset_m must have one entry per plane");
            }
            for (int a = 0; a < n_planes; ++a) {
                if (!(plane_altitude(a) > 0.0)) {
                    throw ConfigError("shell: altitude offset drives a plane below the surface");
                }
            }
        }
    }

    friend bool operator==(const ShellConfig&, const ShellConfig&) = default;
};

struct Preset {
    std::string name;
    std::string description;
    ShellConfig shell;
};

/// Commercial constellations used throughout the analyses.
inline const std::vector<Preset>& constellation_presets() {
    static const std::vector<Preset> presets = {
        {"kepler", "Kepler (IoT), Walker star", {Geometry::star, 140, 7, 575e3, deg2rad(98.6), 0.0, {}}},
        {"oneweb", "OneWeb (broadband), Walker star", {Geometry::star, 648, 18, 1200e3, deg2rad(86.4), 0.0, {}}},
        {"starlink550", "Starlink 550 km shell (broadband), Walker delta",
         {Geometry::delta, 1584, 72, 550e3, deg2rad(53.0), 0.0, {}}},
    };
    return presets;
}

inline const ShellConfig& preset_shell(std::string_view name) {
    for (const auto& p : constellation_presets()) {
        if (p.name == name) {
            return p.shell;
        }
    }
    throw LookupError("unknown constellation preset '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Satellites and propagation
// ---------------------------------------------------------------------------

struct SatelliteId {
    int shell = 0;
    int plane = 0;
    int slot = 0;

    friend auto operator<=>(const SatelliteId&, const SatelliteId&) = default;
};

/// Kinematic state in the Earth-fixed frame.
///
/// `velocity_mps` is the time derivative of `position_m` in the rotating
/// frame. `orbital_velocity_mps` is the inertial velocity expressed in
/// Earth-fixed axes; its magnitude is the circular speed v_o and it defines
/// the satellite's along-track (roll) axis.
struct SatelliteState {
    Vec3 position_m;
    Vec3 velocity_mps;
    Vec3 orbital_velocity_mps;
    double epoch_s = 0.0;
};

struct SatelliteOrbit {
    SatelliteId id;
    double raan_rad = 0.0;
    double initial_anomaly_rad = 0.0;  // argument of latitude at t = 0
    double inclination_rad = 0.0;
    double altitude_m = 0.0;
    double period_s = 0.0;
};

struct PropagationModel {
    bool earth_rotation = true;
    // Hold every satellite at its t = 0 state (static toy scenarios).
    bool frozen = false;
};

inline double wrap_two_pi(double angle) {
    double a = std::fmod(angle, kTwoPi);
    if (a < 0.0) {
        a += kTwoPi;
    }
    // fmod of values just below a multiple of 2*pi can round up to 2*pi
    return a >= kTwoPi ? 0.0 : a;
}

// Shortest signed difference a - b in (-pi, pi].
inline double angle_difference(double a, double b) {
    double d = std::remainder(a - b, kTwoPi);
    if (d <= -kPi) {
        d += kTwoPi;
    }
    return d;
}

/// An indexed set of satellites built from one or more shells.
///
/// Satellites are stored in (shell, plane, slot) lexicographic order, so the
/// flat index and the SatelliteId are bijective and ordered identically.
class Constellation {
public:
    explicit Constellation(std::vector<ShellConfig> shells,
                           PhysicalConstants constants = PhysicalConstants::spherical(),
                           PropagationModel model = {})
        : shells_(std::move(shells)), constants_(constants), model_(model) {
        if (shells_.empty()) {
            throw ConfigError("constellation needs at least one shell");
        }
        std::size_t offset = 0;
        for (std::size_t s = 0; s < shells_.size(); ++s) {
            const ShellConfig& cfg = shells_[s];
            cfg.validate();
            shell_offsets_.push_back(offset);
            const int per_plane = cfg.sats_per_plane();
            const double spacing = kTwoPi / per_plane;
            for (int a = 0; a < cfg.n_planes; ++a) {
                const double h = cfg.plane_altitude(a);
                for (int k = 0; k < per_plane; ++k) {
                    SatelliteOrbit o;
                    o.id = {static_cast<int>(s), a, k};
                    o.raan_rad = wrap_two_pi(a * cfg.raan_step());
                    o.initial_anomaly_rad = wrap_two_pi(k * spacing + cfg.inter_plane_phasing * spacing * a);
                    o.inclination_rad = cfg.inclination_rad;
                    o.altitude_m = h;
                    o.period_s = orbital_period(h, constants_);
                    orbits_.push_back(o);
                }
            }
            offset += static_cast<std::size_t>(cfg.n_sats);
        }
    }

    std::size_t size() const { return orbits_.size(); }
    const std::vector<ShellConfig>& shells() const { return shells_; }
    const PhysicalConstants& constants() const { return constants_; }
    const PropagationModel& model() const { return model_; }
    const std::vector<SatelliteOrbit>& orbits() const { return orbits_; }
    const SatelliteOrbit& orbit(std::size_t index) const { return orbits_.at(index); }

    std::size_t index_of(const SatelliteId& id) const {
        if (id.shell < 0 || static_cast<std::size_t>(id.shell) >= shells_.size()) {
            throw LookupError("satellite id: shell out of range");
        }
        const ShellConfig& cfg = shells_[static_cast<std::size_t>(id.shell)];
        const int per_plane = cfg.sats_per_plane();
        if (id.plane < 0 || id.plane >= cfg.n_planes || id.slot < 0 || id.slot >= per_plane) {
            throw LookupError("satellite id: plane/slot out of range");
        }
        return shell_offsets_[static_cast<std::size_t>(id.shell)] +
               static_cast<std::size_t>(id.plane * per_plane + id.slot);
    }

    const SatelliteId& id_of(std::size_t index) const { return orbit(index).id; }

    // Plane key unique across shells, usable as a partition label.
    int global_plane(std::size_t index) const {
        const SatelliteOrbit& o = orbit(index);
        int base = 0;
        for (int s = 0; s < o.id.shell; ++s) {
            base += shells_[static_cast<std::size_t>(s)].n_planes;
        }
        return base + o.id.plane;
    }

    SatelliteState propagate(const SatelliteId& id, double t) const { return propagate(index_of(id), t); }

    SatelliteState propagate(std::size_t index, double t) const {
        detail::require(t >= 0.0, "propagate: time must be non-negative");
        return state_at(orbit(index), t);
    }

    std::vector<SatelliteState> propagate_all(double t) const {
        detail::require(t >= 0.0, "propagate: time must be non-negative");
        std::vector<SatelliteState> out;
        out.reserve(orbits_.size());
        for (const auto& o : orbits_) {
            out.push_back(state_at(o, t));
        }
        return out;
    }

    // Longest orbital period among all satellites.
    double max_period() const {
        double p = 0.0;
        for (const auto& o : orbits_) {
            p = std::max(p, o.period_s);
        }
        return p;
    }

private:
    SatelliteState state_at(const SatelliteOrbit& o, double t) const {
        const double te = model_.frozen ? 0.0 : t;
        const double r = constants_.earth_radius_m + o.altitude_m;
        const double n = kTwoPi / o.period_s;
        const double u = o.initial_anomaly_rad + n * te;

        const double cO = std::cos(o.raan_rad);
        const double sO = std::sin(o.raan_rad);
        const double ci = std::cos(o.inclination_rad);
        const double si = std::sin(o.inclination_rad);
        // Node direction and its in-plane perpendicular.
        const Vec3 p{cO, sO, 0.0};
        const Vec3 q{-sO * ci, cO * ci, si};
        const double cu = std::cos(u);
        const double su = std::sin(u);
        const Vec3 r_in = (p * cu + q * su) * r;
        const Vec3 v_in = (p * (-su) + q * cu) * (r * n);

        const double w = model_.earth_rotation ? constants_.earth_rotation_rate() : 0.0;
        const double th = w * te;
        const double ct = std::cos(th);
        const double st = std::sin(th);
        auto to_fixed = [&](const Vec3& v) { return Vec3{ct * v.x + st * v.y, -st * v.x + ct * v.y, v.z}; };

        // A frozen constellation reports its t = 0 state at every epoch.
        SatelliteState s;
        s.position_m = to_fixed(r_in);
        s.orbital_velocity_mps = to_fixed(v_in);
        // d/dt of Rz(-w t) r_in = Rz(-w t) v_in - w x r_fixed
        s.velocity_mps = s.orbital_velocity_mps + Vec3{w * s.position_m.y, -w * s.position_m.x, 0.0};
        s.epoch_s = t;
        return s;
    }

    std::vector<ShellConfig> shells_;
    PhysicalConstants constants_;
    PropagationModel model_;
    std::vector<SatelliteOrbit> orbits_;
    std::vector<std::size_t> shell_offsets_;
};

// Sub-satellite point (geocentric latitude, longitude in [-pi, pi)).
struct GeoPoint {
    double latitude_rad = 0.0;
    double longitude_rad = 0.0;
};

inline GeoPoint sub_satellite_point(const Vec3& position) {
    const double r = norm(position);
    GeoPoint g;
    g.latitude_rad = std::asin(position.z / r);
    g.longitude_rad = std::atan2(position.y, position.x);
    if (g.longitude_rad >= kPi) {
        g.longitude_rad -= kTwoPi;
    }
    return g;
}

}  // namespace ngso
