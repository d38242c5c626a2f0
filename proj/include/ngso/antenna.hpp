// SPDX-License-Identifier: Apache-2.0
//
// Planar-array beam models: digital steering vectors, Butler-matrix fixed
// beams and array-factor gain toward arbitrary directions.
//
// Local antenna frame of an inter-plane ISL array: boresight along the pitch
// axis (orbit normal), azimuth axis along the roll axis (velocity, in the
// orbital plane), polar axis along the radial direction. A direction with
// unit vector u in that frame is written as (phi, Theta) with
//     sin(phi)   = u . roll
//     cos(Theta) = u . radial
// which makes the K x K steering vector separable exactly as
// a = a_pol(Theta) (x) a_az(phi).
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "ngso/constants.hpp"
#include "ngso/error.hpp"
#include "ngso/link.hpp"
#include "ngso/orbits.hpp"
#include "ngso/vec3.hpp"

namespace ngso {

using SteeringVector = std::vector<std::complex<double>>;

struct ArrayGeometry {
    int elements_per_axis = 4;
    double spacing_m = 0.0;
    double wavelength_m = 0.0;

    static ArrayGeometry from_carrier(int k, double spacing_wavelengths, double carrier_hz,
                                      double c = 299792458.0) {
        const double lambda = c / carrier_hz;
        ArrayGeometry g{k, spacing_wavelengths * lambda, lambda};
        g.validate();
        return g;
    }

    void validate() const {
        if (elements_per_axis < 1 || !(spacing_m > 0.0) || !(wavelength_m > 0.0)) {
            throw ConfigError("array geometry: need K >= 1, d_e > 0 and lambda > 0");
        }
    }

    std::size_t elements() const {
        return static_cast<std::size_t>(elements_per_axis) * static_cast<std::size_t>(elements_per_axis);
    }
};

struct Direction {
    double azimuth_rad = 0.0;
    double polar_rad = kPi / 2.0;
};

namespace detail {

inline SteeringVector progressive_phase(int k, double phase_step) {
    SteeringVector v(static_cast<std::size_t>(k));
    for (int m = 0; m < k; ++m) {
        v[static_cast<std::size_t>(m)] = std::polar(1.0, -phase_step * m);
    }
    return v;
}

inline double squared_norm(const SteeringVector& v) {
    double s = 0.0;
    for (const auto& x : v) {
        s += std::norm(x);
    }
    return s;
}

// a^H w
inline std::complex<double> inner(const SteeringVector& a, const SteeringVector& w) {
    std::complex<double> s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += std::conj(a[i]) * w[i];
    }
    return s;
}

}  // namespace detail

/// Element m: exp(-j 2 pi d_e m sin(phi) / lambda).
inline SteeringVector steering_azimuth(const ArrayGeometry& g, double azimuth_rad) {
    return detail::progressive_phase(g.elements_per_axis,
                                     kTwoPi * g.spacing_m / g.wavelength_m * std::sin(azimuth_rad));
}

/// Element m: exp(-j 2 pi d_e m cos(Theta) / lambda).
inline SteeringVector steering_polar(const ArrayGeometry& g, double polar_rad) {
    return detail::progressive_phase(g.elements_per_axis,
                                     kTwoPi * g.spacing_m / g.wavelength_m * std::cos(polar_rad));
}

// (a (x) b)[i * |b| + j] = a[i] b[j]
inline SteeringVector kronecker(const SteeringVector& a, const SteeringVector& b) {
    SteeringVector out;
    out.reserve(a.size() * b.size());
    for (const auto& x : a) {
        for (const auto& y : b) {
            out.push_back(x * y);
        }
    }
    return out;
}

inline SteeringVector steering_vector(const ArrayGeometry& g, const Direction& d) {
    return kronecker(steering_polar(g, d.polar_rad), steering_azimuth(g, d.azimuth_rad));
}

/// Beamforming weights kept in factored form w = polar (x) azimuth.
struct SeparableWeights {
    SteeringVector polar;
    SteeringVector azimuth;

    SteeringVector combined() const { return kronecker(polar, azimuth); }
};

// Unit-norm digital weights matched to direction d.
inline SeparableWeights digital_weights(const ArrayGeometry& g, const Direction& d) {
    const double s = 1.0 / std::sqrt(static_cast<double>(g.elements_per_axis));
    SeparableWeights w{steering_polar(g, d.polar_rad), steering_azimuth(g, d.azimuth_rad)};
    for (auto& x : w.polar) {
        x *= s;
    }
    for (auto& x : w.azimuth) {
        x *= s;
    }
    return w;
}

// ---------------------------------------------------------------------------
// Butler matrix

inline SteeringVector butler_polar(const ArrayGeometry& g, double fixed_polar_rad) {
    SteeringVector v = steering_polar(g, fixed_polar_rad);
    const double s = 1.0 / std::sqrt(static_cast<double>(g.elements_per_axis));
    for (auto& x : v) {
        x *= s;
    }
    return v;
}

/// Azimuth vector of beam k in {1..K}: (1/sqrt K) exp(-j pi (2k - 1) m / K).
inline SteeringVector butler_azimuth(const ArrayGeometry& g, int beam) {
    const int k = g.elements_per_axis;
    detail::require(beam >= 1 && beam <= k, "butler_azimuth: beam index outside 1..K");
    SteeringVector v = detail::progressive_phase(k, kPi * (2.0 * beam - 1.0) / k);
    const double s = 1.0 / std::sqrt(static_cast<double>(k));
    for (auto& x : v) {
        x *= s;
    }
    return v;
}

/// The K beams of a Butler-fed array with fixed polar pointing; entry k-1
/// holds beam k.
inline std::vector<SeparableWeights> butler_beams(const ArrayGeometry& g, double fixed_polar_rad = kPi / 2.0) {
    g.validate();
    const SteeringVector pol = butler_polar(g, fixed_polar_rad);
    std::vector<SeparableWeights> beams;
    beams.reserve(static_cast<std::size_t>(g.elements_per_axis));
    for (int k = 1; k <= g.elements_per_axis; ++k) {
        beams.push_back({pol, butler_azimuth(g, k)});
    }
    return beams;
}

// ---------------------------------------------------------------------------
// Gain

/// |a(target)^H w|^2 / (w^H w) with isotropic elements; a matched beam
/// reaches K^2.
inline double array_gain(const SteeringVector& weights, const ArrayGeometry& g, const Direction& target) {
    if (weights.size() != g.elements()) {
        throw ConfigError("array_gain: weight vector has " + std::to_string(weights.size()) + " entries, expected K^2 = " +
                          std::to_string(g.elements()));
    }
    const double wn = detail::squared_norm(weights);
    detail::require(wn > 0.0, "array_gain: zero weight vector");
    return std::norm(detail::inner(steering_vector(g, target), weights)) / wn;
}

// Same quantity for factored weights, O(K) instead of O(K^2).
inline double array_gain(const SeparableWeights& w, const ArrayGeometry& g, const Direction& target) {
    const auto k = static_cast<std::size_t>(g.elements_per_axis);
    if (w.polar.size() != k || w.azimuth.size() != k) {
        throw ConfigError("array_gain: factored weights must have K entries per axis");
    }
    const double pn = detail::squared_norm(w.polar);
    const double an = detail::squared_norm(w.azimuth);
    detail::require(pn > 0.0 && an > 0.0, "array_gain: zero weight vector");
    const double gp = std::norm(detail::inner(steering_polar(g, target.polar_rad), w.polar)) / pn;
    const double ga = std::norm(detail::inner(steering_azimuth(g, target.azimuth_rad), w.azimuth)) / an;
    return gp * ga;
}

struct BeamChoice {
    int beam = 0;  // 1-based
    double gain = 0.0;
};

// Ties resolve to the lowest beam index.
inline BeamChoice best_butler_beam(const std::vector<SeparableWeights>& beams, const ArrayGeometry& g,
                                   const Direction& target) {
    BeamChoice best;
    for (std::size_t i = 0; i < beams.size(); ++i) {
        const double gain = array_gain(beams[i], g, target);
        if (best.beam == 0 || gain > best.gain) {
            best = {static_cast<int>(i) + 1, gain};
        }
    }
    return best;
}

inline BeamChoice best_butler_beam(const ArrayGeometry& g, double fixed_polar_rad, const Direction& target) {
    return best_butler_beam(butler_beams(g, fixed_polar_rad), g, target);
}

/// Mean gain over the full sphere of directions (midpoint rule, polar axis
/// along the array normal). Equals 1 for a lossless pattern.
inline double sphere_average_gain(const SeparableWeights& w, const ArrayGeometry& g, int polar_steps = 360) {
    detail::require(polar_steps >= 2, "sphere_average_gain: need at least 2 polar steps");
    const int az_steps = 2 * polar_steps;
    const double da = kPi / polar_steps;
    const double db = kTwoPi / az_steps;
    double sum = 0.0;
    for (int i = 0; i < polar_steps; ++i) {
        const double a = (i + 0.5) * da;
        const double sa = std::sin(a);
        for (int j = 0; j < az_steps; ++j) {
            const double b = (j + 0.5) * db;
            // roll and radial components of the unit direction
            const double x = sa * std::cos(b);
            const double y = sa * std::sin(b);
            sum += array_gain(w, g, Direction{std::asin(x), std::acos(y)}) * sa;
        }
    }
    return sum * da * db / (4.0 * kPi);
}

/// Gain toward the true direction of digital weights that were matched to an
/// earlier (stale) direction.
inline double repointing_gain_penalty(const ArrayGeometry& g, const Direction& true_direction,
                                      const Direction& steered_direction) {
    return array_gain(digital_weights(g, steered_direction), g, true_direction);
}

/// Uniformly illuminated circular aperture: G_max (2 J1(x) / x)^2 with
/// x = pi D sin(theta) / lambda.
inline double parabolic_pattern_gain(const ParabolicAntenna& a, double carrier_hz, double off_axis_rad,
                                     double c = 299792458.0) {
    const double g = parabolic_gain(a.diameter_m, carrier_hz, a.efficiency, c);
    const double x = kPi * a.diameter_m * carrier_hz / c * std::sin(std::abs(off_axis_rad));
    if (std::abs(x) < 1e-9) {
        return g;
    }
    const double f = 2.0 * std::cyl_bessel_j(1.0, x) / x;
    return g * f * f;
}

// ---------------------------------------------------------------------------
// Satellite body frame

struct AntennaFrame {
    Vec3 roll;    // along-track
    Vec3 radial;  // zenith
    Vec3 pitch;   // orbit normal, array boresight

    static AntennaFrame of(const SatelliteState& s) {
        AntennaFrame f;
        f.radial = normalized(s.position_m);
        const Vec3 v = s.orbital_velocity_mps;
        f.roll = normalized(v - f.radial * dot(v, f.radial));
        f.pitch = cross(f.radial, f.roll);
        return f;
    }

    Direction direction_to(const Vec3& offset) const {
        const Vec3 u = normalized(offset);
        const double sx = std::clamp(dot(u, roll), -1.0, 1.0);
        const double cy = std::clamp(dot(u, radial), -1.0, 1.0);
        return {std::asin(sx), std::acos(cy)};
    }

    // +1 when the target lies on the +pitch side, else -1.
    int side_of(const Vec3& offset) const { return dot(offset, pitch) >= 0.0 ? 1 : -1; }
};

}  // namespace ngso
