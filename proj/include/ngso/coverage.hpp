// SPDX-License-Identifier: Apache-2.0
//
// Ground-to-satellite visibility geometry on a spherical Earth and
// constellation-level service availability statistics.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "ngso/constants.hpp"
#include "ngso/error.hpp"
#include "ngso/link.hpp"
#include "ngso/orbits.hpp"
#include "ngso/vec3.hpp"

namespace ngso {

struct GroundSite {
    std::string id;
    double latitude_rad = 0.0;
    double longitude_rad = 0.0;
    double altitude_m = 0.0;  // above the spherical surface

    void validate() const {
        if (!(std::abs(latitude_rad) <= kPi / 2.0)) {
            throw ConfigError("site " + id + ": latitude outside [-90, 90] degrees");
        }
        if (!(longitude_rad >= -kPi && longitude_rad < kPi)) {
            throw ConfigError("site " + id + ": longitude outside [-180, 180) degrees");
        }
        if (!(altitude_m >= 0.0)) {
            throw ConfigError("site " + id + ": altitude must be non-negative");
        }
    }

    Vec3 position(const PhysicalConstants& k = PhysicalConstants::spherical()) const {
        const double r = k.earth_radius_m + altitude_m;
        const double cl = std::cos(latitude_rad);
        return {r * cl * std::cos(longitude_rad), r * cl * std::sin(longitude_rad), r * std::sin(latitude_rad)};
    }

    friend bool operator==(const GroundSite&, const GroundSite&) = default;
};

struct CoverageSpec {
    double min_elevation_rad = deg2rad(30.0);

    void validate() const {
        if (!(min_elevation_rad >= 0.0 && min_elevation_rad < kPi / 2.0)) {
            throw ConfigError("coverage: min elevation must lie in [0, 90) degrees");
        }
    }
    friend bool operator==(const CoverageSpec&, const CoverageSpec&) = default;
};

// ---------------------------------------------------------------------------
// Closed-form geometry

/// Site-to-satellite distance at elevation eps for a satellite at altitude h.
/// `user_altitude_m` lifts the terminal above the surface (UAV, HAP).
inline double slant_range(double altitude_m, double elevation_rad,
                          const PhysicalConstants& k = PhysicalConstants::spherical(), double user_altitude_m = 0.0) {
    detail::require(altitude_m > 0.0, "slant_range: altitude must be positive");
    detail::require(elevation_rad >= 0.0 && elevation_rad <= kPi / 2.0, "slant_range: elevation outside [0, pi/2]");
    detail::require(user_altitude_m >= 0.0 && user_altitude_m < altitude_m, "slant_range: user must sit below the satellite");
    const double ru = k.earth_radius_m + user_altitude_m;
    const double rs = k.earth_radius_m + altitude_m;
    const double se = std::sin(elevation_rad);
    return std::sqrt(ru * ru * se * se + rs * rs - ru * ru) - ru * se;
}

/// Earth central angle between the terminal and the sub-satellite point.
inline double central_angle(double altitude_m, double elevation_rad,
                            const PhysicalConstants& k = PhysicalConstants::spherical(), double user_altitude_m = 0.0) {
    const double d = slant_range(altitude_m, elevation_rad, k, user_altitude_m);
    const double ru = k.earth_radius_m + user_altitude_m;
    const double rs = k.earth_radius_m + altitude_m;
    double arg = (rs * rs + ru * ru - d * d) / (2.0 * rs * ru);
    constexpr double tol = 1e-12;
    if (arg > 1.0 + tol || arg < -1.0 - tol) {
        throw NumericError("central_angle: arccos argument out of range");
    }
    arg = std::clamp(arg, -1.0, 1.0);
    return std::acos(arg);
}

/// Area of the spherical cap served above the minimum elevation.
inline double coverage_area(double altitude_m, double min_elevation_rad,
                            const PhysicalConstants& k = PhysicalConstants::spherical()) {
    const double re = k.earth_radius_m;
    return kTwoPi * re * re * (1.0 - std::cos(central_angle(altitude_m, min_elevation_rad, k)));
}

/// Upper bound on pass duration (zenith pass): T_o * alpha / pi.
inline double max_pass_duration(double altitude_m, double min_elevation_rad,
                                const PhysicalConstants& k = PhysicalConstants::spherical()) {
    return orbital_period(altitude_m, k) * central_angle(altitude_m, min_elevation_rad, k) / kPi;
}

// ---------------------------------------------------------------------------
// Instantaneous visibility

inline double elevation(const GroundSite& site, const Vec3& satellite_position,
                        const PhysicalConstants& k = PhysicalConstants::spherical()) {
    const Vec3 rs = site.position(k);
    const Vec3 los = satellite_position - rs;
    const double d = norm(los);
    if (!(d > 0.0)) {
        throw DomainError("elevation: site and satellite coincide");
    }
    const double s = dot(los, rs) / (d * norm(rs));
    return std::asin(std::clamp(s, -1.0, 1.0));
}

inline double elevation(const GroundSite& site, const SatelliteState& sat,
                        const PhysicalConstants& k = PhysicalConstants::spherical()) {
    return elevation(site, sat.position_m, k);
}

// Closed set: elevation == min elevation counts as covered.
inline bool in_coverage(const GroundSite& site, const SatelliteState& sat, const CoverageSpec& spec,
                        const PhysicalConstants& k = PhysicalConstants::spherical()) {
    return elevation(site, sat, k) >= spec.min_elevation_rad;
}

// Same predicate through the slant-range bound.
inline bool in_coverage_by_distance(const GroundSite& site, const SatelliteState& sat, const CoverageSpec& spec,
                                    const PhysicalConstants& k = PhysicalConstants::spherical()) {
    const double h = norm(sat.position_m) - k.earth_radius_m;
    return distance(site.position(k), sat.position_m) <=
           slant_range(h, spec.min_elevation_rad, k, site.altitude_m);
}

// ---------------------------------------------------------------------------
// Service availability by latitude

struct AvailabilitySampling {
    int longitude_samples = 100;
    double time_step_s = 10.0;
    // Zero selects one orbital period (the longest in the constellation).
    double horizon_s = 0.0;
    unsigned threads = 1;
};

struct AvailabilityProfile {
    std::vector<double> latitude_rad;
    std::vector<double> availability;  // fraction of samples with >= 1 satellite in coverage
    std::vector<double> mean_visible;  // mean number of satellites in coverage
};

// Uniform latitude grid from -90 to 90 degrees inclusive.
inline std::vector<double> latitude_grid(double step_deg) {
    detail::require(step_deg > 0.0, "latitude_grid: step must be positive");
    std::vector<double> out;
    const int n = static_cast<int>(std::floor(180.0 / step_deg + 1e-9));
    for (int i = 0; i <= n; ++i) {
        out.push_back(deg2rad(-90.0 + i * step_deg));
    }
    return out;
}

namespace detail {

struct VisibilityCounts {
    long long covered = 0;
    long long visible = 0;
};

}  // namespace detail

/// Fraction of (time, longitude) samples with at least one satellite in
/// coverage and mean number of satellites in coverage, per latitude.
///
/// Sites sit at sea level; a satellite covers a site iff the central angle
/// between them is at most alpha(h, eps_min), which is the elevation test
/// restated on the unit sphere.
inline AvailabilityProfile availability_by_latitude(const Constellation& constellation, const CoverageSpec& spec,
                                                    std::span<const double> latitudes_rad,
                                                    const AvailabilitySampling& sampling = {}) {
    if (latitudes_rad.empty()) {
        throw ConfigError("availability: latitude grid is empty");
    }
    if (sampling.longitude_samples < 1 || !(sampling.time_step_s > 0.0)) {
        throw ConfigError("availability: need >= 1 longitude sample and a positive time step");
    }
    spec.validate();
    const PhysicalConstants& k = constellation.constants();
    const double horizon = sampling.horizon_s > 0.0 ? sampling.horizon_s : constellation.max_period();
    const auto n_times = static_cast<std::size_t>(std::ceil(horizon / sampling.time_step_s - 1e-9));
    const std::size_t n_sats = constellation.size();
    const auto n_lon = static_cast<std::size_t>(sampling.longitude_samples);

    std::vector<double> cos_alpha(n_sats);
    std::vector<double> alpha(n_sats);
    for (std::size_t i = 0; i < n_sats; ++i) {
        alpha[i] = central_angle(constellation.orbit(i).altitude_m, spec.min_elevation_rad, k);
        // tiny slack keeps the closed boundary closed under rounding
        cos_alpha[i] = std::cos(alpha[i]) - 1e-12;
    }

    const std::size_t n_lat = latitudes_rad.size();
    std::vector<detail::VisibilityCounts> counts(n_lat);

    auto work = [&](std::size_t lat_begin, std::size_t lat_end) {
        std::vector<Vec3> unit(n_sats);
        std::vector<Vec3> sites(n_lon);
        std::vector<std::size_t> candidates;
        candidates.reserve(n_sats);
        std::vector<int> per_site(n_lon);
        for (std::size_t ti = 0; ti < n_times; ++ti) {
            const double t = static_cast<double>(ti) * sampling.time_step_s;
            for (std::size_t i = 0; i < n_sats; ++i) {
                unit[i] = normalized(constellation.propagate(i, t).position_m);
            }
            for (std::size_t li = lat_begin; li < lat_end; ++li) {
                const double lat = latitudes_rad[li];
                const double cl = std::cos(lat);
                const double sl = std::sin(lat);
                candidates.clear();
                for (std::size_t i = 0; i < n_sats; ++i) {
                    const double sat_lat = std::asin(std::clamp(unit[i].z, -1.0, 1.0));
                    if (std::abs(sat_lat - lat) <= alpha[i] + 1e-9) {
                        candidates.push_back(i);
                    }
                }
                std::fill(per_site.begin(), per_site.end(), 0);
                for (std::size_t j = 0; j < n_lon; ++j) {
                    const double lon = -kPi + kTwoPi * static_cast<double>(j) / static_cast<double>(n_lon);
                    const Vec3 s{cl * std::cos(lon), cl * std::sin(lon), sl};
                    int c = 0;
                    for (std::size_t i : candidates) {
                        if (dot(s, unit[i]) >= cos_alpha[i]) {
                            ++c;
                        }
                    }
                    per_site[j] = c;
                }
                for (int c : per_site) {
                    counts[li].covered += c > 0 ? 1 : 0;
                    counts[li].visible += c;
                }
            }
        }
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(sampling.threads, static_cast<unsigned>(n_lat)));
    if (threads == 1) {
        work(0, n_lat);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n_lat + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            const std::size_t b = w * chunk;
            const std::size_t e = std::min(n_lat, b + chunk);
            if (b < e) {
                pool.emplace_back(work, b, e);
            }
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    AvailabilityProfile out;
    const double samples = static_cast<double>(n_times * n_lon);
    for (std::size_t li = 0; li < n_lat; ++li) {
        out.latitude_rad.push_back(latitudes_rad[li]);
        out.availability.push_back(static_cast<double>(counts[li].covered) / samples);
        out.mean_visible.push_back(static_cast<double>(counts[li].visible) / samples);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rate along a single pass

struct PassSample {
    double t_s = 0.0;
    double elevation_rad = 0.0;
    double distance_m = 0.0;
    double rate_bps = 0.0;
};

struct PassSearch {
    double search_horizon_s = 86400.0;
    double search_step_s = 5.0;
};

namespace detail {

// Bisection for the elevation crossing between a (below) and b (above) or
// vice versa.
template <typename F>
double refine_crossing(F&& margin, double a, double b) {
    double fa = margin(a);
    for (int i = 0; i < 80; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = margin(m);
        if ((fm >= 0.0) == (fa >= 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return (fa >= 0.0) ? a : b;
}

}  // namespace detail

/// Samples the GSL rate across the first complete pass of `sat` over `site`
/// after t = 0. Edges are located by bisection and included as samples, so
/// the first and last samples sit exactly at the minimum elevation.
inline std::vector<PassSample> pass_rate_profile(const Constellation& constellation, const GroundSite& site,
                                                 const SatelliteId& sat, const LinkParams& link,
                                                 const CoverageSpec& spec, double dt_s, const PassSearch& search = {}) {
    detail::require(dt_s > 0.0, "pass_rate_profile: dt must be positive");
    const PhysicalConstants& k = constellation.constants();
    const std::size_t idx = constellation.index_of(sat);
    auto margin = [&](double t) {
        return elevation(site, constellation.propagate(idx, t), k) - spec.min_elevation_rad;
    };
    auto sample = [&](double t) {
        const SatelliteState s = constellation.propagate(idx, t);
        PassSample p;
        p.t_s = t;
        p.elevation_rad = elevation(site, s, k);
        p.distance_m = distance(site.position(k), s.position_m);
        const double g_tx = peak_gain(link.tx_antenna, link.carrier_hz, k.speed_of_light_mps);
        const double g_rx = peak_gain(link.rx_antenna, link.carrier_hz, k.speed_of_light_mps);
        p.rate_bps = shannon_rate(link, snr(link, p.distance_m, g_tx, g_rx, 0.0, k.speed_of_light_mps));
        return p;
    };

    std::vector<PassSample> out;
    const double step = std::min(search.search_step_s, dt_s);
    double t = 0.0;
    // skip a pass already in progress at t = 0
    while (t <= search.search_horizon_s && margin(t) >= 0.0) {
        t += step;
    }
    std::optional<double> start;
    while (t <= search.search_horizon_s) {
        const double next = t + step;
        if (margin(next) >= 0.0) {
            start = detail::refine_crossing(margin, t, next);
            break;
        }
        t = next;
    }
    if (!start) {
        return out;
    }
    double end = *start;
    while (margin(end + step) >= 0.0) {
        end += step;
        if (end - *start > search.search_horizon_s) {
            return out;
        }
    }
    end = detail::refine_crossing(margin, end, end + step);

    out.push_back(sample(*start));
    for (double s = *start + dt_s; s < end; s += dt_s) {
        out.push_back(sample(s));
    }
    out.push_back(sample(end));
    return out;
}

}  // namespace ngso
