// SPDX-License-Identifier: Apache-2.0
//
// RF link budget: free-space path loss, thermal noise, aperture gain, SNR and
// Shannon rate, plus the global inter-plane ISL connectivity condition.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "ngso/constants.hpp"
#include "ngso/error.hpp"
#include "ngso/orbits.hpp"

namespace ngso {

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

struct ParabolicAntenna {
    double diameter_m = 0.26;
    double efficiency = 0.55;
    friend bool operator==(const ParabolicAntenna&, const ParabolicAntenna&) = default;
};

// K x K uniform planar array, digitally steered.
struct PhasedArrayAntenna {
    int elements_per_axis = 16;
    double spacing_wavelengths = 0.5;
    friend bool operator==(const PhasedArrayAntenna&, const PhasedArrayAntenna&) = default;
};

// K x K array fed through a Butler matrix (K fixed azimuth beams).
struct ButlerAntenna {
    int elements_per_axis = 4;
    double spacing_wavelengths = 0.5;
    double fixed_polar_rad = kPi / 2.0;
    friend bool operator==(const ButlerAntenna&, const ButlerAntenna&) = default;
};

using AntennaSpec = std::variant<ParabolicAntenna, PhasedArrayAntenna, ButlerAntenna>;

inline void validate(const AntennaSpec& spec) {
    std::visit(
        [](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, ParabolicAntenna>) {
                if (!(a.diameter_m > 0.0) || !(a.efficiency > 0.0 && a.efficiency <= 1.0)) {
                    throw ConfigError("parabolic antenna: need D > 0 and 0 < efficiency <= 1");
                }
            } else {
                if (a.elements_per_axis < 1 || !(a.spacing_wavelengths > 0.0)) {
                    throw ConfigError("array antenna: need K >= 1 and element spacing > 0");
                }
            }
        },
        spec);
}

/// Discrete set of selectable rates; empty means continuous Shannon rate.
struct RateSet {
    std::vector<double> rates_bps;

    bool continuous() const { return rates_bps.empty(); }

    void validate() const {
        for (double r : rates_bps) {
            if (!(r > 0.0)) {
                throw ConfigError("rate set: every rate must be positive");
            }
        }
    }
    friend bool operator==(const RateSet&, const RateSet&) = default;
};

/// Radio parameters of one link type (GSL or ISL).
struct LinkParams {
    double carrier_hz = 26e9;
    double bandwidth_hz = 500e6;
    double tx_power_w = 10.0;
    double noise_temperature_k = 290.0;
    double noise_figure_db = 2.0;
    AntennaSpec tx_antenna = ParabolicAntenna{};
    AntennaSpec rx_antenna = ParabolicAntenna{};
    // Applied once at every parabolic end.
    double pointing_loss_db = 0.3;
    RateSet rates;

    void validate() const {
        if (!(carrier_hz > 0.0) || !(bandwidth_hz > 0.0) || !(tx_power_w > 0.0) || !(noise_temperature_k > 0.0)) {
            throw ConfigError("link: carrier, bandwidth, power and noise temperature must be positive");
        }
        if (!(noise_figure_db >= 0.0) || !(pointing_loss_db >= 0.0)) {
            throw ConfigError("link: noise figure and pointing loss must be non-negative");
        }
        ngso::validate(tx_antenna);
        ngso::validate(rx_antenna);
        rates.validate();
    }
    friend bool operator==(const LinkParams&, const LinkParams&) = default;
};

// ---------------------------------------------------------------------------

/// Free-space path loss (4 pi d f / c)^2, linear.
inline double free_space_path_loss(double distance_m, double carrier_hz, double c = 299792458.0) {
    detail::require(distance_m > 0.0 && carrier_hz > 0.0, "free_space_path_loss: distance and frequency must be positive");
    const double x = 4.0 * kPi * distance_m * carrier_hz / c;
    return x * x;
}

/// Receiver noise power k_B B (T_N + T_0 (F - 1)), T_0 = 290 K.
inline double noise_power(double bandwidth_hz, double noise_temperature_k, double noise_figure_db) {
    const double f = from_db(noise_figure_db);
    return kBoltzmann * bandwidth_hz * (noise_temperature_k + kReferenceTemperature * (f - 1.0));
}

inline double noise_power(const LinkParams& p) {
    return noise_power(p.bandwidth_hz, p.noise_temperature_k, p.noise_figure_db);
}

/// Aperture gain eta (pi D f / c)^2 of a parabolic reflector.
inline double parabolic_gain(double diameter_m, double carrier_hz, double efficiency, double c = 299792458.0) {
    const double x = kPi * diameter_m * carrier_hz / c;
    return efficiency * x * x;
}

// Boresight gain (linear) of an antenna at the given carrier.
inline double peak_gain(const AntennaSpec& spec, double carrier_hz, double c = 299792458.0) {
    if (const auto* p = std::get_if<ParabolicAntenna>(&spec)) {
        return parabolic_gain(p->diameter_m, carrier_hz, p->efficiency, c);
    }
    const int k = std::visit(
        [](const auto& a) -> int {
            if constexpr (std::is_same_v<std::decay_t<decltype(a)>, ParabolicAntenna>) {
                return 1;
            } else {
                return a.elements_per_axis;
            }
        },
        spec);
    return static_cast<double>(k) * k;
}

// Linear pointing-loss factor (<= 1) over both link ends.
inline double pointing_loss_factor(const LinkParams& p) {
    int ends = 0;
    ends += std::holds_alternative<ParabolicAntenna>(p.tx_antenna) ? 1 : 0;
    ends += std::holds_alternative<ParabolicAntenna>(p.rx_antenna) ? 1 : 0;
    return from_db(-p.pointing_loss_db * ends);
}

/// Signal-to-(interference plus) noise ratio at distance d for explicit
/// transmit and receive gains. `interference_w` is zero under orthogonal
/// resource allocation.
inline double snr(const LinkParams& p, double distance_m, double tx_gain, double rx_gain,
                  double interference_w = 0.0, double c = 299792458.0) {
    const double received = p.tx_power_w * tx_gain * rx_gain * pointing_loss_factor(p) /
                            free_space_path_loss(distance_m, p.carrier_hz, c);
    return received / (noise_power(p) + interference_w);
}

/// B log2(1 + snr), quantised down to the configured rate set if any.
inline double shannon_rate(const LinkParams& p, double snr_linear) {
    detail::require(snr_linear >= 0.0, "shannon_rate: snr must be non-negative");
    const double capacity = p.bandwidth_hz * std::log2(1.0 + snr_linear);
    if (p.rates.continuous()) {
        return capacity;
    }
    double best = 0.0;
    for (double r : p.rates.rates_bps) {
        if (r <= capacity && r > best) {
            best = r;
        }
    }
    return best;
}

// Rate with both antennas at boresight gain.
inline double boresight_rate(const LinkParams& p, double distance_m, double c = 299792458.0) {
    return shannon_rate(p, snr(p, distance_m, peak_gain(p.tx_antenna, p.carrier_hz, c),
                               peak_gain(p.rx_antenna, p.carrier_hz, c), 0.0, c));
}

// ---------------------------------------------------------------------------

struct ConnectivityReport {
    bool connected = false;
    double worst_distance_m = 0.0;
    double snr = 0.0;
    double shannon_bps = 0.0;
    double selected_rate_bps = 0.0;
    double required_rate_bps = 0.0;
    double margin_db = 0.0;
};

/// Global inter-plane ISL connectivity: can every satellite reach its nearest
/// inter-plane neighbour at the worst-case distance with some rate in the set?
///
/// In continuous mode the smallest acceptable rate is `continuous_floor_bps`.
/// The margin is the SNR surplus over the SNR needed for that smallest rate.
inline ConnectivityReport isl_connectivity_check(const LinkParams& p, const ShellConfig& shell,
                                                 const PhysicalConstants& k = PhysicalConstants::spherical(),
                                                 double continuous_floor_bps = 1.0) {
    shell.validate();
    ConnectivityReport r;
    r.worst_distance_m = max_inter_plane_distance(shell.sats_per_plane(), shell.n_planes, shell.altitude_m, k);
    r.snr = snr(p, r.worst_distance_m, peak_gain(p.tx_antenna, p.carrier_hz, k.speed_of_light_mps),
                peak_gain(p.rx_antenna, p.carrier_hz, k.speed_of_light_mps), 0.0, k.speed_of_light_mps);
    r.shannon_bps = p.bandwidth_hz * std::log2(1.0 + r.snr);
    if (p.rates.continuous()) {
        r.required_rate_bps = continuous_floor_bps;
        r.selected_rate_bps = r.shannon_bps;
        r.connected = r.shannon_bps > continuous_floor_bps;
    } else {
        r.required_rate_bps = *std::min_element(p.rates.rates_bps.begin(), p.rates.rates_bps.end());
        r.selected_rate_bps = shannon_rate(p, r.snr);
        r.connected = r.required_rate_bps < r.shannon_bps;
    }
    const double required_snr = std::exp2(r.required_rate_bps / p.bandwidth_hz) - 1.0;
    r.margin_db = to_db(r.snr) - to_db(required_snr);
    return r;
}

// ---------------------------------------------------------------------------
// Reference parameter bundles

inline LinkParams gsl_link_preset() {
    LinkParams p;
    p.carrier_hz = 20e9;
    p.bandwidth_hz = 500e6;
    p.tx_power_w = 10.0;
    p.noise_temperature_k = 150.0;
    p.noise_figure_db = 1.2;
    p.tx_antenna = ParabolicAntenna{0.26, 0.55};
    p.rx_antenna = ParabolicAntenna{0.33, 0.55};
    p.pointing_loss_db = 0.3;
    return p;
}

inline LinkParams isl_link_preset() {
    LinkParams p;
    p.carrier_hz = 26e9;
    p.bandwidth_hz = 500e6;
    p.tx_power_w = 10.0;
    p.noise_temperature_k = 290.0;
    p.noise_figure_db = 2.0;
    p.tx_antenna = ParabolicAntenna{0.26, 0.55};
    p.rx_antenna = ParabolicAntenna{0.26, 0.55};
    p.pointing_loss_db = 0.3;
    return p;
}

inline LinkParams link_preset(std::string_view name) {
    if (name == "gsl") {
        return gsl_link_preset();
    }
    if (name == "isl") {
        return isl_link_preset();
    }
    throw LookupError("unknown link preset '" + std::string(name) + "' (expected gsl | isl)");
}

}  // namespace ngso
