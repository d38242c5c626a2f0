// SPDX-License-Identifier: Apache-2.0
//
// Scenario documents (JSON): parsing with unknown-field rejection, defaults
// bookkeeping, validation and canonical serialisation.
#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ngso/constants.hpp"
#include "ngso/coverage.hpp"
#include "ngso/error.hpp"
#include "ngso/ground_segment.hpp"
#include "ngso/isl.hpp"
#include "ngso/link.hpp"
#include "ngso/orbits.hpp"
#include "ngso/packet_sim.hpp"
#include "ngso/routing.hpp"

namespace ngso::cli {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kToolVersion = "0.3.0";

inline const std::vector<std::string>& experiment_catalog() {
    static const std::vector<std::string> ids = {
        "table2-regression", "pass-profile",   "availability", "isl-rate-cdf",       "beam-pattern",
        "reestablishment-sweep", "routing-latency", "max-load", "connectivity-check",
    };
    return ids;
}

inline bool experiment_is_stochastic(std::string_view id) { return id == "routing-latency" || id == "max-load"; }

/// Thrown for malformed documents; carries the 1-based line when known.
class ScenarioParseError : public ConfigError {
public:
    ScenarioParseError(const std::string& what, int line) : ConfigError(what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct AntennaConfig {
    std::string mode = "parabolic";  // parabolic | digital | butler
    int elements_per_axis = 16;
    double spacing_wavelengths = 0.5;
    double fixed_polar_deg = 90.0;
    friend bool operator==(const AntennaConfig&, const AntennaConfig&) = default;
};

struct MatchingConfig {
    double period_s = 60.0;
    double horizon_s = 0.0;
    double sample_step_s = 60.0;
    bool lookahead = true;
    std::string seed_policy = "keep_feasible";
    int inter_plane_transceivers = 2;
    int intra_plane_transceivers = 2;
    bool adjacent_planes_only = true;
    double occlusion_margin_km = 80.0;
    std::optional<double> max_range_km;
    std::string interference = "orthogonal";
    int subbands = 2;
    std::vector<double> sweep_periods_s = {0.0, 2.0, 10.0, 30.0};
    friend bool operator==(const MatchingConfig&, const MatchingConfig&) = default;
};

struct AvailabilityConfig {
    double latitude_step_deg = 5.0;
    int longitude_samples = 100;
    double time_step_s = 10.0;
    double horizon_s = 0.0;
    friend bool operator==(const AvailabilityConfig&, const AvailabilityConfig&) = default;
};

struct PassConfig {
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;
    int plane = 0;
    int slot = 0;
    double time_step_s = 1.0;
    double search_horizon_s = 86400.0;
    friend bool operator==(const PassConfig&, const PassConfig&) = default;
};

struct BeamConfig {
    int elements_per_axis = 4;
    double spacing_wavelengths = 0.5;
    double polar_deg = 90.0;
    int azimuth_samples = 361;
    friend bool operator==(const BeamConfig&, const BeamConfig&) = default;
};

struct TrafficConfig {
    std::optional<double> packets_per_s;  // per site; overrides load_fraction
    double load_fraction = 0.5;           // of the latency-metric lambda* at each epoch
    double packet_bytes = 1500.0;
    std::string arrivals = "poisson";
    double horizon_s = 0.05;
    int epochs = 5;
    double epoch_spacing_s = 600.0;
    std::vector<double> probe_fractions = {0.9, 1.1};
    double probe_horizon_s = 0.5;
    friend bool operator==(const TrafficConfig&, const TrafficConfig&) = default;
};

struct RoutingConfig {
    std::vector<std::string> metrics = {"hop_count", "path_loss", "latency"};
    std::string queue_estimate = "constant";
    double constant_wait_s = 0.0;
    std::string path_loss_scale = "db";
    friend bool operator==(const RoutingConfig&, const RoutingConfig&) = default;
};

struct Scenario {
    std::string experiment;
    std::optional<std::uint64_t> seed;
    std::string output_dir = "out";
    std::string constants = "spherical";
    std::string constellation_preset;  // empty when shells are given inline
    std::vector<ShellConfig> shells;
    bool earth_rotation = true;
    LinkParams gsl = gsl_link_preset();
    LinkParams isl = isl_link_preset();
    CoverageSpec coverage;
    AntennaConfig antenna;
    MatchingConfig matching;
    AvailabilityConfig availability;
    PassConfig pass;
    BeamConfig beam;
    std::string ground_preset = "ksat23";  // empty when sites are given inline
    std::vector<GroundSite> sites = ksat_like_sites();
    TrafficConfig traffic;
    RoutingConfig routing;

    // Fields filled from defaults while loading (path -> value). Not part of
    // the scenario identity.
    Json applied_defaults = Json::object();

    bool operator==(const Scenario& o) const {
        return experiment == o.experiment && seed == o.seed && output_dir == o.output_dir && constants == o.constants &&
               constellation_preset == o.constellation_preset && shells == o.shells &&
               earth_rotation == o.earth_rotation && gsl == o.gsl && isl == o.isl && coverage == o.coverage &&
               antenna == o.antenna && matching == o.matching && availability == o.availability && pass == o.pass &&
               beam == o.beam && ground_preset == o.ground_preset && sites == o.sites && traffic == o.traffic &&
               routing == o.routing;
    }

    PhysicalConstants physical_constants() const { return PhysicalConstants::by_name(constants); }

    Constellation constellation() const {
        PropagationModel m;
        m.earth_rotation = earth_rotation;
        return Constellation(shells, physical_constants(), m);
    }

    /// ISL parameters with the antenna section applied.
    LinkParams isl_link() const {
        LinkParams p = isl;
        if (antenna.mode == "digital") {
            p.tx_antenna = p.rx_antenna = PhasedArrayAntenna{antenna.elements_per_axis, antenna.spacing_wavelengths};
        } else if (antenna.mode == "butler") {
            p.tx_antenna = p.rx_antenna =
                ButlerAntenna{antenna.elements_per_axis, antenna.spacing_wavelengths, deg2rad(antenna.fixed_polar_deg)};
        }
        return p;
    }

    IslOptions isl_options() const {
        IslOptions o;
        o.budget.inter_plane = matching.inter_plane_transceivers;
        o.budget.intra_plane = matching.intra_plane_transceivers;
        o.adjacent_planes_only = matching.adjacent_planes_only;
        o.occlusion_margin_m = matching.occlusion_margin_km * 1e3;
        if (matching.max_range_km) {
            o.max_range_m = *matching.max_range_km * 1e3;
        }
        o.interference = matching.interference == "sinr" ? InterferenceMode::sinr : InterferenceMode::orthogonal;
        o.subbands = matching.subbands;
        return o;
    }

    ScheduleOptions schedule_options(double period_s) const {
        ScheduleOptions s;
        s.reestablish_period_s = period_s;
        s.horizon_s = matching.horizon_s;
        s.sample_step_s = matching.sample_step_s;
        s.lookahead = matching.lookahead;
        s.seed = matching.seed_policy == "fresh" ? SeedPolicy::fresh : SeedPolicy::keep_feasible;
        return s;
    }

    RoutingMetric routing_metric(const std::string& name) const {
        RoutingMetric m;
        m.kind = metric_from_string(name);
        m.mean_packet_bits = traffic.packet_bytes * 8.0;
        m.queue = routing.queue_estimate == "mm1" ? QueueEstimate::mm1 : QueueEstimate::constant;
        m.constant_wait_s = routing.constant_wait_s;
        m.path_loss_scale = routing.path_loss_scale == "linear" ? PathLossScale::linear : PathLossScale::db;
        m.speed_of_light_mps = physical_constants().speed_of_light_mps;
        return m;
    }

    GroundSite pass_site() const {
        return {"pass-site", deg2rad(pass.latitude_deg), deg2rad(pass.longitude_deg), 0.0};
    }
};

// ---------------------------------------------------------------------------
// Reading

namespace detail {

template <typename T>
const char* json_type_name() {
    if constexpr (std::is_same_v<T, bool>) {
        return "boolean";
    } else if constexpr (std::is_integral_v<T>) {
        return "integer";
    } else if constexpr (std::is_floating_point_v<T>) {
        return "number";
    } else if constexpr (std::is_same_v<T, std::string>) {
        return "string";
    } else {
        return "array";
    }
}

/// Typed view of one JSON object that records which keys were read and
/// which defaults were applied.
class ObjectReader {
public:
    ObjectReader(const Json& obj, std::string path, Json& defaults) : obj_(obj), path_(std::move(path)), defaults_(defaults) {
        if (!obj_.is_object()) {
            throw ConfigError("field '" + display() + "': expected an object");
        }
    }

    bool has(const std::string& key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }

    void mark(const std::string& key) { used_.insert(key); }

    const Json& raw(const std::string& key) {
        used_.insert(key);
        return obj_.at(key);
    }

    template <typename T>
    T get(const std::string& key, const T& fallback) {
        used_.insert(key);
        if (!has(key)) {
            defaults_[field(key)] = Json(fallback);
            return fallback;
        }
        return convert<T>(key);
    }

    template <typename T>
    std::optional<T> optional(const std::string& key) {
        used_.insert(key);
        if (!has(key)) {
            return std::nullopt;
        }
        return convert<T>(key);
    }

    ObjectReader child(const std::string& key) {
        used_.insert(key);
        static const Json empty = Json::object();
        if (!has(key)) {
            return ObjectReader(empty, field(key), defaults_);
        }
        return ObjectReader(obj_.at(key), field(key), defaults_);
    }

    void finish() const {
        for (const auto& [key, value] : obj_.items()) {
            if (!used_.count(key)) {
                throw ConfigError("unknown field '" + field(key) + "'");
            }
        }
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    std::string display() const { return path_.empty() ? "<root>" : path_; }

    template <typename T>
    T convert(const std::string& key) const {
        const Json& v = obj_.at(key);
        bool ok = false;
        if constexpr (std::is_same_v<T, bool>) {
            ok = v.is_boolean();
        } else if constexpr (std::is_integral_v<T>) {
            ok = v.is_number_integer();
        } else if constexpr (std::is_floating_point_v<T>) {
            ok = v.is_number();
        } else if constexpr (std::is_same_v<T, std::string>) {
            ok = v.is_string();
        } else {
            ok = v.is_array();
        }
        if (!ok) {
            throw ConfigError("field '" + field(key) + "': expected " + json_type_name<T>());
        }
        try {
            return v.get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("field '" + field(key) + "': " + e.what());
        }
    }

    const Json& obj_;
    std::string path_;
    Json& defaults_;
    std::set<std::string> used_;
};

inline void require_one_of(const std::string& field, const std::string& value, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed) {
        if (value == a) {
            return;
        }
    }
    std::string list;
    for (const char* a : allowed) {
        list += list.empty() ? a : std::string(" | ") + a;
    }
    throw ConfigError("field '" + field + "': '" + value + "' is not one of " + list);
}

inline LinkParams read_link(const Json& node, const std::string& path, const std::string& default_preset, Json& defaults) {
    if (node.is_string()) {
        try {
            return link_preset(node.get<std::string>());
        } catch (const LookupError& e) {
            throw ConfigError("field '" + path + "': " + e.what());
        }
    }
    ObjectReader r(node, path, defaults);
    const std::string preset = r.get<std::string>("preset", default_preset);
    LinkParams p;
    try {
        p = link_preset(preset);
    } catch (const LookupError& e) {
        throw ConfigError("field '" + path + ".preset': " + e.what());
    }
    const auto& tx = std::get<ParabolicAntenna>(p.tx_antenna);
    const auto& rx = std::get<ParabolicAntenna>(p.rx_antenna);
    p.carrier_hz = r.get<double>("carrier_ghz", p.carrier_hz / 1e9) * 1e9;
    p.bandwidth_hz = r.get<double>("bandwidth_mhz", p.bandwidth_hz / 1e6) * 1e6;
    p.tx_power_w = r.get<double>("tx_power_w", p.tx_power_w);
    p.noise_temperature_k = r.get<double>("noise_temperature_k", p.noise_temperature_k);
    p.noise_figure_db = r.get<double>("noise_figure_db", p.noise_figure_db);
    const double eff = r.get<double>("efficiency", tx.efficiency);
    const double dtx = r.get<double>("tx_diameter_m", tx.diameter_m);
    const double drx = r.get<double>("rx_diameter_m", rx.diameter_m);
    p.tx_antenna = ParabolicAntenna{dtx, eff};
    p.rx_antenna = ParabolicAntenna{drx, eff};
    p.pointing_loss_db = r.get<double>("pointing_loss_db", p.pointing_loss_db);
    for (double mbps : r.get<std::vector<double>>("rates_mbps", {})) {
        p.rates.rates_bps.push_back(mbps * 1e6);
    }
    r.finish();
    try {
        p.validate();
    } catch (const ConfigError& e) {
        throw ConfigError("field '" + path + "': " + e.what());
    }
    return p;
}

inline ShellConfig read_shell(const Json& node, const std::string& path, Json& defaults) {
    ObjectReader r(node, path, defaults);
    ShellConfig s;
    s.geometry = geometry_from_string(r.get<std::string>("geometry", "star"));
    const auto n = r.optional<int>("n_sats");
    const auto p = r.optional<int>("n_planes");
    const auto h = r.optional<double>("altitude_km");
    const auto inc = r.optional<double>("inclination_deg");
    if (!n || !p || !h || !inc) {
        throw ConfigError("field '" + path + "': shells need n_sats, n_planes, altitude_km and inclination_deg");
    }
    s.n_sats = *n;
    s.n_planes = *p;
    s.altitude_m = *h * 1e3;
    s.inclination_rad = deg2rad(*inc);
    s.inter_plane_phasing = r.get<double>("phasing", 0.0);
    for (double km : r.get<std::vector<double>>("plane_altitude_offsets_km", {})) {
        s.per_plane_altitude_offset_m.push_back(km * 1e3);
    }
    r.finish();
    try {
        s.validate();
    } catch (const ConfigError& e) {
        throw ConfigError("field '" + path + "': " + e.what());
    }
    return s;
}

inline int line_of_offset(const std::string& text, std::size_t offset) {
    int line = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        line += text[i] == '\n' ? 1 : 0;
    }
    return line;
}

}  // namespace detail

inline Scenario scenario_from_json(const Json& doc) {
    Scenario s;
    Json& defaults = s.applied_defaults;
    detail::ObjectReader r(doc, "", defaults);

    s.experiment = r.get<std::string>("experiment", "table2-regression");
    {
        const auto& cat = experiment_catalog();
        if (std::find(cat.begin(), cat.end(), s.experiment) == cat.end()) {
            std::string list;
            for (const auto& id : cat) {
                list += (list.empty() ? "" : ", ") + id;
            }
            throw ConfigError("field 'experiment': unknown experiment '" + s.experiment + "'; catalog: " + list);
        }
    }
    if (r.has("seed")) {
        const Json& v = r.raw("seed");
        if (!v.is_number_unsigned()) {
            throw ConfigError("field 'seed': expected a non-negative integer");
        }
        s.seed = v.get<std::uint64_t>();
    } else {
        r.mark("seed");
    }
    s.output_dir = r.get<std::string>("output_dir", "out");
    s.constants = r.get<std::string>("constants", "spherical");
    detail::require_one_of("constants", s.constants, {"spherical", "wgs-equatorial"});

    if (r.has("constellation") && r.raw("constellation").is_array()) {
        const Json& arr = r.raw("constellation");
        if (arr.empty()) {
            throw ConfigError("field 'constellation': shell list is empty");
        }
        for (std::size_t i = 0; i < arr.size(); ++i) {
            s.shells.push_back(detail::read_shell(arr[i], "constellation[" + std::to_string(i) + "]", defaults));
        }
    } else {
        s.constellation_preset = r.get<std::string>("constellation", "kepler");
        try {
            s.shells = {preset_shell(s.constellation_preset)};
        } catch (const LookupError& e) {
            throw ConfigError(std::string("field 'constellation': ") + e.what());
        }
    }
    {
        auto p = r.child("propagation");
        s.earth_rotation = p.get<bool>("earth_rotation", true);
        p.finish();
    }
    {
        auto l = r.child("link");
        s.gsl = l.has("gsl") ? detail::read_link(l.raw("gsl"), "link.gsl", "gsl", defaults) : gsl_link_preset();
        s.isl = l.has("isl") ? detail::read_link(l.raw("isl"), "link.isl", "isl", defaults) : isl_link_preset();
        if (!l.has("gsl")) {
            defaults["link.gsl"] = "gsl";
        }
        if (!l.has("isl")) {
            defaults["link.isl"] = "isl";
        }
        l.finish();
    }
    {
        auto c = r.child("coverage");
        s.coverage.min_elevation_rad = deg2rad(c.get<double>("min_elevation_deg", 30.0));
        c.finish();
        s.coverage.validate();
    }
    {
        auto a = r.child("antenna");
        s.antenna.mode = a.get<std::string>("mode", "parabolic");
        detail::require_one_of("antenna.mode", s.antenna.mode, {"parabolic", "digital", "butler"});
        const int default_k = s.antenna.mode == "butler" ? 4 : 16;
        s.antenna.elements_per_axis = a.get<int>("elements_per_axis", default_k);
        s.antenna.spacing_wavelengths = a.get<double>("spacing_wavelengths", 0.5);
        s.antenna.fixed_polar_deg = a.get<double>("fixed_polar_deg", 90.0);
        a.finish();
        if (s.antenna.elements_per_axis < 1 || !(s.antenna.spacing_wavelengths > 0.0)) {
            throw ConfigError("field 'antenna': need elements_per_axis >= 1 and spacing_wavelengths > 0");
        }
    }
    {
        auto m = r.child("matching");
        MatchingConfig d;
        s.matching.period_s = m.get<double>("period_s", d.period_s);
        s.matching.horizon_s = m.get<double>("horizon_s", d.horizon_s);
        s.matching.sample_step_s = m.get<double>("sample_step_s", d.sample_step_s);
        s.matching.lookahead = m.get<bool>("lookahead", d.lookahead);
        s.matching.seed_policy = m.get<std::string>("seed_policy", d.seed_policy);
        detail::require_one_of("matching.seed_policy", s.matching.seed_policy, {"keep_feasible", "fresh"});
        s.matching.inter_plane_transceivers = m.get<int>("inter_plane_transceivers", d.inter_plane_transceivers);
        s.matching.intra_plane_transceivers = m.get<int>("intra_plane_transceivers", d.intra_plane_transceivers);
        s.matching.adjacent_planes_only = m.get<bool>("adjacent_planes_only", d.adjacent_planes_only);
        s.matching.occlusion_margin_km = m.get<double>("occlusion_margin_km", d.occlusion_margin_km);
        s.matching.max_range_km = m.optional<double>("max_range_km");
        s.matching.interference = m.get<std::string>("interference", d.interference);
        detail::require_one_of("matching.interference", s.matching.interference, {"orthogonal", "sinr"});
        s.matching.subbands = m.get<int>("subbands", d.subbands);
        s.matching.sweep_periods_s = m.get<std::vector<double>>("sweep_periods_s", d.sweep_periods_s);
        m.finish();
        if (!(s.matching.period_s >= 0.0) || !(s.matching.horizon_s >= 0.0) || !(s.matching.sample_step_s > 0.0)) {
            throw ConfigError("field 'matching': need period_s >= 0, horizon_s >= 0 and sample_step_s > 0");
        }
        for (double p : s.matching.sweep_periods_s) {
            if (!(p >= 0.0)) {
                throw ConfigError("field 'matching.sweep_periods_s': periods must be >= 0");
            }
        }
        s.isl_options().validate();
    }
    {
        auto a = r.child("availability");
        AvailabilityConfig d;
        s.availability.latitude_step_deg = a.get<double>("latitude_step_deg", d.latitude_step_deg);
        s.availability.longitude_samples = a.get<int>("longitude_samples", d.longitude_samples);
        s.availability.time_step_s = a.get<double>("time_step_s", d.time_step_s);
        s.availability.horizon_s = a.get<double>("horizon_s", d.horizon_s);
        a.finish();
        if (!(s.availability.latitude_step_deg > 0.0) || s.availability.longitude_samples < 1 ||
            !(s.availability.time_step_s > 0.0) || !(s.availability.horizon_s >= 0.0)) {
            throw ConfigError("field 'availability': steps and sample counts must be positive");
        }
    }
    {
        auto p = r.child("pass");
        PassConfig d;
        s.pass.latitude_deg = p.get<double>("latitude_deg", d.latitude_deg);
        s.pass.longitude_deg = p.get<double>("longitude_deg", d.longitude_deg);
        s.pass.plane = p.get<int>("plane", d.plane);
        s.pass.slot = p.get<int>("slot", d.slot);
        s.pass.time_step_s = p.get<double>("time_step_s", d.time_step_s);
        s.pass.search_horizon_s = p.get<double>("search_horizon_s", d.search_horizon_s);
        p.finish();
        if (!(s.pass.time_step_s > 0.0) || !(s.pass.search_horizon_s > 0.0)) {
            throw ConfigError("field 'pass': time steps must be positive");
        }
        s.pass_site().validate();
    }
    {
        auto b = r.child("beam");
        BeamConfig d;
        s.beam.elements_per_axis = b.get<int>("elements_per_axis", d.elements_per_axis);
        s.beam.spacing_wavelengths = b.get<double>("spacing_wavelengths", d.spacing_wavelengths);
        s.beam.polar_deg = b.get<double>("polar_deg", d.polar_deg);
        s.beam.azimuth_samples = b.get<int>("azimuth_samples", d.azimuth_samples);
        b.finish();
        if (s.beam.elements_per_axis < 1 || s.beam.azimuth_samples < 2 || !(s.beam.spacing_wavelengths > 0.0)) {
            throw ConfigError("field 'beam': need elements_per_axis >= 1, azimuth_samples >= 2, spacing > 0");
        }
    }
    if (r.has("ground_segment") && r.raw("ground_segment").is_array()) {
        const Json& arr = r.raw("ground_segment");
        s.ground_preset.clear();
        s.sites.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = "ground_segment[" + std::to_string(i) + "]";
            detail::ObjectReader g(arr[i], path, defaults);
            const auto id = g.optional<std::string>("id");
            const auto lat = g.optional<double>("latitude_deg");
            const auto lon = g.optional<double>("longitude_deg");
            if (!id || !lat || !lon) {
                throw ConfigError("field '" + path + "': sites need id, latitude_deg and longitude_deg");
            }
            GroundSite site{*id, deg2rad(*lat), deg2rad(*lon), g.get<double>("altitude_m", 0.0)};
            g.finish();
            try {
                site.validate();
            } catch (const ConfigError& e) {
                throw ConfigError("field '" + path + "': " + e.what());
            }
            s.sites.push_back(site);
        }
    } else {
        s.ground_preset = r.get<std::string>("ground_segment", "ksat23");
        try {
            s.sites = ground_segment_preset(s.ground_preset);
        } catch (const LookupError& e) {
            throw ConfigError(std::string("field 'ground_segment': ") + e.what());
        }
    }
    {
        auto t = r.child("traffic");
        TrafficConfig d;
        s.traffic.packets_per_s = t.optional<double>("packets_per_s");
        s.traffic.load_fraction = t.get<double>("load_fraction", d.load_fraction);
        s.traffic.packet_bytes = t.get<double>("packet_bytes", d.packet_bytes);
        s.traffic.arrivals = t.get<std::string>("arrivals", d.arrivals);
        detail::require_one_of("traffic.arrivals", s.traffic.arrivals, {"poisson", "deterministic"});
        s.traffic.horizon_s = t.get<double>("horizon_s", d.horizon_s);
        s.traffic.epochs = t.get<int>("epochs", d.epochs);
        s.traffic.epoch_spacing_s = t.get<double>("epoch_spacing_s", d.epoch_spacing_s);
        s.traffic.probe_fractions = t.get<std::vector<double>>("probe_fractions", d.probe_fractions);
        s.traffic.probe_horizon_s = t.get<double>("probe_horizon_s", d.probe_horizon_s);
        t.finish();
        if ((s.traffic.packets_per_s && !(*s.traffic.packets_per_s >= 0.0)) || !(s.traffic.load_fraction >= 0.0) ||
            !(s.traffic.packet_bytes > 0.0) || !(s.traffic.horizon_s > 0.0) || s.traffic.epochs < 1 || !(s.traffic.epoch_spacing_s >= 0.0) ||
            !(s.traffic.probe_horizon_s > 0.0)) {
            throw ConfigError("field 'traffic': rates must be >= 0, sizes/horizons > 0 and epochs >= 1");
        }
    }
    {
        auto rt = r.child("routing");
        RoutingConfig d;
        s.routing.metrics = rt.get<std::vector<std::string>>("metrics", d.metrics);
        for (const auto& m : s.routing.metrics) {
            detail::require_one_of("routing.metrics", m, {"hop_count", "path_loss", "latency"});
        }
        if (s.routing.metrics.empty()) {
            throw ConfigError("field 'routing.metrics': at least one metric is needed");
        }
        s.routing.queue_estimate = rt.get<std::string>("queue_estimate", d.queue_estimate);
        detail::require_one_of("routing.queue_estimate", s.routing.queue_estimate, {"constant", "mm1"});
        s.routing.constant_wait_s = rt.get<double>("constant_wait_s", d.constant_wait_s);
        s.routing.path_loss_scale = rt.get<std::string>("path_loss_scale", d.path_loss_scale);
        detail::require_one_of("routing.path_loss_scale", s.routing.path_loss_scale, {"db", "linear"});
        rt.finish();
        if (!(s.routing.constant_wait_s >= 0.0)) {
            throw ConfigError("field 'routing.constant_wait_s': must be >= 0");
        }
    }
    r.finish();

    if (experiment_is_stochastic(s.experiment) && !s.seed) {
        throw ConfigError("field 'seed': required for experiment '" + s.experiment + "'");
    }
    return s;
}

/// Parses JSON text; syntax errors report the 1-based line.
inline Json parse_scenario_document(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const int line = detail::line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ScenarioParseError("parse error at line " + std::to_string(line) + ": " + e.what(), line);
    }
}

inline Json read_scenario_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open scenario file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario_document(ss.str());
}

inline Scenario parse_scenario(const std::string& text) { return scenario_from_json(parse_scenario_document(text)); }

inline Scenario load_scenario(const std::string& path) { return scenario_from_json(read_scenario_document(path)); }

// ---------------------------------------------------------------------------
// Writing

namespace detail {

inline Json link_to_json(const LinkParams& p, const char* preset) {
    const auto& tx = std::get<ParabolicAntenna>(p.tx_antenna);
    const auto& rx = std::get<ParabolicAntenna>(p.rx_antenna);
    Json j;
    j["preset"] = preset;
    j["carrier_ghz"] = p.carrier_hz / 1e9;
    j["bandwidth_mhz"] = p.bandwidth_hz / 1e6;
    j["tx_power_w"] = p.tx_power_w;
    j["noise_temperature_k"] = p.noise_temperature_k;
    j["noise_figure_db"] = p.noise_figure_db;
    j["efficiency"] = tx.efficiency;
    j["tx_diameter_m"] = tx.diameter_m;
    j["rx_diameter_m"] = rx.diameter_m;
    j["pointing_loss_db"] = p.pointing_loss_db;
    Json rates = Json::array();
    for (double r : p.rates.rates_bps) {
        rates.push_back(r / 1e6);
    }
    j["rates_mbps"] = rates;
    return j;
}

}  // namespace detail

/// Canonical document: every field explicit, fixed key order.
inline Json scenario_to_json(const Scenario& s) {
    Json j;
    j["experiment"] = s.experiment;
    j["seed"] = s.seed ? Json(*s.seed) : Json(nullptr);
    j["output_dir"] = s.output_dir;
    j["constants"] = s.constants;
    if (!s.constellation_preset.empty()) {
        j["constellation"] = s.constellation_preset;
    } else {
        Json arr = Json::array();
        for (const auto& sh : s.shells) {
            Json o;
            o["geometry"] = std::string(to_string(sh.geometry));
            o["n_sats"] = sh.n_sats;
            o["n_planes"] = sh.n_planes;
            o["altitude_km"] = sh.altitude_m / 1e3;
            o["inclination_deg"] = rad2deg(sh.inclination_rad);
            o["phasing"] = sh.inter_plane_phasing;
            Json offs = Json::array();
            for (double m : sh.per_plane_altitude_offset_m) {
                offs.push_back(m / 1e3);
            }
            o["plane_altitude_offsets_km"] = offs;
            arr.push_back(o);
        }
        j["constellation"] = arr;
    }
    j["propagation"] = {{"earth_rotation", s.earth_rotation}};
    j["link"] = {{"gsl", detail::link_to_json(s.gsl, "gsl")}, {"isl", detail::link_to_json(s.isl, "isl")}};
    j["coverage"] = {{"min_elevation_deg", rad2deg(s.coverage.min_elevation_rad)}};
    j["antenna"] = {{"mode", s.antenna.mode},
                    {"elements_per_axis", s.antenna.elements_per_axis},
                    {"spacing_wavelengths", s.antenna.spacing_wavelengths},
                    {"fixed_polar_deg", s.antenna.fixed_polar_deg}};
    const auto& m = s.matching;
    j["matching"] = {{"period_s", m.period_s},
                     {"horizon_s", m.horizon_s},
                     {"sample_step_s", m.sample_step_s},
                     {"lookahead", m.lookahead},
                     {"seed_policy", m.seed_policy},
                     {"inter_plane_transceivers", m.inter_plane_transceivers},
                     {"intra_plane_transceivers", m.intra_plane_transceivers},
                     {"adjacent_planes_only", m.adjacent_planes_only},
                     {"occlusion_margin_km", m.occlusion_margin_km},
                     {"max_range_km", m.max_range_km ? Json(*m.max_range_km) : Json(nullptr)},
                     {"interference", m.interference},
                     {"subbands", m.subbands},
                     {"sweep_periods_s", m.sweep_periods_s}};
    const auto& a = s.availability;
    j["availability"] = {{"latitude_step_deg", a.latitude_step_deg},
                         {"longitude_samples", a.longitude_samples},
                         {"time_step_s", a.time_step_s},
                         {"horizon_s", a.horizon_s}};
    const auto& p = s.pass;
    j["pass"] = {{"latitude_deg", p.latitude_deg}, {"longitude_deg", p.longitude_deg},
                 {"plane", p.plane},               {"slot", p.slot},
                 {"time_step_s", p.time_step_s},   {"search_horizon_s", p.search_horizon_s}};
    const auto& b = s.beam;
    j["beam"] = {{"elements_per_axis", b.elements_per_axis},
                 {"spacing_wavelengths", b.spacing_wavelengths},
                 {"polar_deg", b.polar_deg},
                 {"azimuth_samples", b.azimuth_samples}};
    if (!s.ground_preset.empty()) {
        j["ground_segment"] = s.ground_preset;
    } else {
        Json arr = Json::array();
        for (const auto& site : s.sites) {
            arr.push_back({{"id", site.id},
                           {"latitude_deg", rad2deg(site.latitude_rad)},
                           {"longitude_deg", rad2deg(site.longitude_rad)},
                           {"altitude_m", site.altitude_m}});
        }
        j["ground_segment"] = arr;
    }
    const auto& t = s.traffic;
    j["traffic"] = {{"packets_per_s", t.packets_per_s ? Json(*t.packets_per_s) : Json(nullptr)},
                    {"load_fraction", t.load_fraction},
                    {"packet_bytes", t.packet_bytes},
                    {"arrivals", t.arrivals},
                    {"horizon_s", t.horizon_s},
                    {"epochs", t.epochs},
                    {"epoch_spacing_s", t.epoch_spacing_s},
                    {"probe_fractions", t.probe_fractions},
                    {"probe_horizon_s", t.probe_horizon_s}};
    const auto& r = s.routing;
    j["routing"] = {{"metrics", r.metrics},
                    {"queue_estimate", r.queue_estimate},
                    {"constant_wait_s", r.constant_wait_s},
                    {"path_loss_scale", r.path_loss_scale}};
    return j;
}

inline std::string serialize_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string scenario_hash(const Scenario& s) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(scenario_to_json(s).dump())));
    return buf;
}

}  // namespace ngso::cli
