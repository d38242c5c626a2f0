// SPDX-License-Identifier: Apache-2.0
//
// Experiment catalog: each runner turns a validated scenario into CSV tables
// and a summary document.
#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "ngso/antenna.hpp"
#include "ngso/cli/scenario.hpp"
#include "ngso/coverage.hpp"
#include "ngso/isl.hpp"
#include "ngso/link.hpp"
#include "ngso/matching.hpp"
#include "ngso/packet_sim.hpp"
#include "ngso/routing.hpp"

namespace ngso::cli {

using Cell = std::variant<std::string, double, long long>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) {
        if (row.size() != columns.size()) {
            throw DomainError("table " + name + ": row has " + std::to_string(row.size()) + " cells, expected " +
                              std::to_string(columns.size()));
        }
        rows.push_back(std::move(row));
    }
};

struct ExperimentResult {
    std::string experiment;
    std::vector<Table> tables;
    Json summary = Json::object();
    Json provenance = Json::object();

    const Table& table(const std::string& name) const {
        for (const auto& t : tables) {
            if (t.name == name) {
                return t;
            }
        }
        throw LookupError("no table '" + name + "' in " + experiment);
    }
};

struct RunContext {
    unsigned threads = 1;
};

inline std::string format_number(double x) {
    if (x == 0.0) {
        return "0";  // folds -0
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

inline std::string format_cell(const Cell& c) {
    if (const auto* s = std::get_if<std::string>(&c)) {
        const bool quote = s->find_first_of(",\"\n") != std::string::npos;
        if (!quote) {
            return *s;
        }
        std::string out = "\"";
        for (char ch : *s) {
            out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        }
        return out + "\"";
    }
    if (const auto* i = std::get_if<long long>(&c)) {
        return std::to_string(*i);
    }
    return format_number(std::get<double>(c));
}

inline std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        out += (i ? "," : "") + t.columns[i];
    }
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += (i ? "," : "") + format_cell(row[i]);
        }
        out += "\n";
    }
    return out;
}

inline Json provenance_of(const Scenario& s) {
    const PhysicalConstants k = s.physical_constants();
    Json p;
    p["scenario_hash"] = scenario_hash(s);
    p["tool_version"] = std::string(kToolVersion);
    p["constants"] = {{"name", s.constants},
                      {"gravitational_parameter", k.gravitational_parameter},
                      {"earth_radius_m", k.earth_radius_m},
                      {"sidereal_day_s", k.sidereal_day_s},
                      {"speed_of_light_mps", k.speed_of_light_mps}};
    p["applied_defaults"] = s.applied_defaults;
    p["scenario"] = scenario_to_json(s);
    return p;
}

namespace detail {

inline long long as_int(std::size_t v) { return static_cast<long long>(v); }

inline std::string yes_no(bool b) { return b ? "true" : "false"; }

// ---------------------------------------------------------------------------

struct Table2Row {
    const char* quantity;
    double expected_db;
    double computed_db;
};

inline ExperimentResult run_table2(const Scenario& s, const RunContext&) {
    const double c = s.physical_constants().speed_of_light_mps;
    auto dish_gain = [&](const LinkParams& p, const AntennaSpec& a) {
        return to_db(peak_gain(a, p.carrier_hz, c));
    };
    const std::vector<Table2Row> rows = {
        {"gsl_tx_gain_dbi", 32.13, dish_gain(s.gsl, s.gsl.tx_antenna)},
        {"gsl_rx_gain_dbi", 34.20, dish_gain(s.gsl, s.gsl.rx_antenna)},
        {"isl_tx_gain_dbi", 34.41, dish_gain(s.isl, s.isl.tx_antenna)},
        {"isl_rx_gain_dbi", 34.41, dish_gain(s.isl, s.isl.rx_antenna)},
        {"gsl_noise_dbw", -117.77, to_db(noise_power(s.gsl))},
        {"isl_noise_dbw", -114.99, to_db(noise_power(s.isl))},
    };
    const double tol = 0.05;
    ExperimentResult r;
    Table t{"values", {"quantity", "expected_db", "computed_db", "difference_db", "tolerance_db", "pass"}, {}};
    int passed = 0;
    for (const auto& row : rows) {
        const double diff = row.computed_db - row.expected_db;
        const bool ok = std::abs(diff) <= tol;
        passed += ok ? 1 : 0;
        t.add({std::string(row.quantity), row.expected_db, row.computed_db, diff, tol, yes_no(ok)});
    }
    r.tables.push_back(std::move(t));
    r.summary["passed"] = passed;
    r.summary["total"] = static_cast<int>(rows.size());
    return r;
}

inline ExperimentResult run_pass_profile(const Scenario& s, const RunContext&) {
    const Constellation con = s.constellation();
    const ShellConfig& sh = con.shells().front();
    if (s.pass.plane < 0 || s.pass.plane >= sh.n_planes || s.pass.slot < 0 || s.pass.slot >= sh.sats_per_plane()) {
        throw ConfigError("field 'pass': plane/slot outside the first shell");
    }
    PassSearch search;
    search.search_horizon_s = s.pass.search_horizon_s;
    const auto samples =
        pass_rate_profile(con, s.pass_site(), SatelliteId{0, s.pass.plane, s.pass.slot}, s.gsl, s.coverage,
                          s.pass.time_step_s, search);
    ExperimentResult r;
    Table t{"samples", {"t_s", "elevation_deg", "distance_m", "rate_bps"}, {}};
    double peak = 0.0;
    for (const auto& p : samples) {
        t.add({p.t_s, rad2deg(p.elevation_rad), p.distance_m, p.rate_bps});
        peak = std::max(peak, p.rate_bps);
    }
    r.tables.push_back(std::move(t));
    r.summary["samples"] = samples.size();
    r.summary["pass_found"] = !samples.empty();
    if (!samples.empty()) {
        r.summary["aos_s"] = samples.front().t_s;
        r.summary["los_s"] = samples.back().t_s;
        r.summary["duration_s"] = samples.back().t_s - samples.front().t_s;
        r.summary["peak_rate_bps"] = peak;
        r.summary["edge_rate_bps"] = samples.front().rate_bps;
    }
    return r;
}

inline ExperimentResult run_availability(const Scenario& s, const RunContext& ctx) {
    const Constellation con = s.constellation();
    const auto lats = latitude_grid(s.availability.latitude_step_deg);
    AvailabilitySampling smp;
    smp.longitude_samples = s.availability.longitude_samples;
    smp.time_step_s = s.availability.time_step_s;
    smp.horizon_s = s.availability.horizon_s;
    smp.threads = std::max(1u, ctx.threads);
    const AvailabilityProfile prof = availability_by_latitude(con, s.coverage, lats, smp);
    ExperimentResult r;
    Table t{"profile", {"latitude_deg", "availability", "mean_visible"}, {}};
    double min_av = 1.0;
    double max_vis = 0.0;
    for (std::size_t i = 0; i < prof.latitude_rad.size(); ++i) {
        t.add({rad2deg(prof.latitude_rad[i]), prof.availability[i], prof.mean_visible[i]});
        min_av = std::min(min_av, prof.availability[i]);
        max_vis = std::max(max_vis, prof.mean_visible[i]);
    }
    r.tables.push_back(std::move(t));
    r.summary["latitudes"] = prof.latitude_rad.size();
    r.summary["min_availability"] = min_av;
    r.summary["max_mean_visible"] = max_vis;
    return r;
}

inline void add_matching_dump(Table& t, const Constellation& con, const TimedMatching& m) {
    for (const auto& l : m.links) {
        const SatelliteId& u = con.id_of(l.sat_u);
        const SatelliteId& v = con.id_of(l.sat_v);
        const std::string beam = std::to_string(l.beam_u) + "/" + std::to_string(l.beam_v);
        t.add({m.t_s, static_cast<long long>(con.global_plane(l.sat_u)), static_cast<long long>(u.slot),
               static_cast<long long>(con.global_plane(l.sat_v)), static_cast<long long>(v.slot), beam, l.distance_m,
               l.rate_bps});
    }
}

inline ExperimentResult run_isl_rate_cdf(const Scenario& s, const RunContext&) {
    const Constellation con = s.constellation();
    const IslModel model(con, s.isl_link(), s.isl_options());
    const ScheduleResult sched = run_establishment_schedule(model, s.schedule_options(s.matching.period_s));
    ExperimentResult r;
    Table cdf{"cdf", {"rate_bps", "cumulative"}, {}};
    const std::vector<double> rates = sched.rates();
    if (!rates.empty()) {
        for (const auto& p : rate_cdf(rates)) {
            cdf.add({p.value, p.cumulative});
        }
    }
    Table dump{"matching", {"t", "u_plane", "u_slot", "v_plane", "v_slot", "beam_k", "distance_m", "rate_bps"}, {}};
    for (const auto& m : sched.establishments) {
        add_matching_dump(dump, con, m);
    }
    r.tables.push_back(std::move(cdf));
    r.tables.push_back(std::move(dump));
    r.summary["samples"] = rates.size();
    r.summary["establishments"] = sched.establishments.size();
    if (!rates.empty()) {
        std::size_t zeros = 0;
        for (double x : rates) {
            zeros += x > 0.0 ? 0 : 1;
        }
        r.summary["median_rate_bps"] = median(rates);
        r.summary["mean_rate_bps"] = mean(rates);
        r.summary["zero_rate_fraction"] = static_cast<double>(zeros) / static_cast<double>(rates.size());
    }
    return r;
}

inline ExperimentResult run_beam_pattern(const Scenario& s, const RunContext&) {
    const double c = s.physical_constants().speed_of_light_mps;
    const ArrayGeometry g =
        ArrayGeometry::from_carrier(s.beam.elements_per_axis, s.beam.spacing_wavelengths, s.isl.carrier_hz, c);
    const double polar = deg2rad(s.beam.polar_deg);
    const auto beams = butler_beams(g, polar);
    ExperimentResult r;
    Table t{"pattern", {"beam", "azimuth_deg", "gain_db"}, {}};
    Table lobes{"beams", {"beam", "main_lobe_azimuth_deg", "peak_gain_db", "sphere_average_gain"}, {}};
    const int n = s.beam.azimuth_samples;
    for (std::size_t b = 0; b < beams.size(); ++b) {
        double best = -1.0;
        double best_az = 0.0;
        for (int i = 0; i < n; ++i) {
            const double az = -90.0 + 180.0 * i / (n - 1);
            const double gain = array_gain(beams[b], g, Direction{deg2rad(az), polar});
            t.add({static_cast<long long>(b + 1), az, to_db(std::max(gain, 1e-30))});
            if (gain > best) {
                best = gain;
                best_az = az;
            }
        }
        lobes.add({static_cast<long long>(b + 1), best_az, to_db(best), sphere_average_gain(beams[b], g)});
    }
    double worst_inner = 0.0;
    for (std::size_t a = 0; a < beams.size(); ++a) {
        for (std::size_t b = a + 1; b < beams.size(); ++b) {
            worst_inner = std::max(worst_inner, std::abs(ngso::detail::inner(beams[a].azimuth, beams[b].azimuth)));
        }
    }
    r.tables.push_back(std::move(t));
    r.tables.push_back(std::move(lobes));
    r.summary["beams"] = beams.size();
    r.summary["max_cross_inner_product"] = worst_inner;
    return r;
}

inline ExperimentResult run_reestablishment_sweep(const Scenario& s, const RunContext&) {
    const Constellation con = s.constellation();
    ExperimentResult r;
    Table t{"sweep", {"antenna", "period_s", "mean_rate_bps", "samples"}, {}};
    const IslModel model(con, s.isl_link(), s.isl_options());
    for (double period : s.matching.sweep_periods_s) {
        ScheduleOptions so = s.schedule_options(period);
        so.keep_samples = false;
        so.keep_matchings = false;
        const ScheduleResult res = run_establishment_schedule(model, so);
        t.add({s.antenna.mode, period, res.mean_rate_bps(), static_cast<long long>(res.sample_count)});
    }
    // Parabolic dishes with ideal pointing (re-matched at every sample).
    const IslModel dish(con, s.isl, s.isl_options());
    ScheduleOptions so = s.schedule_options(0.0);
    so.keep_samples = false;
    so.keep_matchings = false;
    const ScheduleResult ideal = run_establishment_schedule(dish, so);
    t.add({std::string("parabolic-ideal"), 0.0, ideal.mean_rate_bps(), static_cast<long long>(ideal.sample_count)});
    r.summary["parabolic_ideal_mean_bps"] = ideal.mean_rate_bps();
    r.tables.push_back(std::move(t));
    return r;
}

// ---------------------------------------------------------------------------
// Routing

struct RoutingSnapshot {
    double t_s = 0.0;
    RoutingGraph graph;
};

inline RoutingSnapshot routing_snapshot(const Scenario& s, const Constellation& con, const IslModel& model, double t) {
    const auto states = con.propagate_all(t);
    const Matching m = establish(model, t, 0.0, false, nullptr, states);
    const std::size_t slots = static_cast<std::size_t>(std::max(model.slots(), 1));
    std::vector<InterPlaneLink> inter;
    for (const auto& e : m.pairs) {
        inter.push_back({e.u / slots, e.v / slots, e.rate_bps});
    }
    RoutingGraphOptions opt;
    opt.coverage = s.coverage;
    return {t, build_routing_graph(con, s.sites, inter, s.gsl, s.isl, t, opt)};
}

inline std::string edge_kind_name(EdgeKind k) {
    switch (k) {
        case EdgeKind::gsl:
            return "gsl";
        case EdgeKind::intra_plane:
            return "intra_plane";
        case EdgeKind::inter_plane:
            return "inter_plane";
    }
    return "?";
}

inline double lambda_star_of(const RoutingGraph& g, const RoutingMetric& m) {
    return max_load_per_gs(g, all_site_routes(g, edge_weights(g, m))).lambda_star;
}

inline std::string scenario_label(const Scenario& s) {
    return s.constellation_preset.empty() ? "custom-" + scenario_hash(s).substr(0, 8) : s.constellation_preset;
}

inline ExperimentResult run_routing_latency(const Scenario& s, const RunContext&) {
    const Constellation con = s.constellation();
    const IslModel model(con, s.isl_link(), s.isl_options());
    const double bits = s.traffic.packet_bytes * 8.0;
    ExperimentResult r;
    Table per_epoch{"epochs",
                    {"t_s", "metric", "packets_per_s", "mean_propagation_s", "mean_transmission_s", "mean_waiting_s",
                     "mean_hops", "delivered_count"},
                    {}};
    std::map<std::string, SimulationResult> totals;
    for (int e = 0; e < s.traffic.epochs; ++e) {
        const double t0 = e * s.traffic.epoch_spacing_s;
        const RoutingSnapshot snap = routing_snapshot(s, con, model, t0);
        double rate = 0.0;
        if (s.traffic.packets_per_s) {
            rate = *s.traffic.packets_per_s;
        } else {
            rate = s.traffic.load_fraction * lambda_star_of(snap.graph, s.routing_metric("latency")) / bits;
        }
        const std::vector<GraphEpoch> schedule{{0.0, snap.graph}};
        for (const auto& name : s.routing.metrics) {
            SimulationOptions o;
            o.metric = s.routing_metric(name);
            o.traffic.packets_per_s = rate;
            o.traffic.packet_bits = bits;
            o.traffic.arrivals = s.traffic.arrivals == "deterministic" ? ArrivalProcess::deterministic
                                                                       : ArrivalProcess::poisson;
            o.horizon_s = s.traffic.horizon_s;
            o.seed = *s.seed + static_cast<std::uint64_t>(e);
            const SimulationResult res = simulate_packets(schedule, o);
            const LatencyBreakdown m = res.mean();
            per_epoch.add({t0, name, rate, m.propagation_s, m.transmission_s, m.waiting_s, res.mean_hops(),
                           static_cast<long long>(res.delivered)});
            SimulationResult& acc = totals[name];
            acc.generated += res.generated;
            acc.delivered += res.delivered;
            acc.dropped += res.dropped;
            acc.unroutable += res.unroutable;
            acc.total += res.total;
            acc.total_hops += res.total_hops;
        }
    }
    Table t{"metrics",
            {"scenario", "metric", "mean_propagation_s", "mean_transmission_s", "mean_waiting_s", "delivered_count"},
            {}};
    const std::string label = scenario_label(s);
    Json by_metric = Json::object();
    for (const auto& name : s.routing.metrics) {
        const SimulationResult& acc = totals[name];
        const LatencyBreakdown m = acc.mean();
        t.add({label, name, m.propagation_s, m.transmission_s, m.waiting_s, static_cast<long long>(acc.delivered)});
        by_metric[name] = {{"mean_total_s", m.total_s()},
                           {"mean_propagation_s", m.propagation_s},
                           {"mean_transmission_s", m.transmission_s},
                           {"mean_waiting_s", m.waiting_s},
                           {"mean_hops", acc.mean_hops()},
                           {"generated", acc.generated},
                           {"delivered", acc.delivered},
                           {"unroutable", acc.unroutable}};
    }
    r.tables.push_back(std::move(t));
    r.tables.push_back(std::move(per_epoch));
    r.summary["metrics"] = by_metric;
    return r;
}

/// Least-squares slope of backlog against time over samples with t >= from.
inline double backlog_slope(const std::vector<BacklogSample>& b, double from) {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : b) {
        if (p.t_s < from) {
            continue;
        }
        n += 1;
        sx += p.t_s;
        sy += p.backlog_s;
        sxx += p.t_s * p.t_s;
        sxy += p.t_s * p.backlog_s;
    }
    const double den = n * sxx - sx * sx;
    return n < 2 || den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

inline ExperimentResult run_max_load(const Scenario& s, const RunContext&) {
    const Constellation con = s.constellation();
    const IslModel model(con, s.isl_link(), s.isl_options());
    const double bits = s.traffic.packet_bytes * 8.0;
    ExperimentResult r;
    Table lam{"lambda",
              {"t_s", "metric", "lambda_star_bps", "path_load_bps", "bottleneck_u", "bottleneck_v", "bottleneck_kind",
               "bottleneck_rate_bps", "bottleneck_paths"},
              {}};
    std::optional<RoutingSnapshot> first;
    for (int e = 0; e < s.traffic.epochs; ++e) {
        const double t0 = e * s.traffic.epoch_spacing_s;
        RoutingSnapshot snap = routing_snapshot(s, con, model, t0);
        for (const auto& name : s.routing.metrics) {
            const RoutingGraph& g = snap.graph;
            const MaxLoad ml = max_load_per_gs(g, all_site_routes(g, edge_weights(g, s.routing_metric(name))));
            const RoutingEdge& be = g.edge(ml.bottleneck_edge);
            lam.add({t0, name, ml.lambda_star, path_load(ml.lambda_star, g.site_count()), as_int(be.u), as_int(be.v),
                     edge_kind_name(be.kind), be.rate_bps, as_int(ml.path_counts[ml.bottleneck_edge])});
        }
        if (!first) {
            first = std::move(snap);
        }
    }
    r.tables.push_back(std::move(lam));

    // Backlog probes on the latency-metric bottleneck of the first epoch.
    const RoutingGraph& g = first->graph;
    const RoutingMetric metric = s.routing_metric("latency");
    const MaxLoad ml = max_load_per_gs(g, all_site_routes(g, edge_weights(g, metric)));
    const RoutingEdge& be = g.edge(ml.bottleneck_edge);
    Table backlog{"backlog", {"load_fraction", "t_s", "backlog_s"}, {}};
    Json probes = Json::array();
    const std::vector<GraphEpoch> schedule{{0.0, g}};
    for (double f : s.traffic.probe_fractions) {
        SimulationOptions o;
        o.metric = metric;
        o.traffic.packets_per_s = f * ml.lambda_star / bits;
        o.traffic.packet_bits = bits;
        o.traffic.arrivals =
            s.traffic.arrivals == "deterministic" ? ArrivalProcess::deterministic : ArrivalProcess::poisson;
        o.horizon_s = s.traffic.probe_horizon_s;
        o.drain = false;
        o.seed = *s.seed;
        o.probe_link = std::pair{be.u, be.v};
        o.probe_interval_s = s.traffic.probe_horizon_s / 200.0;
        const SimulationResult res = simulate_packets(schedule, o);
        double peak = 0.0;
        for (const auto& b : res.backlog) {
            backlog.add({f, b.t_s, b.backlog_s});
            peak = std::max(peak, b.backlog_s);
        }
        probes.push_back({{"load_fraction", f},
                          {"final_half_slope", backlog_slope(res.backlog, 0.5 * s.traffic.probe_horizon_s)},
                          {"peak_backlog_s", peak},
                          {"final_backlog_s", res.backlog.empty() ? 0.0 : res.backlog.back().backlog_s}});
    }
    r.tables.push_back(std::move(backlog));
    r.summary["lambda_star_bps"] = ml.lambda_star;
    r.summary["bottleneck"] = {{"u", be.u}, {"v", be.v}, {"kind", edge_kind_name(be.kind)}, {"rate_bps", be.rate_bps}};
    r.summary["probes"] = probes;
    return r;
}

inline ExperimentResult run_connectivity(const Scenario& s, const RunContext&) {
    const PhysicalConstants k = s.physical_constants();
    const LinkParams p = s.isl_link();
    ExperimentResult r;
    Table t{"shells",
            {"shell", "n_sats", "n_planes", "altitude_km", "worst_distance_m", "snr_db", "shannon_bps",
             "selected_rate_bps", "required_rate_bps", "margin_db", "connected"},
            {}};
    bool all = true;
    for (std::size_t i = 0; i < s.shells.size(); ++i) {
        const ShellConfig& sh = s.shells[i];
        const ConnectivityReport c = isl_connectivity_check(p, sh, k);
        all = all && c.connected;
        t.add({as_int(i), static_cast<long long>(sh.n_sats), static_cast<long long>(sh.n_planes), sh.altitude_m / 1e3,
               c.worst_distance_m, to_db(c.snr), c.shannon_bps, c.selected_rate_bps, c.required_rate_bps, c.margin_db,
               yes_no(c.connected)});
    }
    r.tables.push_back(std::move(t));
    r.summary["all_connected"] = all;
    return r;
}

}  // namespace detail

/// Dispatches on the experiment id. The scenario is taken by const
/// reference and never modified.
inline ExperimentResult run_experiment(const Scenario& s, const RunContext& ctx = {}) {
    using Runner = ExperimentResult (*)(const Scenario&, const RunContext&);
    static const std::map<std::string, Runner> runners = {
        {"table2-regression", detail::run_table2},
        {"pass-profile", detail::run_pass_profile},
        {"availability", detail::run_availability},
        {"isl-rate-cdf", detail::run_isl_rate_cdf},
        {"beam-pattern", detail::run_beam_pattern},
        {"reestablishment-sweep", detail::run_reestablishment_sweep},
        {"routing-latency", detail::run_routing_latency},
        {"max-load", detail::run_max_load},
        {"connectivity-check", detail::run_connectivity},
    };
    const auto it = runners.find(s.experiment);
    if (it == runners.end()) {
        std::string list;
        for (const auto& id : experiment_catalog()) {
            list += (list.empty() ? "" : ", ") + id;
        }
        throw ConfigError("unknown experiment '" + s.experiment + "'; catalog: " + list);
    }
    if (experiment_is_stochastic(s.experiment) && !s.seed) {
        throw ConfigError("field 'seed': required for experiment '" + s.experiment + "'");
    }
    ExperimentResult r = it->second(s, ctx);
    r.experiment = s.experiment;
    r.provenance = provenance_of(s);
    return r;
}

inline std::string summary_document(const ExperimentResult& r) {
    Json doc;
    doc["experiment"] = r.experiment;
    Json files = Json::object();
    for (const auto& t : r.tables) {
        files[t.name] = r.experiment + "." + t.name + ".csv";
    }
    doc["tables"] = files;
    doc["summary"] = r.summary;
    doc["provenance"] = r.provenance;
    return doc.dump(2) + "\n";
}

/// Writes <experiment>.<table>.csv and <experiment>.summary.json into dir;
/// returns the written paths.
inline std::vector<std::filesystem::path> write_result(const ExperimentResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    auto put = [&](const std::filesystem::path& p, const std::string& text) {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + p.string());
        }
        out << text;
        written.push_back(p);
    };
    for (const auto& t : r.tables) {
        put(dir / (r.experiment + "." + t.name + ".csv"), to_csv(t));
    }
    put(dir / (r.experiment + ".summary.json"), summary_document(r));
    return written;
}

}  // namespace ngso::cli
