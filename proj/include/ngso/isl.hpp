// SPDX-License-Identifier: Apache-2.0
//
// Inter-plane ISL establishment: feasible-edge enumeration on the satellite
// transceiver graph and the periodic re-establishment schedule.
//
// Each satellite owns `inter_plane` transceivers. With two, transceiver 0
// serves the -pitch side of the orbit and transceiver 1 the +pitch side, so
// a pair (i, j) always uses the transceiver of i facing j and vice versa.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ngso/antenna.hpp"
#include "ngso/error.hpp"
#include "ngso/link.hpp"
#include "ngso/matching.hpp"
#include "ngso/orbits.hpp"
#include "ngso/vec3.hpp"

namespace ngso {

struct TransceiverBudget {
    int intra_plane = 2;
    int inter_plane = 2;

    void validate() const {
        if (intra_plane < 0 || inter_plane < 0) {
            throw ConfigError("transceiver budget: counts must be >= 0");
        }
        if (inter_plane > 2) {
            throw ConfigError("transceiver budget: at most 2 inter-plane transceivers (one per side)");
        }
    }
    friend bool operator==(const TransceiverBudget&, const TransceiverBudget&) = default;
};

enum class InterferenceMode { orthogonal, sinr };

enum class SeedPolicy {
    keep_feasible,  // carry over prior pairs that are still feasible
    fresh,          // rebuild from scratch every period
};

struct IslOptions {
    TransceiverBudget budget;
    bool adjacent_planes_only = true;
    double occlusion_margin_m = 80e3;
    std::optional<double> max_range_m;
    InterferenceMode interference = InterferenceMode::orthogonal;
    int subbands = 2;

    void validate() const {
        budget.validate();
        if (!(occlusion_margin_m >= 0.0)) {
            throw ConfigError("isl: occlusion margin must be >= 0");
        }
        if (max_range_m && !(*max_range_m > 0.0)) {
            throw ConfigError("isl: max range must be positive");
        }
        if (subbands < 1) {
            throw ConfigError("isl: need at least one sub-band");
        }
    }
};

/// Feasible inter-plane edges at one instant. Vertex v is transceiver
/// v % slots of satellite v / slots; `graph.part` holds the global plane.
struct TopologySnapshot {
    double t_s = 0.0;
    int slots = 1;
    MatchGraph graph;

    std::size_t satellite_of(std::size_t vertex) const { return vertex / static_cast<std::size_t>(slots); }
    int transceiver_of(std::size_t vertex) const { return static_cast<int>(vertex % static_cast<std::size_t>(slots)); }
};

namespace detail {

// Antenna shared by both ends of an ISL.
struct IslAntenna {
    enum class Kind { parabolic, digital, butler } kind = Kind::parabolic;
    ParabolicAntenna dish;
    ArrayGeometry array;
    std::vector<SeparableWeights> beams;  // Butler only

    static IslAntenna from(const LinkParams& p, double c) {
        IslAntenna a;
        if (p.tx_antenna.index() != p.rx_antenna.index()) {
            throw ConfigError("isl: both link ends must use the same antenna kind");
        }
        if (const auto* d = std::get_if<ParabolicAntenna>(&p.tx_antenna)) {
            a.kind = Kind::parabolic;
            a.dish = *d;
        } else if (const auto* arr = std::get_if<PhasedArrayAntenna>(&p.tx_antenna)) {
            a.kind = Kind::digital;
            a.array = ArrayGeometry::from_carrier(arr->elements_per_axis, arr->spacing_wavelengths, p.carrier_hz, c);
        } else {
            const auto& b = std::get<ButlerAntenna>(p.tx_antenna);
            a.kind = Kind::butler;
            a.array = ArrayGeometry::from_carrier(b.elements_per_axis, b.spacing_wavelengths, p.carrier_hz, c);
            a.beams = butler_beams(a.array, b.fixed_polar_rad);
        }
        return a;
    }
};

inline int transceiver_slot(int slots, int side) { return slots == 2 ? (side > 0 ? 1 : 0) : 0; }

}  // namespace detail

/// Inter-plane candidate pairs (i < j) of the same shell. Adjacent mode keeps
/// planes a +- 1 (mod P).
inline std::vector<std::pair<std::size_t, std::size_t>> isl_candidate_pairs(const Constellation& c,
                                                                            bool adjacent_planes_only) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const SatelliteId& a = c.id_of(i);
        const int planes = c.shells()[static_cast<std::size_t>(a.shell)].n_planes;
        for (std::size_t j = i + 1; j < c.size(); ++j) {
            const SatelliteId& b = c.id_of(j);
            if (b.shell != a.shell) {
                break;
            }
            if (b.plane == a.plane) {
                continue;
            }
            if (adjacent_planes_only) {
                const int d = ((b.plane - a.plane) % planes + planes) % planes;
                if (d != 1 && d != planes - 1) {
                    continue;
                }
            }
            out.emplace_back(i, j);
        }
    }
    return out;
}

/// Geometry and ideal-pointing rate of one satellite pair; nullopt when the
/// pair is blocked, out of range or has zero rate.
struct PairLink {
    double distance_m = 0.0;
    int slot_u = 0;
    int slot_v = 0;
    int beam_u = 0;
    int beam_v = 0;
    double gain_u = 0.0;
    double gain_v = 0.0;
    double rate_bps = 0.0;
};

class IslModel {
public:
    IslModel(const Constellation& constellation, LinkParams link, IslOptions options = {})
        : constellation_(&constellation), link_(std::move(link)), options_(options) {
        link_.validate();
        options_.validate();
        c_ = constellation.constants().speed_of_light_mps;
        antenna_ = detail::IslAntenna::from(link_, c_);
        pairs_ = isl_candidate_pairs(constellation, options_.adjacent_planes_only);
    }

    const Constellation& constellation() const { return *constellation_; }
    const LinkParams& link() const { return link_; }
    const IslOptions& options() const { return options_; }
    int slots() const { return options_.budget.inter_plane; }
    const std::vector<std::pair<std::size_t, std::size_t>>& candidate_pairs() const { return pairs_; }

    bool blocked(const Vec3& a, const Vec3& b) const {
        return segment_intersects_sphere(a, b, constellation_->constants().earth_radius_m + options_.occlusion_margin_m);
    }

    std::optional<PairLink> evaluate(const SatelliteState& su, const SatelliteState& sv) const {
        if (blocked(su.position_m, sv.position_m)) {
            return std::nullopt;
        }
        PairLink l;
        l.distance_m = distance(su.position_m, sv.position_m);
        if (options_.max_range_m && l.distance_m > *options_.max_range_m) {
            return std::nullopt;
        }
        const AntennaFrame fu = AntennaFrame::of(su);
        const AntennaFrame fv = AntennaFrame::of(sv);
        const Vec3 uv = sv.position_m - su.position_m;
        l.slot_u = detail::transceiver_slot(slots(), fu.side_of(uv));
        l.slot_v = detail::transceiver_slot(slots(), fv.side_of(uv * -1.0));
        switch (antenna_.kind) {
            case detail::IslAntenna::Kind::parabolic:
                l.gain_u = l.gain_v = parabolic_gain(antenna_.dish.diameter_m, link_.carrier_hz, antenna_.dish.efficiency, c_);
                break;
            case detail::IslAntenna::Kind::digital:
                l.gain_u = l.gain_v = static_cast<double>(antenna_.array.elements());
                break;
            case detail::IslAntenna::Kind::butler: {
                const BeamChoice bu = best_butler_beam(antenna_.beams, antenna_.array, fu.direction_to(uv));
                const BeamChoice bv = best_butler_beam(antenna_.beams, antenna_.array, fv.direction_to(uv * -1.0));
                l.beam_u = bu.beam;
                l.beam_v = bv.beam;
                l.gain_u = bu.gain;
                l.gain_v = bv.gain;
                break;
            }
        }
        l.rate_bps = shannon_rate(link_, snr(link_, l.distance_m, l.gain_u, l.gain_v, 0.0, c_));
        if (!(l.rate_bps > 0.0)) {
            return std::nullopt;
        }
        return l;
    }

    TopologySnapshot feasible_edges(double t) const {
        detail::require(t >= 0.0, "feasible_edges: time must be non-negative");
        return feasible_edges(t, constellation_->propagate_all(t));
    }

    TopologySnapshot feasible_edges(double t, const std::vector<SatelliteState>& states) const {
        TopologySnapshot s;
        s.t_s = t;
        s.slots = std::max(slots(), 1);
        const auto n = constellation_->size();
        s.graph.part.resize(n * static_cast<std::size_t>(s.slots));
        for (std::size_t i = 0; i < n; ++i) {
            for (int k = 0; k < s.slots; ++k) {
                s.graph.part[i * static_cast<std::size_t>(s.slots) + static_cast<std::size_t>(k)] =
                    constellation_->global_plane(i);
            }
        }
        if (slots() == 0) {
            return s;
        }
        for (const auto& [i, j] : pairs_) {
            const auto l = evaluate(states[i], states[j]);
            if (!l) {
                continue;
            }
            MatchEdge e;
            e.u = vertex(i, l->slot_u);
            e.v = vertex(j, l->slot_v);
            e.weight = l->rate_bps;
            e.rate_bps = l->rate_bps;
            e.distance_m = l->distance_m;
            e.beam_u = l->beam_u;
            e.beam_v = l->beam_v;
            s.graph.edges.push_back(e);
        }
        return s;
    }

    std::size_t vertex(std::size_t sat, int slot) const {
        return sat * static_cast<std::size_t>(std::max(slots(), 1)) + static_cast<std::size_t>(slot);
    }

    // Sub-band of an inter-plane link: lower plane index modulo the band count.
    int subband(std::size_t sat_u, std::size_t sat_v) const {
        const int a = constellation_->global_plane(sat_u);
        const int b = constellation_->global_plane(sat_v);
        return std::min(a, b) % options_.subbands;
    }

    /// Gain of the transceiver of `self` pointed at `partner`, evaluated toward
    /// `target`.
    double directed_gain(const SatelliteState& self, const SatelliteState& partner, const SatelliteState& target,
                         int beam) const {
        const Vec3 to_partner = partner.position_m - self.position_m;
        const Vec3 to_target = target.position_m - self.position_m;
        switch (antenna_.kind) {
            case detail::IslAntenna::Kind::parabolic: {
                const double cosang = std::clamp(dot(normalized(to_partner), normalized(to_target)), -1.0, 1.0);
                return parabolic_pattern_gain(antenna_.dish, link_.carrier_hz, std::acos(cosang), c_);
            }
            case detail::IslAntenna::Kind::digital: {
                const AntennaFrame f = AntennaFrame::of(self);
                return array_gain(digital_weights(antenna_.array, f.direction_to(to_partner)), antenna_.array,
                                  f.direction_to(to_target));
            }
            case detail::IslAntenna::Kind::butler: {
                const AntennaFrame f = AntennaFrame::of(self);
                return array_gain(antenna_.beams.at(static_cast<std::size_t>(beam - 1)), antenna_.array,
                                  f.direction_to(to_target));
            }
        }
        return 0.0;
    }

    /// Weight update for SINR mode: every edge sharing a sub-band with the
    /// accepted link accumulates the interference of both of its transmitters
    /// at each of its receivers, and its rate drops to the worse direction.
    WeightUpdate sinr_update(const TopologySnapshot& snap, const std::vector<SatelliteState>& states) const {
        using Key = std::pair<std::size_t, std::size_t>;
        auto acc = std::make_shared<std::map<Key, std::pair<double, double>>>();
        return [this, &snap, &states, acc](const MatchEdge& accepted, std::vector<MatchEdge>& matched,
                                           std::vector<MatchEdge>& remaining) {
            const std::size_t a = snap.satellite_of(accepted.u);
            const std::size_t b = snap.satellite_of(accepted.v);
            const int band = subband(a, b);
            const double noise = noise_power(link_);
            auto received = [&](std::size_t tx, std::size_t tx_partner, int tx_beam, std::size_t rx,
                                std::size_t rx_partner, int rx_beam) {
                if (tx == rx) {
                    return 0.0;
                }
                const double d = distance(states[tx].position_m, states[rx].position_m);
                const double gt = directed_gain(states[tx], states[tx_partner], states[rx], tx_beam);
                const double gr = directed_gain(states[rx], states[rx_partner], states[tx], rx_beam);
                return link_.tx_power_w * gt * gr / free_space_path_loss(d, link_.carrier_hz, c_);
            };
            auto degrade = [&](MatchEdge& e, bool reweight) {
                const std::size_t u = snap.satellite_of(e.u);
                const std::size_t v = snap.satellite_of(e.v);
                if (e.key() == accepted.key() || subband(u, v) != band) {
                    return;
                }
                auto& [iu, iv] = (*acc)[e.key()];
                iu += received(a, b, accepted.beam_u, u, v, e.beam_u) + received(b, a, accepted.beam_v, u, v, e.beam_u);
                iv += received(a, b, accepted.beam_u, v, u, e.beam_v) + received(b, a, accepted.beam_v, v, u, e.beam_v);
                const double signal = signal_power(states[u], states[v], e);
                const double r = std::min(shannon_rate(link_, signal / (noise + iu)), shannon_rate(link_, signal / (noise + iv)));
                e.rate_bps = std::min(e.rate_bps, r);
                if (reweight) {
                    e.weight = std::min(e.weight, r);
                }
            };
            for (auto& e : matched) {
                degrade(e, false);
            }
            for (auto& e : remaining) {
                degrade(e, true);
            }
        };
    }

    double signal_power(const SatelliteState& su, const SatelliteState& sv, const MatchEdge& e) const {
        const double d = distance(su.position_m, sv.position_m);
        const double gu = directed_gain(su, sv, sv, e.beam_u);
        const double gv = directed_gain(sv, su, su, e.beam_v);
        return link_.tx_power_w * gu * gv * pointing_loss_factor(link_) / free_space_path_loss(d, link_.carrier_hz, c_);
    }

    double speed_of_light() const { return c_; }
    const detail::IslAntenna& antenna() const { return antenna_; }

private:
    const Constellation* constellation_;
    LinkParams link_;
    IslOptions options_;
    double c_ = 299792458.0;
    detail::IslAntenna antenna_;
    std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

// ---------------------------------------------------------------------------
// Periodic re-establishment

struct ScheduleOptions {
    double reestablish_period_s = 0.0;  // 0: re-match at every sample
    double horizon_s = 0.0;             // 0: one (longest) orbital period
    double sample_step_s = 60.0;
    bool lookahead = true;
    SeedPolicy seed = SeedPolicy::keep_feasible;
    bool keep_samples = true;
    bool keep_matchings = true;

    void validate() const {
        if (!(reestablish_period_s >= 0.0) || !(horizon_s >= 0.0) || !(sample_step_s > 0.0)) {
            throw ConfigError("schedule: need period >= 0, horizon >= 0 and sample step > 0");
        }
    }
};

/// An active inter-plane ISL together with the antenna state frozen at the
/// moment it was (re-)established.
struct EstablishedLink {
    std::size_t sat_u = 0;
    std::size_t sat_v = 0;
    int slot_u = 0;
    int slot_v = 0;
    int beam_u = 0;
    int beam_v = 0;
    double distance_m = 0.0;
    double rate_bps = 0.0;
    Direction steer_u;  // digital arrays: pointing used until the next period
    Direction steer_v;
};

struct TimedMatching {
    double t_s = 0.0;
    Matching matching;
    std::vector<EstablishedLink> links;
};

struct RateSample {
    double t_s = 0.0;
    std::size_t sat_u = 0;
    std::size_t sat_v = 0;
    double distance_m = 0.0;
    double rate_bps = 0.0;
};

struct ScheduleResult {
    std::vector<TimedMatching> establishments;
    std::vector<RateSample> samples;
    std::size_t sample_count = 0;
    double rate_sum_bps = 0.0;

    double mean_rate_bps() const {
        return sample_count == 0 ? 0.0 : rate_sum_bps / static_cast<double>(sample_count);
    }

    std::vector<double> rates() const {
        std::vector<double> r;
        r.reserve(samples.size());
        for (const auto& s : samples) {
            r.push_back(s.rate_bps);
        }
        return r;
    }

    // Matching in force at time t (the latest establishment at or before t).
    const TimedMatching& active_at(double t) const {
        if (establishments.empty() || t < establishments.front().t_s) {
            throw LookupError("schedule: no matching established at t = " + std::to_string(t));
        }
        auto it = std::upper_bound(establishments.begin(), establishments.end(), t,
                                   [](double x, const TimedMatching& m) { return x < m.t_s; });
        return *std::prev(it);
    }
};

/// Rate of an established link at the given states, with the antennas left
/// as they were configured at establishment.
inline double established_rate(const IslModel& model, const EstablishedLink& l, const SatelliteState& su,
                               const SatelliteState& sv) {
    if (model.blocked(su.position_m, sv.position_m)) {
        return 0.0;
    }
    const double d = distance(su.position_m, sv.position_m);
    if (model.options().max_range_m && d > *model.options().max_range_m) {
        return 0.0;
    }
    const auto& ant = model.antenna();
    const LinkParams& p = model.link();
    const double c = model.speed_of_light();
    double gu = 0.0;
    double gv = 0.0;
    const Vec3 uv = sv.position_m - su.position_m;
    switch (ant.kind) {
        case detail::IslAntenna::Kind::parabolic:
            gu = gv = parabolic_gain(ant.dish.diameter_m, p.carrier_hz, ant.dish.efficiency, c);
            break;
        case detail::IslAntenna::Kind::digital:
            gu = array_gain(digital_weights(ant.array, l.steer_u), ant.array, AntennaFrame::of(su).direction_to(uv));
            gv = array_gain(digital_weights(ant.array, l.steer_v), ant.array,
                            AntennaFrame::of(sv).direction_to(uv * -1.0));
            break;
        case detail::IslAntenna::Kind::butler:
            gu = array_gain(ant.beams.at(static_cast<std::size_t>(l.beam_u - 1)), ant.array,
                            AntennaFrame::of(su).direction_to(uv));
            gv = array_gain(ant.beams.at(static_cast<std::size_t>(l.beam_v - 1)), ant.array,
                            AntennaFrame::of(sv).direction_to(uv * -1.0));
            break;
    }
    return shannon_rate(p, snr(p, d, gu, gv, 0.0, c));
}

/// One greedy establishment at time t, optionally looking ahead by `period`
/// and seeded with the still-feasible pairs of `prior`.
inline Matching establish(const IslModel& model, double t, double period, bool lookahead, const Matching* prior,
                          const std::vector<SatelliteState>& states, TopologySnapshot* snapshot_out = nullptr) {
    TopologySnapshot now = model.feasible_edges(t, states);
    MatchGraph effective = now.graph;
    if (lookahead && period > 0.0) {
        effective = with_lookahead(now.graph, model.feasible_edges(t + period).graph);
    }
    Matching seed;
    if (prior) {
        std::map<std::pair<std::size_t, std::size_t>, const MatchEdge*> current;
        for (const auto& e : effective.edges) {
            if (e.weight > 0.0) {
                current[e.key()] = &e;
            }
        }
        for (const auto& e : prior->pairs) {
            const auto it = current.find(e.key());
            if (it != current.end()) {
                seed.pairs.push_back(*it->second);
            }
        }
    }
    GreedyOptions opt;
    opt.initial = prior ? &seed : nullptr;
    if (model.options().interference == InterferenceMode::sinr) {
        opt.update = model.sinr_update(now, states);
    }
    Matching m = greedy_match(effective, opt);
    if (snapshot_out) {
        now.graph = std::move(effective);
        *snapshot_out = std::move(now);
    }
    return m;
}

inline ScheduleResult run_establishment_schedule(const IslModel& model, const ScheduleOptions& opt) {
    opt.validate();
    const Constellation& con = model.constellation();
    const double horizon = opt.horizon_s > 0.0 ? opt.horizon_s : con.max_period();
    const std::size_t slots = static_cast<std::size_t>(std::max(model.slots(), 1));
    const auto& ant = model.antenna();

    ScheduleResult out;
    TimedMatching current;
    bool have_current = false;
    std::size_t next_period = 0;

    const auto steps = static_cast<std::size_t>(std::floor(horizon / opt.sample_step_s + 1e-9));
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * opt.sample_step_s;
        const std::vector<SatelliteState> states = con.propagate_all(t);
        const bool due = !have_current || opt.reestablish_period_s == 0.0 ||
                         t + 1e-9 >= static_cast<double>(next_period) * opt.reestablish_period_s;
        if (due) {
            const Matching* prior = have_current && opt.seed == SeedPolicy::keep_feasible ? &current.matching : nullptr;
            TimedMatching tm;
            tm.t_s = t;
            tm.matching = establish(model, t, opt.reestablish_period_s, opt.lookahead, prior, states);
            for (const auto& e : tm.matching.pairs) {
                EstablishedLink l;
                l.sat_u = e.u / slots;
                l.sat_v = e.v / slots;
                l.slot_u = static_cast<int>(e.u % slots);
                l.slot_v = static_cast<int>(e.v % slots);
                l.beam_u = e.beam_u;
                l.beam_v = e.beam_v;
                l.distance_m = e.distance_m;
                l.rate_bps = e.rate_bps;
                if (ant.kind == detail::IslAntenna::Kind::digital) {
                    const Vec3 uv = states[l.sat_v].position_m - states[l.sat_u].position_m;
                    l.steer_u = AntennaFrame::of(states[l.sat_u]).direction_to(uv);
                    l.steer_v = AntennaFrame::of(states[l.sat_v]).direction_to(uv * -1.0);
                }
                tm.links.push_back(l);
            }
            current = std::move(tm);
            have_current = true;
            if (opt.reestablish_period_s > 0.0) {
                next_period = static_cast<std::size_t>(std::floor(t / opt.reestablish_period_s + 1e-9)) + 1;
            }
            if (opt.keep_matchings) {
                out.establishments.push_back(current);
            }
        }
        for (const auto& l : current.links) {
            const double r = established_rate(model, l, states[l.sat_u], states[l.sat_v]);
            out.sample_count++;
            out.rate_sum_bps += r;
            if (opt.keep_samples) {
                out.samples.push_back(
                    {t, l.sat_u, l.sat_v, distance(states[l.sat_u].position_m, states[l.sat_v].position_m), r});
            }
        }
    }
    return out;
}

}  // namespace ngso
