// SPDX-License-Identifier: Apache-2.0
//
// Packet-level discrete-event simulation over a piecewise-constant sequence
// of routing graphs.
//
// Every undirected link is one FIFO server of rate R shared by both
// directions; the queue is represented by the time the server becomes free.
// Packets follow source routes computed on the graph in force when they are
// created; after a topology change a packet finishes its current hop and is
// re-routed on the new graph from wherever it stands.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <utility>
#include <vector>

#include "ngso/error.hpp"
#include "ngso/routing.hpp"

namespace ngso {

struct GraphEpoch {
    double start_s = 0.0;
    RoutingGraph graph;
};

enum class ArrivalProcess { poisson, deterministic };

struct TrafficSpec {
    double packets_per_s = 100.0;  // per ground site
    double packet_bits = 1500.0 * 8.0;
    ArrivalProcess arrivals = ArrivalProcess::poisson;

    void validate() const {
        if (!(packets_per_s >= 0.0) || !(packet_bits > 0.0)) {
            throw ConfigError("traffic: need rate >= 0 and packet size > 0");
        }
    }
    friend bool operator==(const TrafficSpec&, const TrafficSpec&) = default;
};

struct SimulationOptions {
    TrafficSpec traffic;
    RoutingMetric metric;
    double horizon_s = 1.0;  // packets are generated in [0, horizon)
    // Keep forwarding packets already in the network after the horizon until
    // all are delivered or dropped.
    bool drain = true;
    std::uint64_t seed = 1;
    // Backlog of this link (vertex pair) is sampled every probe_interval_s.
    std::optional<std::pair<std::size_t, std::size_t>> probe_link;
    double probe_interval_s = 0.0;
    bool keep_trace = false;
};

struct PacketRecord {
    std::uint64_t id = 0;
    std::size_t source_site = 0;
    std::size_t destination_site = 0;
    double created_s = 0.0;
    double delivered_s = 0.0;
    std::size_t hops = 0;
    LatencyBreakdown latency;
};

struct BacklogSample {
    double t_s = 0.0;
    double backlog_s = 0.0;  // unfinished work queued on the probed link
};

struct SimulationResult {
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t in_flight = 0;
    std::uint64_t dropped = 0;
    std::uint64_t unroutable = 0;  // destination drawn but unreachable; not generated
    LatencyBreakdown total;        // summed over delivered packets
    std::uint64_t total_hops = 0;
    std::vector<BacklogSample> backlog;
    std::vector<PacketRecord> trace;

    LatencyBreakdown mean() const {
        if (delivered == 0) {
            return {};
        }
        const double n = static_cast<double>(delivered);
        return {total.waiting_s / n, total.transmission_s / n, total.propagation_s / n};
    }
    double mean_hops() const { return delivered == 0 ? 0.0 : static_cast<double>(total_hops) / static_cast<double>(delivered); }
};

namespace detail {

struct SimPacket {
    std::uint64_t id = 0;
    std::size_t source = 0;
    std::size_t destination = 0;
    double created = 0.0;
    std::size_t epoch = 0;
    Route route;
    std::size_t next = 0;  // index into route.edges
    LatencyBreakdown latency;
    std::size_t hops = 0;
};

enum class SimEventKind { generate, arrive, probe };

struct SimEvent {
    double t = 0.0;
    std::uint64_t seq = 0;
    SimEventKind kind = SimEventKind::generate;
    std::size_t subject = 0;  // site for generate, packet slot for arrive
    std::size_t vertex = 0;

    bool operator>(const SimEvent& o) const { return t != o.t ? t > o.t : seq > o.seq; }
};

}  // namespace detail

inline SimulationResult simulate_packets(const std::vector<GraphEpoch>& schedule, const SimulationOptions& opt) {
    opt.traffic.validate();
    if (schedule.empty()) {
        throw ConfigError("simulate_packets: empty graph schedule");
    }
    detail::require(opt.horizon_s > 0.0, "simulate_packets: horizon must be positive");
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        if (!(schedule[i].start_s > schedule[i - 1].start_s) ||
            schedule[i].graph.site_count() != schedule[0].graph.site_count()) {
            throw ConfigError("simulate_packets: epochs must be increasing and share the site set");
        }
    }
    const std::size_t sites = schedule[0].graph.site_count();
    const double p = opt.traffic.packet_bits;
    const double c = opt.metric.speed_of_light_mps;

    SimulationResult res;
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<std::size_t> pick_other(0, sites > 1 ? sites - 2 : 0);
    std::exponential_distribution<double> gap(opt.traffic.packets_per_s > 0.0 ? opt.traffic.packets_per_s : 1.0);

    std::vector<std::vector<double>> weights(schedule.size());
    std::map<std::pair<std::size_t, std::size_t>, ShortestPathTree> trees;
    auto epoch_at = [&](double t) {
        std::size_t e = 0;
        while (e + 1 < schedule.size() && schedule[e + 1].start_s <= t) {
            ++e;
        }
        return e;
    };
    auto tree = [&](std::size_t epoch, std::size_t from) -> const ShortestPathTree& {
        auto it = trees.find({epoch, from});
        if (it == trees.end()) {
            if (weights[epoch].empty() && !schedule[epoch].graph.edges().empty()) {
                weights[epoch] = routing_weights(schedule[epoch].graph, opt.metric, opt.traffic.packets_per_s * p);
            }
            it = trees.emplace(std::pair{epoch, from}, shortest_path_tree(schedule[epoch].graph, weights[epoch], from)).first;
        }
        return it->second;
    };

    std::map<std::pair<std::size_t, std::size_t>, double> busy_until;
    std::vector<detail::SimPacket> packets;
    std::vector<std::size_t> free_slots;
    std::priority_queue<detail::SimEvent, std::vector<detail::SimEvent>, std::greater<>> events;
    std::uint64_t seq = 0;
    std::uint64_t next_id = 0;

    auto next_gap = [&]() {
        return opt.traffic.arrivals == ArrivalProcess::poisson ? gap(rng) : 1.0 / opt.traffic.packets_per_s;
    };
    if (opt.traffic.packets_per_s > 0.0 && sites > 1) {
        for (std::size_t s = 0; s < sites; ++s) {
            const double first = opt.traffic.arrivals == ArrivalProcess::poisson
                                     ? next_gap()
                                     : static_cast<double>(s) / (static_cast<double>(sites) * opt.traffic.packets_per_s);
            events.push({first, seq++, detail::SimEventKind::generate, s, 0});
        }
    }
    if (opt.probe_link && opt.probe_interval_s > 0.0) {
        events.push({opt.probe_interval_s, seq++, detail::SimEventKind::probe, 0, 0});
    }

    auto key = [](std::size_t a, std::size_t b) { return std::pair{std::min(a, b), std::max(a, b)}; };

    // Sends the packet over its next edge from `at`, or finishes it.
    auto forward = [&](std::size_t slot, std::size_t at, double t) {
        detail::SimPacket& pk = packets[slot];
        const std::size_t epoch = epoch_at(t);
        if (epoch != pk.epoch) {
            pk.epoch = epoch;
            pk.route = tree(epoch, at).route_to(pk.destination);
            pk.next = 0;
            if (!pk.route.found) {
                res.dropped++;
                free_slots.push_back(slot);
                return;
            }
        }
        const RoutingGraph& g = schedule[epoch].graph;
        const std::size_t eid = pk.route.edges[pk.next++];
        const RoutingEdge& e = g.edge(eid);
        const std::size_t to = e.other(at);
        double& busy = busy_until[key(e.u, e.v)];
        const double start = std::max(t, busy);
        const LatencyBreakdown hop = one_hop_latency(e, p, start - t, c);
        busy = start + hop.transmission_s;
        pk.latency += hop;
        pk.hops++;
        events.push({start + hop.transmission_s + hop.propagation_s, seq++, detail::SimEventKind::arrive, slot, to});
    };

    while (!events.empty()) {
        const detail::SimEvent ev = events.top();
        events.pop();
        if (ev.t >= opt.horizon_s && (!opt.drain || ev.kind != detail::SimEventKind::arrive)) {
            continue;
        }
        switch (ev.kind) {
            case detail::SimEventKind::probe: {
                const auto it = busy_until.find(key(opt.probe_link->first, opt.probe_link->second));
                const double b = it == busy_until.end() ? 0.0 : std::max(0.0, it->second - ev.t);
                res.backlog.push_back({ev.t, b});
                events.push({ev.t + opt.probe_interval_s, seq++, detail::SimEventKind::probe, 0, 0});
                break;
            }
            case detail::SimEventKind::generate: {
                const std::size_t s = ev.subject;
                std::size_t d = pick_other(rng);
                if (d >= s) {
                    ++d;
                }
                events.push({ev.t + next_gap(), seq++, detail::SimEventKind::generate, s, 0});
                const std::size_t epoch = epoch_at(ev.t);
                const RoutingGraph& g = schedule[epoch].graph;
                Route r = tree(epoch, g.site_vertex(s)).route_to(g.site_vertex(d));
                if (!r.found) {
                    res.unroutable++;
                    break;
                }
                res.generated++;
                std::size_t slot;
                if (free_slots.empty()) {
                    slot = packets.size();
                    packets.emplace_back();
                } else {
                    slot = free_slots.back();
                    free_slots.pop_back();
                }
                packets[slot] = {next_id++, s, g.site_vertex(d), ev.t, epoch, std::move(r), 0, {}, 0};
                forward(slot, g.site_vertex(s), ev.t);
                break;
            }
            case detail::SimEventKind::arrive: {
                detail::SimPacket& pk = packets[ev.subject];
                if (ev.vertex == pk.destination) {
                    res.delivered++;
                    res.total += pk.latency;
                    res.total_hops += pk.hops;
                    if (opt.keep_trace) {
                        PacketRecord rec;
                        rec.id = pk.id;
                        rec.source_site = pk.source;
                        rec.destination_site = pk.destination;
                        rec.hops = pk.hops;
                        rec.created_s = pk.created;
                        rec.delivered_s = ev.t;
                        rec.latency = pk.latency;
                        res.trace.push_back(rec);
                    }
                    free_slots.push_back(ev.subject);
                    break;
                }
                forward(ev.subject, ev.vertex, ev.t);
                break;
            }
        }
    }
    res.in_flight = res.generated - res.delivered - res.dropped;
    return res;
}

}  // namespace ngso
