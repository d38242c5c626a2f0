// SPDX-License-Identifier: Apache-2.0
//
// Ground + space routing graph, routing metrics, shortest paths and the
// per-ground-station load bound.
//
// Vertex ids: ground sites first (0 .. S-1), then satellites (S .. S+N-1) in
// constellation index order.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "ngso/coverage.hpp"
#include "ngso/error.hpp"
#include "ngso/isl.hpp"
#include "ngso/link.hpp"
#include "ngso/orbits.hpp"

namespace ngso {

enum class EdgeKind { gsl, intra_plane, inter_plane };

struct RoutingEdge {
    std::size_t u = 0;
    std::size_t v = 0;
    EdgeKind kind = EdgeKind::gsl;
    double distance_m = 0.0;
    double rate_bps = 0.0;
    double path_loss_db = 0.0;

    std::size_t other(std::size_t x) const { return x == u ? v : u; }
};

class RoutingGraph {
public:
    RoutingGraph() = default;
    RoutingGraph(std::size_t sites, std::size_t satellites)
        : sites_(sites), satellites_(satellites), adjacency_(sites + satellites), gsl_fallback_(sites, false) {}

    std::size_t site_count() const { return sites_; }
    std::size_t satellite_count() const { return satellites_; }
    std::size_t vertex_count() const { return sites_ + satellites_; }
    std::size_t site_vertex(std::size_t site) const { return site; }
    std::size_t satellite_vertex(std::size_t sat) const { return sites_ + sat; }
    bool is_site(std::size_t v) const { return v < sites_; }

    std::size_t add_edge(const RoutingEdge& e) {
        if (e.u >= vertex_count() || e.v >= vertex_count() || e.u == e.v) {
            throw ConfigError("routing graph: invalid edge endpoints");
        }
        if (!(e.rate_bps > 0.0) || !(e.distance_m > 0.0)) {
            throw ConfigError("routing graph: edges need positive rate and distance");
        }
        edges_.push_back(e);
        const std::size_t id = edges_.size() - 1;
        adjacency_[e.u].emplace_back(e.v, id);
        adjacency_[e.v].emplace_back(e.u, id);
        return id;
    }

    const std::vector<RoutingEdge>& edges() const { return edges_; }
    const RoutingEdge& edge(std::size_t id) const { return edges_.at(id); }
    std::vector<RoutingEdge>& mutable_edges() { return edges_; }

    // (neighbour, edge id) pairs in insertion order.
    const std::vector<std::pair<std::size_t, std::size_t>>& neighbours(std::size_t v) const { return adjacency_.at(v); }

    std::size_t degree(std::size_t v) const { return adjacency_.at(v).size(); }

    bool site_connected(std::size_t site) const { return degree(site) > 0; }
    bool gsl_fallback(std::size_t site) const { return gsl_fallback_.at(site); }
    void set_gsl_fallback(std::size_t site, bool flag) { gsl_fallback_.at(site) = flag; }

    std::size_t count(EdgeKind kind) const {
        return static_cast<std::size_t>(
            std::count_if(edges_.begin(), edges_.end(), [kind](const RoutingEdge& e) { return e.kind == kind; }));
    }

private:
    std::size_t sites_ = 0;
    std::size_t satellites_ = 0;
    std::vector<RoutingEdge> edges_;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency_;
    std::vector<bool> gsl_fallback_;
};

/// Active inter-plane link handed to the graph builder.
struct InterPlaneLink {
    std::size_t sat_u = 0;
    std::size_t sat_v = 0;
    double rate_bps = 0.0;
};

struct RoutingGraphOptions {
    CoverageSpec coverage;
    bool intra_plane_rings = true;
};

/// Builds the three edge families at time t. A site links to its nearest
/// satellite above the minimum elevation, else to its nearest satellite above
/// the horizon (flagged), else stays disconnected.
inline RoutingGraph build_routing_graph(const Constellation& con, const std::vector<GroundSite>& sites,
                                        const std::vector<InterPlaneLink>& inter, const LinkParams& gsl,
                                        const LinkParams& isl, double t, const RoutingGraphOptions& opt = {}) {
    const auto& k = con.constants();
    const double c = k.speed_of_light_mps;
    const std::vector<SatelliteState> states = con.propagate_all(t);
    RoutingGraph g(sites.size(), con.size());

    for (std::size_t s = 0; s < sites.size(); ++s) {
        const Vec3 p = sites[s].position(k);
        std::optional<std::size_t> best;
        std::optional<std::size_t> fallback;
        double best_d = std::numeric_limits<double>::infinity();
        double fallback_d = best_d;
        for (std::size_t i = 0; i < states.size(); ++i) {
            const double d = distance(p, states[i].position_m);
            const double el = elevation(sites[s], states[i], k);
            if (el >= opt.coverage.min_elevation_rad && d < best_d) {
                best_d = d;
                best = i;
            }
            if (el >= 0.0 && d < fallback_d) {
                fallback_d = d;
                fallback = i;
            }
        }
        std::optional<std::size_t> pick = best ? best : fallback;
        if (!pick) {
            continue;
        }
        g.set_gsl_fallback(s, !best);
        const double d = best ? best_d : fallback_d;
        const double r = boresight_rate(gsl, d, c);
        if (!(r > 0.0)) {
            continue;
        }
        g.add_edge({g.site_vertex(s), g.satellite_vertex(*pick), EdgeKind::gsl, d, r,
                    to_db(free_space_path_loss(d, gsl.carrier_hz, c))});
    }

    if (opt.intra_plane_rings) {
        for (std::size_t i = 0; i < con.size(); ++i) {
            const SatelliteId& id = con.id_of(i);
            const int per_plane = con.shells()[static_cast<std::size_t>(id.shell)].sats_per_plane();
            if (per_plane < 2 || (per_plane == 2 && id.slot == 1)) {
                continue;
            }
            const std::size_t j = con.index_of({id.shell, id.plane, (id.slot + 1) % per_plane});
            const double d = distance(states[i].position_m, states[j].position_m);
            const double r = boresight_rate(isl, d, c);
            if (r > 0.0) {
                g.add_edge({g.satellite_vertex(i), g.satellite_vertex(j), EdgeKind::intra_plane, d, r,
                            to_db(free_space_path_loss(d, isl.carrier_hz, c))});
            }
        }
    }

    for (const auto& l : inter) {
        if (!(l.rate_bps > 0.0)) {
            continue;
        }
        if (l.sat_u >= con.size() || l.sat_v >= con.size() || con.global_plane(l.sat_u) == con.global_plane(l.sat_v)) {
            throw ConfigError("routing graph: inter-plane link must join satellites of different planes");
        }
        const double d = distance(states[l.sat_u].position_m, states[l.sat_v].position_m);
        g.add_edge({g.satellite_vertex(l.sat_u), g.satellite_vertex(l.sat_v), EdgeKind::inter_plane, d, l.rate_bps,
                    to_db(free_space_path_loss(d, isl.carrier_hz, c))});
    }
    return g;
}

/// Inter-plane links of an established matching evaluated at time t.
inline std::vector<InterPlaneLink> inter_plane_links(const IslModel& model, const TimedMatching& m, double t) {
    std::vector<InterPlaneLink> out;
    for (const auto& l : m.links) {
        const SatelliteState su = model.constellation().propagate(l.sat_u, t);
        const SatelliteState sv = model.constellation().propagate(l.sat_v, t);
        out.push_back({l.sat_u, l.sat_v, established_rate(model, l, su, sv)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Latency and metrics

struct LatencyBreakdown {
    double waiting_s = 0.0;
    double transmission_s = 0.0;
    double propagation_s = 0.0;

    double total_s() const { return waiting_s + transmission_s + propagation_s; }

    LatencyBreakdown& operator+=(const LatencyBreakdown& o) {
        waiting_s += o.waiting_s;
        transmission_s += o.transmission_s;
        propagation_s += o.propagation_s;
        return *this;
    }
};

inline LatencyBreakdown one_hop_latency(const RoutingEdge& e, double packet_bits, double waiting_s = 0.0,
                                        double c = 299792458.0) {
    if (!(e.rate_bps > 0.0)) {
        throw DomainError("one_hop_latency: edge has zero rate");
    }
    detail::require(waiting_s >= 0.0 && packet_bits >= 0.0, "one_hop_latency: negative wait or packet size");
    return {waiting_s, packet_bits / e.rate_bps, e.distance_m / c};
}

enum class MetricKind { hop_count, path_loss, latency };

enum class QueueEstimate { constant, mm1 };

// Path-loss weights are summed per route either in dB (a product of linear
// losses) or as linear losses.
enum class PathLossScale { db, linear };

struct RoutingMetric {
    MetricKind kind = MetricKind::latency;
    PathLossScale path_loss_scale = PathLossScale::db;
    double mean_packet_bits = 1500.0 * 8.0;
    QueueEstimate queue = QueueEstimate::constant;
    double constant_wait_s = 0.0;
    // Waiting time charged to an edge whose estimated load reaches its rate.
    double saturated_wait_s = 1.0;
    double speed_of_light_mps = 299792458.0;

    static RoutingMetric hop_count() { return {MetricKind::hop_count}; }
    static RoutingMetric path_loss() { return {MetricKind::path_loss}; }
    static RoutingMetric latency() { return {MetricKind::latency}; }
};

inline std::string_view to_string(MetricKind m) {
    switch (m) {
        case MetricKind::hop_count:
            return "hop_count";
        case MetricKind::path_loss:
            return "path_loss";
        case MetricKind::latency:
            return "latency";
    }
    return "?";
}

inline MetricKind metric_from_string(std::string_view s) {
    if (s == "hop_count") {
        return MetricKind::hop_count;
    }
    if (s == "path_loss") {
        return MetricKind::path_loss;
    }
    if (s == "latency") {
        return MetricKind::latency;
    }
    throw LookupError("unknown routing metric '" + std::string(s) + "' (expected hop_count | path_loss | latency)");
}

/// Positive weight of an edge. `load_bps` is the estimated offered load on the
/// edge, used only by the M/M/1 queue estimate.
inline double metric_weight(const RoutingEdge& e, const RoutingMetric& m, double load_bps = 0.0) {
    switch (m.kind) {
        case MetricKind::hop_count:
            return 1.0;
        case MetricKind::path_loss:
            return m.path_loss_scale == PathLossScale::db ? e.path_loss_db : from_db(e.path_loss_db);
        case MetricKind::latency: {
            double wait = m.constant_wait_s;
            if (m.queue == QueueEstimate::mm1) {
                const double mu = e.rate_bps / m.mean_packet_bits;
                const double lambda = load_bps / m.mean_packet_bits;
                wait = lambda < mu ? 1.0 / (mu - lambda) : m.saturated_wait_s;
            }
            return e.distance_m / m.speed_of_light_mps + m.mean_packet_bits / e.rate_bps + wait;
        }
    }
    return 1.0;
}

inline std::vector<double> edge_weights(const RoutingGraph& g, const RoutingMetric& m,
                                        const std::vector<double>* load_bps = nullptr) {
    std::vector<double> w(g.edges().size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = metric_weight(g.edge(i), m, load_bps ? (*load_bps)[i] : 0.0);
        if (!(w[i] > 0.0)) {
            throw NumericError("metric weight must be positive");
        }
    }
    return w;
}

// ---------------------------------------------------------------------------
// Shortest paths

struct Route {
    std::size_t source = 0;
    std::size_t destination = 0;
    bool found = false;
    std::vector<std::size_t> vertices;  // source .. destination
    std::vector<std::size_t> edges;
    double weight = 0.0;

    std::size_t hops() const { return edges.size(); }
};

/// Single-source shortest-path tree. Equal-weight alternatives resolve to
/// the smaller predecessor id. Only the source and the target may be ground
/// sites; sites never relay.
struct ShortestPathTree {
    std::size_t source = 0;
    std::vector<double> distance;
    std::vector<std::size_t> parent_edge;  // npos at the source / unreachable
    std::vector<std::size_t> parent;

    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    Route route_to(std::size_t target) const {
        Route r;
        r.source = source;
        r.destination = target;
        if (target >= distance.size() || distance[target] == std::numeric_limits<double>::infinity()) {
            return r;
        }
        r.found = true;
        r.weight = distance[target];
        for (std::size_t v = target; v != source; v = parent[v]) {
            r.vertices.push_back(v);
            r.edges.push_back(parent_edge[v]);
        }
        r.vertices.push_back(source);
        std::reverse(r.vertices.begin(), r.vertices.end());
        std::reverse(r.edges.begin(), r.edges.end());
        return r;
    }
};

inline ShortestPathTree shortest_path_tree(const RoutingGraph& g, const std::vector<double>& weights,
                                           std::size_t source) {
    if (source >= g.vertex_count()) {
        throw LookupError("shortest path: source vertex out of range");
    }
    const std::size_t n = g.vertex_count();
    ShortestPathTree t;
    t.source = source;
    t.distance.assign(n, std::numeric_limits<double>::infinity());
    t.parent_edge.assign(n, ShortestPathTree::npos);
    t.parent.assign(n, ShortestPathTree::npos);
    std::vector<char> done(n, 0);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    t.distance[source] = 0.0;
    pq.emplace(0.0, source);
    while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        if (done[u]) {
            continue;
        }
        done[u] = 1;
        if (u != source && g.is_site(u)) {
            continue;
        }
        for (const auto& [v, e] : g.neighbours(u)) {
            if (done[v]) {
                continue;
            }
            const double nd = d + weights[e];
            if (nd < t.distance[v] || (nd == t.distance[v] && u < t.parent[v])) {
                const bool improved = nd < t.distance[v];
                t.distance[v] = nd;
                t.parent[v] = u;
                t.parent_edge[v] = e;
                if (improved) {
                    pq.emplace(nd, v);
                }
            }
        }
    }
    return t;
}

inline Route shortest_route(const RoutingGraph& g, std::size_t source, std::size_t destination,
                            const std::vector<double>& weights) {
    if (destination >= g.vertex_count()) {
        throw LookupError("shortest path: destination vertex out of range");
    }
    if (source == destination) {
        Route r;
        r.source = r.destination = source;
        r.found = true;
        r.vertices = {source};
        return r;
    }
    return shortest_path_tree(g, weights, source).route_to(destination);
}

inline Route shortest_route(const RoutingGraph& g, std::size_t source, std::size_t destination,
                            const RoutingMetric& metric) {
    return shortest_route(g, source, destination, edge_weights(g, metric));
}

/// Routes for every ordered pair of distinct sites; pairs without a route
/// come back with found = false.
inline std::vector<Route> all_site_routes(const RoutingGraph& g, const std::vector<double>& weights) {
    std::vector<Route> out;
    for (std::size_t s = 0; s < g.site_count(); ++s) {
        const ShortestPathTree t = shortest_path_tree(g, weights, g.site_vertex(s));
        for (std::size_t d = 0; d < g.site_count(); ++d) {
            if (d != s) {
                out.push_back(t.route_to(g.site_vertex(d)));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Load

/// Load carried by each path between a pair of sites, 2 lambda / (N_GS - 1).
inline double path_load(double lambda, std::size_t n_sites) {
    if (n_sites < 2) {
        throw DomainError("path_load: need at least two ground sites");
    }
    detail::require(lambda >= 0.0, "path_load: load must be non-negative");
    return 2.0 * lambda / static_cast<double>(n_sites - 1);
}

/// Number of routes through each edge.
inline std::vector<std::size_t> edge_path_counts(const RoutingGraph& g, const std::vector<Route>& routes) {
    std::vector<std::size_t> n(g.edges().size(), 0);
    for (const auto& r : routes) {
        for (std::size_t e : r.edges) {
            n.at(e)++;
        }
    }
    return n;
}

struct MaxLoad {
    double lambda_star = 0.0;  // same unit as the edge rates
    std::size_t bottleneck_edge = 0;
    std::vector<std::size_t> path_counts;
};

/// min over used edges of R(e) (N_GS - 1) / N_p(e), where N_p counts routes
/// over ordered site pairs.
inline MaxLoad max_load_per_gs(const RoutingGraph& g, const std::vector<Route>& routes) {
    MaxLoad m;
    m.path_counts = edge_path_counts(g, routes);
    const double k = static_cast<double>(g.site_count()) - 1.0;
    bool any = false;
    for (std::size_t e = 0; e < m.path_counts.size(); ++e) {
        if (m.path_counts[e] == 0) {
            continue;
        }
        const double v = g.edge(e).rate_bps * k / static_cast<double>(m.path_counts[e]);
        if (!any || v < m.lambda_star) {
            m.lambda_star = v;
            m.bottleneck_edge = e;
            any = true;
        }
    }
    if (!any) {
        throw DomainError("max_load_per_gs: no routed paths");
    }
    return m;
}

/// Edge weights for a metric. The M/M/1 latency estimate needs edge loads;
/// they come from routing the offered load `lambda_bps` per site over the
/// constant-queue latency routes first.
inline std::vector<double> routing_weights(const RoutingGraph& g, const RoutingMetric& m, double lambda_bps = 0.0) {
    if (m.kind != MetricKind::latency || m.queue != QueueEstimate::mm1) {
        return edge_weights(g, m);
    }
    RoutingMetric base = m;
    base.queue = QueueEstimate::constant;
    base.constant_wait_s = 0.0;
    const auto counts = edge_path_counts(g, all_site_routes(g, edge_weights(g, base)));
    std::vector<double> load(counts.size());
    const double per_path = g.site_count() > 1 ? lambda_bps / static_cast<double>(g.site_count() - 1) : 0.0;
    for (std::size_t e = 0; e < counts.size(); ++e) {
        load[e] = per_path * static_cast<double>(counts[e]);
    }
    return edge_weights(g, m, &load);
}

}  // namespace ngso
