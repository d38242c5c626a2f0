// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "ngso/packet_sim.hpp"

using namespace ngso;

namespace {

constexpr double kC = 299792458.0;

RoutingEdge link(std::size_t u, std::size_t v, double rate, double d) {
    return {u, v, EdgeKind::gsl, d, rate, to_db(free_space_path_loss(d, 20e9))};
}

// Two sites joined through one satellite.
RoutingGraph relay(double rate) {
    RoutingGraph g(2, 1);
    g.add_edge(link(0, 2, rate, 1000e3));
    g.add_edge(link(2, 1, rate, 1500e3));
    return g;
}

// Four sites hanging off one satellite.
RoutingGraph star(double rate) {
    RoutingGraph g(4, 1);
    for (std::size_t s = 0; s < 4; ++s) {
        g.add_edge(link(s, 4, rate, 800e3));
    }
    return g;
}

double slope(const std::vector<BacklogSample>& b, double from) {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& s : b) {
        if (s.t_s < from) {
            continue;
        }
        n += 1;
        sx += s.t_s;
        sy += s.backlog_s;
        sxx += s.t_s * s.t_s;
        sxy += s.t_s * s.backlog_s;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST(Simulation, LightLoadHasNoWaitingAndExactLatency) {
    SimulationOptions o;
    o.traffic = {10.0, 12000.0, ArrivalProcess::deterministic};
    o.horizon_s = 0.99;
    o.keep_trace = true;
    const auto r = simulate_packets({{0.0, relay(1e9)}}, o);
    EXPECT_EQ(r.generated, 20u);
    EXPECT_EQ(r.delivered, 20u);
    EXPECT_EQ(r.in_flight, 0u);
    const auto mean = r.mean();
    EXPECT_DOUBLE_EQ(mean.waiting_s, 0.0);
    EXPECT_NEAR(mean.transmission_s, 2 * 12000.0 / 1e9, 1e-18);
    EXPECT_NEAR(mean.propagation_s, 2500e3 / kC, 1e-15);
    EXPECT_DOUBLE_EQ(r.mean_hops(), 2.0);
    for (const auto& p : r.trace) {
        EXPECT_NEAR(p.delivered_s - p.created_s, p.latency.total_s(), 1e-12);
    }
}

TEST(Simulation, DuplexLinkIsSharedByBothDirections) {
    // site 0 sends at 0, site 1 at 5 ms; 10 ms transmissions. The reply
    // occupies link 2-1 when the first packet reaches the satellite.
    SimulationOptions o;
    o.traffic = {100.0, 1e6, ArrivalProcess::deterministic};
    o.horizon_s = 0.006;
    o.keep_trace = true;
    const auto r = simulate_packets({{0.0, relay(1e8)}}, o);
    ASSERT_EQ(r.delivered, 2u);
    for (const auto& p : r.trace) {
        if (p.source_site == 0) {
            EXPECT_NEAR(p.latency.waiting_s, 0.015 - (0.01 + 1000e3 / kC), 1e-12);
        } else {
            EXPECT_DOUBLE_EQ(p.latency.waiting_s, 0.0);
        }
    }
}

TEST(Simulation, ConservationAndDrain) {
    SimulationOptions o;
    o.traffic = {5000.0, 12000.0, ArrivalProcess::poisson};
    o.horizon_s = 0.2;
    o.seed = 9;
    const auto drained = simulate_packets({{0.0, star(1e8)}}, o);
    EXPECT_EQ(drained.generated, drained.delivered + drained.dropped + drained.in_flight);
    EXPECT_EQ(drained.in_flight, 0u);
    o.drain = false;
    const auto cut = simulate_packets({{0.0, star(1e8)}}, o);
    EXPECT_EQ(cut.generated, drained.generated);
    EXPECT_GT(cut.in_flight, 0u);
    EXPECT_EQ(cut.generated, cut.delivered + cut.dropped + cut.in_flight);
}

TEST(Simulation, SeedDeterminism) {
    SimulationOptions o;
    o.traffic = {2000.0, 12000.0, ArrivalProcess::poisson};
    o.horizon_s = 0.3;
    o.seed = 42;
    const auto a = simulate_packets({{0.0, star(1e8)}}, o);
    const auto b = simulate_packets({{0.0, star(1e8)}}, o);
    EXPECT_EQ(a.generated, b.generated);
    EXPECT_EQ(a.total.waiting_s, b.total.waiting_s);
    o.seed = 43;
    const auto c = simulate_packets({{0.0, star(1e8)}}, o);
    EXPECT_NE(a.total.waiting_s, c.total.waiting_s);
}

TEST(Simulation, UnroutableDestinationsAreNotGenerated) {
    RoutingGraph g(3, 1);
    g.add_edge(link(0, 3, 1e9, 1000e3));
    g.add_edge(link(1, 3, 1e9, 1000e3));
    SimulationOptions o;
    o.traffic = {100.0, 12000.0, ArrivalProcess::deterministic};
    o.horizon_s = 1.0;
    const auto r = simulate_packets({{0.0, g}}, o);
    EXPECT_GT(r.unroutable, 0u);
    EXPECT_EQ(r.generated, r.delivered);
}

TEST(Simulation, EpochSwitchReroutesOrDrops) {
    RoutingGraph late(2, 2);
    late.add_edge(link(0, 3, 1e9, 1000e3));
    late.add_edge(link(3, 1, 1e9, 1000e3));
    SimulationOptions o;
    o.traffic = {50.0, 12000.0, ArrivalProcess::deterministic};
    o.horizon_s = 1.0;
    o.keep_trace = true;
    const auto r = simulate_packets({{0.0, relay(1e9)}, {0.5, late}}, o);
    EXPECT_EQ(r.generated, r.delivered + r.dropped);
    for (const auto& p : r.trace) {
        const double expected = p.created_s < 0.5 ? 2500e3 / kC : 2000e3 / kC;
        if (p.delivered_s < 0.5 || p.created_s >= 0.5) {
            EXPECT_NEAR(p.latency.propagation_s, expected, 1e-12);
        }
    }
    EXPECT_THROW(simulate_packets({{0.5, relay(1e9)}, {0.0, late}}, o), ConfigError);
    EXPECT_THROW(simulate_packets({}, o), ConfigError);
}

TEST(Simulation, BottleneckBacklogBelowAndAboveMaxLoad) {
    const RoutingGraph g = star(1e8);
    const auto routes = all_site_routes(g, edge_weights(g, RoutingMetric::hop_count()));
    const MaxLoad m = max_load_per_gs(g, routes);
    const auto& e = g.edge(m.bottleneck_edge);
    for (double f : {0.9, 1.1}) {
        SimulationOptions o;
        o.metric = RoutingMetric::hop_count();
        o.traffic = {f * m.lambda_star / 12000.0, 12000.0, ArrivalProcess::deterministic};
        o.horizon_s = 0.5;
        o.drain = false;
        o.probe_link = std::pair{e.u, e.v};
        o.probe_interval_s = o.horizon_s / 200.0;
        const auto r = simulate_packets({{0.0, g}}, o);
        ASSERT_GE(r.backlog.size(), 150u);
        const double s = slope(r.backlog, o.horizon_s / 2);
        if (f < 1.0) {
            EXPECT_LT(s, 1e-3) << f;
            double peak = 0.0;
            for (const auto& b : r.backlog) {
                peak = std::max(peak, b.backlog_s);
            }
            EXPECT_LT(peak, 10 * 12000.0 / e.rate_bps);
        } else {
            EXPECT_GT(s, 0.05) << f;
        }
    }
}
