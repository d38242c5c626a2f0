// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "ngso/isl.hpp"

using namespace ngso;

namespace {

LinkParams digital_link(int k) {
    LinkParams p = isl_link_preset();
    p.tx_antenna = p.rx_antenna = PhasedArrayAntenna{k, 0.5};
    return p;
}

// Clearance test written against the closest point of the infinite line,
// falling back to the endpoints outside the segment.
bool clears(const Vec3& a, const Vec3& b, double r) {
    const Vec3 d = b - a;
    const double along = -dot(a, d) / dot(d, d);
    if (along <= 0.0 || along >= 1.0) {
        return std::min(norm(a), norm(b)) > r;
    }
    return norm(cross(a, d)) / norm(d) > r;
}

}  // namespace

TEST(FeasibleEdges, OppositeSatellitesAreBlocked) {
    const Constellation c({ShellConfig{Geometry::delta, 2, 2, 550e3, kPi / 2, 0.0, {}}});
    const IslModel m(c, isl_link_preset());
    ASSERT_EQ(m.candidate_pairs().size(), 1u);
    EXPECT_TRUE(m.feasible_edges(0.0).graph.edges.empty());
}

TEST(FeasibleEdges, KeplerMatchesAllPairsScan) {
    const Constellation c({preset_shell("kepler")});
    const IslModel m(c, isl_link_preset());
    for (double t : {0.0, 1234.0}) {
        const auto snap = m.feasible_edges(t);
        const auto states = c.propagate_all(t);
        const double r = c.constants().earth_radius_m + 80e3;
        std::size_t expected = 0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            for (std::size_t j = i + 1; j < c.size(); ++j) {
                const int pi = c.id_of(i).plane;
                const int pj = c.id_of(j).plane;
                const int gap = std::abs(pi - pj);
                if (gap == 1 || gap == 6) {
                    expected += clears(states[i].position_m, states[j].position_m, r) ? 1 : 0;
                }
            }
        }
        EXPECT_EQ(snap.graph.edges.size(), expected) << t;
        for (const auto& e : snap.graph.edges) {
            EXPECT_GT(e.rate_bps, 0.0);
            EXPECT_NE(snap.graph.part[e.u], snap.graph.part[e.v]);
        }
    }
}

TEST(FeasibleEdges, AllPlanesModeIsSuperset) {
    const Constellation c({preset_shell("kepler")});
    IslOptions all;
    all.adjacent_planes_only = false;
    const auto a = IslModel(c, isl_link_preset()).feasible_edges(0.0);
    const auto b = IslModel(c, isl_link_preset(), all).feasible_edges(0.0);
    std::set<std::pair<std::size_t, std::size_t>> keys;
    for (const auto& e : b.graph.edges) {
        keys.insert(e.key());
    }
    EXPECT_GT(b.graph.edges.size(), a.graph.edges.size());
    for (const auto& e : a.graph.edges) {
        EXPECT_TRUE(keys.count(e.key()));
    }
}

TEST(FeasibleEdges, RangeLimitAndSlots) {
    const Constellation c({preset_shell("kepler")});
    IslOptions o;
    o.max_range_m = 2000e3;
    const IslModel m(c, isl_link_preset(), o);
    const auto snap = m.feasible_edges(0.0);
    EXPECT_EQ(snap.slots, 2);
    EXPECT_EQ(snap.graph.vertex_count(), 2 * c.size());
    for (const auto& e : snap.graph.edges) {
        EXPECT_LE(e.distance_m, 2000e3);
        EXPECT_EQ(snap.satellite_of(m.vertex(snap.satellite_of(e.u), snap.transceiver_of(e.u))), snap.satellite_of(e.u));
    }
}

TEST(Schedule, FrozenConstellationIsAFixedPoint) {
    const Constellation c({preset_shell("kepler")}, PhysicalConstants::spherical(), PropagationModel{true, true});
    const IslModel m(c, isl_link_preset());
    ScheduleOptions o;
    o.reestablish_period_s = 0.0;
    o.horizon_s = 600.0;
    o.sample_step_s = 60.0;
    const auto r = run_establishment_schedule(m, o);
    ASSERT_EQ(r.establishments.size(), 10u);
    for (const auto& tm : r.establishments) {
        ASSERT_EQ(tm.matching.pairs.size(), r.establishments[0].matching.pairs.size());
        for (std::size_t i = 0; i < tm.matching.pairs.size(); ++i) {
            EXPECT_EQ(tm.matching.pairs[i].key(), r.establishments[0].matching.pairs[i].key());
        }
    }
}

TEST(Schedule, EveryEstablishmentPassesTheAudit) {
    const Constellation c({preset_shell("kepler")});
    const IslModel m(c, isl_link_preset());
    const auto states = c.propagate_all(300.0);
    TopologySnapshot snap;
    const Matching first = establish(m, 300.0, 60.0, true, nullptr, states, &snap);
    EXPECT_TRUE(audit_matching(snap.graph, first).ok());
    for (const auto& e : first.pairs) {
        EXPECT_GT(e.weight, 0.0);
        EXPECT_LE(e.weight, e.rate_bps);
    }
    const auto later = c.propagate_all(360.0);
    TopologySnapshot snap2;
    const Matching second = establish(m, 360.0, 60.0, true, &first, later, &snap2);
    EXPECT_TRUE(audit_matching(snap2.graph, second).one_to_one);
    EXPECT_TRUE(audit_matching(snap2.graph, second).maximal);
}

TEST(Schedule, StalePointingNeverHelpsDigitalArrays) {
    const Constellation c({preset_shell("kepler")});
    const IslModel m(c, digital_link(16));
    ScheduleOptions o;
    o.horizon_s = 1800.0;
    o.sample_step_s = 10.0;
    double prev = 1e300;
    for (double period : {0.0, 30.0, 120.0}) {
        o.reestablish_period_s = period;
        const double mean = run_establishment_schedule(m, o).mean_rate_bps();
        EXPECT_LE(mean, prev * (1.0 + 1e-9)) << period;
        prev = mean;
    }
}

TEST(Schedule, IdealPointingParabolicAtLeastPeriodic) {
    const Constellation c({preset_shell("kepler")});
    const IslModel m(c, isl_link_preset());
    ScheduleOptions o;
    o.horizon_s = 1800.0;
    o.sample_step_s = 10.0;
    o.reestablish_period_s = 0.0;
    const double ideal = run_establishment_schedule(m, o).mean_rate_bps();
    o.reestablish_period_s = 30.0;
    EXPECT_GE(ideal, run_establishment_schedule(m, o).mean_rate_bps());
}

TEST(Schedule, SamplesAreAccountedAndActiveLookup) {
    const Constellation c({preset_shell("kepler")});
    const IslModel m(c, isl_link_preset());
    ScheduleOptions o;
    o.horizon_s = 300.0;
    o.sample_step_s = 20.0;
    o.reestablish_period_s = 60.0;
    const auto r = run_establishment_schedule(m, o);
    EXPECT_EQ(r.samples.size(), r.sample_count);
    EXPECT_EQ(r.establishments.size(), 5u);
    EXPECT_DOUBLE_EQ(r.active_at(119.0).t_s, 60.0);
    EXPECT_THROW(r.active_at(-1.0), LookupError);
    double sum = 0.0;
    for (const auto& s : r.samples) {
        sum += s.rate_bps;
    }
    EXPECT_NEAR(sum, r.rate_sum_bps, 1e-6 * sum);
}

TEST(Butler, EdgesCarryBeamsAndLowerRatesThanDigital) {
    const Constellation c({preset_shell("kepler")});
    LinkParams p = isl_link_preset();
    p.tx_antenna = p.rx_antenna = ButlerAntenna{8, 0.5, kPi / 2};
    const IslModel butler(c, p);
    const IslModel digital(c, digital_link(8));
    const auto sb = butler.feasible_edges(0.0);
    const auto sd = digital.feasible_edges(0.0);
    std::map<std::pair<std::size_t, std::size_t>, double> ideal;
    for (const auto& e : sd.graph.edges) {
        ideal[e.key()] = e.rate_bps;
    }
    for (const auto& e : sb.graph.edges) {
        EXPECT_GE(e.beam_u, 1);
        EXPECT_LE(e.beam_u, 8);
        EXPECT_GE(e.beam_v, 1);
        EXPECT_LE(e.beam_v, 8);
        if (ideal.count(e.key())) {
            EXPECT_LE(e.rate_bps, ideal[e.key()] * (1.0 + 1e-12));
        }
    }
}

TEST(Interference, SinrNeverRaisesRates) {
    const Constellation c({preset_shell("kepler")});
    IslOptions sinr;
    sinr.interference = InterferenceMode::sinr;
    const IslModel a(c, digital_link(8));
    const IslModel b(c, digital_link(8), sinr);
    const auto states = c.propagate_all(0.0);
    const Matching ma = establish(a, 0.0, 0.0, false, nullptr, states);
    const Matching mb = establish(b, 0.0, 0.0, false, nullptr, states);
    std::map<std::pair<std::size_t, std::size_t>, double> clean;
    for (const auto& e : a.feasible_edges(0.0).graph.edges) {
        clean[e.key()] = e.rate_bps;
    }
    EXPECT_GT(ma.pairs.size(), 0u);
    for (const auto& e : mb.pairs) {
        ASSERT_TRUE(clean.count(e.key()));
        EXPECT_LE(e.rate_bps, clean[e.key()] * (1.0 + 1e-12));
    }
}

TEST(Options, Validation) {
    IslOptions o;
    o.budget.inter_plane = 3;
    EXPECT_THROW(o.validate(), ConfigError);
    o = {};
    o.subbands = 0;
    EXPECT_THROW(o.validate(), ConfigError);
    o = {};
    o.max_range_m = -1.0;
    EXPECT_THROW(o.validate(), ConfigError);
    ScheduleOptions s;
    s.sample_step_s = 0.0;
    EXPECT_THROW(s.validate(), ConfigError);
}
