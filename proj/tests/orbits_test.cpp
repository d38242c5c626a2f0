// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ngso/orbits.hpp"

using namespace ngso;

namespace {

const PhysicalConstants kSph = PhysicalConstants::spherical();

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(ClosedForm, PeriodAgreesWithThirdLaw) {
    for (double h = 300e3; h <= 2000e3; h += 100e3) {
        EXPECT_LT(rel(orbital_period(h), orbital_period_kepler(h)), 1e-12) << h;
    }
}

TEST(ClosedForm, MonotoneInAltitude) {
    double prev_t = 0.0;
    double prev_v = 1e9;
    for (double h = 200e3; h <= 3000e3; h += 50e3) {
        const double t = orbital_period(h);
        const double v = orbital_velocity(h);
        EXPECT_GT(t, prev_t);
        EXPECT_LT(v, prev_v);
        prev_t = t;
        prev_v = v;
    }
}

TEST(ClosedForm, RecursiveAltitudeRoundTrip) {
    for (int n = 12; n <= 16; ++n) {
        for (int m = 1; m <= 3; ++m) {
            const double h = recursive_altitude(n, m);
            if (h <= 0.0) {
                continue;
            }
            EXPECT_LT(rel(orbital_period(h) * n, m * kSph.sidereal_day_s), 1e-6) << n << "/" << m;
        }
    }
}

TEST(ClosedForm, RecursiveAltitudesWithEquatorialRadius) {
    const auto k = PhysicalConstants::wgs_equatorial();
    EXPECT_NEAR(recursive_altitude(15, 1, k) / 1e3, 554.0, 2.0);
    EXPECT_NEAR(recursive_altitude(13, 1, k) / 1e3, 1248.0, 4.0);
}

TEST(ClosedForm, RecursiveAltitudeRejectsBadCounts) {
    EXPECT_THROW(recursive_altitude(0, 1), DomainError);
    EXPECT_THROW(recursive_altitude(15, 0), DomainError);
}

TEST(ClosedForm, IntraPlaneDistance) {
    // Kepler: 2 * 6946 km * sin(9 deg)
    const double d = intra_plane_distance(20, 575e3);
    EXPECT_NEAR(d, 2.0 * 6946e3 * std::sin(kPi / 20.0), 1.0);
    EXPECT_NEAR(d / 1e3, 2173.0, 5.0);
    EXPECT_DOUBLE_EQ(intra_plane_distance(2, 575e3), 2.0 * (kSph.earth_radius_m + 575e3));
    EXPECT_THROW(intra_plane_distance(1, 575e3), DomainError);
}

TEST(ClosedForm, SphericalDistanceSpecialCases) {
    const double h = 600e3;
    const double r = kSph.earth_radius_m + h;
    EXPECT_NEAR(spherical_distance(0.3, 0.3, 1.1, 1.1, h), 0.0, 1e-3);
    EXPECT_NEAR(spherical_distance(0.0, kPi, 0.0, 0.0, h), 2.0 * r, 1e-6);
    for (int p : {5, 7, 18, 72}) {
        EXPECT_NEAR(spherical_distance(kPi / 2, kPi / 2, 0.0, kPi / p, h), aligned_inter_plane_distance(p, h), 1e-6);
    }
}

TEST(ClosedForm, SphericalDistanceMatchesCartesianChord) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> pol(0.0, kPi), az(-kPi, kPi);
    const double h = 550e3;
    const double r = kSph.earth_radius_m + h;
    auto cart = [&](double t, double p) { return Vec3{r * std::sin(t) * std::cos(p), r * std::sin(t) * std::sin(p), r * std::cos(t)}; };
    for (int i = 0; i < 1000; ++i) {
        const double tu = pol(rng), tv = pol(rng), pu = az(rng), pv = az(rng);
        EXPECT_NEAR(spherical_distance(tu, tv, pu, pv, h), distance(cart(tu, pu), cart(tv, pv)), 1e-3);
    }
}

TEST(ClosedForm, MaxInterPlaneDistanceBounds) {
    const double h = 575e3;
    EXPECT_GE(max_inter_plane_distance(20, 7, h), aligned_inter_plane_distance(7, h));
    // N_op -> infinity collapses to the aligned bound
    EXPECT_LT(rel(max_inter_plane_distance(200000, 7, h), aligned_inter_plane_distance(7, h)), 1e-6);
    EXPECT_THROW(max_inter_plane_distance(1, 7, h), DomainError);
    EXPECT_THROW(max_inter_plane_distance(20, 1, h), DomainError);
}

TEST(ClosedForm, MaxInterPlaneDistanceMatchesSweep) {
    for (auto [nop, p, h] : {std::tuple{20, 7, 575e3}, std::tuple{36, 18, 1200e3}, std::tuple{22, 72, 550e3},
                             std::tuple{40, 5, 600e3}}) {
        double best = 0.0;
        const int steps = 20000;
        for (int i = 0; i <= steps; ++i) {
            const double tv = kPi / 2 - kPi / nop + 2.0 * kPi / nop * i / steps;
            best = std::max(best, spherical_distance(kPi / 2, tv, 0.0, kPi / p, h));
        }
        EXPECT_LT(rel(max_inter_plane_distance(nop, p, h), best), 1e-3) << nop << " " << p;
    }
}

TEST(Shell, ValidationErrors) {
    ShellConfig s{Geometry::star, 140, 7, 575e3, deg2rad(98.6), 0.0, {}};
    EXPECT_NO_THROW(s.validate());
    auto bad = s;
    bad.n_sats = 141;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = s;
    bad.altitude_m = 0.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = s;
    bad.inter_plane_phasing = 1.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = s;
    bad.per_plane_altitude_offset_m = {1.0, 2.0};
    EXPECT_THROW(bad.validate(), ConfigError);
    EXPECT_THROW(geometry_from_string("ring"), ConfigError);
}

TEST(Presets, MatchPublishedTable) {
    const auto& k = preset_shell("kepler");
    EXPECT_EQ(k.n_sats, 140);
    EXPECT_EQ(k.n_planes, 7);
    EXPECT_DOUBLE_EQ(k.altitude_m, 575e3);
    EXPECT_NEAR(rad2deg(k.inclination_rad), 98.6, 1e-12);
    const auto& o = preset_shell("oneweb");
    EXPECT_EQ(o.n_sats, 648);
    EXPECT_EQ(o.n_planes, 18);
    EXPECT_DOUBLE_EQ(o.altitude_m, 1200e3);
    const auto& s = preset_shell("starlink550");
    EXPECT_EQ(s.n_sats, 1584);
    EXPECT_EQ(s.n_planes, 72);
    EXPECT_EQ(s.geometry, Geometry::delta);
    EXPECT_THROW(preset_shell("iridium"), LookupError);
}

TEST(Constellation, RaanAndAnomalyLayout) {
    const Constellation kep({preset_shell("kepler")});
    ASSERT_EQ(kep.size(), 140u);
    for (std::size_t i = 0; i < kep.size(); ++i) {
        const auto& o = kep.orbit(i);
        EXPECT_NEAR(o.raan_rad, o.id.plane * kPi / 7.0, 1e-12);
        EXPECT_LT(o.raan_rad, kPi);
        EXPECT_NEAR(o.initial_anomaly_rad, o.id.slot * kTwoPi / 20.0, 1e-12);
    }
    const Constellation sl({preset_shell("starlink550")});
    ASSERT_EQ(sl.size(), 1584u);
    EXPECT_NEAR(rad2deg(sl.orbit(sl.index_of({0, 1, 0})).raan_rad), 5.0, 1e-9);
    for (std::size_t i = 0; i < sl.size(); i += 22) {
        EXPECT_LT(sl.orbit(i).raan_rad, kTwoPi);
    }
    const Constellation one({ShellConfig{Geometry::star, 4, 1, 500e3, deg2rad(60), 0.0, {}}});
    for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(rad2deg(one.orbit(static_cast<std::size_t>(k)).initial_anomaly_rad), 90.0 * k, 1e-9);
    }
}

TEST(Constellation, PhasingShiftsPlanes) {
    const Constellation c({ShellConfig{Geometry::delta, 20, 4, 700e3, deg2rad(55), 0.5, {}}});
    const double spacing = kTwoPi / 5.0;
    for (int a = 0; a < 4; ++a) {
        EXPECT_NEAR(c.orbit(c.index_of({0, a, 0})).initial_anomaly_rad, wrap_two_pi(0.5 * spacing * a), 1e-12);
    }
}

TEST(Constellation, IdIndexRoundTrip) {
    const Constellation c({preset_shell("kepler"), ShellConfig{Geometry::delta, 12, 3, 800e3, 1.0, 0.0, {}}});
    ASSERT_EQ(c.size(), 152u);
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_EQ(c.index_of(c.id_of(i)), i);
    }
    EXPECT_EQ(c.global_plane(c.index_of({1, 2, 0})), 9);
    EXPECT_THROW(c.index_of({0, 7, 0}), LookupError);
    EXPECT_THROW(c.index_of({2, 0, 0}), LookupError);
    EXPECT_THROW(c.propagate(0, -1.0), DomainError);
}

TEST(Propagation, ReferencePoint) {
    PropagationModel m;
    const Constellation c({ShellConfig{Geometry::star, 1, 1, 600e3, kPi / 2, 0.0, {}}}, kSph, m);
    const auto s = c.propagate(0, 0.0);
    EXPECT_NEAR(s.position_m.x, kSph.earth_radius_m + 600e3, 1e-6);
    EXPECT_NEAR(s.position_m.y, 0.0, 1e-6);
    EXPECT_NEAR(s.position_m.z, 0.0, 1e-6);
}

TEST(Propagation, PeriodicWithoutEarthRotation) {
    PropagationModel m;
    m.earth_rotation = false;
    const Constellation c({preset_shell("kepler")}, kSph, m);
    const double t = c.orbit(0).period_s;
    for (std::size_t i = 0; i < c.size(); i += 13) {
        const auto a = c.propagate(i, 0.0);
        const auto b = c.propagate(i, t);
        EXPECT_LT(distance(a.position_m, b.position_m) / norm(a.position_m), 1e-9);
    }
}

TEST(Propagation, RepeatGroundTrack) {
    for (int n : {13, 14, 15}) {
        const double h = recursive_altitude(n, 1);
        const Constellation c({ShellConfig{Geometry::star, 3, 1, h, deg2rad(70), 0.0, {}}});
        const double t = n * c.orbit(0).period_s;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const auto a = sub_satellite_point(c.propagate(i, 0.0).position_m);
            const auto b = sub_satellite_point(c.propagate(i, t).position_m);
            EXPECT_LT(rad2deg(std::abs(a.latitude_rad - b.latitude_rad)), 0.01);
            EXPECT_LT(rad2deg(std::abs(angle_difference(a.longitude_rad, b.longitude_rad))), 0.01);
        }
    }
}

TEST(Propagation, RadiusAndSpeedInvariants) {
    ShellConfig s{Geometry::star, 60, 6, 700e3, deg2rad(87), 0.25, {0, 1e3, 2e3, 3e3, 2e3, 1e3}};
    const Constellation c({s});
    for (double t : {0.0, 137.5, 2000.0, 86400.0}) {
        const auto states = c.propagate_all(t);
        for (std::size_t i = 0; i < c.size(); ++i) {
            const double h = c.orbit(i).altitude_m;
            EXPECT_LT(rel(norm(states[i].position_m), kSph.earth_radius_m + h), 1e-6);
            EXPECT_LT(rel(norm(states[i].orbital_velocity_mps), orbital_velocity(h)), 1e-6);
        }
    }
}

TEST(Propagation, VelocityIsFiniteDifferenceOfPosition) {
    const Constellation c({preset_shell("oneweb")});
    const double dt = 1e-3;
    for (std::size_t i = 0; i < c.size(); i += 71) {
        const auto a = c.propagate(i, 500.0 - dt);
        const auto b = c.propagate(i, 500.0 + dt);
        const auto mid = c.propagate(i, 500.0);
        const Vec3 fd = (b.position_m - a.position_m) * (1.0 / (2.0 * dt));
        EXPECT_LT(norm(fd - mid.velocity_mps) / norm(mid.velocity_mps), 1e-6);
    }
}

TEST(Propagation, InPlaneNeighbourDistanceIsConstant) {
    const Constellation c({preset_shell("kepler")});
    const double expect = intra_plane_distance(20, 575e3);
    for (double t : {0.0, 321.0, 4000.0}) {
        for (int a = 0; a < 7; ++a) {
            for (int k = 0; k < 20; ++k) {
                const auto u = c.propagate({0, a, k}, t);
                const auto v = c.propagate({0, a, (k + 1) % 20}, t);
                EXPECT_LT(rel(distance(u.position_m, v.position_m), expect), 1e-6);
            }
        }
    }
}

TEST(Propagation, FrozenModelHoldsState) {
    PropagationModel m;
    m.frozen = true;
    const Constellation c({preset_shell("kepler")}, kSph, m);
    EXPECT_EQ(c.propagate(5, 0.0).position_m, c.propagate(5, 1234.0).position_m);
}
