// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ngso/cli/scenario.hpp"

using namespace ngso;
using namespace ngso::cli;

namespace {

const std::filesystem::path kRoot = NGSO_SOURCE_DIR;

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string error_of(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Scenario, ShippedFilesValidateAndRoundTrip) {
    int n = 0;
    for (const auto& entry : std::filesystem::directory_iterator(kRoot / "scenarios")) {
        SCOPED_TRACE(entry.path().string());
        const Scenario s = load_scenario(entry.path().string());
        const std::string once = serialize_scenario(s);
        const Scenario again = parse_scenario(once);
        EXPECT_EQ(serialize_scenario(again), once);
        EXPECT_EQ(scenario_hash(again), scenario_hash(s));
        EXPECT_TRUE(again.applied_defaults.empty());
        ++n;
    }
    EXPECT_GE(n, 9);
}

TEST(Scenario, PresetOnlyDocumentLogsDefaults) {
    const Scenario s = parse_scenario(R"({"experiment": "isl-rate-cdf"})");
    EXPECT_EQ(s.constellation_preset, "kepler");
    EXPECT_EQ(s.shells.size(), 1u);
    EXPECT_EQ(s.shells[0], preset_shell("kepler"));
    EXPECT_EQ(s.isl, isl_link_preset());
    EXPECT_EQ(s.sites.size(), 23u);
    const Json& d = s.applied_defaults;
    EXPECT_EQ(d.at("constellation"), "kepler");
    EXPECT_EQ(d.at("matching.period_s"), 60.0);
    EXPECT_EQ(d.at("coverage.min_elevation_deg"), 30.0);
    EXPECT_EQ(d.at("link.isl"), "isl");
    EXPECT_FALSE(d.contains("experiment"));
}

TEST(Scenario, UnknownFieldsAreRejectedWithTheirPath) {
    EXPECT_NE(error_of(R"({"experiment": "table2-regression", "colour": 1})").find("'colour'"), std::string::npos);
    EXPECT_NE(error_of(R"({"matching": {"perod_s": 5}})").find("'matching.perod_s'"), std::string::npos);
    EXPECT_NE(error_of(R"({"link": {"isl": {"preset": "isl", "gain": 3}}})").find("'link.isl.gain'"), std::string::npos);
}

TEST(Scenario, TypeAndRangeErrors) {
    EXPECT_NE(error_of(R"({"matching": {"period_s": "fast"}})").find("expected number"), std::string::npos);
    EXPECT_NE(error_of(R"({"experiment": "warp-drive"})").find("catalog"), std::string::npos);
    EXPECT_NE(error_of(R"({"constants": "flat"})"), "");
    EXPECT_NE(error_of(R"({"link": {"isl": "laser"}})").find("link.isl"), std::string::npos);
    EXPECT_NE(error_of(R"({"coverage": {"min_elevation_deg": 95}})"), "");
    EXPECT_NE(error_of(R"([1, 2])"), "");
}

TEST(Scenario, ShellsAreValidated) {
    const std::string bad = slurp(kRoot / "tests/data/bad_shell.json");
    EXPECT_NE(error_of(bad).find("constellation[0]"), std::string::npos);
    EXPECT_NE(error_of(R"({"constellation": [{"n_sats": 10}]})"), "");
    EXPECT_NE(error_of(R"({"constellation": []})"), "");
    const Scenario s = parse_scenario(
        R"({"constellation": [{"geometry": "delta", "n_sats": 40, "n_planes": 5, "altitude_km": 600, "inclination_deg": 60, "phasing": 0.5}]})");
    EXPECT_TRUE(s.constellation_preset.empty());
    EXPECT_EQ(s.shells[0].geometry, Geometry::delta);
    EXPECT_DOUBLE_EQ(s.shells[0].inter_plane_phasing, 0.5);
}

TEST(Scenario, SyntaxErrorsCarryTheLine) {
    try {
        parse_scenario(slurp(kRoot / "tests/data/syntax_error.json"));
        FAIL() << "expected a parse error";
    } catch (const ScenarioParseError& e) {
        EXPECT_EQ(e.line(), 4);
    }
    EXPECT_EQ(ngso::cli::detail::line_of_offset("a\nb\nc", 0), 1);
    EXPECT_EQ(ngso::cli::detail::line_of_offset("a\nb\nc", 4), 3);
}

TEST(Scenario, SeedIsMandatoryForStochasticExperiments) {
    EXPECT_NE(error_of(R"({"experiment": "max-load"})").find("seed"), std::string::npos);
    EXPECT_NE(error_of(R"({"experiment": "routing-latency", "seed": -4})").find("seed"), std::string::npos);
    const Scenario s = parse_scenario(R"({"experiment": "routing-latency", "seed": 12})");
    EXPECT_EQ(s.seed, 12u);
    EXPECT_FALSE(parse_scenario(R"({"experiment": "availability"})").seed.has_value());
}

TEST(Scenario, HashIgnoresKeyOrderButNotValues) {
    const Scenario a = parse_scenario(R"({"experiment": "max-load", "seed": 3, "constellation": "oneweb"})");
    const Scenario b = parse_scenario(R"({"constellation": "oneweb", "seed": 3, "experiment": "max-load"})");
    const Scenario c = parse_scenario(R"({"constellation": "oneweb", "seed": 4, "experiment": "max-load"})");
    EXPECT_EQ(scenario_hash(a), scenario_hash(b));
    EXPECT_NE(scenario_hash(a), scenario_hash(c));
    EXPECT_EQ(scenario_hash(a).size(), 16u);
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ull);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cull);
}

TEST(Scenario, LinkOverridesAndAntennaMode) {
    const Scenario s = parse_scenario(
        R"({"link": {"isl": {"preset": "isl", "tx_power_w": 1, "rates_mbps": [100, 1000]}},
            "antenna": {"mode": "butler", "elements_per_axis": 4}})");
    EXPECT_DOUBLE_EQ(s.isl.tx_power_w, 1.0);
    EXPECT_EQ(s.isl.rates.rates_bps, (std::vector<double>{1e8, 1e9}));
    const LinkParams p = s.isl_link();
    ASSERT_TRUE(std::holds_alternative<ButlerAntenna>(p.tx_antenna));
    EXPECT_EQ(std::get<ButlerAntenna>(p.tx_antenna).elements_per_axis, 4);
    EXPECT_NE(error_of(R"({"antenna": {"mode": "horn"}})"), "");
}

TEST(Scenario, InlineSitesReplaceThePreset) {
    const Scenario s = parse_scenario(
        R"({"ground_segment": [{"id": "a", "latitude_deg": 10, "longitude_deg": 20},
                               {"id": "b", "latitude_deg": -10, "longitude_deg": 170, "altitude_m": 5}]})");
    ASSERT_EQ(s.sites.size(), 2u);
    EXPECT_TRUE(s.ground_preset.empty());
    EXPECT_DOUBLE_EQ(s.sites[1].altitude_m, 5.0);
    EXPECT_NE(error_of(R"({"ground_segment": [{"id": "a", "latitude_deg": 100, "longitude_deg": 0}]})"), "");
    EXPECT_NE(error_of(R"({"ground_segment": "nowhere"})"), "");
}
