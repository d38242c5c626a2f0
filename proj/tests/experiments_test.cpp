// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ngso/cli/experiments.hpp"

using namespace ngso;
using namespace ngso::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void expect_identical_outputs(const Scenario& s, const std::string& tag) {
    const fs::path a = fs::path("det_" + tag) / "a";
    const fs::path b = fs::path("det_" + tag) / "b";
    fs::remove_all(fs::path("det_" + tag));
    const auto fa = write_result(run_experiment(s), a);
    const auto fb = write_result(run_experiment(s), b);
    ASSERT_EQ(fa.size(), fb.size());
    ASSERT_FALSE(fa.empty());
    for (std::size_t i = 0; i < fa.size(); ++i) {
        EXPECT_EQ(fa[i].filename(), fb[i].filename());
        EXPECT_EQ(slurp(fa[i]), slurp(fb[i])) << fa[i];
    }
}

double cell_number(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        return *d;
    }
    return static_cast<double>(std::get<long long>(c));
}

std::size_t column(const Table& t, const std::string& name) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (t.columns[i] == name) {
            return i;
        }
    }
    throw LookupError("no column " + name);
}

}  // namespace

TEST(Format, NumbersAndCells) {
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(1e9), "1e+09");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333");
    EXPECT_EQ(format_cell(Cell{std::string("a,b")}), "\"a,b\"");
    EXPECT_EQ(format_cell(Cell{std::string("say \"hi\"")}), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(format_cell(Cell{42LL}), "42");
    Table t{"x", {"a", "b"}, {}};
    t.add({1LL, 2.5});
    EXPECT_EQ(to_csv(t), "a,b\n1,2.5\n");
    EXPECT_THROW(t.add({1LL}), DomainError);
}

TEST(Experiments, Table2RowsAllPass) {
    const auto r = run_experiment(parse_scenario(R"({"experiment": "table2-regression"})"));
    EXPECT_EQ(r.summary.at("passed"), r.summary.at("total"));
    const Table& t = r.table("values");
    EXPECT_EQ(t.rows.size(), 6u);
    for (const auto& row : t.rows) {
        EXPECT_LE(std::abs(cell_number(row[column(t, "difference_db")])), 0.05);
    }
    EXPECT_EQ(r.provenance.at("tool_version"), std::string(kToolVersion));
    EXPECT_THROW(r.table("nope"), LookupError);
}

TEST(Experiments, DeterministicOutputs) {
    expect_identical_outputs(parse_scenario(R"({"experiment": "table2-regression"})"), "table2");
    expect_identical_outputs(parse_scenario(R"({"experiment": "routing-latency", "seed": 5,
        "traffic": {"epochs": 1, "horizon_s": 0.01}})"),
                             "routing");
}

TEST(Experiments, SeedChangesStochasticOutputs) {
    const auto a = run_experiment(parse_scenario(R"({"experiment": "routing-latency", "seed": 5,
        "traffic": {"epochs": 1, "horizon_s": 0.01}})"));
    const auto b = run_experiment(parse_scenario(R"({"experiment": "routing-latency", "seed": 6,
        "traffic": {"epochs": 1, "horizon_s": 0.01}})"));
    EXPECT_NE(to_csv(a.table("metrics")), to_csv(b.table("metrics")));
}

TEST(Experiments, OneWebAvailabilityIsComplete) {
    const auto r = run_experiment(parse_scenario(R"({"experiment": "availability", "constellation": "oneweb",
        "availability": {"latitude_step_deg": 15, "longitude_samples": 12, "time_step_s": 120}})"));
    const Table& t = r.table("profile");
    EXPECT_EQ(t.rows.size(), 13u);
    for (const auto& row : t.rows) {
        EXPECT_EQ(cell_number(row[column(t, "availability")]), 1.0);
    }
}

TEST(Experiments, PassProfileAndBadSatellite) {
    const auto r = run_experiment(parse_scenario(R"({"experiment": "pass-profile"})"));
    EXPECT_TRUE(r.summary.at("pass_found").get<bool>());
    EXPECT_GT(r.summary.at("duration_s").get<double>(), 0.0);
    EXPECT_THROW(run_experiment(parse_scenario(R"({"experiment": "pass-profile", "pass": {"plane": 9}})")),
                 ConfigError);
}

TEST(Experiments, BeamPatternShapes) {
    const auto r = run_experiment(parse_scenario(R"({"experiment": "beam-pattern"})"));
    EXPECT_EQ(r.table("pattern").rows.size(), 4u * 361u);
    EXPECT_EQ(r.table("beams").rows.size(), 4u);
    EXPECT_LT(r.summary.at("max_cross_inner_product").get<double>(), 1e-10);
}

TEST(Experiments, IslRateCdfDumpsMatchings) {
    const auto r = run_experiment(parse_scenario(R"({"experiment": "isl-rate-cdf",
        "matching": {"horizon_s": 600}})"));
    const Table& cdf = r.table("cdf");
    ASSERT_FALSE(cdf.rows.empty());
    EXPECT_EQ(cell_number(cdf.rows.back()[column(cdf, "cumulative")]), 1.0);
    const Table& m = r.table("matching");
    EXPECT_EQ(m.columns, (std::vector<std::string>{"t", "u_plane", "u_slot", "v_plane", "v_slot", "beam_k",
                                                   "distance_m", "rate_bps"}));
    for (const auto& row : m.rows) {
        EXPECT_NE(cell_number(row[1]), cell_number(row[3]));
        EXPECT_GT(cell_number(row[7]), 0.0);
    }
}

TEST(Experiments, ConnectivityCheck) {
    const auto r = run_experiment(parse_scenario(R"({"experiment": "connectivity-check"})"));
    EXPECT_EQ(r.table("shells").rows.size(), 1u);
    EXPECT_TRUE(r.summary.at("all_connected").get<bool>());
}

TEST(Experiments, WriteResultLayout) {
    fs::remove_all("layout");
    const auto r = run_experiment(parse_scenario(R"({"experiment": "table2-regression"})"));
    const auto files = write_result(r, "layout");
    EXPECT_TRUE(fs::exists("layout/table2-regression.values.csv"));
    EXPECT_TRUE(fs::exists("layout/table2-regression.summary.json"));
    const Json doc = Json::parse(slurp("layout/table2-regression.summary.json"));
    EXPECT_EQ(doc.at("provenance").at("scenario_hash"), r.provenance.at("scenario_hash"));
    EXPECT_EQ(files.size(), r.tables.size() + 1);
}
