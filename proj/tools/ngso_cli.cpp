// SPDX-License-Identifier: Apache-2.0
//
// ngso: run experiments from scenario files, list presets, validate input.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ngso/cli/experiments.hpp"
#include "ngso/cli/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct Overrides {
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> constants;
};

ngso::cli::Scenario load_with_overrides(const std::string& path, const Overrides& o) {
    ngso::cli::Json doc = ngso::cli::read_scenario_document(path);
    if (!doc.is_object()) {
        throw ngso::ConfigError("scenario document must be an object");
    }
    if (o.seed) {
        doc["seed"] = *o.seed;
    }
    if (o.constants) {
        doc["constants"] = *o.constants;
    }
    return ngso::cli::scenario_from_json(doc);
}

void print_presets() {
    std::printf("constellations\n");
    std::printf("  %-12s %-9s %6s %4s %10s %10s  %s\n", "name", "geometry", "N", "P", "h_km", "incl_deg", "description");
    for (const auto& p : ngso::constellation_presets()) {
        std::printf("  %-12s %-9s %6d %4d %10.1f %10.2f  %s\n", p.name.c_str(),
                    std::string(ngso::to_string(p.shell.geometry)).c_str(), p.shell.n_sats, p.shell.n_planes,
                    p.shell.altitude_m / 1e3, ngso::rad2deg(p.shell.inclination_rad), p.description.c_str());
    }
    std::printf("links\n");
    for (const char* name : {"gsl", "isl"}) {
        const ngso::LinkParams l = ngso::link_preset(name);
        const auto& tx = std::get<ngso::ParabolicAntenna>(l.tx_antenna);
        const auto& rx = std::get<ngso::ParabolicAntenna>(l.rx_antenna);
        std::printf("  %-4s f=%.1f GHz  B=%.0f MHz  Pt=%.1f W  T=%.0f K  F=%.1f dB  Dtx=%.2f m  Drx=%.2f m  eta=%.2f  "
                    "Gtx=%.2f dBi  Grx=%.2f dBi  N=%.2f dBW\n",
                    name, l.carrier_hz / 1e9, l.bandwidth_hz / 1e6, l.tx_power_w, l.noise_temperature_k,
                    l.noise_figure_db, tx.diameter_m, rx.diameter_m, tx.efficiency,
                    ngso::to_db(ngso::peak_gain(l.tx_antenna, l.carrier_hz)),
                    ngso::to_db(ngso::peak_gain(l.rx_antenna, l.carrier_hz)), ngso::to_db(ngso::noise_power(l)));
    }
    std::printf("ground segments\n  ksat23 (%zu sites)\n", ngso::ksat_like_sites().size());
    std::printf("experiments\n");
    for (const auto& id : ngso::cli::experiment_catalog()) {
        std::printf("  %s%s\n", id.c_str(), ngso::cli::experiment_is_stochastic(id) ? " (needs seed)" : "");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Satellite constellation network experiments"};
    app.require_subcommand(1);

    Overrides ov;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::string constants;
    unsigned threads = 1;
    std::string scenario_path;

    auto* run = app.add_subcommand("run", "Run the experiment described by a scenario file");
    run->add_option("scenario", scenario_path, "Scenario file (JSON)")->required();
    auto* out_opt = run->add_option("--out", out_dir, "Output directory");
    auto* seed_opt = run->add_option("--seed", seed, "Random seed");
    auto* const_opt =
        run->add_option("--constants", constants, "Constant set")->check(CLI::IsMember({"spherical", "wgs-equatorial"}));
    run->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));

    auto* presets = app.add_subcommand("presets", "List constellation, link and ground-segment presets");

    auto* validate = app.add_subcommand("validate", "Check a scenario file and print its canonical form");
    validate->add_option("scenario", scenario_path, "Scenario file (JSON)")->required();
    auto* vseed = validate->add_option("--seed", seed, "Random seed");
    auto* vconst = validate->add_option("--constants", constants, "Constant set")
                       ->check(CLI::IsMember({"spherical", "wgs-equatorial"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    if (presets->parsed()) {
        print_presets();
        return kExitOk;
    }

    if (*out_opt) {
        ov.out = out_dir;
    }
    if (*seed_opt || *vseed) {
        ov.seed = seed;
    }
    if (*const_opt || *vconst) {
        ov.constants = constants;
    }

    ngso::cli::Scenario scenario;
    try {
        scenario = load_with_overrides(scenario_path, ov);
    } catch (const ngso::cli::ScenarioParseError& e) {
        std::fprintf(stderr, "%s: %s\n", scenario_path.c_str(), e.what());
        return kExitValidation;
    } catch (const ngso::ConfigError& e) {
        std::fprintf(stderr, "%s: validation error: %s\n", scenario_path.c_str(), e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s: %s\n", scenario_path.c_str(), e.what());
        return kExitValidation;
    }

    if (validate->parsed()) {
        std::cout << ngso::cli::serialize_scenario(scenario);
        std::fprintf(stderr, "ok: %s (hash %s)\n", scenario.experiment.c_str(), ngso::cli::scenario_hash(scenario).c_str());
        return kExitOk;
    }

    try {
        ngso::cli::RunContext ctx;
        ctx.threads = threads;
        const ngso::cli::ExperimentResult result = ngso::cli::run_experiment(scenario, ctx);
        const std::string dir = ov.out ? *ov.out : scenario.output_dir;
        for (const auto& p : ngso::cli::write_result(result, dir)) {
            std::printf("%s\n", p.string().c_str());
        }
    } catch (const ngso::ConfigError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitOk;
}
