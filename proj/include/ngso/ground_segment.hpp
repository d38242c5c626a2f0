// SPDX-License-Identifier: Apache-2.0
//
// Ground segment presets and a CSV loader for site lists.
#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ngso/constants.hpp"
#include "ngso/coverage.hpp"
#include "ngso/error.hpp"

namespace ngso {

namespace detail {

struct SiteRow {
    const char* id;
    double latitude_deg;
    double longitude_deg;
};

}  // namespace detail

/// 23 sites spread like a commercial polar-plus-global ground network.
/// Same list as data/ksat_sites.csv.
inline std::vector<GroundSite> ksat_like_sites() {
    static constexpr detail::SiteRow rows[] = {
        {"svalbard", 78.229, 15.408},
        {"tromso", 69.662, 18.940},
        {"vardo", 70.370, 31.100},
        {"grimstad", 58.330, 8.350},
        {"nemea", 37.800, 22.700},
        {"puertollano", 38.690, -4.110},
        {"santa_maria", 36.997, -25.136},
        {"dubai", 25.200, 55.300},
        {"bangalore", 13.030, 77.510},
        {"singapore", 1.350, 103.820},
        {"tokyo", 35.700, 139.500},
        {"mauritius", -20.500, 57.450},
        {"hartebeesthoek", -25.886, 27.707},
        {"dongara", -29.050, 115.350},
        {"awarua", -46.530, 168.380},
        {"troll", -72.010, 2.530},
        {"punta_arenas", -52.940, -70.850},
        {"sao_paulo", -23.550, -46.630},
        {"panama", 8.990, -79.520},
        {"hawaii", 19.820, -155.470},
        {"prince_albert", 53.200, -105.900},
        {"fairbanks", 64.860, -147.850},
        {"inuvik", 68.320, -133.550},
    };
    std::vector<GroundSite> out;
    for (const auto& r : rows) {
        out.push_back({r.id, deg2rad(r.latitude_deg), deg2rad(r.longitude_deg), 0.0});
    }
    return out;
}

inline std::vector<GroundSite> ground_segment_preset(std::string_view name) {
    if (name == "ksat23") {
        return ksat_like_sites();
    }
    throw LookupError("unknown ground segment preset '" + std::string(name) + "' (expected ksat23)");
}

/// Parses `id,latitude_deg,longitude_deg[,altitude_m]` rows; a first line
/// starting with "id" is treated as a header.
inline std::vector<GroundSite> parse_sites_csv(std::istream& in) {
    std::vector<GroundSite> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || (line_no == 1 && line.rfind("id", 0) == 0)) {
            continue;
        }
        std::stringstream ss(line);
        std::string id, lat, lon, alt;
        std::getline(ss, id, ',');
        std::getline(ss, lat, ',');
        std::getline(ss, lon, ',');
        std::getline(ss, alt, ',');
        try {
            GroundSite s{id, deg2rad(std::stod(lat)), deg2rad(std::stod(lon)), alt.empty() ? 0.0 : std::stod(alt)};
            s.validate();
            out.push_back(s);
        } catch (const std::logic_error& e) {
            throw ConfigError("sites csv line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<GroundSite> load_sites_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open sites file " + path);
    }
    return parse_sites_csv(in);
}

}  // namespace ngso
