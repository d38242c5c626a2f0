// SPDX-License-Identifier: Apache-2.0
//
// Greedy one-to-one matching on a weighted multi-partite graph with an
// optional look-ahead edge set, plus empirical CDF helpers for rate samples.
#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ngso/error.hpp"

namespace ngso {

struct MatchEdge {
    std::size_t u = 0;
    std::size_t v = 0;
    double weight = 0.0;
    double distance_m = 0.0;
    double rate_bps = 0.0;
    int beam_u = 0;  // 0 when the antenna has no discrete beams
    int beam_v = 0;

    std::pair<std::size_t, std::size_t> key() const { return {std::min(u, v), std::max(u, v)}; }
};

/// Vertices carry a part label (the orbital plane); edges may only join
/// vertices of different parts.
struct MatchGraph {
    std::vector<int> part;
    std::vector<MatchEdge> edges;

    std::size_t vertex_count() const { return part.size(); }

    void validate() const {
        for (const auto& e : edges) {
            if (e.u >= part.size() || e.v >= part.size()) {
                throw ConfigError("match graph: edge endpoint out of range");
            }
            if (e.u == e.v) {
                throw ConfigError("match graph: self loop on vertex " + std::to_string(e.u));
            }
            if (part[e.u] == part[e.v]) {
                throw ConfigError("match graph: edge inside part " + std::to_string(part[e.u]));
            }
            if (!(e.weight >= 0.0)) {
                throw ConfigError("match graph: negative or NaN weight");
            }
        }
    }
};

struct Matching {
    std::vector<MatchEdge> pairs;
    std::vector<int> degree;  // per vertex, 0 or 1

    bool matched(std::size_t v) const { return v < degree.size() && degree[v] > 0; }

    double total_weight() const {
        double s = 0.0;
        for (const auto& e : pairs) {
            s += e.weight;
        }
        return s;
    }
};

/// Called after each accepted edge. `matched` holds the pairs accepted so
/// far, `remaining` the edges still selectable; weights in either may be
/// rewritten (interference update).
using WeightUpdate = std::function<void(const MatchEdge& accepted, std::vector<MatchEdge>& matched,
                                        std::vector<MatchEdge>& remaining)>;

struct GreedyOptions {
    const MatchGraph* lookahead = nullptr;
    const Matching* initial = nullptr;
    WeightUpdate update;
};

namespace detail {

// Strict weak order: heavier first, then smaller (min, max) endpoint pair,
// then beams.
inline bool greedy_before(const MatchEdge& a, const MatchEdge& b) {
    if (a.weight != b.weight) {
        return a.weight > b.weight;
    }
    if (a.key() != b.key()) {
        return a.key() < b.key();
    }
    return std::pair(a.beam_u, a.beam_v) < std::pair(b.beam_u, b.beam_v);
}

}  // namespace detail

/// Copy of `now` whose weights are min(weight now, weight in `next`); edges
/// absent from `next` get weight 0.
inline MatchGraph with_lookahead(const MatchGraph& now, const MatchGraph& next) {
    if (next.part != now.part) {
        throw ConfigError("greedy_match: look-ahead graph has a different vertex set");
    }
    next.validate();
    std::map<std::pair<std::size_t, std::size_t>, double> later;
    for (const auto& e : next.edges) {
        auto [it, fresh] = later.emplace(e.key(), e.weight);
        if (!fresh) {
            it->second = std::max(it->second, e.weight);
        }
    }
    MatchGraph out = now;
    for (auto& e : out.edges) {
        const auto it = later.find(e.key());
        e.weight = it == later.end() ? 0.0 : std::min(e.weight, it->second);
    }
    return out;
}

inline Matching greedy_match(const MatchGraph& now, const GreedyOptions& opt = {}) {
    now.validate();
    const std::size_t n = now.vertex_count();

    std::vector<MatchEdge> candidates = opt.lookahead ? with_lookahead(now, *opt.lookahead).edges : now.edges;

    Matching m;
    m.degree.assign(n, 0);
    if (opt.initial) {
        for (const auto& e : opt.initial->pairs) {
            if (e.u >= n || e.v >= n || now.part[e.u] == now.part[e.v]) {
                throw ConfigError("greedy_match: initial pair is not a valid inter-part edge");
            }
            if (m.degree[e.u] || m.degree[e.v]) {
                throw ConfigError("greedy_match: initial matching is not one-to-one");
            }
            m.degree[e.u] = m.degree[e.v] = 1;
            m.pairs.push_back(e);
        }
    }

    std::erase_if(candidates, [&](const MatchEdge& e) { return !(e.weight > 0.0) || m.degree[e.u] || m.degree[e.v]; });

    if (!opt.update) {
        std::sort(candidates.begin(), candidates.end(), detail::greedy_before);
        for (const auto& e : candidates) {
            if (!m.degree[e.u] && !m.degree[e.v]) {
                m.degree[e.u] = m.degree[e.v] = 1;
                m.pairs.push_back(e);
            }
        }
        return m;
    }

    while (!candidates.empty()) {
        const auto best = std::min_element(candidates.begin(), candidates.end(), detail::greedy_before);
        const MatchEdge accepted = *best;
        m.degree[accepted.u] = m.degree[accepted.v] = 1;
        m.pairs.push_back(accepted);
        std::erase_if(candidates, [&](const MatchEdge& e) { return m.degree[e.u] || m.degree[e.v]; });
        opt.update(accepted, m.pairs, candidates);
        std::erase_if(candidates, [](const MatchEdge& e) { return !(e.weight > 0.0); });
    }
    return m;
}

inline Matching greedy_match(const MatchGraph& now, const MatchGraph* lookahead, const Matching* initial = nullptr) {
    GreedyOptions opt;
    opt.lookahead = lookahead;
    opt.initial = initial;
    return greedy_match(now, opt);
}

// ---------------------------------------------------------------------------
// Audits

struct MatchingAudit {
    bool one_to_one = true;
    bool subset_of_edges = true;
    bool multipartite = true;
    bool maximal = true;

    bool ok() const { return one_to_one && subset_of_edges && multipartite && maximal; }
};

/// Checks a matching against the graph it was computed on (after any
/// look-ahead combination). Maximality is judged on edges with positive
/// weight.
inline MatchingAudit audit_matching(const MatchGraph& g, const Matching& m) {
    MatchingAudit a;
    std::vector<int> seen(g.vertex_count(), 0);
    std::map<std::pair<std::size_t, std::size_t>, double> best;
    for (const auto& e : g.edges) {
        auto& w = best[e.key()];
        w = std::max(w, e.weight);
    }
    for (const auto& e : m.pairs) {
        if (e.u >= seen.size() || e.v >= seen.size()) {
            a.one_to_one = a.subset_of_edges = false;
            continue;
        }
        seen[e.u]++;
        seen[e.v]++;
        if (seen[e.u] > 1 || seen[e.v] > 1) {
            a.one_to_one = false;
        }
        if (g.part[e.u] == g.part[e.v]) {
            a.multipartite = false;
        }
        const auto it = best.find(e.key());
        if (it == best.end() || e.weight > it->second * (1.0 + 1e-12)) {
            a.subset_of_edges = false;
        }
    }
    for (const auto& e : g.edges) {
        if (e.weight > 0.0 && !seen[e.u] && !seen[e.v]) {
            a.maximal = false;
        }
    }
    return a;
}

// ---------------------------------------------------------------------------
// Empirical CDF

struct CdfPoint {
    double value = 0.0;
    double cumulative = 0.0;
};

/// One point per sample, sorted ascending, cumulative = rank / n.
inline std::vector<CdfPoint> rate_cdf(std::vector<double> samples) {
    if (samples.empty()) {
        throw DomainError("rate_cdf: no samples");
    }
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    std::vector<CdfPoint> cdf(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        cdf[i] = {samples[i], static_cast<double>(i + 1) / n};
    }
    return cdf;
}

/// Smallest value whose cumulative fraction reaches q; at an exact step of
/// height q the midpoint to the next value is returned, so q = 0.5 gives the
/// usual median.
inline double cdf_quantile(const std::vector<CdfPoint>& cdf, double q) {
    detail::require(!cdf.empty(), "cdf_quantile: empty cdf");
    detail::require(q > 0.0 && q <= 1.0, "cdf_quantile: q outside (0, 1]");
    const double n = static_cast<double>(cdf.size());
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        const double rank = q * n;
        if (static_cast<double>(i + 1) >= rank) {
            if (static_cast<double>(i + 1) == rank && i + 1 < cdf.size()) {
                return 0.5 * (cdf[i].value + cdf[i + 1].value);
            }
            return cdf[i].value;
        }
    }
    return cdf.back().value;
}

inline double median(std::vector<double> samples) {
    if (samples.empty()) {
        throw DomainError("median: no samples");
    }
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    return n % 2 == 1 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
}

inline double mean(const std::vector<double>& samples) {
    if (samples.empty()) {
        throw DomainError("mean: no samples");
    }
    double s = 0.0;
    for (double x : samples) {
        s += x;
    }
    return s / static_cast<double>(samples.size());
}

}  // namespace ngso
