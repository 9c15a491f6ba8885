// graph.hpp — Threshold-graph realizations: degree sequences, degree
// censuses, and edge streams.
//
// Nodes k and l are adjacent iff fitness[k] + fitness[l] > theta (strict;
// floating-point equality counts as a non-edge). Every routine evaluates
// exactly that predicate, so the O(n log n) kernel, the O(n^2) reference
// and the edge stream agree bit for bit: fp addition is monotone in each
// argument, which makes the sorted array partitionable by the predicate
// itself.
//
// No adjacency matrix is ever stored; memory stays O(n).
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "rtg/errors.hpp"

namespace rtg {

inline bool adjacent(double fitness_k, double fitness_l, double theta) noexcept {
    return fitness_k + fitness_l > theta;
}

// Direct transcription of the degree definition; reference oracle only.
inline std::vector<std::int64_t> degree_sequence_naive(std::span<const double> fitness,
                                                       double theta) {
    const std::size_t n = fitness.size();
    if (n < 2) throw invalid_input("degree_sequence_naive: need at least 2 nodes");
    std::vector<std::int64_t> degrees(n, 0);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = k + 1; l < n; ++l)
            if (adjacent(fitness[k], fitness[l], theta)) {
                ++degrees[k];
                ++degrees[l];
            }
    return degrees;
}

// O(n log n): sort a copy, then for node k count values v with
// fitness[k] + v > theta via the partition point, minus the self term.
inline std::vector<std::int64_t> degree_sequence_fast(std::span<const double> fitness,
                                                      double theta) {
    const std::size_t n = fitness.size();
    if (n < 2) throw invalid_input("degree_sequence_fast: need at least 2 nodes");
    std::vector<double> sorted(fitness.begin(), fitness.end());
    std::sort(sorted.begin(), sorted.end());

    std::vector<std::int64_t> degrees(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double fk = fitness[k];
        const auto first_neighbor = std::partition_point(
            sorted.begin(), sorted.end(), [&](double v) { return !adjacent(fk, v, theta); });
        auto count = static_cast<std::int64_t>(sorted.end() - first_neighbor);
        if (adjacent(fk, fk, theta)) --count;   // remove the self pair
        degrees[k] = count;
    }
    return degrees;
}

struct GraphRun {
    std::int64_t n = 0;
    double theta = 0.0;
    std::vector<double> fitness;
    std::vector<std::int64_t> degrees;
};

inline GraphRun make_graph_run(std::vector<double> fitness, double theta) {
    if (fitness.size() < 2) throw invalid_input("make_graph_run: need at least 2 nodes");
    GraphRun run;
    run.n = static_cast<std::int64_t>(fitness.size());
    run.theta = theta;
    run.degrees = degree_sequence_fast(fitness, theta);
    run.fitness = std::move(fitness);
    return run;
}

struct DegreeCensus {
    std::int64_t n = 0;
    double theta = 0.0;
    std::map<std::int64_t, std::int64_t> counts;
    std::map<std::int64_t, double> fractions;

    [[nodiscard]] std::int64_t count(std::int64_t d) const {
        auto it = counts.find(d);
        return it == counts.end() ? 0 : it->second;
    }
    [[nodiscard]] double fraction(std::int64_t d) const {
        auto it = fractions.find(d);
        return it == fractions.end() ? 0.0 : it->second;
    }
};

inline DegreeCensus degree_census(std::span<const std::int64_t> degrees, double theta = 0.0) {
    DegreeCensus census;
    census.n = static_cast<std::int64_t>(degrees.size());
    census.theta = theta;
    for (std::int64_t d : degrees) ++census.counts[d];
    for (const auto& [d, c] : census.counts)
        census.fractions[d] = static_cast<double>(c) / static_cast<double>(census.n);
    return census;
}

// Visit every edge (k, l) with k < l exactly once, in increasing k.
// Time O(n log n + edges), memory O(n).
template <typename Visitor>
void for_each_edge(std::span<const double> fitness, double theta, Visitor&& visit) {
    const std::size_t n = fitness.size();
    if (n < 2) throw invalid_input("for_each_edge: need at least 2 nodes");

    // Node indices sorted by (fitness, index); neighbors of k form a suffix.
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return fitness[a] < fitness[b] || (fitness[a] == fitness[b] && a < b);
    });
    std::vector<double> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = fitness[order[i]];

    for (std::size_t k = 0; k < n; ++k) {
        const double fk = fitness[k];
        const auto begin = std::partition_point(
            sorted.begin(), sorted.end(), [&](double v) { return !adjacent(fk, v, theta); });
        for (auto it = begin; it != sorted.end(); ++it) {
            const std::uint32_t l = order[static_cast<std::size_t>(it - sorted.begin())];
            if (l > k) visit(static_cast<std::int64_t>(k), static_cast<std::int64_t>(l));
        }
    }
}

inline std::vector<std::pair<std::int64_t, std::int64_t>> edge_list(
    std::span<const double> fitness, double theta) {
    std::vector<std::pair<std::int64_t, std::int64_t>> edges;
    for_each_edge(fitness, theta,
                  [&](std::int64_t k, std::int64_t l) { edges.emplace_back(k, l); });
    return edges;
}

} // namespace rtg
