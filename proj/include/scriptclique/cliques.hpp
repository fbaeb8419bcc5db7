#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scriptclique/similarity.hpp"

namespace scriptclique {

struct Clique {
    std::string clique_id;
    std::vector<std::string> node_ids; // sorted, size >= 2
    std::vector<std::string> sites;    // sorted unique
    ScriptKind kind = ScriptKind::embedded;
    double min_internal_score = 0.0;

    bool operator==(const Clique&) const = default;
};

struct CliqueStats {
    std::uint64_t n_cliques = 0;
    double mean_sites = 0.0;
    double std_sites = 0.0; // population standard deviation
    std::uint64_t max_sites = 0;

    bool operator==(const CliqueStats&) const = default;
};

struct CliqueEnumLimits {
    // Upper bound on recursion steps; pathological graphs abort with
    // BudgetExceededError instead of hanging.
    std::uint64_t max_steps = 100'000'000;
};

// All maximal cliques of size >= 2, each exactly once. Pivoted Bron-Kerbosch
// with the outer loop over a degeneracy ordering. Output sorted by
// (|node_ids| descending, node id sequence ascending); clique ids follow that
// order.
std::vector<Clique> enumerate_maximal_cliques(const SimilarityGraph& graph,
                                              CliqueEnumLimits limits = {});

// Keeps cliques spanning at least min_clique_sites distinct sites.
std::vector<Clique> filter_by_sites(std::vector<Clique> cliques, const AnalysisConfig& config);

// Population mean / standard deviation / max of distinct-site counts.
CliqueStats clique_stats(const std::vector<Clique>& cliques);

} // namespace scriptclique
