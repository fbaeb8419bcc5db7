#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "scriptclique/corpus.hpp"
#include "scriptclique/lexical.hpp"

namespace scriptclique {

// Analysis knobs. Threshold comparison is inclusive
// (edge iff sim >= similarity_threshold); the word-count ratio bound is
// inclusive too (compared iff max/min <= wordcount_ratio_max).
struct AnalysisConfig {
    double similarity_threshold = 0.80;
    double wordcount_ratio_max = 1.50;
    int min_clique_sites = 6; // "greater than 5" distinct sites
    int min_tokens = 10;      // scripts below this are not analyzable

    bool operator==(const AnalysisConfig&) const = default;
};

// One graph node: scripts merged by the source filter (same download URL)
// or by identical content within a kind.
struct GraphNode {
    std::string node_id;
    std::vector<std::string> member_scripts; // sorted script ids
    ScriptKind kind = ScriptKind::embedded;
    std::vector<std::string> sites;          // sorted unique site ids
    bool has_external_refs = false;
    std::string rep_script_id;               // member whose bag/vector stands for the node
    std::uint64_t total_terms = 0;           // representative's token count
};

struct SimilarityEdge {
    std::string a; // node ids, a < b
    std::string b;
    double score = 0.0;
};

// Per-filter elimination counts for the audit report.
struct FilterAudit {
    std::uint64_t n_scripts = 0;           // records considered (post-dedup)
    std::uint64_t n_excluded_small = 0;    // < 8 bytes or < min_tokens tokens
    std::uint64_t n_merged_scripts = 0;    // collapsed into multi-member nodes
    std::uint64_t n_nodes = 0;
    std::uint64_t n_total_pairs = 0;
    std::uint64_t cut_kind = 0;            // embedded vs downloaded filter
    std::uint64_t cut_external_ref = 0;    // JS domain filter
    std::uint64_t cut_wordcount_ratio = 0; // word-count filter
    std::uint64_t skipped_zero_tokens = 0;
    std::uint64_t n_compared = 0;
    std::uint64_t n_edges = 0;

    bool operator==(const FilterAudit&) const = default;
};

struct SimilarityGraph {
    std::vector<GraphNode> nodes;
    std::vector<SimilarityEdge> edges; // sorted by (a, b)
    FilterAudit audit;
    std::unordered_map<std::string, std::size_t> node_index;

    const GraphNode* find_node(const std::string& id) const {
        auto it = node_index.find(id);
        return it == node_index.end() ? nullptr : &nodes[it->second];
    }
};

// Lexical test for communication with external sources: an absolute http(s)
// URL or a scheme-relative "//" followed by a hostname character.
bool external_ref_scan(std::string_view content);

// Builds graph nodes from analyzable scripts (>= 8 bytes, >= min_tokens
// tokens). Downloaded scripts sharing a source_url merge; hash-identical
// scripts of one kind merge; has_external_refs comes from the representative
// member's content.
std::vector<GraphNode> build_nodes(const CorpusManifest& manifest,
                                   const std::unordered_map<std::string, TokenBag>& bags,
                                   const AnalysisConfig& config,
                                   FilterAudit* audit = nullptr);

// Yields exactly the unordered node-index pairs that survive the kind,
// word-count-ratio and JS-domain filters. Pairs with a zero-token endpoint
// are skipped.
void for_each_candidate_pair(const std::vector<GraphNode>& nodes, const AnalysisConfig& config,
                             const std::function<void(std::size_t, std::size_t)>& yield,
                             FilterAudit* audit = nullptr);

// Materialized candidate pairs as (node_id, node_id), a < b; test convenience.
std::vector<std::pair<std::string, std::string>> candidate_pairs(
    const std::vector<GraphNode>& nodes, const AnalysisConfig& config);

// Cosine scores for every candidate pair regardless of threshold, sorted by
// (a, b). Lets the calibration sweep re-threshold without rescoring.
std::vector<SimilarityEdge> score_candidate_pairs(
    const std::vector<GraphNode>& nodes,
    const std::unordered_map<std::string, KeywordVector>& vectors, const AnalysisConfig& config,
    FilterAudit* audit = nullptr);

// Full graph: nodes plus edges with score >= similarity_threshold.
SimilarityGraph build_graph(const CorpusManifest& manifest,
                            const std::unordered_map<std::string, TokenBag>& bags,
                            const std::unordered_map<std::string, KeywordVector>& vectors,
                            const AnalysisConfig& config);

// Debug dump: "node_a,node_b,score" lines, lexicographically sorted.
void dump_graph_csv(const SimilarityGraph& graph, std::ostream& out);

} // namespace scriptclique
