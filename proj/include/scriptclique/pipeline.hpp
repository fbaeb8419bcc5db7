#pragma once

#include <unordered_map>

#include "scriptclique/corpus.hpp"
#include "scriptclique/lexical.hpp"
#include "scriptclique/similarity.hpp"

namespace scriptclique {

// Everything threshold-independent: deduped corpus, token bags, vocabulary,
// vectors, graph nodes and scored candidate pairs. The calibration sweep
// re-thresholds this once-computed state.
struct PipelineData {
    CorpusManifest manifest; // after dedup_scripts
    std::unordered_map<std::string, TokenBag> bags;       // all scripts >= 8 bytes
    VocabularyStats stats;                                // over analyzable bags
    std::unordered_map<std::string, KeywordVector> vectors; // analyzable scripts only
    std::vector<GraphNode> nodes;
    FilterAudit audit;
    std::vector<SimilarityEdge> scored; // every candidate pair, any score
};

PipelineData prepare_pipeline(CorpusManifest manifest, const AnalysisConfig& config);

// Graph at a given threshold from prepared state (edges: score >= threshold).
SimilarityGraph graph_at_threshold(const PipelineData& data, double threshold);

} // namespace scriptclique
