#include "scriptclique/pipeline.hpp"

namespace scriptclique {

PipelineData prepare_pipeline(CorpusManifest manifest, const AnalysisConfig& config) {
    PipelineData data;
    data.manifest = dedup_scripts(std::move(manifest));

    for (const auto& rec : data.manifest.scripts) {
        if (rec.too_small()) continue;
        data.bags.emplace(rec.id, tokenize(read_script_content(data.manifest, rec), rec.id));
    }

    std::vector<const TokenBag*> analyzable;
    for (const auto& rec : data.manifest.scripts) {
        auto it = data.bags.find(rec.id);
        if (it == data.bags.end()) continue;
        if (it->second.total_terms < static_cast<std::uint64_t>(config.min_tokens)) continue;
        analyzable.push_back(&it->second);
    }
    if (!analyzable.empty()) {
        data.stats = build_vocabulary(analyzable);
        for (const TokenBag* bag : analyzable) {
            data.vectors.emplace(bag->script_id, tfidf_vector(*bag, data.stats));
        }
    }

    data.nodes = build_nodes(data.manifest, data.bags, config, &data.audit);
    data.scored = score_candidate_pairs(data.nodes, data.vectors, config, &data.audit);
    return data;
}

SimilarityGraph graph_at_threshold(const PipelineData& data, double threshold) {
    SimilarityGraph graph;
    graph.nodes = data.nodes;
    graph.audit = data.audit;
    for (const auto& edge : data.scored) {
        if (edge.score >= threshold) graph.edges.push_back(edge);
    }
    graph.audit.n_edges = graph.edges.size();
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        graph.node_index.emplace(graph.nodes[i].node_id, i);
    }
    return graph;
}

} // namespace scriptclique
