#include "scriptclique/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "scriptclique/errors.hpp"

namespace scriptclique {

using nlohmann::json;

std::vector<GroundTruthLabel> load_ground_truth(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot read ground-truth labels: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("ground-truth file is not valid JSON: ") + e.what());
    }
    std::vector<GroundTruthLabel> labels;
    try {
        for (const auto& item : doc) {
            GroundTruthLabel label;
            label.fingerprint = item.at("fingerprint").get<std::vector<std::string>>();
            if (label.fingerprint.empty()) throw SchemaError("label with empty fingerprint");
            std::sort(label.fingerprint.begin(), label.fingerprint.end());
            label.fingerprint.erase(
                std::unique(label.fingerprint.begin(), label.fingerprint.end()),
                label.fingerprint.end());
            const std::string kind = item.at("label").get<std::string>();
            if (kind == "same_source") {
                label.label = GroundTruthLabel::Kind::same_source;
            } else if (kind == "mixed") {
                label.label = GroundTruthLabel::Kind::mixed;
            } else {
                throw SchemaError("unknown ground-truth label: " + kind);
            }
            labels.push_back(std::move(label));
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("ground-truth field error: ") + e.what());
    }
    return labels;
}

std::vector<std::string> clique_fingerprint(const Clique& clique, const SimilarityGraph& graph,
                                            const CorpusManifest& manifest) {
    std::set<std::string> hashes;
    for (const auto& node_id : clique.node_ids) {
        const GraphNode* node = graph.find_node(node_id);
        if (node == nullptr) continue;
        for (const auto& script_id : node->member_scripts) {
            if (const ScriptRecord* rec = manifest.find_script(script_id)) {
                hashes.insert(rec->content_hash);
            }
        }
    }
    return {hashes.begin(), hashes.end()};
}

std::vector<CalibrationRow> sweep(const PipelineData& data, const AnalysisConfig& config,
                                  const std::vector<GroundTruthLabel>& labels, double t_min,
                                  double t_max, double step) {
    if (!(t_min < t_max)) throw std::invalid_argument("sweep: t_min must be < t_max");
    if (!(step > 0)) throw std::invalid_argument("sweep: step must be positive");

    std::map<std::vector<std::string>, GroundTruthLabel::Kind> by_fingerprint;
    for (const auto& label : labels) by_fingerprint.emplace(label.fingerprint, label.label);

    std::vector<CalibrationRow> rows;
    std::uint64_t prev_edges = 0;
    bool first = true;
    for (int i = 0;; ++i) {
        // snap to the grid so accumulated float error cannot push the last
        // point above 1.0 (a clamped cosine of exactly 1.0 must still count)
        const double threshold = std::round((t_min + step * i) * 1e9) / 1e9;
        if (threshold > t_max + 1e-12) break;

        AnalysisConfig point = config;
        point.similarity_threshold = threshold;
        SimilarityGraph graph = graph_at_threshold(data, threshold);
        auto cliques = filter_by_sites(enumerate_maximal_cliques(graph), point);

        CalibrationRow row;
        row.threshold = threshold;
        row.n_edges = graph.edges.size();
        row.n_cliques = cliques.size();
        std::uint64_t same_source = 0;
        for (const auto& clique : cliques) {
            auto it = by_fingerprint.find(clique_fingerprint(clique, graph, data.manifest));
            if (it == by_fingerprint.end()) continue;
            ++row.n_labeled;
            if (it->second == GroundTruthLabel::Kind::same_source) ++same_source;
        }
        if (row.n_labeled > 0) {
            row.tpr = static_cast<double>(same_source) / static_cast<double>(row.n_labeled);
        }

        // Edge antitonicity: raising the threshold can only remove edges.
        if (!first && row.n_edges > prev_edges) {
            throw Error("sweep: edge count increased with threshold");
        }
        prev_edges = row.n_edges;
        first = false;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_calibration_csv(const std::vector<CalibrationRow>& rows, std::ostream& out) {
    out << "threshold,n_cliques,n_labeled,tpr\n";
    char buf[64];
    for (const auto& row : rows) {
        if (row.tpr) {
            std::snprintf(buf, sizeof(buf), "%.2f,%llu,%llu,%.4f", row.threshold,
                          static_cast<unsigned long long>(row.n_cliques),
                          static_cast<unsigned long long>(row.n_labeled), *row.tpr);
        } else {
            std::snprintf(buf, sizeof(buf), "%.2f,%llu,%llu,", row.threshold,
                          static_cast<unsigned long long>(row.n_cliques),
                          static_cast<unsigned long long>(row.n_labeled));
        }
        out << buf << '\n';
    }
}

} // namespace scriptclique
