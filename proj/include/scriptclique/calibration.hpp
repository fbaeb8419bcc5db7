#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scriptclique/cliques.hpp"
#include "scriptclique/pipeline.hpp"

namespace scriptclique {

struct GroundTruthLabel {
    enum class Kind { same_source, mixed };
    std::vector<std::string> fingerprint; // sorted unique content hashes
    Kind label = Kind::same_source;
};

// JSON file: array of {"fingerprint": ["<hash>", ...], "label": "same_source"|"mixed"}.
std::vector<GroundTruthLabel> load_ground_truth(const std::filesystem::path& path);

struct CalibrationRow {
    double threshold = 0.0;
    std::uint64_t n_cliques = 0;
    std::uint64_t n_labeled = 0;
    std::optional<double> tpr; // absent when n_labeled == 0
    std::uint64_t n_edges = 0; // internal, used for the antitonicity assertion
};

// Sorted unique content hashes of a clique's member scripts; the key used to
// match cliques against ground-truth labels.
std::vector<std::string> clique_fingerprint(const Clique& clique, const SimilarityGraph& graph,
                                            const CorpusManifest& manifest);

// Runs the graph+clique pipeline at each threshold of the grid and matches
// retained cliques against labels by exact fingerprint equality. Asserts that
// edge counts are non-increasing across the sweep.
std::vector<CalibrationRow> sweep(const PipelineData& data, const AnalysisConfig& config,
                                  const std::vector<GroundTruthLabel>& labels,
                                  double t_min = 0.40, double t_max = 1.00, double step = 0.05);

// CSV: "threshold,n_cliques,n_labeled,tpr" (tpr empty when absent).
void write_calibration_csv(const std::vector<CalibrationRow>& rows, std::ostream& out);

} // namespace scriptclique
