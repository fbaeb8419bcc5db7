#pragma once

#include <filesystem>

#include "scriptclique/similarity.hpp"

namespace scriptclique {

// Reads AnalysisConfig overrides from a JSON object or a flat TOML file
// (keys: similarity_threshold, wordcount_ratio_max, min_clique_sites,
// min_tokens). Missing keys keep their defaults; unknown keys are rejected.
AnalysisConfig load_analysis_config(const std::filesystem::path& path,
                                    AnalysisConfig base = {});

} // namespace scriptclique
