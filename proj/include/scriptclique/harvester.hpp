#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "scriptclique/corpus.hpp"
#include "scriptclique/urls.hpp"

namespace scriptclique {

struct HarvestConfig {
    std::filesystem::path url_list_path;
    std::filesystem::path out_dir;
    int timeout_secs = 30;
    int max_parallel_sites = 8;
    std::uint64_t max_script_bytes = 5 * 1024 * 1024;
    std::string user_agent = "scriptclique/0.1.0";
    int follow_redirects = 5;
};

struct ExtractedScripts {
    std::vector<std::string> embedded; // inline bodies, raw bytes
    std::vector<std::string> external; // resolved absolute URLs, deduplicated, in order
};

// Tolerant scan for <script> elements in possibly malformed markup. Elements
// with a src attribute contribute only their resolved URL (the body is inert);
// inline elements contribute their body when it has any non-whitespace byte.
ExtractedScripts extract_script_tags(std::string_view html, const Url& base_url);

// Fetches every URL in the list file (one per line, '#' comments), extracts
// and downloads scripts, and writes a corpus_store corpus under out_dir.
// Per-site failures end up in fetch_status; only an unusable out_dir throws.
// Never executes script content: plain GETs for pages and script srcs only.
CorpusManifest harvest(const HarvestConfig& config, std::ostream* log = nullptr);

} // namespace scriptclique
