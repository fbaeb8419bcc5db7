#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scriptclique/cliques.hpp"
#include "scriptclique/pipeline.hpp"
#include "scriptclique/profile.hpp"

namespace scriptclique {

// One script inside a reported clique; enough to rebuild fingerprints and to
// replay the member's fetch request against filter lists.
struct MemberRef {
    std::string script_id;
    std::string site_id;
    std::string content_hash;
    std::optional<std::string> source_url;

    bool operator==(const MemberRef&) const = default;
};

struct CliqueReportEntry {
    Clique clique;
    CliqueProfile profile;
    std::vector<std::string> overlaps_with; // clique ids sharing >= 1 node
    std::vector<MemberRef> members;

    bool operator==(const CliqueReportEntry&) const = default;
};

struct TagCount {
    std::uint64_t n_cliques = 0;
    std::uint64_t n_sites = 0; // sites counted once across the tag's cliques

    bool operator==(const TagCount&) const = default;
};

struct CliqueReport {
    std::string tool_version;
    AnalysisConfig config;
    std::vector<CliqueReportEntry> cliques;
    std::map<std::string, CliqueStats> stats_by_kind; // "downloaded", "embedded"
    std::map<std::string, TagCount> tag_summary;      // "anti_adblocker", "tracker", "other"
    FilterAudit audit;

    bool operator==(const CliqueReport&) const = default;
};

// Full pipeline: dedup -> tokenize -> vectorize -> graph -> cliques ->
// site filter -> profile -> classify. dump_graph_path, when set, writes the
// edge CSV next to the analysis.
CliqueReport analyze(const std::filesystem::path& corpus_dir, const AnalysisConfig& config,
                     const SignatureRuleSet& rules,
                     const std::optional<std::filesystem::path>& dump_graph_path = std::nullopt);

// Deterministic JSON (sorted keys). parse(emit(r)) == r.
std::string report_to_json_text(const CliqueReport& report);
CliqueReport report_from_json_text(std::string_view text);
CliqueReport load_report(const std::filesystem::path& path);
void write_report(const CliqueReport& report, const std::filesystem::path& path);

struct CategoryTable {
    std::vector<std::pair<std::string, double>> rows; // (category, percent), percent over categorized
    std::string basis;                                // "anti_adblock_sites" or "all_sites"
    std::uint64_t categorized_sites = 0;
    std::uint64_t uncategorized_sites = 0;
};

// Distribution of tagged sites over a user-supplied "site_id,category" CSV.
// Unmapped sites go to the uncategorized footer and are excluded from the
// percentage basis.
CategoryTable categorize(const CliqueReport& report, const std::filesystem::path& category_csv,
                         const std::string& basis = "anti_adblock_sites");
void write_category_csv(const CategoryTable& table, std::ostream& out);

struct TopCliqueRow {
    std::string clique_id;
    std::uint64_t n_sites = 0;
    ScriptKind kind = ScriptKind::embedded;
    std::vector<std::string> source_fqdns;
    std::vector<std::string> top_keywords; // up to 5
};

// Top-k cliques by distinct-site count (all of them when k exceeds the count).
std::vector<TopCliqueRow> top_cliques(const CliqueReport& report, std::uint64_t k);
void write_top_csv(const std::vector<TopCliqueRow>& rows, std::ostream& out);

} // namespace scriptclique
