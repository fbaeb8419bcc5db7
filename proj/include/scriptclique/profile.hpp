#pragma once

#include <string>
#include <utility>
#include <vector>

#include "scriptclique/cliques.hpp"
#include "scriptclique/corpus.hpp"
#include "scriptclique/lexical.hpp"

namespace scriptclique {

enum class CliqueTag { anti_adblocker, tracker, other };

const char* to_string(CliqueTag tag);
std::optional<CliqueTag> clique_tag_from_string(std::string_view text);

struct TagEvidence {
    std::string signature_name; // "anti_adblock" or "tracker"
    std::string matched_term;
    std::string script_id;

    bool operator==(const TagEvidence&) const = default;
};

struct CliqueProfile {
    std::string clique_id;
    std::vector<std::string> source_fqdns;   // sorted unique, lowercase
    std::vector<std::string> external_fqdns; // sorted unique, lowercase
    std::vector<std::pair<std::string, double>> top_keywords; // <= 25, mean weight desc
    CliqueTag tag = CliqueTag::other;
    std::vector<TagEvidence> tag_evidence;

    bool operator==(const CliqueProfile&) const = default;
};

// Weighted signature terms standing in for manual review.
// Terms match case-insensitively as substrings of script content; a class is
// assigned when the summed weight of its distinct matched terms reaches the
// class threshold (anti_adblocker checked before tracker).
struct SignatureRuleSet {
    std::string version;
    std::vector<std::pair<std::string, double>> anti_adblock_terms;
    std::vector<std::pair<std::string, double>> tracker_terms;
    double anti_adblock_threshold = 3.0;
    double tracker_threshold = 3.0;

    static SignatureRuleSet builtin_default();
    static SignatureRuleSet from_json_text(std::string_view text);
    static SignatureRuleSet load(const std::filesystem::path& path);
    std::string to_json_text() const;
};

// Hostnames of every absolute or scheme-relative URL lexically present in the
// content, lowercased; implausible hostnames dropped. Sorted unique.
std::vector<std::string> extract_fqdns(std::string_view content);

// Provenance features of one clique; tag is left at `other`.
CliqueProfile profile_clique(const Clique& clique, const SimilarityGraph& graph,
                             const CorpusManifest& manifest,
                             const std::unordered_map<std::string, KeywordVector>& vectors,
                             const VocabularyStats& stats);

// Applies the ruleset over (script_id, content) pairs and sets tag/evidence.
void classify_clique(CliqueProfile& profile,
                     const std::vector<std::pair<std::string, std::string>>& member_contents,
                     const SignatureRuleSet& rules);

struct VendorRow {
    std::string domain; // registrable domain, or "unattributed"
    std::uint64_t n_sites = 0;
    std::vector<std::string> clique_ids;
};

// Groups anti_adblocker cliques by the registrable domain of their source
// FQDNs; embedded cliques attribute to their single external registrable
// domain when unambiguous, else to "unattributed". Rows sorted by
// (n_sites desc, domain asc).
std::vector<VendorRow> attribute_vendors(const std::vector<Clique>& cliques,
                                         const std::vector<CliqueProfile>& profiles);

} // namespace scriptclique
