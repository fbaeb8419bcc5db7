#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scriptclique {

enum class RuleAction { block, exception };
enum class RuleAnchor { none, domain_anchor, start_anchor };

struct PatternAtom {
    enum class Kind { literal, wildcard, separator };
    Kind kind = Kind::literal;
    std::string text; // literal only

    bool operator==(const PatternAtom&) const = default;
};

// One parsed network rule from the supported filter-list subset:
// plain substrings, "|" start anchor, "||" domain anchor, "*", "^",
// "@@" exceptions, options $script / $third-party / $~third-party / $domain=.
struct FilterRule {
    std::string raw;
    RuleAction action = RuleAction::block;
    RuleAnchor anchor = RuleAnchor::none;
    std::vector<PatternAtom> pattern; // domain-anchor rules start with the anchored domain literal
    bool script_only = false;
    enum class Party { any, third, first };
    Party party = Party::any;
    std::vector<std::string> domains_include; // $domain= positives, lowercase
    std::vector<std::string> domains_exclude; // $domain= ~negatives, lowercase

    bool operator==(const FilterRule&) const = default;
};

struct RequestContext {
    enum class Resource { script, other };
    std::string url;       // absolute http(s) URL
    std::string page_site; // registrable domain of the embedding page
    Resource resource_type = Resource::script;
};

struct SkippedLine {
    std::size_t line_no = 0; // 1-based
    std::string reason;
};

struct ParsedFilterList {
    std::vector<FilterRule> rules;
    std::vector<SkippedLine> skipped;
};

// Parses the supported subset; everything else lands in `skipped` with a
// reason, never silently mis-matched.
ParsedFilterList parse_filter_list(std::string_view text);

// Single-rule match against a request. Host comparisons are case-insensitive,
// path matching is case-sensitive.
bool matches(const FilterRule& rule, const RequestContext& ctx);

enum class Decision { blocked, allowed };

struct DecideResult {
    Decision decision = Decision::allowed;
    const FilterRule* witness = nullptr; // first matching exception, else first matching block
};

// blocked iff some block rule matches and no exception rule matches.
DecideResult decide(const std::vector<FilterRule>& rules, const RequestContext& ctx);

} // namespace scriptclique
