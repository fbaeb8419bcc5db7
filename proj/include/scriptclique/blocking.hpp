#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "scriptclique/filters.hpp"
#include "scriptclique/report.hpp"

namespace scriptclique {

struct NamedFilterList {
    std::string name;
    std::vector<FilterRule> rules;
};

struct CounterblockRow {
    std::string vendor_domain;
    std::string list_name;
    std::string decision; // "blocked", "allowed", "not-applicable"
    std::string witness_rule; // raw rule text, empty when none
};

// For each anti-adblock vendor (registrable source domain) and each filter
// list: blocked iff any member script's fetch (source_url from its member
// site, resource_type=script) is blocked by the list. Embedded cliques with
// no source URLs are not-applicable. Rows sorted by (vendor, list).
std::vector<CounterblockRow> counterblock_report(const CliqueReport& report,
                                                 const std::vector<NamedFilterList>& lists);

// CSV: "vendor_domain,list_name,decision,witness_rule".
void write_counterblock_csv(const std::vector<CounterblockRow>& rows, std::ostream& out);

} // namespace scriptclique
