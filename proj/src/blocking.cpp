#include "scriptclique/blocking.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "scriptclique/profile.hpp"

namespace scriptclique {

std::vector<CounterblockRow> counterblock_report(const CliqueReport& report,
                                                 const std::vector<NamedFilterList>& lists) {
    std::vector<Clique> cliques;
    std::vector<CliqueProfile> profiles;
    std::map<std::string, const CliqueReportEntry*> entry_by_id;
    for (const auto& entry : report.cliques) {
        cliques.push_back(entry.clique);
        profiles.push_back(entry.profile);
        entry_by_id.emplace(entry.clique.clique_id, &entry);
    }
    const auto vendors = attribute_vendors(cliques, profiles);

    std::vector<CounterblockRow> rows;
    for (const auto& vendor : vendors) {
        for (const auto& list : lists) {
            CounterblockRow row;
            row.vendor_domain = vendor.domain;
            row.list_name = list.name;

            bool any_request = false;
            bool blocked = false;
            std::string block_witness;
            std::string exception_witness;
            for (const auto& clique_id : vendor.clique_ids) {
                const CliqueReportEntry* entry = entry_by_id.at(clique_id);
                for (const auto& member : entry->members) {
                    if (!member.source_url) continue;
                    any_request = true;
                    RequestContext ctx;
                    ctx.url = *member.source_url;
                    ctx.page_site = member.site_id;
                    ctx.resource_type = RequestContext::Resource::script;
                    const auto result = decide(list.rules, ctx);
                    if (result.decision == Decision::blocked) {
                        blocked = true;
                        if (block_witness.empty()) block_witness = result.witness->raw;
                    } else if (result.witness != nullptr && exception_witness.empty()) {
                        exception_witness = result.witness->raw;
                    }
                }
                if (blocked) break;
            }

            if (!any_request) {
                row.decision = "not-applicable";
            } else if (blocked) {
                row.decision = "blocked";
                row.witness_rule = block_witness;
            } else {
                row.decision = "allowed";
                row.witness_rule = exception_witness;
            }
            rows.push_back(std::move(row));
        }
    }
    std::sort(rows.begin(), rows.end(), [](const CounterblockRow& a, const CounterblockRow& b) {
        return std::tie(a.vendor_domain, a.list_name) < std::tie(b.vendor_domain, b.list_name);
    });
    return rows;
}

void write_counterblock_csv(const std::vector<CounterblockRow>& rows, std::ostream& out) {
    out << "vendor_domain,list_name,decision,witness_rule\n";
    for (const auto& row : rows) {
        // Witness rules may contain commas ($ options); quote the field.
        out << row.vendor_domain << ',' << row.list_name << ',' << row.decision << ",\""
            << row.witness_rule << "\"\n";
    }
}

} // namespace scriptclique
