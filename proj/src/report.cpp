#include "scriptclique/report.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scriptclique/errors.hpp"
#include "scriptclique/version.hpp"

namespace scriptclique {

using nlohmann::json;

namespace {

json config_to_json(const AnalysisConfig& config) {
    return {
        {"similarity_threshold", config.similarity_threshold},
        {"wordcount_ratio_max", config.wordcount_ratio_max},
        {"min_clique_sites", config.min_clique_sites},
        {"min_tokens", config.min_tokens},
    };
}

AnalysisConfig config_from_json(const json& j) {
    AnalysisConfig config;
    config.similarity_threshold = j.at("similarity_threshold").get<double>();
    config.wordcount_ratio_max = j.at("wordcount_ratio_max").get<double>();
    config.min_clique_sites = j.at("min_clique_sites").get<int>();
    config.min_tokens = j.at("min_tokens").get<int>();
    return config;
}

json stats_to_json(const CliqueStats& stats) {
    return {
        {"n_cliques", stats.n_cliques},
        {"mean_sites", stats.mean_sites},
        {"std_sites", stats.std_sites},
        {"max_sites", stats.max_sites},
    };
}

CliqueStats stats_from_json(const json& j) {
    CliqueStats stats;
    stats.n_cliques = j.at("n_cliques").get<std::uint64_t>();
    stats.mean_sites = j.at("mean_sites").get<double>();
    stats.std_sites = j.at("std_sites").get<double>();
    stats.max_sites = j.at("max_sites").get<std::uint64_t>();
    return stats;
}

json audit_to_json(const FilterAudit& a) {
    return {
        {"n_scripts", a.n_scripts},
        {"n_excluded_small", a.n_excluded_small},
        {"n_merged_scripts", a.n_merged_scripts},
        {"n_nodes", a.n_nodes},
        {"n_total_pairs", a.n_total_pairs},
        {"cut_kind", a.cut_kind},
        {"cut_external_ref", a.cut_external_ref},
        {"cut_wordcount_ratio", a.cut_wordcount_ratio},
        {"skipped_zero_tokens", a.skipped_zero_tokens},
        {"n_compared", a.n_compared},
        {"n_edges", a.n_edges},
    };
}

FilterAudit audit_from_json(const json& j) {
    FilterAudit a;
    a.n_scripts = j.at("n_scripts").get<std::uint64_t>();
    a.n_excluded_small = j.at("n_excluded_small").get<std::uint64_t>();
    a.n_merged_scripts = j.at("n_merged_scripts").get<std::uint64_t>();
    a.n_nodes = j.at("n_nodes").get<std::uint64_t>();
    a.n_total_pairs = j.at("n_total_pairs").get<std::uint64_t>();
    a.cut_kind = j.at("cut_kind").get<std::uint64_t>();
    a.cut_external_ref = j.at("cut_external_ref").get<std::uint64_t>();
    a.cut_wordcount_ratio = j.at("cut_wordcount_ratio").get<std::uint64_t>();
    a.skipped_zero_tokens = j.at("skipped_zero_tokens").get<std::uint64_t>();
    a.n_compared = j.at("n_compared").get<std::uint64_t>();
    a.n_edges = j.at("n_edges").get<std::uint64_t>();
    return a;
}

json entry_to_json(const CliqueReportEntry& entry) {
    json je;
    je["clique_id"] = entry.clique.clique_id;
    je["node_ids"] = entry.clique.node_ids;
    je["sites"] = entry.clique.sites;
    je["kind"] = to_string(entry.clique.kind);
    je["min_internal_score"] = entry.clique.min_internal_score;
    je["source_fqdns"] = entry.profile.source_fqdns;
    je["external_fqdns"] = entry.profile.external_fqdns;
    je["top_keywords"] = json::array();
    for (const auto& [term, weight] : entry.profile.top_keywords) {
        je["top_keywords"].push_back({term, weight});
    }
    je["tag"] = to_string(entry.profile.tag);
    je["tag_evidence"] = json::array();
    for (const auto& ev : entry.profile.tag_evidence) {
        je["tag_evidence"].push_back({
            {"signature_name", ev.signature_name},
            {"matched_term", ev.matched_term},
            {"script_id", ev.script_id},
        });
    }
    je["overlaps_with"] = entry.overlaps_with;
    je["members"] = json::array();
    for (const auto& member : entry.members) {
        json jm = {
            {"script_id", member.script_id},
            {"site_id", member.site_id},
            {"content_hash", member.content_hash},
        };
        if (member.source_url) jm["source_url"] = *member.source_url;
        je["members"].push_back(std::move(jm));
    }
    return je;
}

CliqueReportEntry entry_from_json(const json& je) {
    CliqueReportEntry entry;
    entry.clique.clique_id = je.at("clique_id").get<std::string>();
    entry.clique.node_ids = je.at("node_ids").get<std::vector<std::string>>();
    entry.clique.sites = je.at("sites").get<std::vector<std::string>>();
    auto kind = script_kind_from_string(je.at("kind").get<std::string>());
    if (!kind) throw SchemaError("report clique: unknown kind");
    entry.clique.kind = *kind;
    entry.clique.min_internal_score = je.at("min_internal_score").get<double>();
    entry.profile.clique_id = entry.clique.clique_id;
    entry.profile.source_fqdns = je.at("source_fqdns").get<std::vector<std::string>>();
    entry.profile.external_fqdns = je.at("external_fqdns").get<std::vector<std::string>>();
    for (const auto& pair : je.at("top_keywords")) {
        entry.profile.top_keywords.emplace_back(pair.at(0).get<std::string>(),
                                                pair.at(1).get<double>());
    }
    auto tag = clique_tag_from_string(je.at("tag").get<std::string>());
    if (!tag) throw SchemaError("report clique: unknown tag");
    entry.profile.tag = *tag;
    for (const auto& ev : je.at("tag_evidence")) {
        entry.profile.tag_evidence.push_back({
            ev.at("signature_name").get<std::string>(),
            ev.at("matched_term").get<std::string>(),
            ev.at("script_id").get<std::string>(),
        });
    }
    entry.overlaps_with = je.at("overlaps_with").get<std::vector<std::string>>();
    for (const auto& jm : je.at("members")) {
        MemberRef member;
        member.script_id = jm.at("script_id").get<std::string>();
        member.site_id = jm.at("site_id").get<std::string>();
        member.content_hash = jm.at("content_hash").get<std::string>();
        if (jm.contains("source_url")) member.source_url = jm.at("source_url").get<std::string>();
        entry.members.push_back(std::move(member));
    }
    return entry;
}

} // namespace

CliqueReport analyze(const std::filesystem::path& corpus_dir, const AnalysisConfig& config,
                     const SignatureRuleSet& rules,
                     const std::optional<std::filesystem::path>& dump_graph_path) {
    CliqueReport report;
    report.tool_version = kVersion;
    report.config = config;

    PipelineData data = prepare_pipeline(load_corpus(corpus_dir), config);
    SimilarityGraph graph = graph_at_threshold(data, config.similarity_threshold);
    report.audit = graph.audit;

    if (dump_graph_path) {
        std::ofstream out(*dump_graph_path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write graph dump: " + dump_graph_path->string());
        dump_graph_csv(graph, out);
    }

    auto cliques = filter_by_sites(enumerate_maximal_cliques(graph), config);

    // overlaps_with among retained cliques: shared nodes.
    std::map<std::string, std::vector<std::string>> overlaps;
    for (std::size_t i = 0; i < cliques.size(); ++i) {
        for (std::size_t j = i + 1; j < cliques.size(); ++j) {
            std::vector<std::string> shared;
            std::set_intersection(cliques[i].node_ids.begin(), cliques[i].node_ids.end(),
                                  cliques[j].node_ids.begin(), cliques[j].node_ids.end(),
                                  std::back_inserter(shared));
            if (!shared.empty()) {
                overlaps[cliques[i].clique_id].push_back(cliques[j].clique_id);
                overlaps[cliques[j].clique_id].push_back(cliques[i].clique_id);
            }
        }
    }

    std::map<std::string, std::pair<std::uint64_t, std::set<std::string>>> by_tag;

    for (auto& clique : cliques) {
        CliqueReportEntry entry;
        entry.profile = profile_clique(clique, graph, data.manifest, data.vectors, data.stats);

        std::vector<std::pair<std::string, std::string>> contents;
        for (const auto& node_id : clique.node_ids) {
            const GraphNode* node = graph.find_node(node_id);
            for (const auto& script_id : node->member_scripts) {
                const ScriptRecord* rec = data.manifest.find_script(script_id);
                contents.emplace_back(script_id, read_script_content(data.manifest, *rec));
                MemberRef member;
                member.script_id = rec->id;
                member.site_id = rec->site_id;
                member.content_hash = rec->content_hash;
                member.source_url = rec->source_url;
                entry.members.push_back(std::move(member));
            }
        }
        std::sort(entry.members.begin(), entry.members.end(),
                  [](const MemberRef& a, const MemberRef& b) { return a.script_id < b.script_id; });
        classify_clique(entry.profile, contents, rules);

        auto& tag_acc = by_tag[to_string(entry.profile.tag)];
        ++tag_acc.first;
        tag_acc.second.insert(clique.sites.begin(), clique.sites.end());
        entry.overlaps_with = overlaps[clique.clique_id];
        std::sort(entry.overlaps_with.begin(), entry.overlaps_with.end());
        entry.clique = std::move(clique);
        report.cliques.push_back(std::move(entry));
    }

    for (const char* kind : {"downloaded", "embedded"}) {
        std::vector<Clique> list;
        for (const auto& entry : report.cliques) {
            if (to_string(entry.clique.kind) == std::string_view(kind)) {
                list.push_back(entry.clique);
            }
        }
        report.stats_by_kind[kind] = clique_stats(list);
    }
    for (const char* tag : {"anti_adblocker", "tracker", "other"}) {
        TagCount count;
        if (auto it = by_tag.find(tag); it != by_tag.end()) {
            count.n_cliques = it->second.first;
            count.n_sites = it->second.second.size();
        }
        report.tag_summary[tag] = count;
    }
    return report;
}

std::string report_to_json_text(const CliqueReport& report) {
    json doc;
    doc["tool_version"] = report.tool_version;
    doc["config"] = config_to_json(report.config);
    doc["cliques"] = json::array();
    for (const auto& entry : report.cliques) doc["cliques"].push_back(entry_to_json(entry));
    doc["stats_by_kind"] = json::object();
    for (const auto& [kind, stats] : report.stats_by_kind) {
        doc["stats_by_kind"][kind] = stats_to_json(stats);
    }
    doc["tag_summary"] = json::object();
    for (const auto& [tag, count] : report.tag_summary) {
        doc["tag_summary"][tag] = {{"n_cliques", count.n_cliques}, {"n_sites", count.n_sites}};
    }
    doc["audit"] = audit_to_json(report.audit);
    return doc.dump(2) + "\n";
}

CliqueReport report_from_json_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("report is not valid JSON: ") + e.what());
    }
    CliqueReport report;
    try {
        report.tool_version = doc.at("tool_version").get<std::string>();
        report.config = config_from_json(doc.at("config"));
        for (const auto& je : doc.at("cliques")) report.cliques.push_back(entry_from_json(je));
        for (const auto& [kind, js] : doc.at("stats_by_kind").items()) {
            report.stats_by_kind[kind] = stats_from_json(js);
        }
        for (const auto& [tag, jt] : doc.at("tag_summary").items()) {
            report.tag_summary[tag] = {jt.at("n_cliques").get<std::uint64_t>(),
                                       jt.at("n_sites").get<std::uint64_t>()};
        }
        report.audit = audit_from_json(doc.at("audit"));
    } catch (const json::exception& e) {
        throw SchemaError(std::string("report field error: ") + e.what());
    }
    return report;
}

CliqueReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot read report: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return report_from_json_text(buf.str());
}

void write_report(const CliqueReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write report: " + path.string());
    out << report_to_json_text(report);
}

CategoryTable categorize(const CliqueReport& report, const std::filesystem::path& category_csv,
                         const std::string& basis) {
    if (basis != "anti_adblock_sites" && basis != "all_sites") {
        throw std::invalid_argument("categorize: unknown basis " + basis);
    }
    std::ifstream in(category_csv, std::ios::binary);
    if (!in) throw SchemaError("cannot read category map: " + category_csv.string());
    std::map<std::string, std::string> category_of;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line == "site_id,category") continue;
        auto comma = line.find(',');
        if (comma == std::string::npos || comma == 0 || comma + 1 >= line.size()) {
            throw SchemaError("category map line " + std::to_string(line_no) +
                              ": expected 'site_id,category'");
        }
        category_of[line.substr(0, comma)] = line.substr(comma + 1);
    }

    std::set<std::string> sites;
    for (const auto& entry : report.cliques) {
        if (basis == "anti_adblock_sites" && entry.profile.tag != CliqueTag::anti_adblocker) {
            continue;
        }
        sites.insert(entry.clique.sites.begin(), entry.clique.sites.end());
    }

    CategoryTable table;
    table.basis = basis;
    std::map<std::string, std::uint64_t> counts;
    for (const auto& site : sites) {
        auto it = category_of.find(site);
        if (it == category_of.end()) {
            ++table.uncategorized_sites;
        } else {
            ++counts[it->second];
            ++table.categorized_sites;
        }
    }
    for (const auto& [category, count] : counts) {
        table.rows.emplace_back(category, 100.0 * static_cast<double>(count) /
                                              static_cast<double>(table.categorized_sites));
    }
    std::sort(table.rows.begin(), table.rows.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return table;
}

void write_category_csv(const CategoryTable& table, std::ostream& out) {
    out << "category,percent\n";
    char buf[32];
    for (const auto& [category, percent] : table.rows) {
        std::snprintf(buf, sizeof(buf), "%.2f", percent);
        out << category << ',' << buf << '\n';
    }
    out << "# basis," << table.basis << '\n';
    out << "# categorized_sites," << table.categorized_sites << '\n';
    out << "# uncategorized_sites," << table.uncategorized_sites << '\n';
}

std::vector<TopCliqueRow> top_cliques(const CliqueReport& report, std::uint64_t k) {
    std::vector<const CliqueReportEntry*> entries;
    entries.reserve(report.cliques.size());
    for (const auto& entry : report.cliques) entries.push_back(&entry);
    std::sort(entries.begin(), entries.end(),
              [](const CliqueReportEntry* a, const CliqueReportEntry* b) {
                  if (a->clique.sites.size() != b->clique.sites.size()) {
                      return a->clique.sites.size() > b->clique.sites.size();
                  }
                  return a->clique.clique_id < b->clique.clique_id;
              });
    std::vector<TopCliqueRow> rows;
    for (const auto* entry : entries) {
        if (rows.size() >= k) break;
        TopCliqueRow row;
        row.clique_id = entry->clique.clique_id;
        row.n_sites = entry->clique.sites.size();
        row.kind = entry->clique.kind;
        row.source_fqdns = entry->profile.source_fqdns;
        for (const auto& [term, weight] : entry->profile.top_keywords) {
            (void)weight;
            if (row.top_keywords.size() >= 5) break;
            row.top_keywords.push_back(term);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_top_csv(const std::vector<TopCliqueRow>& rows, std::ostream& out) {
    out << "clique_id,n_sites,kind,source_fqdns,top_keywords\n";
    for (const auto& row : rows) {
        out << row.clique_id << ',' << row.n_sites << ',' << to_string(row.kind) << ',';
        for (std::size_t i = 0; i < row.source_fqdns.size(); ++i) {
            if (i) out << ';';
            out << row.source_fqdns[i];
        }
        out << ',';
        for (std::size_t i = 0; i < row.top_keywords.size(); ++i) {
            if (i) out << ';';
            out << row.top_keywords[i];
        }
        out << '\n';
    }
}

} // namespace scriptclique
