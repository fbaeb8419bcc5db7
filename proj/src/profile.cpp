#include "scriptclique/profile.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scriptclique/errors.hpp"
#include "scriptclique/urls.hpp"

namespace scriptclique {

using nlohmann::json;

const char* to_string(CliqueTag tag) {
    switch (tag) {
    case CliqueTag::anti_adblocker: return "anti_adblocker";
    case CliqueTag::tracker: return "tracker";
    default: return "other";
    }
}

std::optional<CliqueTag> clique_tag_from_string(std::string_view text) {
    if (text == "anti_adblocker") return CliqueTag::anti_adblocker;
    if (text == "tracker") return CliqueTag::tracker;
    if (text == "other") return CliqueTag::other;
    return std::nullopt;
}

namespace {

inline bool is_host_char(unsigned char c) {
    return std::isalnum(c) || c == '.' || c == '-';
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

json terms_to_json(const std::vector<std::pair<std::string, double>>& terms) {
    json out = json::object();
    for (const auto& [term, weight] : terms) out[term] = weight;
    return out;
}

std::vector<std::pair<std::string, double>> terms_from_json(const json& j, const char* key) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [term, weight] : j.at(key).items()) {
        const double w = weight.get<double>();
        if (w <= 0) throw SchemaError(std::string(key) + ": weights must be positive");
        out.emplace_back(term, w);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

std::vector<std::string> extract_fqdns(std::string_view content) {
    std::set<std::string> hosts;
    std::size_t i = 0;
    while (i + 1 < content.size()) {
        if (content[i] != '/' || content[i + 1] != '/') {
            ++i;
            continue;
        }
        std::size_t j = i + 2;
        while (j < content.size() && is_host_char(static_cast<unsigned char>(content[j]))) ++j;
        std::string host = lowercase(content.substr(i + 2, j - (i + 2)));
        while (!host.empty() && (host.back() == '.' || host.back() == '-')) host.pop_back();
        if (!host.empty() && plausible_fqdn(host)) hosts.insert(host);
        i = std::max(j, i + 2);
    }
    return {hosts.begin(), hosts.end()};
}

SignatureRuleSet SignatureRuleSet::builtin_default() {
    static const char* kDefault = R"({
  "version": "1",
  "anti_adblock_terms": {
    "adblock": 2.0,
    "blockadblock": 3.0,
    "adsbox": 2.0,
    "bait": 2.0,
    "offsetHeight": 1.0,
    "offsetWidth": 1.0,
    "clientHeight": 1.0,
    "getComputedStyle": 1.0,
    "display": 0.5,
    "whitelist": 1.0,
    "disable": 1.0
  },
  "tracker_terms": {
    "cookie": 1.0,
    "uid": 1.0,
    "pixel": 1.0,
    "track": 1.0,
    "beacon": 1.0,
    "utm": 0.5,
    "fingerprint": 1.5
  },
  "thresholds": {
    "anti_adblocker": 3.0,
    "tracker": 3.0
  }
})";
    return from_json_text(kDefault);
}

SignatureRuleSet SignatureRuleSet::from_json_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("signature ruleset is not valid JSON: ") + e.what());
    }
    SignatureRuleSet rules;
    try {
        rules.version = doc.at("version").get<std::string>();
        rules.anti_adblock_terms = terms_from_json(doc, "anti_adblock_terms");
        rules.tracker_terms = terms_from_json(doc, "tracker_terms");
        rules.anti_adblock_threshold = doc.at("thresholds").at("anti_adblocker").get<double>();
        rules.tracker_threshold = doc.at("thresholds").at("tracker").get<double>();
    } catch (const json::exception& e) {
        throw SchemaError(std::string("signature ruleset field error: ") + e.what());
    }
    if (rules.anti_adblock_threshold <= 0 || rules.tracker_threshold <= 0) {
        throw SchemaError("signature ruleset: thresholds must be positive");
    }
    return rules;
}

SignatureRuleSet SignatureRuleSet::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot read signature ruleset: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::string SignatureRuleSet::to_json_text() const {
    json doc;
    doc["version"] = version;
    doc["anti_adblock_terms"] = terms_to_json(anti_adblock_terms);
    doc["tracker_terms"] = terms_to_json(tracker_terms);
    doc["thresholds"]["anti_adblocker"] = anti_adblock_threshold;
    doc["thresholds"]["tracker"] = tracker_threshold;
    return doc.dump(2) + "\n";
}

CliqueProfile profile_clique(const Clique& clique, const SimilarityGraph& graph,
                             const CorpusManifest& manifest,
                             const std::unordered_map<std::string, KeywordVector>& vectors,
                             const VocabularyStats& stats) {
    CliqueProfile profile;
    profile.clique_id = clique.clique_id;

    std::set<std::string> sources;
    std::set<std::string> externals;
    std::map<std::uint32_t, double> weight_sums;
    std::size_t n_nodes = 0;

    for (const auto& node_id : clique.node_ids) {
        const GraphNode* node = graph.find_node(node_id);
        if (node == nullptr) throw Error("clique references unknown node " + node_id);
        ++n_nodes;
        for (const auto& script_id : node->member_scripts) {
            const ScriptRecord* rec = manifest.find_script(script_id);
            if (rec == nullptr) throw Error("node references unknown script " + script_id);
            if (rec->source_url) {
                if (auto host = url_host(*rec->source_url)) sources.insert(*host);
            }
            for (auto& fqdn : extract_fqdns(read_script_content(manifest, *rec))) {
                externals.insert(std::move(fqdn));
            }
        }
        // Keyword profile averages one vector per node: merged members are
        // identical or same-URL copies and should not be double counted.
        const KeywordVector& vec = vectors.at(node->rep_script_id);
        for (const auto& [term_id, weight] : vec.weights) {
            weight_sums[term_id] += weight;
        }
    }

    profile.source_fqdns.assign(sources.begin(), sources.end());
    profile.external_fqdns.assign(externals.begin(), externals.end());

    std::vector<std::pair<std::string, double>> keywords;
    keywords.reserve(weight_sums.size());
    for (const auto& [term_id, sum] : weight_sums) {
        keywords.emplace_back(stats.terms[term_id], sum / static_cast<double>(n_nodes));
    }
    std::sort(keywords.begin(), keywords.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (keywords.size() > 25) keywords.resize(25);
    profile.top_keywords = std::move(keywords);
    return profile;
}

void classify_clique(CliqueProfile& profile,
                     const std::vector<std::pair<std::string, std::string>>& member_contents,
                     const SignatureRuleSet& rules) {
    profile.tag_evidence.clear();

    struct Signature {
        const char* name;
        const std::vector<std::pair<std::string, double>>* terms;
        double threshold;
        double total = 0.0;
        std::set<std::string> matched;
    };
    Signature sigs[2] = {
        {"anti_adblock", &rules.anti_adblock_terms, rules.anti_adblock_threshold, 0.0, {}},
        {"tracker", &rules.tracker_terms, rules.tracker_threshold, 0.0, {}},
    };

    std::vector<std::pair<const std::string*, std::string>> lowered;
    lowered.reserve(member_contents.size());
    for (const auto& [script_id, content] : member_contents) {
        lowered.emplace_back(&script_id, lowercase(content));
    }

    for (auto& sig : sigs) {
        for (const auto& [term, weight] : *sig.terms) {
            const std::string needle = lowercase(term);
            bool matched_any = false;
            for (const auto& [script_id, content] : lowered) {
                if (content.find(needle) == std::string::npos) continue;
                matched_any = true;
                profile.tag_evidence.push_back({sig.name, term, *script_id});
            }
            if (matched_any && sig.matched.insert(term).second) sig.total += weight;
        }
    }
    std::sort(profile.tag_evidence.begin(), profile.tag_evidence.end(),
              [](const TagEvidence& a, const TagEvidence& b) {
                  return std::tie(a.signature_name, a.matched_term, a.script_id) <
                         std::tie(b.signature_name, b.matched_term, b.script_id);
              });

    if (sigs[0].total >= sigs[0].threshold) {
        profile.tag = CliqueTag::anti_adblocker;
    } else if (sigs[1].total >= sigs[1].threshold) {
        profile.tag = CliqueTag::tracker;
    } else {
        profile.tag = CliqueTag::other;
    }
}

std::vector<VendorRow> attribute_vendors(const std::vector<Clique>& cliques,
                                         const std::vector<CliqueProfile>& profiles) {
    std::unordered_map<std::string, const Clique*> clique_by_id;
    for (const auto& c : cliques) clique_by_id.emplace(c.clique_id, &c);

    std::map<std::string, std::pair<std::set<std::string>, std::vector<std::string>>> rows;
    for (const auto& profile : profiles) {
        if (profile.tag != CliqueTag::anti_adblocker) continue;
        auto it = clique_by_id.find(profile.clique_id);
        if (it == clique_by_id.end()) continue;
        const Clique& clique = *it->second;

        std::set<std::string> domains;
        for (const auto& fqdn : profile.source_fqdns) domains.insert(registrable_domain(fqdn));
        if (domains.empty()) {
            std::set<std::string> external;
            for (const auto& fqdn : profile.external_fqdns) {
                external.insert(registrable_domain(fqdn));
            }
            if (external.size() == 1) {
                domains.insert(*external.begin());
            } else {
                domains.insert("unattributed");
            }
        }
        for (const auto& domain : domains) {
            auto& row = rows[domain];
            row.first.insert(clique.sites.begin(), clique.sites.end());
            row.second.push_back(clique.clique_id);
        }
    }

    std::vector<VendorRow> out;
    out.reserve(rows.size());
    for (auto& [domain, data] : rows) {
        VendorRow row;
        row.domain = domain;
        row.n_sites = data.first.size();
        std::sort(data.second.begin(), data.second.end());
        row.clique_ids = std::move(data.second);
        out.push_back(std::move(row));
    }
    std::sort(out.begin(), out.end(), [](const VendorRow& a, const VendorRow& b) {
        if (a.n_sites != b.n_sites) return a.n_sites > b.n_sites;
        return a.domain < b.domain;
    });
    return out;
}

} // namespace scriptclique
