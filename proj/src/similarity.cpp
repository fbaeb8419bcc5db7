#include "scriptclique/similarity.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>

#include "scriptclique/parallel.hpp"

namespace scriptclique {

namespace {

inline bool is_hostname_start(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

std::uint64_t pairs_of(std::uint64_t n) { return n * (n - 1) / 2; }

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

} // namespace

bool external_ref_scan(std::string_view content) {
    if (content.find("http://") != std::string_view::npos) return true;
    if (content.find("https://") != std::string_view::npos) return true;
    std::size_t pos = 0;
    while ((pos = content.find("//", pos)) != std::string_view::npos) {
        if (pos + 2 < content.size() && is_hostname_start(content[pos + 2])) return true;
        ++pos;
    }
    return false;
}

std::vector<GraphNode> build_nodes(const CorpusManifest& manifest,
                                   const std::unordered_map<std::string, TokenBag>& bags,
                                   const AnalysisConfig& config, FilterAudit* audit) {
    std::vector<const ScriptRecord*> analyzable;
    std::uint64_t excluded = 0;
    for (const auto& rec : manifest.scripts) {
        const TokenBag* bag = nullptr;
        if (auto it = bags.find(rec.id); it != bags.end()) bag = &it->second;
        if (rec.too_small() || bag == nullptr ||
            bag->total_terms < static_cast<std::uint64_t>(config.min_tokens)) {
            ++excluded;
            continue;
        }
        analyzable.push_back(&rec);
    }
    if (audit) {
        audit->n_scripts = manifest.scripts.size();
        audit->n_excluded_small = excluded;
    }

    UnionFind uf(analyzable.size());
    std::map<std::pair<int, std::string>, std::size_t> by_hash;
    std::map<std::string, std::size_t> by_url;
    for (std::size_t i = 0; i < analyzable.size(); ++i) {
        const auto& rec = *analyzable[i];
        auto hkey = std::make_pair(static_cast<int>(rec.kind), rec.content_hash);
        if (auto [it, inserted] = by_hash.emplace(hkey, i); !inserted) uf.unite(it->second, i);
        if (rec.kind == ScriptKind::downloaded && rec.source_url) {
            if (auto [it, inserted] = by_url.emplace(*rec.source_url, i); !inserted) {
                uf.unite(it->second, i);
            }
        }
    }

    std::map<std::size_t, std::vector<const ScriptRecord*>> groups;
    for (std::size_t i = 0; i < analyzable.size(); ++i) {
        groups[uf.find(i)].push_back(analyzable[i]);
    }

    std::vector<GraphNode> nodes;
    nodes.reserve(groups.size());
    std::uint64_t merged = 0;
    for (auto& [root, members] : groups) {
        (void)root;
        merged += members.size() - 1;
        GraphNode node;
        node.kind = members.front()->kind;
        const ScriptRecord* rep = members.front();
        for (const auto* rec : members) {
            node.member_scripts.push_back(rec->id);
            node.sites.push_back(rec->site_id);
            if (std::make_pair(rec->content_hash, rec->id) <
                std::make_pair(rep->content_hash, rep->id)) {
                rep = rec;
            }
        }
        std::sort(node.member_scripts.begin(), node.member_scripts.end());
        std::sort(node.sites.begin(), node.sites.end());
        node.sites.erase(std::unique(node.sites.begin(), node.sites.end()), node.sites.end());
        node.rep_script_id = rep->id;
        node.total_terms = bags.at(rep->id).total_terms;
        node.has_external_refs = external_ref_scan(read_script_content(manifest, *rep));
        nodes.push_back(std::move(node));
    }

    // Deterministic ids: per kind, ordered by the representative's (hash, id).
    std::sort(nodes.begin(), nodes.end(), [&](const GraphNode& a, const GraphNode& b) {
        auto ka = std::make_tuple(static_cast<int>(a.kind), manifest.find_script(a.rep_script_id)->content_hash, a.rep_script_id);
        auto kb = std::make_tuple(static_cast<int>(b.kind), manifest.find_script(b.rep_script_id)->content_hash, b.rep_script_id);
        return ka < kb;
    });
    int counters[2] = {0, 0};
    char buf[16];
    for (auto& node : nodes) {
        const int k = static_cast<int>(node.kind);
        std::snprintf(buf, sizeof(buf), "%c%05d", node.kind == ScriptKind::embedded ? 'e' : 'd',
                      counters[k]++);
        node.node_id = buf;
    }
    if (audit) {
        audit->n_merged_scripts = merged;
        audit->n_nodes = nodes.size();
    }
    return nodes;
}

void for_each_candidate_pair(const std::vector<GraphNode>& nodes, const AnalysisConfig& config,
                             const std::function<void(std::size_t, std::size_t)>& yield,
                             FilterAudit* audit) {
    const std::uint64_t n = nodes.size();
    std::map<std::pair<int, bool>, std::vector<std::size_t>> groups;
    std::uint64_t kind_counts[2] = {0, 0};
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        groups[{static_cast<int>(nodes[i].kind), nodes[i].has_external_refs}].push_back(i);
        ++kind_counts[static_cast<int>(nodes[i].kind)];
    }

    const std::uint64_t total_pairs = pairs_of(n);
    const std::uint64_t same_kind_pairs = pairs_of(kind_counts[0]) + pairs_of(kind_counts[1]);
    std::uint64_t group_pairs = 0;
    std::uint64_t skipped_zero = 0;
    std::uint64_t compared = 0;

    for (auto& [key, members] : groups) {
        (void)key;
        group_pairs += pairs_of(members.size());
        std::vector<std::size_t> nonzero;
        nonzero.reserve(members.size());
        for (std::size_t idx : members) {
            if (nodes[idx].total_terms > 0) nonzero.push_back(idx);
        }
        const std::uint64_t z = members.size() - nonzero.size();
        skipped_zero += pairs_of(z) + z * nonzero.size();

        std::sort(nonzero.begin(), nonzero.end(), [&](std::size_t a, std::size_t b) {
            return std::make_pair(nodes[a].total_terms, a) < std::make_pair(nodes[b].total_terms, b);
        });
        for (std::size_t i = 0; i < nonzero.size(); ++i) {
            const double limit =
                static_cast<double>(nodes[nonzero[i]].total_terms) * config.wordcount_ratio_max;
            for (std::size_t j = i + 1; j < nonzero.size(); ++j) {
                if (static_cast<double>(nodes[nonzero[j]].total_terms) > limit) break;
                yield(std::min(nonzero[i], nonzero[j]), std::max(nonzero[i], nonzero[j]));
                ++compared;
            }
        }
    }

    if (audit) {
        audit->n_total_pairs = total_pairs;
        audit->cut_kind = total_pairs - same_kind_pairs;
        audit->cut_external_ref = same_kind_pairs - group_pairs;
        audit->skipped_zero_tokens = skipped_zero;
        audit->cut_wordcount_ratio = group_pairs - skipped_zero - compared;
        audit->n_compared = compared;
    }
}

std::vector<std::pair<std::string, std::string>> candidate_pairs(
    const std::vector<GraphNode>& nodes, const AnalysisConfig& config) {
    std::vector<std::pair<std::string, std::string>> out;
    for_each_candidate_pair(nodes, config, [&](std::size_t i, std::size_t j) {
        std::string a = nodes[i].node_id;
        std::string b = nodes[j].node_id;
        if (b < a) std::swap(a, b);
        out.emplace_back(std::move(a), std::move(b));
    });
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<SimilarityEdge> score_candidate_pairs(
    const std::vector<GraphNode>& nodes,
    const std::unordered_map<std::string, KeywordVector>& vectors, const AnalysisConfig& config,
    FilterAudit* audit) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for_each_candidate_pair(nodes, config,
                            [&](std::size_t i, std::size_t j) { pairs.emplace_back(i, j); },
                            audit);

    std::vector<const KeywordVector*> node_vec(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        node_vec[i] = &vectors.at(nodes[i].rep_script_id);
    }

    std::vector<double> scores(pairs.size());
    parallel_chunks(pairs.size(), 0, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            scores[k] = cosine_similarity(*node_vec[pairs[k].first], *node_vec[pairs[k].second]);
        }
    });

    std::vector<SimilarityEdge> out;
    out.reserve(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        SimilarityEdge edge;
        edge.a = nodes[pairs[k].first].node_id;
        edge.b = nodes[pairs[k].second].node_id;
        if (edge.b < edge.a) std::swap(edge.a, edge.b);
        edge.score = scores[k];
        out.push_back(std::move(edge));
    }
    std::sort(out.begin(), out.end(), [](const SimilarityEdge& x, const SimilarityEdge& y) {
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    return out;
}

SimilarityGraph build_graph(const CorpusManifest& manifest,
                            const std::unordered_map<std::string, TokenBag>& bags,
                            const std::unordered_map<std::string, KeywordVector>& vectors,
                            const AnalysisConfig& config) {
    SimilarityGraph graph;
    graph.nodes = build_nodes(manifest, bags, config, &graph.audit);
    auto scored = score_candidate_pairs(graph.nodes, vectors, config, &graph.audit);
    for (auto& edge : scored) {
        if (edge.score >= config.similarity_threshold) graph.edges.push_back(std::move(edge));
    }
    graph.audit.n_edges = graph.edges.size();
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        graph.node_index.emplace(graph.nodes[i].node_id, i);
    }
    return graph;
}

void dump_graph_csv(const SimilarityGraph& graph, std::ostream& out) {
    out << "node_a,node_b,score\n";
    char buf[32];
    for (const auto& edge : graph.edges) {
        std::snprintf(buf, sizeof(buf), "%.9f", edge.score);
        out << edge.a << ',' << edge.b << ',' << buf << '\n';
    }
}

} // namespace scriptclique
