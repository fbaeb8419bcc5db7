#include "scriptclique/cliques.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "scriptclique/errors.hpp"

namespace scriptclique {

namespace {

using IndexSet = std::vector<int>; // sorted node indices

IndexSet intersect(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    out.reserve(std::min(a.size(), b.size()));
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::size_t intersection_size(const IndexSet& a, const IndexSet& b) {
    std::size_t count = 0;
    auto it = a.begin();
    auto jt = b.begin();
    while (it != a.end() && jt != b.end()) {
        if (*it < *jt) {
            ++it;
        } else if (*jt < *it) {
            ++jt;
        } else {
            ++count;
            ++it;
            ++jt;
        }
    }
    return count;
}

struct Enumerator {
    const std::vector<IndexSet>& adj;
    std::uint64_t budget;
    std::uint64_t steps = 0;
    std::vector<int> current;
    std::vector<IndexSet>* out;

    void expand(IndexSet p, IndexSet x) {
        if (++steps > budget) {
            throw BudgetExceededError(
                "maximal clique enumeration exceeded its step budget (" +
                std::to_string(budget) + " steps); raise the budget or reduce the graph");
        }
        if (p.empty() && x.empty()) {
            if (current.size() >= 2) out->push_back(current);
            return;
        }
        // Pivot: vertex of P ∪ X with the most neighbours in P.
        int pivot = -1;
        std::size_t best = 0;
        bool first = true;
        for (const IndexSet* side : {&p, &x}) {
            for (int u : *side) {
                const std::size_t deg = intersection_size(adj[u], p);
                if (first || deg > best) {
                    pivot = u;
                    best = deg;
                    first = false;
                }
            }
        }
        IndexSet candidates;
        std::set_difference(p.begin(), p.end(), adj[pivot].begin(), adj[pivot].end(),
                            std::back_inserter(candidates));
        for (int v : candidates) {
            current.push_back(v);
            expand(intersect(p, adj[v]), intersect(x, adj[v]));
            current.pop_back();
            p.erase(std::lower_bound(p.begin(), p.end(), v));
            auto pos = std::lower_bound(x.begin(), x.end(), v);
            x.insert(pos, v);
        }
    }
};

// Degeneracy ordering: repeatedly remove a minimum-degree vertex.
std::vector<int> degeneracy_order(const std::vector<IndexSet>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> degree(n);
    int max_degree = 0;
    for (int v = 0; v < n; ++v) {
        degree[v] = static_cast<int>(adj[v].size());
        max_degree = std::max(max_degree, degree[v]);
    }
    std::vector<std::set<int>> buckets(max_degree + 1);
    for (int v = 0; v < n; ++v) buckets[degree[v]].insert(v);

    std::vector<int> order;
    order.reserve(n);
    std::vector<bool> removed(n, false);
    for (int round = 0; round < n; ++round) {
        int d = 0;
        while (buckets[d].empty()) ++d;
        const int v = *buckets[d].begin();
        buckets[d].erase(buckets[d].begin());
        removed[v] = true;
        order.push_back(v);
        for (int u : adj[v]) {
            if (removed[u]) continue;
            buckets[degree[u]].erase(u);
            --degree[u];
            buckets[degree[u]].insert(u);
        }
    }
    return order;
}

} // namespace

std::vector<Clique> enumerate_maximal_cliques(const SimilarityGraph& graph,
                                              CliqueEnumLimits limits) {
    const int n = static_cast<int>(graph.nodes.size());
    std::vector<IndexSet> adj(n);
    std::unordered_map<std::string, double> edge_score;
    edge_score.reserve(graph.edges.size());
    for (const auto& edge : graph.edges) {
        const int a = static_cast<int>(graph.node_index.at(edge.a));
        const int b = static_cast<int>(graph.node_index.at(edge.b));
        adj[a].push_back(b);
        adj[b].push_back(a);
        edge_score.emplace(edge.a + "|" + edge.b, edge.score);
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());

    std::vector<IndexSet> raw;
    Enumerator en{adj, limits.max_steps, 0, {}, &raw};
    const std::vector<int> order = degeneracy_order(adj);
    std::vector<int> rank(n);
    for (int i = 0; i < n; ++i) rank[order[i]] = i;
    for (int v : order) {
        IndexSet p, x;
        for (int u : adj[v]) {
            (rank[u] > rank[v] ? p : x).push_back(u);
        }
        en.current.assign(1, v);
        en.expand(std::move(p), std::move(x));
    }

    std::vector<Clique> cliques;
    cliques.reserve(raw.size());
    for (auto& members : raw) {
        Clique clique;
        clique.kind = graph.nodes[members.front()].kind;
        for (int idx : members) {
            const GraphNode& node = graph.nodes[idx];
            clique.node_ids.push_back(node.node_id);
            clique.sites.insert(clique.sites.end(), node.sites.begin(), node.sites.end());
        }
        std::sort(clique.node_ids.begin(), clique.node_ids.end());
        std::sort(clique.sites.begin(), clique.sites.end());
        clique.sites.erase(std::unique(clique.sites.begin(), clique.sites.end()),
                           clique.sites.end());
        clique.min_internal_score = 1.0;
        for (std::size_t i = 0; i < clique.node_ids.size(); ++i) {
            for (std::size_t j = i + 1; j < clique.node_ids.size(); ++j) {
                clique.min_internal_score = std::min(
                    clique.min_internal_score,
                    edge_score.at(clique.node_ids[i] + "|" + clique.node_ids[j]));
            }
        }
        cliques.push_back(std::move(clique));
    }

    std::sort(cliques.begin(), cliques.end(), [](const Clique& a, const Clique& b) {
        if (a.node_ids.size() != b.node_ids.size()) {
            return a.node_ids.size() > b.node_ids.size();
        }
        return a.node_ids < b.node_ids;
    });
    char buf[32];
    for (std::size_t i = 0; i < cliques.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "c%05zu", i);
        cliques[i].clique_id = buf;
    }
    return cliques;
}

std::vector<Clique> filter_by_sites(std::vector<Clique> cliques, const AnalysisConfig& config) {
    std::erase_if(cliques, [&](const Clique& c) {
        return c.sites.size() < static_cast<std::size_t>(config.min_clique_sites);
    });
    return cliques;
}

CliqueStats clique_stats(const std::vector<Clique>& cliques) {
    CliqueStats stats;
    stats.n_cliques = cliques.size();
    if (cliques.empty()) return stats;
    double sum = 0.0;
    for (const auto& c : cliques) {
        sum += static_cast<double>(c.sites.size());
        stats.max_sites = std::max<std::uint64_t>(stats.max_sites, c.sites.size());
    }
    stats.mean_sites = sum / static_cast<double>(cliques.size());
    double sq = 0.0;
    for (const auto& c : cliques) {
        const double d = static_cast<double>(c.sites.size()) - stats.mean_sites;
        sq += d * d;
    }
    stats.std_sites = std::sqrt(sq / static_cast<double>(cliques.size()));
    return stats;
}

} // namespace scriptclique
