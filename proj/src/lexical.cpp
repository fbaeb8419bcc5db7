#include "scriptclique/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace scriptclique {

namespace {

const std::unordered_set<std::string_view>& reserved_words() {
    static const std::unordered_set<std::string_view> words = {
        "break", "case", "catch", "class", "const", "continue", "debugger", "default",
        "delete", "do", "else", "export", "extends", "finally", "for", "function", "if",
        "import", "in", "instanceof", "let", "new", "return", "static", "super", "switch",
        "this", "throw", "try", "typeof", "var", "void", "while", "with", "yield",
        "true", "false", "null", "undefined",
    };
    return words;
}

inline bool is_token_char(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '$';
}

inline bool is_letter(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

} // namespace

bool is_reserved_word(std::string_view term) { return reserved_words().count(term) > 0; }

TokenBag tokenize(std::string_view content, std::string script_id) {
    TokenBag bag;
    bag.script_id = std::move(script_id);
    std::size_t i = 0;
    const std::size_t n = content.size();
    while (i < n) {
        if (!is_token_char(static_cast<unsigned char>(content[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        bool has_letter = false;
        while (j < n && is_token_char(static_cast<unsigned char>(content[j]))) {
            has_letter = has_letter || is_letter(static_cast<unsigned char>(content[j]));
            ++j;
        }
        std::string_view token = content.substr(i, j - i);
        if (has_letter && !is_reserved_word(token)) {
            ++bag.counts[std::string(token)];
            ++bag.total_terms;
        }
        i = j;
    }
    return bag;
}

VocabularyStats build_vocabulary(const std::vector<const TokenBag*>& bags) {
    if (bags.empty()) throw std::invalid_argument("build_vocabulary: no documents");
    VocabularyStats stats;
    stats.n_docs = bags.size();
    std::unordered_map<std::string, std::uint32_t> df;
    for (const TokenBag* bag : bags) {
        for (const auto& [term, count] : bag->counts) {
            (void)count;
            ++df[term];
        }
    }
    stats.terms.reserve(df.size());
    for (const auto& [term, freq] : df) {
        (void)freq;
        stats.terms.push_back(term);
    }
    std::sort(stats.terms.begin(), stats.terms.end());
    stats.doc_freq.resize(stats.terms.size());
    stats.term_ids.reserve(stats.terms.size());
    for (std::uint32_t id = 0; id < stats.terms.size(); ++id) {
        stats.term_ids.emplace(stats.terms[id], id);
        stats.doc_freq[id] = df.at(stats.terms[id]);
    }
    return stats;
}

VocabularyStats build_vocabulary(const std::vector<TokenBag>& bags) {
    std::vector<const TokenBag*> ptrs;
    ptrs.reserve(bags.size());
    for (const auto& bag : bags) ptrs.push_back(&bag);
    return build_vocabulary(ptrs);
}

KeywordVector tfidf_vector(const TokenBag& bag, const VocabularyStats& stats) {
    KeywordVector vec;
    vec.script_id = bag.script_id;
    if (bag.total_terms == 0) return vec;
    vec.weights.reserve(bag.counts.size());
    const double n_docs = static_cast<double>(stats.n_docs);
    for (const auto& [term, count] : bag.counts) {
        auto id = stats.term_id(term);
        if (!id) {
            throw std::invalid_argument("tfidf_vector: term '" + term + "' not in vocabulary");
        }
        const double tf = static_cast<double>(count) / static_cast<double>(bag.total_terms);
        const double idf = std::log((1.0 + n_docs) / (1.0 + stats.doc_freq[*id])) + 1.0;
        vec.weights.emplace_back(*id, tf * idf);
    }
    std::sort(vec.weights.begin(), vec.weights.end());
    double sq = 0.0;
    for (const auto& [id, w] : vec.weights) {
        (void)id;
        sq += w * w;
    }
    vec.norm = std::sqrt(sq);
    return vec;
}

double cosine_similarity(const KeywordVector& u, const KeywordVector& v) {
    if (u.norm == 0.0 || v.norm == 0.0) return 0.0;
    double dot = 0.0;
    auto it = u.weights.begin();
    auto jt = v.weights.begin();
    while (it != u.weights.end() && jt != v.weights.end()) {
        if (it->first < jt->first) {
            ++it;
        } else if (jt->first < it->first) {
            ++jt;
        } else {
            dot += it->second * jt->second;
            ++it;
            ++jt;
        }
    }
    const double sim = dot / (u.norm * v.norm);
    return std::clamp(sim, 0.0, 1.0);
}

} // namespace scriptclique
