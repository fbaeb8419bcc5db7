#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace scriptclique {

// Term counts of one script after reserved-word filtering.
struct TokenBag {
    std::string script_id;
    std::unordered_map<std::string, std::uint32_t> counts;
    std::uint64_t total_terms = 0;
};

// ES2015 keywords plus the boolean/null/undefined literals.
bool is_reserved_word(std::string_view term);

// Tokens are maximal runs of [A-Za-z0-9_$] containing at least one letter,
// case preserved; reserved words are dropped. Bytes outside ASCII act as
// separators, which also covers lossy UTF-8 input.
TokenBag tokenize(std::string_view content, std::string script_id = {});

// Corpus-wide document frequencies with an interned term table. Term ids are
// assigned in lexicographic term order, so they are deterministic.
struct VocabularyStats {
    std::uint64_t n_docs = 0;
    std::vector<std::string> terms;                         // id -> term
    std::unordered_map<std::string, std::uint32_t> term_ids; // term -> id
    std::vector<std::uint32_t> doc_freq;                    // by id

    std::optional<std::uint32_t> term_id(const std::string& term) const {
        auto it = term_ids.find(term);
        if (it == term_ids.end()) return std::nullopt;
        return it->second;
    }
    std::uint32_t doc_freq_of(const std::string& term) const {
        auto id = term_id(term);
        return id ? doc_freq[*id] : 0;
    }
};

// Throws std::invalid_argument on empty input.
VocabularyStats build_vocabulary(const std::vector<TokenBag>& bags);
VocabularyStats build_vocabulary(const std::vector<const TokenBag*>& bags);

// Sparse TF-IDF vector, entries sorted by term id, no zero entries.
struct KeywordVector {
    std::string script_id;
    std::vector<std::pair<std::uint32_t, double>> weights;
    double norm = 0.0;
};

// weight(t) = tf(t) * idf(t), tf = count/total, idf = ln((1+N)/(1+df)) + 1.
// Throws std::invalid_argument when a bag term is missing from stats.
KeywordVector tfidf_vector(const TokenBag& bag, const VocabularyStats& stats);

// dot(u,v) / (|u|*|v|), 0 when either norm is 0; clamped to [0,1].
double cosine_similarity(const KeywordVector& u, const KeywordVector& v);

} // namespace scriptclique
