#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace scriptclique {

enum class ScriptKind { embedded, downloaded };

const char* to_string(ScriptKind kind);
std::optional<ScriptKind> script_kind_from_string(std::string_view text);

// Outcome of fetching one page. code is meaningful for http_error only
// (0 stands for a transport-level failure that returned no status).
struct FetchStatus {
    enum class Kind { ok, http_error, timeout, dns_failure };
    Kind kind = Kind::ok;
    int code = 0;

    bool operator==(const FetchStatus&) const = default;
};

struct PageSnapshot {
    std::string site_id;   // registrable domain, lowercase
    std::string page_url;  // absolute URL as requested
    std::string fetched_at; // RFC 3339 UTC
    std::string html_path;  // relative to corpus root; empty when the fetch failed
    std::vector<std::string> script_ids;
    FetchStatus fetch_status;

    bool operator==(const PageSnapshot&) const = default;
};

// Scripts shorter than this carry no lexical signal and are excluded from
// analysis (stored regardless).
inline constexpr std::uint64_t kMinAnalyzableBytes = 8;

struct ScriptRecord {
    std::string id;
    std::string site_id;
    ScriptKind kind = ScriptKind::embedded;
    std::optional<std::string> source_url; // present iff kind == downloaded
    std::string content_path;              // relative to corpus root
    std::string content_hash;              // 64 lowercase hex chars (SHA-256)
    std::uint64_t byte_len = 0;

    bool too_small() const { return byte_len < kMinAnalyzableBytes; }
    bool operator==(const ScriptRecord&) const = default;
};

struct CorpusManifest {
    int corpus_version = 1;
    std::vector<PageSnapshot> pages;
    std::vector<ScriptRecord> scripts;
    std::string created_by;

    // Where the corpus lives on disk; set by load_corpus, not serialized.
    std::filesystem::path root_dir;

    const ScriptRecord* find_script(std::string_view id) const;

    bool operator==(const CorpusManifest& other) const {
        return corpus_version == other.corpus_version && pages == other.pages &&
               scripts == other.scripts && created_by == other.created_by;
    }
};

// Loads <root>/manifest.json, checks the schema invariants and verifies every
// content file against its recorded digest.
// Throws CorpusNotFoundError / SchemaError / IntegrityError.
CorpusManifest load_corpus(const std::filesystem::path& root_dir);

// Writes <root>/manifest.json (creates the directory). Content files are the
// caller's business; load_corpus(write_corpus(m)) == m when they exist.
void write_corpus(const CorpusManifest& manifest, const std::filesystem::path& root_dir);

// Collapses scripts with identical (content_hash, kind) within one site down
// to a single record and remaps page script_ids accordingly. Cross-site copies
// survive; same-URL identity across sites is applied later at graph-node
// construction. Idempotent.
CorpusManifest dedup_scripts(CorpusManifest manifest);

// Reads the bytes behind a script record, verifying nothing.
std::string read_script_content(const CorpusManifest& manifest, const ScriptRecord& record);

// Relative content path used by the corpus layout for a given hash.
std::string script_content_rel_path(std::string_view content_hash);

} // namespace scriptclique
