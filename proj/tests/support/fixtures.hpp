#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "scriptclique/corpus.hpp"

namespace scriptclique::testing {

// Self-deleting temp directory.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return dir_; }

private:
    std::filesystem::path dir_;
};

// Builds a corpus on disk record by record; ids are assigned sequentially.
class CorpusBuilder {
public:
    explicit CorpusBuilder(std::filesystem::path root);

    // Returns the new script id.
    std::string add_script(const std::string& site_id, ScriptKind kind,
                           const std::string& content,
                           const std::optional<std::string>& source_url = std::nullopt);

    // One page per site accumulating that site's scripts.
    CorpusManifest write();

    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path root_;
    CorpusManifest manifest_;
    std::map<std::string, std::vector<std::string>> site_scripts_;
    int next_id_ = 0;
};

struct PlantedFamily {
    std::string name;
    ScriptKind kind = ScriptKind::downloaded;
    std::set<std::string> sites;
    std::set<std::string> content_hashes; // fingerprint of the expected clique
    bool anti_flavored = false;
};

struct PlantedCorpus {
    std::filesystem::path root;
    std::vector<PlantedFamily> families;
};

// Five vocabulary-disjoint template families, `sites_per_family` sites each,
// per-site mutation <= 5% of tokens. Family 2 is downloaded and carries
// anti-adblock bait terms; families 0-2 downloaded, 3-4 embedded.
PlantedCorpus make_planted_corpus(const std::filesystem::path& root, unsigned seed = 7,
                                  int sites_per_family = 10, int tokens_per_script = 1000,
                                  double mutation_rate = 0.03);

// Mixed synthetic corpus for oracle comparisons: planted families of varying
// sizes and kinds, extref mix, same-URL and same-hash duplicate groups, plus
// unrelated singles. Roughly n_scripts records.
void make_mixed_corpus(const std::filesystem::path& root, int n_scripts = 200, unsigned seed = 11);

// Large corpus for the scale check: n_sites sites x scripts_per_site scripts,
// uneven sizes, both kinds, extref mix, a few cross-site duplicate families.
void make_scale_corpus(const std::filesystem::path& root, int n_sites = 500,
                       int scripts_per_site = 10, unsigned seed = 23);

} // namespace scriptclique::testing
