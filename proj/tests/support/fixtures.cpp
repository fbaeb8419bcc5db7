#include "support/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <unistd.h>

#include "scriptclique/sha256.hpp"

namespace scriptclique::testing {

namespace {

std::string two_digits(int n) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02d", n);
    return buf;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    out.reserve(tokens.size() * 8);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        out += tokens[i];
        out += (i % 10 == 9) ? ";\n" : "; ";
    }
    return out;
}

} // namespace

TempDir::TempDir() {
    auto base = std::filesystem::temp_directory_path();
    for (int attempt = 0;; ++attempt) {
        auto candidate = base / ("scriptclique_test_" + std::to_string(::getpid()) + "_" +
                                 std::to_string(attempt));
        std::error_code ec;
        if (std::filesystem::create_directories(candidate, ec)) {
            dir_ = candidate;
            return;
        }
    }
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
}

CorpusBuilder::CorpusBuilder(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_ / "scripts");
    manifest_.created_by = "scriptclique tests";
    manifest_.root_dir = root_;
}

std::string CorpusBuilder::add_script(const std::string& site_id, ScriptKind kind,
                                      const std::string& content,
                                      const std::optional<std::string>& source_url) {
    ScriptRecord rec;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "s%06d", next_id_++);
    rec.id = buf;
    rec.site_id = site_id;
    rec.kind = kind;
    rec.source_url = source_url;
    rec.content_hash = sha256_hex(content);
    rec.content_path = script_content_rel_path(rec.content_hash);
    rec.byte_len = content.size();
    const auto path = root_ / rec.content_path;
    if (!std::filesystem::exists(path)) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
    }
    site_scripts_[site_id].push_back(rec.id);
    manifest_.scripts.push_back(std::move(rec));
    return buf;
}

CorpusManifest CorpusBuilder::write() {
    manifest_.pages.clear();
    for (const auto& [site_id, script_ids] : site_scripts_) {
        PageSnapshot page;
        page.site_id = site_id;
        page.page_url = "https://" + site_id + "/";
        page.fetched_at = "2026-01-01T00:00:00Z";
        const auto dir = root_ / "pages" / site_id;
        std::filesystem::create_directories(dir);
        page.html_path = "pages/" + site_id + "/0.html";
        std::ofstream html(root_ / page.html_path, std::ios::binary | std::ios::trunc);
        html << "<html><body>" << site_id << "</body></html>";
        page.script_ids = script_ids;
        page.fetch_status = {FetchStatus::Kind::ok, 0};
        manifest_.pages.push_back(std::move(page));
    }
    write_corpus(manifest_, root_);
    return manifest_;
}

PlantedCorpus make_planted_corpus(const std::filesystem::path& root, unsigned seed,
                                  int sites_per_family, int tokens_per_script,
                                  double mutation_rate) {
    CorpusBuilder builder(root);
    PlantedCorpus planted;
    planted.root = root;

    const int n_families = 5;
    const int vocab_size = 100;
    const int anti_family = 2;
    std::mt19937 rng(seed);

    for (int f = 0; f < n_families; ++f) {
        PlantedFamily family;
        family.name = "family" + std::to_string(f);
        family.kind = f <= 2 ? ScriptKind::downloaded : ScriptKind::embedded;
        family.anti_flavored = f == anti_family;

        std::vector<std::string> vocab;
        vocab.reserve(vocab_size);
        for (int i = 0; i < vocab_size; ++i) {
            vocab.push_back("f" + std::to_string(f) + "w" + std::to_string(i));
        }
        if (family.anti_flavored) {
            // Bait vocabulary baked into the family template.
            vocab[96] = "adsbox";
            vocab[97] = "offsetHeight";
            vocab[98] = "disable";
            vocab[99] = "adblock";
        }

        std::vector<std::string> template_tokens(tokens_per_script);
        std::uniform_int_distribution<int> pick(0, vocab_size - 1);
        for (auto& token : template_tokens) token = vocab[pick(rng)];

        const int n_mutations =
            static_cast<int>(static_cast<double>(tokens_per_script) * mutation_rate);
        for (int s = 0; s < sites_per_family; ++s) {
            const int site_index = f * sites_per_family + s;
            const std::string site_id = "site" + two_digits(site_index) + ".com";
            family.sites.insert(site_id);

            std::vector<std::string> tokens = template_tokens;
            std::vector<int> positions(tokens_per_script);
            std::iota(positions.begin(), positions.end(), 0);
            std::shuffle(positions.begin(), positions.end(), rng);
            for (int m = 0; m < n_mutations; ++m) {
                tokens[positions[m]] =
                    "z" + std::to_string(site_index) + "q" + std::to_string(positions[m]);
            }
            const std::string content = join_tokens(tokens);
            family.content_hashes.insert(sha256_hex(content));

            std::optional<std::string> url;
            if (family.kind == ScriptKind::downloaded) {
                url = "https://cdn.fam" + std::to_string(f) + "vendor.com/pkg/" + site_id + ".js";
            }
            builder.add_script(site_id, family.kind, content, url);
        }
        planted.families.push_back(std::move(family));
    }
    builder.write();
    return planted;
}

void make_mixed_corpus(const std::filesystem::path& root, int n_scripts, unsigned seed) {
    CorpusBuilder builder(root);
    std::mt19937 rng(seed);
    const int n_sites = 40;
    auto site_of = [&](int i) { return "m" + two_digits(i % n_sites) + ".com"; };

    int produced = 0;

    // Eight planted families of growing size, alternating kinds, half with an
    // external reference inside the content.
    for (int f = 0; f < 8 && produced < n_scripts; ++f) {
        const int copies = 12;
        const int size = static_cast<int>(80.0 * std::pow(1.35, f));
        const ScriptKind kind = (f % 2 == 0) ? ScriptKind::downloaded : ScriptKind::embedded;
        const bool with_ref = f % 4 < 2;

        std::vector<std::string> vocab;
        for (int i = 0; i < 60; ++i) {
            vocab.push_back("mf" + std::to_string(f) + "t" + std::to_string(i));
        }
        std::uniform_int_distribution<int> pick(0, 59);
        std::vector<std::string> template_tokens(size);
        for (auto& token : template_tokens) token = vocab[pick(rng)];

        for (int c = 0; c < copies && produced < n_scripts; ++c) {
            std::vector<std::string> tokens = template_tokens;
            std::uniform_int_distribution<int> pos(0, size - 1);
            for (int m = 0; m < size / 25; ++m) {
                tokens[pos(rng)] = "j" + std::to_string(f) + "x" + std::to_string(c) + "y" +
                                   std::to_string(m);
            }
            std::string content = join_tokens(tokens);
            if (with_ref) {
                content += "var endpoint = \"https://api.fam" + std::to_string(f) +
                           ".example.com/v1\";\n";
            }
            std::optional<std::string> url;
            if (kind == ScriptKind::downloaded) {
                url = "https://static.fam" + std::to_string(f) + ".example.com/" +
                      std::to_string(c) + ".js";
            }
            builder.add_script(site_of(produced), kind, content, url);
            ++produced;
        }
    }

    // Same-URL group: three sites fetch the identical bytes from one URL.
    for (int c = 0; c < 3 && produced < n_scripts; ++c) {
        builder.add_script(site_of(produced), ScriptKind::downloaded,
                           "shared body alpha beta gamma delta epsilon zeta eta theta iota kappa;",
                           "https://cdn.shared.example.com/lib.js");
        ++produced;
    }
    // Same-hash group with different URLs: merged by content.
    for (int c = 0; c < 2 && produced < n_scripts; ++c) {
        builder.add_script(site_of(produced), ScriptKind::downloaded,
                           "mirrored body one two three four five six seven eight nine ten;",
                           "https://mirror" + std::to_string(c) + ".example.com/copy.js");
        ++produced;
    }

    // Unrelated singles with scattered sizes.
    std::uniform_real_distribution<double> log_size(std::log(15.0), std::log(1500.0));
    int single = 0;
    while (produced < n_scripts) {
        const int size = static_cast<int>(std::exp(log_size(rng)));
        std::vector<std::string> tokens(size);
        for (int i = 0; i < size; ++i) {
            tokens[i] = "n" + std::to_string(single) + "w" + std::to_string(rng() % 400);
        }
        std::string content = join_tokens(tokens);
        const ScriptKind kind = (rng() % 2 == 0) ? ScriptKind::downloaded : ScriptKind::embedded;
        if (rng() % 3 == 0) content += "fetch(\"https://collect.example.org/p\");\n";
        std::optional<std::string> url;
        if (kind == ScriptKind::downloaded) {
            url = "https://one-off.example.net/js/" + std::to_string(single) + ".js";
        }
        builder.add_script(site_of(produced), kind, content, url);
        ++produced;
        ++single;
    }
    builder.write();
}

void make_scale_corpus(const std::filesystem::path& root, int n_sites, int scripts_per_site,
                       unsigned seed) {
    CorpusBuilder builder(root);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> log_size(std::log(20.0), std::log(2000.0));
    std::uniform_int_distribution<int> shared_token(0, 19999);

    // A handful of near-duplicate families so the pipeline finds cliques;
    // per-site mutations keep hashes distinct (identical bytes would collapse
    // into one node).
    std::vector<std::vector<std::string>> family_templates;
    for (int f = 0; f < 5; ++f) {
        std::vector<std::string> tokens(300);
        for (auto& token : tokens) {
            token = "dup" + std::to_string(f) + "t" + std::to_string(rng() % 80);
        }
        family_templates.push_back(std::move(tokens));
    }

    for (int s = 0; s < n_sites; ++s) {
        char site_buf[24];
        std::snprintf(site_buf, sizeof(site_buf), "bulk%03d.com", s);
        const std::string site_id = site_buf;
        for (int k = 0; k < scripts_per_site; ++k) {
            const int serial = s * scripts_per_site + k;
            if (k == 0 && s % 25 < 5) {
                // Every 25th block of sites shares one downloaded family.
                const int f = s % 25;
                std::vector<std::string> tokens = family_templates[f];
                for (int m = 0; m < 6; ++m) {
                    tokens[(s * 13 + m * 47) % tokens.size()] =
                        "loc" + std::to_string(s) + "v" + std::to_string(m);
                }
                builder.add_script(site_id, ScriptKind::downloaded, join_tokens(tokens),
                                   "https://" + site_id + "/js/vendor" + std::to_string(f) +
                                       ".js");
                continue;
            }
            const int size = static_cast<int>(std::exp(log_size(rng)));
            std::vector<std::string> tokens(size);
            for (auto& token : tokens) token = "g" + std::to_string(shared_token(rng));
            std::string content = join_tokens(tokens);
            const ScriptKind kind = (serial % 2 == 0) ? ScriptKind::downloaded
                                                      : ScriptKind::embedded;
            if (serial % 10 < 3) {
                content += "img.src = \"https://px.bulk-metrics.com/i.gif\";\n";
            }
            std::optional<std::string> url;
            if (kind == ScriptKind::downloaded) {
                url = "https://assets" + std::to_string(serial % 7) + ".bulkcdn.com/js/" +
                      std::to_string(serial) + ".js";
            }
            builder.add_script(site_id, kind, content, url);
        }
    }
    builder.write();
}

} // namespace scriptclique::testing
