#include "scriptclique/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scriptclique/errors.hpp"
#include "scriptclique/sha256.hpp"

namespace scriptclique {

using nlohmann::json;

const char* to_string(ScriptKind kind) {
    return kind == ScriptKind::embedded ? "embedded" : "downloaded";
}

std::optional<ScriptKind> script_kind_from_string(std::string_view text) {
    if (text == "embedded") return ScriptKind::embedded;
    if (text == "downloaded") return ScriptKind::downloaded;
    return std::nullopt;
}

namespace {

json status_to_json(const FetchStatus& status) {
    json out;
    switch (status.kind) {
    case FetchStatus::Kind::ok: out["kind"] = "ok"; break;
    case FetchStatus::Kind::timeout: out["kind"] = "timeout"; break;
    case FetchStatus::Kind::dns_failure: out["kind"] = "dns_failure"; break;
    case FetchStatus::Kind::http_error:
        out["kind"] = "http_error";
        out["code"] = status.code;
        break;
    }
    return out;
}

FetchStatus status_from_json(const json& j) {
    FetchStatus status;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "ok") {
        status.kind = FetchStatus::Kind::ok;
    } else if (kind == "timeout") {
        status.kind = FetchStatus::Kind::timeout;
    } else if (kind == "dns_failure") {
        status.kind = FetchStatus::Kind::dns_failure;
    } else if (kind == "http_error") {
        status.kind = FetchStatus::Kind::http_error;
        status.code = j.value("code", 0);
    } else {
        throw SchemaError("unknown fetch_status kind: " + kind);
    }
    return status;
}

bool valid_site_id(const std::string& site_id) {
    if (site_id.empty()) return false;
    if (site_id.find("://") != std::string::npos) return false;
    if (site_id.find('/') != std::string::npos) return false;
    return std::none_of(site_id.begin(), site_id.end(),
                        [](unsigned char c) { return std::isupper(c) || std::isspace(c); });
}

bool valid_hash(const std::string& hash) {
    if (hash.size() != 64) return false;
    return std::all_of(hash.begin(), hash.end(), [](unsigned char c) {
        return std::isdigit(c) || (c >= 'a' && c <= 'f');
    });
}

std::string read_file_or_throw(const std::filesystem::path& path, const std::string& what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IntegrityError("cannot read " + what + ": " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

} // namespace

const ScriptRecord* CorpusManifest::find_script(std::string_view id) const {
    for (const auto& s : scripts) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

std::string script_content_rel_path(std::string_view content_hash) {
    return "scripts/" + std::string(content_hash) + ".js";
}

CorpusManifest load_corpus(const std::filesystem::path& root_dir) {
    const auto manifest_path = root_dir / "manifest.json";
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) {
        throw CorpusNotFoundError("no manifest at " + manifest_path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("manifest is not valid JSON: ") + e.what());
    }

    CorpusManifest manifest;
    manifest.root_dir = root_dir;
    try {
        manifest.corpus_version = doc.at("corpus_version").get<int>();
        manifest.created_by = doc.value("created_by", std::string{});
        for (const auto& js : doc.at("scripts")) {
            ScriptRecord rec;
            rec.id = js.at("id").get<std::string>();
            rec.site_id = js.at("site_id").get<std::string>();
            const auto kind = script_kind_from_string(js.at("kind").get<std::string>());
            if (!kind) throw SchemaError("script " + rec.id + ": unknown kind");
            rec.kind = *kind;
            if (js.contains("source_url")) rec.source_url = js.at("source_url").get<std::string>();
            rec.content_path = js.at("content_path").get<std::string>();
            rec.content_hash = js.at("content_hash").get<std::string>();
            rec.byte_len = js.at("byte_len").get<std::uint64_t>();
            manifest.scripts.push_back(std::move(rec));
        }
        for (const auto& jp : doc.at("pages")) {
            PageSnapshot page;
            page.site_id = jp.at("site_id").get<std::string>();
            page.page_url = jp.at("page_url").get<std::string>();
            page.fetched_at = jp.at("fetched_at").get<std::string>();
            page.html_path = jp.value("html_path", std::string{});
            page.script_ids = jp.at("script_ids").get<std::vector<std::string>>();
            page.fetch_status = status_from_json(jp.at("fetch_status"));
            manifest.pages.push_back(std::move(page));
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("manifest field error: ") + e.what());
    }

    if (manifest.corpus_version != 1) {
        throw SchemaError("unsupported corpus_version " + std::to_string(manifest.corpus_version));
    }

    std::set<std::string> ids;
    for (const auto& rec : manifest.scripts) {
        if (!ids.insert(rec.id).second) throw SchemaError("duplicate script id " + rec.id);
        if (!valid_site_id(rec.site_id)) {
            throw SchemaError("script " + rec.id + ": bad site_id '" + rec.site_id + "'");
        }
        if (!valid_hash(rec.content_hash)) {
            throw SchemaError("script " + rec.id + ": bad content_hash");
        }
        const bool downloaded = rec.kind == ScriptKind::downloaded;
        if (downloaded != rec.source_url.has_value()) {
            throw SchemaError("script " + rec.id + ": source_url must be present iff downloaded");
        }
    }
    for (const auto& page : manifest.pages) {
        if (!valid_site_id(page.site_id)) {
            throw SchemaError("page " + page.page_url + ": bad site_id '" + page.site_id + "'");
        }
        for (const auto& id : page.script_ids) {
            if (!ids.count(id)) {
                throw SchemaError("page " + page.page_url + ": dangling script id " + id);
            }
        }
        if (!page.html_path.empty() && !std::filesystem::exists(root_dir / page.html_path)) {
            throw IntegrityError("missing html file " + page.html_path);
        }
    }
    for (const auto& rec : manifest.scripts) {
        const auto content = read_file_or_throw(root_dir / rec.content_path,
                                                "content of script " + rec.id);
        if (content.size() != rec.byte_len) {
            throw IntegrityError("script " + rec.id + ": byte_len mismatch");
        }
        if (sha256_hex(content) != rec.content_hash) {
            throw IntegrityError("script " + rec.id + ": content hash mismatch at " +
                                 rec.content_path);
        }
    }
    return manifest;
}

void write_corpus(const CorpusManifest& manifest, const std::filesystem::path& root_dir) {
    std::filesystem::create_directories(root_dir);
    json doc;
    doc["corpus_version"] = manifest.corpus_version;
    doc["created_by"] = manifest.created_by;
    doc["pages"] = json::array();
    for (const auto& page : manifest.pages) {
        json jp;
        jp["site_id"] = page.site_id;
        jp["page_url"] = page.page_url;
        jp["fetched_at"] = page.fetched_at;
        jp["html_path"] = page.html_path;
        jp["script_ids"] = page.script_ids;
        jp["fetch_status"] = status_to_json(page.fetch_status);
        doc["pages"].push_back(std::move(jp));
    }
    doc["scripts"] = json::array();
    for (const auto& rec : manifest.scripts) {
        json js;
        js["id"] = rec.id;
        js["site_id"] = rec.site_id;
        js["kind"] = to_string(rec.kind);
        if (rec.source_url) js["source_url"] = *rec.source_url;
        js["content_path"] = rec.content_path;
        js["content_hash"] = rec.content_hash;
        js["byte_len"] = rec.byte_len;
        doc["scripts"].push_back(std::move(js));
    }
    std::ofstream out(root_dir / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write manifest under " + root_dir.string());
    out << doc.dump(2) << '\n';
}

CorpusManifest dedup_scripts(CorpusManifest manifest) {
    // (site_id, content_hash, kind) -> surviving id (lexicographically smallest).
    std::map<std::tuple<std::string, std::string, int>, std::string> survivor;
    for (const auto& rec : manifest.scripts) {
        auto key = std::make_tuple(rec.site_id, rec.content_hash, static_cast<int>(rec.kind));
        auto [it, inserted] = survivor.emplace(key, rec.id);
        if (!inserted && rec.id < it->second) it->second = rec.id;
    }

    std::unordered_map<std::string, std::string> remap;
    std::vector<ScriptRecord> kept;
    kept.reserve(manifest.scripts.size());
    for (auto& rec : manifest.scripts) {
        auto key = std::make_tuple(rec.site_id, rec.content_hash, static_cast<int>(rec.kind));
        const std::string& keep_id = survivor.at(key);
        remap[rec.id] = keep_id;
        if (rec.id == keep_id) kept.push_back(std::move(rec));
    }
    manifest.scripts = std::move(kept);

    for (auto& page : manifest.pages) {
        std::vector<std::string> ids;
        ids.reserve(page.script_ids.size());
        std::set<std::string> seen;
        for (const auto& id : page.script_ids) {
            auto it = remap.find(id);
            const std::string& mapped = it == remap.end() ? id : it->second;
            if (seen.insert(mapped).second) ids.push_back(mapped);
        }
        page.script_ids = std::move(ids);
    }
    return manifest;
}

std::string read_script_content(const CorpusManifest& manifest, const ScriptRecord& record) {
    return read_file_or_throw(manifest.root_dir / record.content_path,
                              "content of script " + record.id);
}

} // namespace scriptclique
