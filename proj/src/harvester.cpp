#include "scriptclique/harvester.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include <httplib.h>

#include "scriptclique/errors.hpp"
#include "scriptclique/sha256.hpp"

namespace scriptclique {

namespace {

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::mutex& log_mutex() {
    static std::mutex m;
    return m;
}

// Case-insensitive search for needle (which must be lowercase).
std::size_t ifind(std::string_view hay, std::string_view needle, std::size_t from) {
    if (needle.empty() || hay.size() < needle.size()) return std::string_view::npos;
    for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
        std::size_t j = 0;
        while (j < needle.size() && lower(hay[i + j]) == needle[j]) ++j;
        if (j == needle.size()) return i;
    }
    return std::string_view::npos;
}

struct Attr {
    std::string name;
    std::string value;
};

// Parses attributes of a tag starting right after the tag name; returns the
// position one past the closing '>', or npos when the tag never closes.
std::size_t parse_attrs(std::string_view html, std::size_t pos, std::vector<Attr>& attrs,
                        bool& self_closing) {
    self_closing = false;
    while (pos < html.size()) {
        while (pos < html.size() && std::isspace(static_cast<unsigned char>(html[pos]))) ++pos;
        if (pos >= html.size()) return std::string_view::npos;
        if (html[pos] == '>') return pos + 1;
        if (html[pos] == '/') {
            ++pos;
            if (pos < html.size() && html[pos] == '>') {
                self_closing = true;
                return pos + 1;
            }
            continue;
        }
        Attr attr;
        while (pos < html.size() && html[pos] != '=' && html[pos] != '>' && html[pos] != '/' &&
               !std::isspace(static_cast<unsigned char>(html[pos]))) {
            attr.name.push_back(lower(html[pos]));
            ++pos;
        }
        while (pos < html.size() && std::isspace(static_cast<unsigned char>(html[pos]))) ++pos;
        if (pos < html.size() && html[pos] == '=') {
            ++pos;
            while (pos < html.size() && std::isspace(static_cast<unsigned char>(html[pos]))) ++pos;
            if (pos < html.size() && (html[pos] == '"' || html[pos] == '\'')) {
                const char quote = html[pos++];
                while (pos < html.size() && html[pos] != quote) {
                    attr.value.push_back(html[pos]);
                    ++pos;
                }
                if (pos < html.size()) ++pos; // closing quote
            } else {
                while (pos < html.size() && html[pos] != '>' &&
                       !std::isspace(static_cast<unsigned char>(html[pos]))) {
                    attr.value.push_back(html[pos]);
                    ++pos;
                }
            }
        }
        if (!attr.name.empty()) attrs.push_back(std::move(attr));
    }
    return std::string_view::npos;
}

std::string_view trim_view(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string rfc3339_utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct FetchResult {
    FetchStatus status;
    std::string body;
    Url final_url;
    bool truncated = false;
};

FetchStatus status_from_httplib_error(httplib::Error err) {
    switch (err) {
    case httplib::Error::Connection:
        return {FetchStatus::Kind::dns_failure, 0};
    case httplib::Error::ConnectionTimeout:
    case httplib::Error::Read:
    case httplib::Error::Write:
        return {FetchStatus::Kind::timeout, 0};
    default:
        return {FetchStatus::Kind::http_error, 0};
    }
}

FetchResult http_get(const Url& url, const HarvestConfig& config, std::uint64_t max_bytes) {
    FetchResult result;
    Url current = url;
    for (int hop = 0; hop <= config.follow_redirects; ++hop) {
        std::string origin = current.scheme + "://" + current.host;
        if (!current.port.empty()) origin += ":" + current.port;
        httplib::Client client(origin);
        client.set_follow_location(false);
        client.set_connection_timeout(config.timeout_secs, 0);
        client.set_read_timeout(config.timeout_secs, 0);
        client.set_write_timeout(config.timeout_secs, 0);
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
        client.enable_server_certificate_verification(false);
#endif
        httplib::Headers headers = {{"User-Agent", config.user_agent}};
        std::string path = current.path.empty() ? "/" : current.path;
        if (!current.query.empty()) path += "?" + current.query;

        std::string body;
        bool truncated = false;
        auto res = client.Get(path, headers, [&](const char* data, std::size_t len) {
            if (body.size() < max_bytes) {
                const std::size_t room = max_bytes - body.size();
                body.append(data, std::min(len, room));
                if (len > room) truncated = true;
            } else {
                truncated = true;
            }
            return true;
        });

        if (!res) {
            result.status = status_from_httplib_error(res.error());
            result.final_url = current;
            return result;
        }
        if (res->status >= 300 && res->status < 400 && res->has_header("Location") &&
            hop < config.follow_redirects) {
            auto next = resolve_url(current, res->get_header_value("Location"));
            if (!next) {
                result.status = {FetchStatus::Kind::http_error, res->status};
                result.final_url = current;
                return result;
            }
            current = *next;
            continue;
        }
        result.final_url = current;
        result.body = std::move(body);
        result.truncated = truncated;
        if (res->status >= 200 && res->status < 300) {
            // code carries information only for http_error
            result.status = {FetchStatus::Kind::ok, 0};
        } else {
            result.status = {FetchStatus::Kind::http_error, res->status};
        }
        return result;
    }
    result.status = {FetchStatus::Kind::http_error, 0};
    result.final_url = current;
    return result;
}

struct DownloadedScript {
    std::string source_url;
    std::string content;
    bool truncated = false;
};

struct SiteTask {
    std::string input_url;
    Url parsed;
    std::string site_id;
    FetchStatus status;
    std::string html;
    std::vector<std::string> embedded;
    std::vector<DownloadedScript> downloaded;
};

} // namespace

ExtractedScripts extract_script_tags(std::string_view html, const Url& base_url) {
    ExtractedScripts out;
    std::vector<std::string> seen_external;
    std::size_t pos = 0;
    while (true) {
        const std::size_t open = ifind(html, "<script", pos);
        if (open == std::string_view::npos) break;
        const std::size_t after_name = open + 7;
        if (after_name < html.size()) {
            const char c = html[after_name];
            if (!(std::isspace(static_cast<unsigned char>(c)) || c == '>' || c == '/')) {
                pos = open + 1; // e.g. <scripting>
                continue;
            }
        }
        std::vector<Attr> attrs;
        bool self_closing = false;
        const std::size_t body_start = parse_attrs(html, after_name, attrs, self_closing);
        if (body_start == std::string_view::npos) break; // unterminated open tag

        std::string src;
        for (const auto& attr : attrs) {
            if (attr.name == "src") {
                src = attr.value;
                break;
            }
        }

        std::size_t next_pos = body_start;
        std::string_view body;
        if (!self_closing) {
            const std::size_t close = ifind(html, "</script", body_start);
            if (close == std::string_view::npos) {
                body = html.substr(body_start); // best effort: rest of document
                next_pos = html.size();
            } else {
                body = html.substr(body_start, close - body_start);
                const std::size_t gt = html.find('>', close);
                next_pos = gt == std::string_view::npos ? html.size() : gt + 1;
            }
        }

        if (!trim_view(src).empty()) {
            if (auto resolved = resolve_url(base_url, trim_view(src))) {
                std::string url = resolved->str();
                if (std::find(seen_external.begin(), seen_external.end(), url) ==
                    seen_external.end()) {
                    seen_external.push_back(url);
                    out.external.push_back(std::move(url));
                }
            }
        } else if (!trim_view(body).empty()) {
            out.embedded.emplace_back(body);
        }
        pos = next_pos;
    }
    return out;
}

CorpusManifest harvest(const HarvestConfig& config, std::ostream* log) {
    std::ifstream urls_in(config.url_list_path);
    if (!urls_in) {
        throw Error("cannot read URL list: " + config.url_list_path.string());
    }
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec || !std::filesystem::is_directory(config.out_dir)) {
        throw Error("out dir is not writable: " + config.out_dir.string());
    }
    // Fail early when the directory cannot actually be written.
    {
        const auto probe = config.out_dir / ".write_probe";
        std::ofstream touch(probe, std::ios::trunc);
        if (!touch) throw Error("out dir is not writable: " + config.out_dir.string());
        touch.close();
        std::filesystem::remove(probe, ec);
    }

    std::vector<SiteTask> tasks;
    std::string line;
    while (std::getline(urls_in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string_view trimmed = trim_view(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        SiteTask task;
        task.input_url = std::string(trimmed);
        auto parsed = parse_url(trimmed);
        if (!parsed) {
            if (log) *log << "skipping unparseable URL: " << trimmed << '\n';
            continue;
        }
        task.parsed = *parsed;
        task.site_id = registrable_domain(task.parsed.host);
        tasks.push_back(std::move(task));
    }

    std::atomic<std::size_t> next_task{0};
    auto worker = [&] {
        while (true) {
            const std::size_t idx = next_task.fetch_add(1);
            if (idx >= tasks.size()) break;
            SiteTask& task = tasks[idx];
            // Page bodies get the same size cap as scripts.
            FetchResult page = http_get(task.parsed, config, config.max_script_bytes);
            task.status = page.status;
            if (page.status.kind != FetchStatus::Kind::ok) {
                if (log) {
                    std::lock_guard<std::mutex> guard(log_mutex());
                    *log << "fetch failed for " << task.input_url << '\n';
                }
                continue;
            }
            task.html = std::move(page.body);
            // Relative srcs resolve against the final post-redirect URL.
            ExtractedScripts scripts = extract_script_tags(task.html, page.final_url);
            task.embedded = std::move(scripts.embedded);
            for (const auto& url_text : scripts.external) {
                auto parsed_script = parse_url(url_text);
                if (!parsed_script) continue;
                FetchResult fetched = http_get(*parsed_script, config, config.max_script_bytes);
                if (fetched.status.kind != FetchStatus::Kind::ok) {
                    if (log) {
                        std::lock_guard<std::mutex> guard(log_mutex());
                        *log << "script fetch miss: " << url_text << '\n';
                    }
                    continue;
                }
                DownloadedScript script;
                script.source_url = url_text;
                script.content = std::move(fetched.body);
                script.truncated = fetched.truncated;
                if (script.truncated && log) {
                    std::lock_guard<std::mutex> guard(log_mutex());
                    *log << "script truncated at " << config.max_script_bytes
                         << " bytes: " << url_text << '\n';
                }
                task.downloaded.push_back(std::move(script));
            }
        }
    };
    {
        const std::size_t n_workers =
            std::min<std::size_t>(std::max(1, config.max_parallel_sites), tasks.size());
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Single-writer finalize, in input order.
    CorpusManifest manifest;
    manifest.created_by = "scriptclique 0.1.0";
    manifest.root_dir = config.out_dir;
    std::filesystem::create_directories(config.out_dir / "scripts");
    std::map<std::string, int> page_counter;
    int script_seq = 0;
    char idbuf[16];

    auto store_script = [&](SiteTask& task, PageSnapshot& page, ScriptKind kind,
                            std::string content, std::optional<std::string> source_url) {
        ScriptRecord rec;
        std::snprintf(idbuf, sizeof(idbuf), "s%06d", script_seq++);
        rec.id = idbuf;
        rec.site_id = task.site_id;
        rec.kind = kind;
        rec.source_url = std::move(source_url);
        rec.content_hash = sha256_hex(content);
        rec.content_path = script_content_rel_path(rec.content_hash);
        rec.byte_len = content.size();
        const auto path = config.out_dir / rec.content_path;
        if (!std::filesystem::exists(path)) {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out) throw Error("cannot write " + path.string());
            out.write(content.data(), static_cast<std::streamsize>(content.size()));
        }
        page.script_ids.push_back(rec.id);
        manifest.scripts.push_back(std::move(rec));
    };

    for (auto& task : tasks) {
        PageSnapshot page;
        page.site_id = task.site_id;
        page.page_url = task.input_url;
        page.fetched_at = rfc3339_utc_now();
        page.fetch_status = task.status;
        if (task.status.kind == FetchStatus::Kind::ok) {
            const int n = page_counter[task.site_id]++;
            std::filesystem::create_directories(config.out_dir / "pages" / task.site_id);
            page.html_path = "pages/" + task.site_id + "/" + std::to_string(n) + ".html";
            std::ofstream out(config.out_dir / page.html_path,
                              std::ios::binary | std::ios::trunc);
            if (!out) throw Error("cannot write " + page.html_path);
            out.write(task.html.data(), static_cast<std::streamsize>(task.html.size()));

            for (auto& body : task.embedded) {
                store_script(task, page, ScriptKind::embedded, std::move(body), std::nullopt);
            }
            for (auto& script : task.downloaded) {
                store_script(task, page, ScriptKind::downloaded, std::move(script.content),
                             script.source_url);
            }
        }
        manifest.pages.push_back(std::move(page));
    }

    write_corpus(manifest, config.out_dir);
    return manifest;
}

} // namespace scriptclique
