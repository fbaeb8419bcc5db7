#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <thread>

#include <sys/wait.h>

#include <httplib.h>

#include "scriptclique/harvester.hpp"
#include "scriptclique/sha256.hpp"
#include "support/fixtures.hpp"

using namespace scriptclique;
using scriptclique::testing::TempDir;

namespace {

const Url kBase = *parse_url("https://ex.com/p");

// Fixture server bound to an ephemeral localhost port.
class FixtureServer {
public:
    FixtureServer() {
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FixtureServer() {
        server_.stop();
        thread_.join();
    }
    httplib::Server& get() { return server_; }
    std::string url(const std::string& path) const {
        return "http://127.0.0.1:" + std::to_string(port_) + path;
    }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

std::string write_url_list(const std::filesystem::path& dir,
                           const std::vector<std::string>& urls) {
    const auto path = dir / "urls.txt";
    std::ofstream out(path);
    out << "# fixture url list\n";
    for (const auto& url : urls) out << url << "\n";
    return path.string();
}

} // namespace

TEST_SUITE("harvester") {

TEST_CASE("extract_script_tags: inline body") {
    const auto scripts = extract_script_tags("<script>var a=1;</script>", kBase);
    REQUIRE(scripts.embedded.size() == 1);
    CHECK(scripts.embedded[0] == "var a=1;");
    CHECK(scripts.external.empty());
}

TEST_CASE("extract_script_tags: src resolution against the base") {
    const auto scripts =
        extract_script_tags("<script src=\"/js/t.js\"></script>", *parse_url("https://ex.com/p"));
    CHECK(scripts.embedded.empty());
    REQUIRE(scripts.external.size() == 1);
    CHECK(scripts.external[0] == "https://ex.com/js/t.js");
}

TEST_CASE("extract_script_tags: fixture with 3 inline, 2 external, one duplicated src") {
    const std::string html =
        "<html><head>"
        "<script>first();</script>"
        "<script type='text/javascript'>second();</script>"
        "<SCRIPT SRC='//cdn.ex.net/lib.js'></SCRIPT>"
        "<script src=\"/js/t.js\"></script>"
        "<script src='/js/t.js'></script>" // duplicate
        "</head><body>"
        "<script>\nthird();\n</script>"
        "</body></html>";
    const auto scripts = extract_script_tags(html, kBase);
    REQUIRE(scripts.embedded.size() == 3);
    CHECK(scripts.embedded[0] == "first();");
    CHECK(scripts.embedded[1] == "second();");
    CHECK(scripts.embedded[2] == "\nthird();\n");
    REQUIRE(scripts.external.size() == 2);
    CHECK(scripts.external[0] == "https://cdn.ex.net/lib.js");
    CHECK(scripts.external[1] == "https://ex.com/js/t.js");
}

TEST_CASE("extract_script_tags: src plus body keeps only the external side") {
    const auto scripts =
        extract_script_tags("<script src=/x.js>inert body</script>", kBase);
    CHECK(scripts.embedded.empty());
    REQUIRE(scripts.external.size() == 1);
    CHECK(scripts.external[0] == "https://ex.com/x.js");
}

TEST_CASE("extract_script_tags survives malformed markup") {
    CHECK(extract_script_tags("", kBase).embedded.empty());
    CHECK(extract_script_tags("<script", kBase).embedded.empty());
    const auto unterminated = extract_script_tags("<script>tail = missing_close", kBase);
    REQUIRE(unterminated.embedded.size() == 1); // best effort: rest of document
    const auto nested = extract_script_tags("<scripting>not a script</scripting>", kBase);
    CHECK(nested.embedded.empty());
    const auto empty_body = extract_script_tags("<script>   </script>", kBase);
    CHECK(empty_body.embedded.empty()); // whitespace-only body is dropped
    const auto data_url = extract_script_tags("<script src='javascript:void(0)'></script>", kBase);
    CHECK(data_url.external.empty());
}

TEST_CASE("empty URL list harvests an empty corpus") {
    TempDir tmp;
    HarvestConfig config;
    config.url_list_path = write_url_list(tmp.path(), {});
    config.out_dir = tmp.path() / "corpus";
    const auto manifest = harvest(config);
    CHECK(manifest.pages.empty());
    CHECK(load_corpus(config.out_dir).pages.empty());
}

TEST_CASE("harvest against a local fixture server") {
    FixtureServer server;
    const std::string inline_body = "var inline_marker = 42;";
    const std::string external_body = "function externalLib(){ return 'payload'; }";
    server.get().Get("/", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("<html><head><script>" + inline_body +
                            "</script><script src=\"/js/a.js\"></script></head></html>",
                        "text/html");
    });
    server.get().Get("/js/a.js", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(external_body, "application/javascript");
    });

    TempDir tmp;
    HarvestConfig config;
    config.url_list_path = write_url_list(tmp.path(), {server.url("/")});
    config.out_dir = tmp.path() / "corpus";
    config.timeout_secs = 5;
    const auto manifest = harvest(config);

    REQUIRE(manifest.pages.size() == 1);
    CHECK(manifest.pages[0].site_id == "127.0.0.1");
    CHECK(manifest.pages[0].fetch_status.kind == FetchStatus::Kind::ok);
    REQUIRE(manifest.scripts.size() == 2);

    // kinds and hashes match the server's known content exactly
    const auto& embedded = manifest.scripts[0];
    const auto& downloaded = manifest.scripts[1];
    CHECK(embedded.kind == ScriptKind::embedded);
    CHECK_FALSE(embedded.source_url.has_value());
    CHECK(embedded.content_hash == sha256_hex(inline_body));
    CHECK(downloaded.kind == ScriptKind::downloaded);
    REQUIRE(downloaded.source_url.has_value());
    CHECK(*downloaded.source_url == server.url("/js/a.js"));
    CHECK(downloaded.content_hash == sha256_hex(external_body));

    // the corpus on disk passes full validation
    const auto loaded = load_corpus(config.out_dir);
    CHECK(loaded == manifest);
}

TEST_CASE("redirects are followed and relative srcs resolve against the final URL") {
    FixtureServer server;
    server.get().Get("/start", [&](const httplib::Request&, httplib::Response& res) {
        res.set_redirect("/moved/page");
    });
    server.get().Get("/moved/page", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("<script src=\"rel.js\"></script>", "text/html");
    });
    server.get().Get("/moved/rel.js", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("relative_resolved();", "application/javascript");
    });

    TempDir tmp;
    HarvestConfig config;
    config.url_list_path = write_url_list(tmp.path(), {server.url("/start")});
    config.out_dir = tmp.path() / "corpus";
    config.timeout_secs = 5;
    const auto manifest = harvest(config);
    REQUIRE(manifest.scripts.size() == 1);
    CHECK(*manifest.scripts[0].source_url == server.url("/moved/rel.js"));
    CHECK(manifest.pages[0].page_url == server.url("/start")); // requested URL is recorded
}

TEST_CASE("non-2xx script fetches produce no record; page errors are per-site") {
    FixtureServer server;
    server.get().Get("/", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("<script src=\"/missing.js\"></script><script>kept();</script>",
                        "text/html");
    });
    server.get().Get("/gone", [&](const httplib::Request&, httplib::Response& res) {
        res.status = 404;
        res.set_content("gone", "text/plain");
    });

    TempDir tmp;
    HarvestConfig config;
    config.url_list_path = write_url_list(tmp.path(), {server.url("/"), server.url("/gone")});
    config.out_dir = tmp.path() / "corpus";
    config.timeout_secs = 5;
    const auto manifest = harvest(config);

    REQUIRE(manifest.pages.size() == 2);
    CHECK(manifest.pages[0].fetch_status.kind == FetchStatus::Kind::ok);
    CHECK(manifest.pages[1].fetch_status.kind == FetchStatus::Kind::http_error);
    CHECK(manifest.pages[1].fetch_status.code == 404);
    CHECK(manifest.pages[1].html_path.empty());
    // only the inline script survived (missing.js 404'd away)
    REQUIRE(manifest.scripts.size() == 1);
    CHECK(manifest.scripts[0].kind == ScriptKind::embedded);
}

TEST_CASE("unreachable host gets a failure status without aborting the run") {
    FixtureServer server;
    server.get().Get("/", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("<script>alive();</script>", "text/html");
    });

    TempDir tmp;
    HarvestConfig config;
    // port 1 on localhost refuses connections
    config.url_list_path =
        write_url_list(tmp.path(), {"http://127.0.0.1:1/", server.url("/")});
    config.out_dir = tmp.path() / "corpus";
    config.timeout_secs = 2;
    const auto manifest = harvest(config);

    REQUIRE(manifest.pages.size() == 2);
    const auto failed = manifest.pages[0].fetch_status.kind;
    CHECK((failed == FetchStatus::Kind::dns_failure || failed == FetchStatus::Kind::timeout));
    CHECK(manifest.pages[1].fetch_status.kind == FetchStatus::Kind::ok);
    CHECK(manifest.scripts.size() == 1);
}

TEST_CASE("re-running harvest yields hash-identical script content files") {
    FixtureServer server;
    server.get().Get("/", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("<script>stable_body_tokens();</script>", "text/html");
    });

    TempDir tmp;
    HarvestConfig config;
    config.url_list_path = write_url_list(tmp.path(), {server.url("/")});
    config.timeout_secs = 5;

    config.out_dir = tmp.path() / "corpus1";
    const auto first = harvest(config);
    config.out_dir = tmp.path() / "corpus2";
    const auto second = harvest(config);

    REQUIRE(first.scripts.size() == 1);
    REQUIRE(second.scripts.size() == 1);
    CHECK(first.scripts[0].content_hash == second.scripts[0].content_hash);
    CHECK(first.scripts[0].content_path == second.scripts[0].content_path);
}

TEST_CASE("quoted '>' inside attributes does not end the tag") {
    const auto scripts = extract_script_tags(
        "<script data-cond=\"a > b\" src=\"/q.js\"></script>", kBase);
    REQUIRE(scripts.external.size() == 1);
    CHECK(scripts.external[0] == "https://ex.com/q.js");
}

TEST_CASE("parallel multi-site harvest assigns ids in input order") {
    FixtureServer server;
    for (int i = 0; i < 6; ++i) {
        server.get().Get("/p" + std::to_string(i),
                         [i](const httplib::Request&, httplib::Response& res) {
                             res.set_content("<script>site_payload_" + std::to_string(i) +
                                                 "();</script>",
                                             "text/html");
                         });
    }

    TempDir tmp;
    HarvestConfig config;
    std::vector<std::string> urls;
    for (int i = 0; i < 6; ++i) urls.push_back(server.url("/p" + std::to_string(i)));
    config.url_list_path = write_url_list(tmp.path(), urls);
    config.max_parallel_sites = 4;
    config.timeout_secs = 5;

    config.out_dir = tmp.path() / "c1";
    const auto first = harvest(config);
    config.out_dir = tmp.path() / "c2";
    const auto second = harvest(config);

    REQUIRE(first.scripts.size() == 6);
    REQUIRE(second.scripts.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        // ids and page order are deterministic across runs despite parallelism
        CHECK(first.scripts[i].id == second.scripts[i].id);
        CHECK(first.scripts[i].content_hash == second.scripts[i].content_hash);
        CHECK(first.pages[i].page_url == second.pages[i].page_url);
    }
}

#ifdef SCRIPTCLIQUE_BIN
TEST_CASE("harvest CLI builds a loadable corpus") {
    FixtureServer server;
    server.get().Get("/", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("<script>cli_inline_payload();</script>"
                        "<script src=\"/js/cli.js\"></script>",
                        "text/html");
    });
    server.get().Get("/js/cli.js", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("function cliPayload(){}", "application/javascript");
    });

    TempDir tmp;
    const auto urls = write_url_list(tmp.path(), {server.url("/")});
    const std::string out_dir = (tmp.path() / "corpus").string();
    const std::string command = std::string(SCRIPTCLIQUE_BIN) + " harvest --urls " + urls +
                                " --out " + out_dir + " --timeout 5 --parallel 2 --quiet";
    const int status = std::system(command.c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);

    const auto manifest = load_corpus(out_dir);
    CHECK(manifest.pages.size() == 1);
    CHECK(manifest.scripts.size() == 2);
}
#endif

TEST_CASE("oversized scripts are truncated at the cap") {
    FixtureServer server;
    const std::string big(10000, 'x');
    server.get().Get("/", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("<script src=\"/big.js\"></script>", "text/html");
    });
    server.get().Get("/big.js", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(big, "application/javascript");
    });

    TempDir tmp;
    HarvestConfig config;
    config.url_list_path = write_url_list(tmp.path(), {server.url("/")});
    config.out_dir = tmp.path() / "corpus";
    config.timeout_secs = 5;
    config.max_script_bytes = 1024;
    const auto manifest = harvest(config);
    REQUIRE(manifest.scripts.size() == 1);
    CHECK(manifest.scripts[0].byte_len == 1024);
    CHECK(load_corpus(config.out_dir).scripts[0].byte_len == 1024); // hash still verifies
}

} // TEST_SUITE
