#include <doctest.h>

#include "scriptclique/urls.hpp"

using namespace scriptclique;

TEST_SUITE("urls") {

TEST_CASE("parse_url splits scheme, host, port, path, query") {
    auto url = parse_url("https://Example.COM:8443/a/b?x=1#frag");
    REQUIRE(url.has_value());
    CHECK(url->scheme == "https");
    CHECK(url->host == "example.com");
    CHECK(url->port == "8443");
    CHECK(url->path == "/a/b");
    CHECK(url->query == "x=1");
    CHECK(url->str() == "https://example.com:8443/a/b?x=1");
}

TEST_CASE("parse_url rejects non-http schemes and garbage") {
    CHECK_FALSE(parse_url("ftp://example.com/x").has_value());
    CHECK_FALSE(parse_url("javascript:alert(1)").has_value());
    CHECK_FALSE(parse_url("no scheme here").has_value());
    CHECK_FALSE(parse_url("http://").has_value());
}

TEST_CASE("resolve_url handles the reference forms scripts use") {
    const Url base = *parse_url("https://ex.com/dir/page.html?q=1");
    CHECK(resolve_url(base, "/js/t.js")->str() == "https://ex.com/js/t.js");
    CHECK(resolve_url(base, "t.js")->str() == "https://ex.com/dir/t.js");
    CHECK(resolve_url(base, "../up.js")->str() == "https://ex.com/up.js");
    CHECK(resolve_url(base, "//cdn.other.net/lib.js")->str() == "https://cdn.other.net/lib.js");
    CHECK(resolve_url(base, "http://plain.org/x")->str() == "http://plain.org/x");
    CHECK(resolve_url(base, "?page=2")->str() == "https://ex.com/dir/page.html?page=2");
    CHECK_FALSE(resolve_url(base, "data:text/javascript,void(0)").has_value());
    // a ref whose query embeds an absolute URL is still relative
    CHECK(resolve_url(base, "jump.js?u=http://a.org/x")->str() ==
          "https://ex.com/dir/jump.js?u=http://a.org/x");
    CHECK(resolve_url(base, "lib.js?v=1")->str() == "https://ex.com/dir/lib.js?v=1");
}

TEST_CASE("normalize_url lowercases scheme and host only") {
    CHECK(normalize_url("HTTPS://CDN.Ex.COM/Path/File.JS?Q=1#f") ==
          "https://cdn.ex.com/Path/File.JS?Q=1");
}

TEST_CASE("registrable_domain applies suffix-plus-one") {
    CHECK(registrable_domain("asset.pagefair.com") == "pagefair.com");
    CHECK(registrable_domain("pagefair.com") == "pagefair.com");
    CHECK(registrable_domain("www.bbc.co.uk") == "bbc.co.uk");
    CHECK(registrable_domain("a.b.c.example.com.au") == "example.com.au");
    CHECK(registrable_domain("WWW.Example.ORG") == "example.org");
    // Unknown TLDs fall back to the last-label rule.
    CHECK(registrable_domain("deep.sub.host.unknowntld") == "host.unknowntld");
}

TEST_CASE("registrable_domain passes through IPs and single labels") {
    CHECK(registrable_domain("127.0.0.1") == "127.0.0.1");
    CHECK(registrable_domain("localhost") == "localhost");
    CHECK(registrable_domain("co.uk") == "co.uk");
}

TEST_CASE("plausible_fqdn") {
    CHECK(plausible_fqdn("cdn.taboola.com"));
    CHECK(plausible_fqdn("10.0.0.2"));
    CHECK_FALSE(plausible_fqdn("initialize"));
    CHECK_FALSE(plausible_fqdn("a..b"));
    CHECK_FALSE(plausible_fqdn("-bad.com"));
    CHECK_FALSE(plausible_fqdn("ends.123"));
}

} // TEST_SUITE
