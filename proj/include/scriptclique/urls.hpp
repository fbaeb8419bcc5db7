#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace scriptclique {

// Decomposed http(s) URL. scheme and host are stored lowercase; fragments are dropped.
struct Url {
    std::string scheme;
    std::string host;
    std::string port;  // digits, empty when not given
    std::string path;  // always starts with '/', "/" when absent
    std::string query; // without the '?', empty when absent

    std::string str() const;
    bool operator==(const Url&) const = default;
};

// Parses an absolute http(s) URL. Returns nullopt for anything else.
std::optional<Url> parse_url(std::string_view text);

// RFC 3986-style reference resolution for the forms scripts actually use:
// absolute, scheme-relative (//host/x), absolute-path, relative-path, query-only.
std::optional<Url> resolve_url(const Url& base, std::string_view ref);

// Hostname of an absolute URL string, lowercased. nullopt if unparseable.
std::optional<std::string> url_host(std::string_view url);

// Byte range [begin, end) of the host inside a normalized URL string, if any.
std::optional<std::pair<std::size_t, std::size_t>> host_span(std::string_view url);

// Lowercases scheme and host in place, leaves path/query untouched, strips fragments.
std::string normalize_url(std::string_view url);

// Public-suffix-plus-one of a hostname (e.g. asset.pagefair.com -> pagefair.com).
// Uses a built-in table of common ICANN multi-label suffixes and the default
// single-label rule for unknown TLDs. IP literals and single labels pass through.
std::string registrable_domain(std::string_view host);

// True when the label sequence looks like a resolvable hostname (or an IPv4
// literal): at least two labels, sane label characters, non-numeric TLD.
bool plausible_fqdn(std::string_view host);

} // namespace scriptclique
