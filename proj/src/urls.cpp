#include "scriptclique/urls.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>
#include <vector>

namespace scriptclique {

namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_host_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-';
}

std::string_view strip_fragment(std::string_view s) {
    auto pos = s.find('#');
    return pos == std::string_view::npos ? s : s.substr(0, pos);
}

// Collapses "." and ".." segments of an absolute path.
std::string normalize_path(std::string_view path) {
    std::vector<std::string_view> segs;
    std::size_t i = 0;
    bool trailing_slash = !path.empty() && path.back() == '/';
    while (i < path.size()) {
        while (i < path.size() && path[i] == '/') ++i;
        std::size_t j = i;
        while (j < path.size() && path[j] != '/') ++j;
        if (j > i) {
            std::string_view seg = path.substr(i, j - i);
            if (seg == ".") {
                // no-op
            } else if (seg == "..") {
                if (!segs.empty()) segs.pop_back();
            } else {
                segs.push_back(seg);
            }
        }
        i = j;
    }
    std::string out = "/";
    for (std::size_t k = 0; k < segs.size(); ++k) {
        out.append(segs[k]);
        if (k + 1 < segs.size() || trailing_slash) out.push_back('/');
    }
    if (out.size() > 1 && out.back() == '/' && !trailing_slash) out.pop_back();
    return out;
}

// Common ICANN multi-label public suffixes. Unknown TLDs fall back to the
// default rule (the last label is the suffix). Private-registry suffixes such
// as cloudfront.net are intentionally absent so that vendor grouping stays at
// registry granularity.
const std::unordered_set<std::string>& multi_label_suffixes() {
    static const std::unordered_set<std::string> table = {
        "co.uk", "org.uk", "ac.uk", "gov.uk", "me.uk", "net.uk", "ltd.uk", "plc.uk", "sch.uk", "nhs.uk",
        "com.au", "net.au", "org.au", "edu.au", "gov.au", "id.au", "asn.au",
        "co.jp", "ne.jp", "or.jp", "ac.jp", "ad.jp", "ed.jp", "go.jp", "gr.jp", "lg.jp",
        "com.br", "net.br", "org.br", "gov.br", "edu.br",
        "co.nz", "net.nz", "org.nz", "govt.nz", "ac.nz", "school.nz",
        "co.in", "net.in", "org.in", "firm.in", "gen.in", "ind.in", "ac.in", "edu.in", "gov.in", "res.in",
        "com.cn", "net.cn", "org.cn", "gov.cn", "edu.cn", "ac.cn",
        "com.mx", "org.mx", "net.mx", "gob.mx", "edu.mx",
        "com.ar", "net.ar", "org.ar", "gob.ar", "edu.ar",
        "com.tr", "net.tr", "org.tr", "gov.tr", "edu.tr", "web.tr",
        "co.kr", "or.kr", "ne.kr", "re.kr", "go.kr", "ac.kr", "pe.kr",
        "com.tw", "net.tw", "org.tw", "edu.tw", "gov.tw", "idv.tw",
        "com.hk", "net.hk", "org.hk", "edu.hk", "gov.hk", "idv.hk",
        "com.sg", "net.sg", "org.sg", "edu.sg", "gov.sg", "per.sg",
        "co.za", "org.za", "net.za", "web.za", "gov.za", "ac.za",
        "com.ua", "net.ua", "org.ua", "gov.ua", "edu.ua", "in.ua",
        "co.il", "org.il", "net.il", "ac.il", "gov.il", "muni.il",
        "com.pl", "net.pl", "org.pl", "edu.pl", "gov.pl", "waw.pl",
        "com.es", "org.es", "nom.es", "gob.es", "edu.es",
        "co.id", "or.id", "web.id", "ac.id", "go.id", "my.id",
        "com.my", "net.my", "org.my", "edu.my", "gov.my",
        "com.ph", "net.ph", "org.ph", "edu.ph", "gov.ph",
        "com.vn", "net.vn", "org.vn", "edu.vn", "gov.vn",
        "com.eg", "net.eg", "org.eg", "edu.eg", "gov.eg",
        "com.sa", "net.sa", "org.sa", "edu.sa", "gov.sa",
        "com.pk", "net.pk", "org.pk", "edu.pk", "gov.pk",
        "co.th", "or.th", "net.th", "ac.th", "go.th", "in.th",
        "com.co", "net.co", "org.co", "edu.co", "gov.co",
        "com.ve", "com.pe", "com.uy", "com.ec", "com.bo", "com.py", "com.do", "com.gt", "com.ni",
        "com.pa", "com.sv", "com.hn", "com.cu", "com.ng", "com.gh", "com.ke", "co.ke", "co.tz",
        "co.zw", "com.et", "com.bd", "com.np", "com.lk", "com.kh", "com.mm",
        "co.at", "or.at", "ac.at", "gv.at",
        "com.ru", "net.ru", "org.ru", "msk.ru", "spb.ru",
        "co.ve", "co.cr", "co.ao",
    };
    return table;
}

bool is_ipv4(std::string_view host) {
    int dots = 0;
    int run = 0;
    for (char c : host) {
        if (c == '.') {
            if (run == 0 || run > 3) return false;
            ++dots;
            run = 0;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            ++run;
        } else {
            return false;
        }
    }
    return dots == 3 && run > 0 && run <= 3;
}

} // namespace

std::string Url::str() const {
    std::string out = scheme + "://" + host;
    if (!port.empty()) {
        out.push_back(':');
        out.append(port);
    }
    out.append(path.empty() ? "/" : path);
    if (!query.empty()) {
        out.push_back('?');
        out.append(query);
    }
    return out;
}

std::optional<Url> parse_url(std::string_view text) {
    text = strip_fragment(text);
    auto scheme_end = text.find("://");
    if (scheme_end == std::string_view::npos || scheme_end == 0) return std::nullopt;
    Url url;
    url.scheme = to_lower(text.substr(0, scheme_end));
    if (url.scheme != "http" && url.scheme != "https") return std::nullopt;

    std::string_view rest = text.substr(scheme_end + 3);
    std::size_t authority_end = rest.find_first_of("/?");
    std::string_view authority =
        authority_end == std::string_view::npos ? rest : rest.substr(0, authority_end);
    // Ignore rare userinfo.
    if (auto at = authority.rfind('@'); at != std::string_view::npos) {
        authority = authority.substr(at + 1);
    }
    auto colon = authority.rfind(':');
    std::string_view host = authority;
    if (colon != std::string_view::npos) {
        std::string_view maybe_port = authority.substr(colon + 1);
        if (!maybe_port.empty() &&
            std::all_of(maybe_port.begin(), maybe_port.end(),
                        [](unsigned char c) { return std::isdigit(c); })) {
            host = authority.substr(0, colon);
            url.port = std::string(maybe_port);
        }
    }
    if (host.empty() || !std::all_of(host.begin(), host.end(), is_host_char)) return std::nullopt;
    url.host = to_lower(host);

    if (authority_end == std::string_view::npos) {
        url.path = "/";
        return url;
    }
    std::string_view tail = rest.substr(authority_end);
    auto qpos = tail.find('?');
    std::string_view path = qpos == std::string_view::npos ? tail : tail.substr(0, qpos);
    if (qpos != std::string_view::npos) url.query = std::string(tail.substr(qpos + 1));
    url.path = path.empty() ? "/" : std::string(path);
    if (url.path[0] == '?') url.path = "/";
    if (url.path[0] != '/') url.path.insert(url.path.begin(), '/');
    return url;
}

std::optional<Url> resolve_url(const Url& base, std::string_view ref) {
    ref = strip_fragment(ref);
    while (!ref.empty() && std::isspace(static_cast<unsigned char>(ref.front()))) ref.remove_prefix(1);
    while (!ref.empty() && std::isspace(static_cast<unsigned char>(ref.back()))) ref.remove_suffix(1);
    if (ref.empty()) return std::nullopt;

    if (ref.rfind("//", 0) == 0) {
        return parse_url(base.scheme + ":" + std::string(ref));
    }
    // A ':' before any '/' or '?' marks a scheme-qualified reference; anything
    // but http(s) (data:, javascript:, mailto:, ...) is unsupported.
    if (auto first_sep = ref.find_first_of(":/?");
        first_sep != std::string_view::npos && ref[first_sep] == ':') {
        if (ref.compare(first_sep, 3, "://") == 0) return parse_url(ref);
        return std::nullopt;
    }

    Url out = base;
    out.query.clear();
    if (ref[0] == '/') {
        auto qpos = ref.find('?');
        out.path = normalize_path(qpos == std::string_view::npos ? ref : ref.substr(0, qpos));
        if (qpos != std::string_view::npos) out.query = std::string(ref.substr(qpos + 1));
        return out;
    }
    if (ref[0] == '?') {
        out.path = base.path;
        out.query = std::string(ref.substr(1));
        return out;
    }
    // Relative path: merge with the base directory.
    std::string dir = base.path.empty() ? "/" : base.path;
    dir = dir.substr(0, dir.rfind('/') + 1);
    auto qpos = ref.find('?');
    std::string merged = dir + std::string(qpos == std::string_view::npos ? ref : ref.substr(0, qpos));
    out.path = normalize_path(merged);
    if (qpos != std::string_view::npos) out.query = std::string(ref.substr(qpos + 1));
    return out;
}

std::optional<std::string> url_host(std::string_view url) {
    auto parsed = parse_url(url);
    if (!parsed) return std::nullopt;
    return parsed->host;
}

std::optional<std::pair<std::size_t, std::size_t>> host_span(std::string_view url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) return std::nullopt;
    std::size_t begin = scheme_end + 3;
    std::size_t end = begin;
    if (auto at = url.find('@', begin);
        at != std::string_view::npos && at < url.find_first_of("/?", begin)) {
        begin = at + 1;
    }
    end = begin;
    while (end < url.size() && is_host_char(url[end])) ++end;
    if (end == begin) return std::nullopt;
    return std::make_pair(begin, end);
}

std::string normalize_url(std::string_view url) {
    url = strip_fragment(url);
    std::string out(url);
    auto scheme_end = out.find("://");
    if (scheme_end == std::string::npos) return out;
    for (std::size_t i = 0; i < scheme_end; ++i) {
        out[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[i])));
    }
    if (auto span = host_span(out)) {
        for (std::size_t i = span->first; i < span->second; ++i) {
            out[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[i])));
        }
    }
    return out;
}

std::string registrable_domain(std::string_view host_in) {
    std::string host = to_lower(host_in);
    while (!host.empty() && host.back() == '.') host.pop_back();
    if (host.empty()) return host;
    if (is_ipv4(host)) return host;

    std::vector<std::string_view> labels;
    std::string_view view = host;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= view.size(); ++i) {
        if (i == view.size() || view[i] == '.') {
            labels.push_back(view.substr(start, i - start));
            start = i + 1;
        }
    }
    if (labels.size() <= 1) return host;

    auto join_last = [&](std::size_t n) {
        std::string out;
        for (std::size_t i = labels.size() - n; i < labels.size(); ++i) {
            if (!out.empty()) out.push_back('.');
            out.append(labels[i]);
        }
        return out;
    };

    std::size_t suffix_labels = 1;
    if (labels.size() >= 2 && multi_label_suffixes().count(join_last(2))) suffix_labels = 2;
    if (labels.size() <= suffix_labels) return host;
    return join_last(suffix_labels + 1);
}

bool plausible_fqdn(std::string_view host) {
    if (host.empty() || host.size() > 253) return false;
    if (is_ipv4(host)) return true;
    int label_count = 0;
    std::size_t start = 0;
    std::string_view last_label;
    for (std::size_t i = 0; i <= host.size(); ++i) {
        if (i == host.size() || host[i] == '.') {
            std::string_view label = host.substr(start, i - start);
            if (label.empty() || label.size() > 63) return false;
            if (label.front() == '-' || label.back() == '-') return false;
            for (char c : label) {
                if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-')) return false;
            }
            last_label = label;
            ++label_count;
            start = i + 1;
        }
    }
    if (label_count < 2) return false;
    // Non-IP hosts need an alphabetic TLD.
    return std::any_of(last_label.begin(), last_label.end(),
                       [](unsigned char c) { return std::isalpha(c); });
}

} // namespace scriptclique
