#include "scriptclique/filters.hpp"

#include <algorithm>
#include <cctype>

#include "scriptclique/urls.hpp"

namespace scriptclique {

namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_separator_char(char c) {
    // "^" matches anything outside [A-Za-z0-9_\-.%].
    return !(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
             c == '%');
}

bool is_anchor_domain_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-';
}

// Parses the option list after '$'. Returns an error reason, or nullopt.
std::optional<std::string> parse_options(std::string_view text, FilterRule& rule) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto comma = text.find(',', pos);
        std::string_view opt = comma == std::string_view::npos ? text.substr(pos)
                                                               : text.substr(pos, comma - pos);
        opt = trim(opt);
        if (opt.empty()) return "empty option";
        if (opt == "script") {
            rule.script_only = true;
        } else if (opt == "third-party") {
            rule.party = FilterRule::Party::third;
        } else if (opt == "~third-party") {
            rule.party = FilterRule::Party::first;
        } else if (opt.rfind("domain=", 0) == 0) {
            std::string_view list = opt.substr(7);
            if (list.empty()) return "empty domain option";
            std::size_t dpos = 0;
            while (dpos <= list.size()) {
                auto bar = list.find('|', dpos);
                std::string_view entry = bar == std::string_view::npos
                                             ? list.substr(dpos)
                                             : list.substr(dpos, bar - dpos);
                if (entry.empty()) return "empty domain entry";
                if (entry.front() == '~') {
                    if (entry.size() == 1) return "empty domain entry";
                    rule.domains_exclude.push_back(to_lower(entry.substr(1)));
                } else {
                    rule.domains_include.push_back(to_lower(entry));
                }
                if (bar == std::string_view::npos) break;
                dpos = bar + 1;
            }
        } else {
            return "unsupported option: " + std::string(opt);
        }
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return std::nullopt;
}

// Splits pattern text into literal / wildcard / separator atoms.
std::vector<PatternAtom> tokenize_pattern(std::string_view text) {
    std::vector<PatternAtom> atoms;
    std::string literal;
    auto flush = [&] {
        if (!literal.empty()) {
            atoms.push_back({PatternAtom::Kind::literal, std::move(literal)});
            literal.clear();
        }
    };
    for (char c : text) {
        if (c == '*') {
            flush();
            if (atoms.empty() || atoms.back().kind != PatternAtom::Kind::wildcard) {
                atoms.push_back({PatternAtom::Kind::wildcard, {}});
            }
        } else if (c == '^') {
            flush();
            atoms.push_back({PatternAtom::Kind::separator, {}});
        } else {
            literal.push_back(c);
        }
    }
    flush();
    return atoms;
}

// Matches the atom list beginning exactly at `pos`; the pattern does not have
// to consume the rest of the URL.
bool match_atoms_at(const std::vector<PatternAtom>& atoms, std::size_t atom_idx,
                    std::string_view url, std::size_t pos) {
    for (std::size_t i = atom_idx; i < atoms.size(); ++i) {
        const PatternAtom& atom = atoms[i];
        switch (atom.kind) {
        case PatternAtom::Kind::literal:
            if (url.compare(pos, atom.text.size(), atom.text) != 0) return false;
            pos += atom.text.size();
            break;
        case PatternAtom::Kind::separator:
            if (pos == url.size()) break; // end of URL counts as a separator
            if (!is_separator_char(url[pos])) return false;
            ++pos;
            break;
        case PatternAtom::Kind::wildcard:
            for (std::size_t next = pos; next <= url.size(); ++next) {
                if (match_atoms_at(atoms, i + 1, url, next)) return true;
            }
            return false;
        }
    }
    return true;
}

bool match_atoms_anywhere(const std::vector<PatternAtom>& atoms, std::string_view url) {
    for (std::size_t pos = 0; pos <= url.size(); ++pos) {
        if (match_atoms_at(atoms, 0, url, pos)) return true;
    }
    return false;
}

bool domain_or_subdomain(std::string_view host, std::string_view domain) {
    if (host == domain) return true;
    return host.size() > domain.size() + 1 && host.ends_with(domain) &&
           host[host.size() - domain.size() - 1] == '.';
}

} // namespace

ParsedFilterList parse_filter_list(std::string_view text) {
    ParsedFilterList out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view raw_line = nl == std::string_view::npos ? text.substr(pos)
                                                                 : text.substr(pos, nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;

        std::string_view line = trim(raw_line);
        auto skip = [&](std::string reason) {
            out.skipped.push_back({line_no, std::move(reason)});
        };
        if (line.empty()) {
            skip("empty line");
            continue;
        }
        if (line.front() == '!') {
            skip("comment");
            continue;
        }
        if (line.front() == '[' && line.back() == ']') {
            skip("section header");
            continue;
        }
        if (line.find("##") != std::string_view::npos ||
            line.find("#@#") != std::string_view::npos ||
            line.find("#?#") != std::string_view::npos ||
            line.find("#$#") != std::string_view::npos) {
            skip("element-hiding rule");
            continue;
        }

        FilterRule rule;
        rule.raw = std::string(line);
        std::string_view body = line;
        if (body.rfind("@@", 0) == 0) {
            rule.action = RuleAction::exception;
            body.remove_prefix(2);
        }

        // Options after the last '$'.
        if (auto dollar = body.rfind('$'); dollar != std::string_view::npos) {
            std::string_view opts = body.substr(dollar + 1);
            if (opts.empty()) {
                skip("empty options");
                continue;
            }
            if (auto err = parse_options(opts, rule)) {
                skip(*err);
                continue;
            }
            body = body.substr(0, dollar);
        }

        if (body.rfind("||", 0) == 0) {
            rule.anchor = RuleAnchor::domain_anchor;
            body.remove_prefix(2);
        } else if (body.rfind("|", 0) == 0) {
            rule.anchor = RuleAnchor::start_anchor;
            body.remove_prefix(1);
        }
        if (body.find('|') != std::string_view::npos) {
            skip("unsupported '|' inside pattern");
            continue;
        }

        if (rule.anchor == RuleAnchor::domain_anchor) {
            std::size_t host_end = 0;
            while (host_end < body.size() && is_anchor_domain_char(body[host_end])) ++host_end;
            if (host_end == 0) {
                skip("domain anchor without a domain");
                continue;
            }
            rule.pattern.push_back({PatternAtom::Kind::literal, to_lower(body.substr(0, host_end))});
            auto rest = tokenize_pattern(body.substr(host_end));
            rule.pattern.insert(rule.pattern.end(), rest.begin(), rest.end());
        } else {
            rule.pattern = tokenize_pattern(body);
            if (rule.pattern.empty() && rule.anchor == RuleAnchor::none && !rule.script_only &&
                rule.party == FilterRule::Party::any && rule.domains_include.empty() &&
                rule.domains_exclude.empty()) {
                skip("pattern matches everything");
                continue;
            }
        }
        out.rules.push_back(std::move(rule));
    }
    return out;
}

bool matches(const FilterRule& rule, const RequestContext& ctx) {
    if (rule.script_only && ctx.resource_type != RequestContext::Resource::script) return false;

    const std::string url = normalize_url(ctx.url);
    auto span = host_span(url);
    if (!span) return false;
    const std::string_view url_view = url;
    const std::string_view host = url_view.substr(span->first, span->second - span->first);

    if (rule.party != FilterRule::Party::any) {
        const bool third = registrable_domain(host) != to_lower(ctx.page_site);
        if (rule.party == FilterRule::Party::third && !third) return false;
        if (rule.party == FilterRule::Party::first && third) return false;
    }
    if (!rule.domains_exclude.empty() || !rule.domains_include.empty()) {
        const std::string page = to_lower(ctx.page_site);
        for (const auto& d : rule.domains_exclude) {
            if (domain_or_subdomain(page, d)) return false;
        }
        if (!rule.domains_include.empty()) {
            bool any = false;
            for (const auto& d : rule.domains_include) {
                if (domain_or_subdomain(page, d)) {
                    any = true;
                    break;
                }
            }
            if (!any) return false;
        }
    }

    switch (rule.anchor) {
    case RuleAnchor::start_anchor:
        return match_atoms_at(rule.pattern, 0, url_view, 0);
    case RuleAnchor::domain_anchor: {
        const std::string& anchored = rule.pattern.front().text;
        if (!domain_or_subdomain(host, anchored)) return false;
        // The anchored domain is a suffix of the host; the rest of the
        // pattern continues right after the host.
        return match_atoms_at(rule.pattern, 1, url_view, span->second);
    }
    case RuleAnchor::none:
    default:
        return match_atoms_anywhere(rule.pattern, url_view);
    }
}

DecideResult decide(const std::vector<FilterRule>& rules, const RequestContext& ctx) {
    const FilterRule* first_block = nullptr;
    const FilterRule* first_exception = nullptr;
    for (const auto& rule : rules) {
        if (rule.action == RuleAction::block) {
            if (first_block == nullptr && matches(rule, ctx)) first_block = &rule;
        } else {
            if (first_exception == nullptr && matches(rule, ctx)) first_exception = &rule;
        }
        if (first_block && first_exception) break;
    }
    if (first_exception != nullptr) return {Decision::allowed, first_exception};
    if (first_block != nullptr) return {Decision::blocked, first_block};
    return {Decision::allowed, nullptr};
}

} // namespace scriptclique
