#include "scriptclique/config_file.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scriptclique/errors.hpp"

namespace scriptclique {

namespace {

void apply_key(AnalysisConfig& config, const std::string& key, double value) {
    if (key == "similarity_threshold") {
        config.similarity_threshold = value;
    } else if (key == "wordcount_ratio_max") {
        config.wordcount_ratio_max = value;
    } else if (key == "min_clique_sites") {
        config.min_clique_sites = static_cast<int>(value);
    } else if (key == "min_tokens") {
        config.min_tokens = static_cast<int>(value);
    } else {
        throw SchemaError("config: unknown key '" + key + "'");
    }
}

std::string trim(std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

} // namespace

AnalysisConfig load_analysis_config(const std::filesystem::path& path, AnalysisConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot read config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = std::move(buf).str();

    if (path.extension() == ".json") {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!doc.is_object()) throw SchemaError("config: expected a JSON object");
        for (const auto& [key, value] : doc.items()) {
            if (!value.is_number()) throw SchemaError("config: key '" + key + "' must be numeric");
            apply_key(base, key, value.get<double>());
        }
        return base;
    }

    // Flat TOML: `key = value` lines, '#' comments.
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(std::move(line));
        if (line.empty()) continue;
        if (line.front() == '[') continue; // section headers carry no keys here
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw SchemaError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            apply_key(base, key, std::stod(value));
        } catch (const std::invalid_argument&) {
            throw SchemaError("config line " + std::to_string(line_no) + ": bad number '" +
                              value + "'");
        }
    }
    return base;
}

} // namespace scriptclique
