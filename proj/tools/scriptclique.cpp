#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "scriptclique/blocking.hpp"
#include "scriptclique/calibration.hpp"
#include "scriptclique/config_file.hpp"
#include "scriptclique/errors.hpp"
#include "scriptclique/harvester.hpp"
#include "scriptclique/report.hpp"
#include "scriptclique/version.hpp"

namespace sc = scriptclique;

namespace {

// Writes to the given path, or stdout for "-" / empty.
void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw sc::Error("cannot write output file: " + out_path);
    out << text;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw sc::Error("cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shared third-party script detection via similarity cliques"};
    app.set_version_flag("--version", sc::tool_id());
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    std::string config_path;
    bool quiet = false;
    app.add_option("--config", config_path, "Analysis config file (.json or flat TOML)")
        ->configurable(false);
    app.add_flag("--quiet", quiet, "Suppress progress logging");

    // harvest
    auto* cmd_harvest = app.add_subcommand("harvest", "Fetch sites and build a corpus");
    sc::HarvestConfig harvest_config;
    std::string harvest_urls;
    std::string harvest_out;
    cmd_harvest->add_option("--urls", harvest_urls, "URL list file, one URL per line")->required();
    cmd_harvest->add_option("--out", harvest_out, "Corpus output directory")->required();
    cmd_harvest->add_option("--timeout", harvest_config.timeout_secs, "Per-request timeout (s)")
        ->check(CLI::PositiveNumber);
    cmd_harvest->add_option("--parallel", harvest_config.max_parallel_sites,
                            "Concurrent site fetches")
        ->check(CLI::PositiveNumber);
    cmd_harvest->add_option("--user-agent", harvest_config.user_agent, "User-Agent header");
    cmd_harvest->add_option("--max-script-bytes", harvest_config.max_script_bytes,
                            "Script download size cap");
    cmd_harvest->add_option("--redirects", harvest_config.follow_redirects, "Redirect hop limit");

    // shared analysis knobs
    sc::AnalysisConfig analysis;
    auto add_analysis_flags = [&](CLI::App* cmd, bool with_threshold) {
        if (with_threshold) {
            cmd->add_option("--threshold", analysis.similarity_threshold,
                            "Similarity threshold (edge iff sim >= t)");
        }
        cmd->add_option("--ratio-max", analysis.wordcount_ratio_max, "Word-count ratio bound");
        cmd->add_option("--min-sites", analysis.min_clique_sites,
                        "Minimum distinct sites per retained clique");
        cmd->add_option("--min-tokens", analysis.min_tokens, "Minimum tokens per analyzable script");
    };

    // analyze
    auto* cmd_analyze = app.add_subcommand("analyze", "Run the clique pipeline over a corpus");
    std::string analyze_corpus;
    std::string analyze_rules;
    std::string analyze_out = "clique_report.json";
    std::string analyze_dump_graph;
    cmd_analyze->add_option("--corpus", analyze_corpus, "Corpus directory")->required();
    cmd_analyze->add_option("--rules", analyze_rules, "Signature ruleset JSON (default built-in)");
    cmd_analyze->add_option("--out", analyze_out, "Report JSON path ('-' for stdout)");
    cmd_analyze->add_option("--dump-graph", analyze_dump_graph, "Write edge CSV to this path");
    add_analysis_flags(cmd_analyze, true);

    // calibrate
    auto* cmd_calibrate = app.add_subcommand("calibrate", "Threshold sweep with optional labels");
    std::string calibrate_corpus;
    std::string calibrate_labels;
    std::string calibrate_out;
    double sweep_min = 0.40, sweep_max = 1.00, sweep_step = 0.05;
    cmd_calibrate->add_option("--corpus", calibrate_corpus, "Corpus directory")->required();
    cmd_calibrate->add_option("--labels", calibrate_labels, "Ground-truth labels JSON");
    cmd_calibrate->add_option("--min", sweep_min, "Lowest threshold");
    cmd_calibrate->add_option("--max", sweep_max, "Highest threshold");
    cmd_calibrate->add_option("--step", sweep_step, "Grid step");
    cmd_calibrate->add_option("--out", calibrate_out, "CSV output ('-' for stdout)");
    add_analysis_flags(cmd_calibrate, false);

    // check-blocking
    auto* cmd_blocking = app.add_subcommand("check-blocking",
                                            "Counter-block matrix for anti-adblock vendors");
    std::string blocking_report;
    std::vector<std::string> blocking_lists;
    std::string blocking_out;
    cmd_blocking->add_option("--report", blocking_report, "clique_report.json from analyze")
        ->required();
    cmd_blocking->add_option("--list", blocking_lists, "Filter list as name=path (repeatable)")
        ->required();
    cmd_blocking->add_option("--out", blocking_out, "CSV output ('-' for stdout)");

    // categorize
    auto* cmd_categorize = app.add_subcommand("categorize", "Site-category distribution");
    std::string categorize_report;
    std::string categorize_map;
    std::string categorize_basis = "anti_adblock_sites";
    std::string categorize_out;
    cmd_categorize->add_option("--report", categorize_report, "clique_report.json")->required();
    cmd_categorize->add_option("--map", categorize_map, "CSV mapping site_id,category")->required();
    cmd_categorize->add_option("--basis", categorize_basis,
                               "anti_adblock_sites (default) or all_sites");
    cmd_categorize->add_option("--out", categorize_out, "CSV output ('-' for stdout)");

    // top
    auto* cmd_top = app.add_subcommand("top", "Largest cliques by distinct-site count");
    std::string top_report;
    std::uint64_t top_k = 10;
    std::string top_out;
    cmd_top->add_option("--report", top_report, "clique_report.json")->required();
    cmd_top->add_option("-k,--count", top_k, "How many cliques to list");
    cmd_top->add_option("--out", top_out, "CSV output ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return sc::kExitUsage;
    }

    try {
        if (!config_path.empty()) {
            analysis = sc::load_analysis_config(config_path, analysis);
            // Flags given on the command line win over the config file.
            for (CLI::App* cmd : {cmd_analyze, cmd_calibrate}) {
                if (auto* opt = cmd->get_option_no_throw("--threshold");
                    opt && opt->count() > 0) {
                    analysis.similarity_threshold = std::stod(opt->results().front());
                }
                if (auto* opt = cmd->get_option_no_throw("--ratio-max"); opt && opt->count() > 0) {
                    analysis.wordcount_ratio_max = std::stod(opt->results().front());
                }
                if (auto* opt = cmd->get_option_no_throw("--min-sites"); opt && opt->count() > 0) {
                    analysis.min_clique_sites = std::stoi(opt->results().front());
                }
                if (auto* opt = cmd->get_option_no_throw("--min-tokens"); opt && opt->count() > 0) {
                    analysis.min_tokens = std::stoi(opt->results().front());
                }
            }
        }

        if (cmd_harvest->parsed()) {
            harvest_config.url_list_path = harvest_urls;
            harvest_config.out_dir = harvest_out;
            const auto manifest = sc::harvest(harvest_config, quiet ? nullptr : &std::cerr);
            if (!quiet) {
                std::cerr << "harvested " << manifest.pages.size() << " pages, "
                          << manifest.scripts.size() << " scripts into " << harvest_out << '\n';
            }
            return sc::kExitOk;
        }

        if (cmd_analyze->parsed()) {
            sc::SignatureRuleSet rules = analyze_rules.empty()
                                             ? sc::SignatureRuleSet::builtin_default()
                                             : sc::SignatureRuleSet::load(analyze_rules);
            std::optional<std::filesystem::path> dump;
            if (!analyze_dump_graph.empty()) dump = analyze_dump_graph;
            const auto report = sc::analyze(analyze_corpus, analysis, rules, dump);
            emit(analyze_out, sc::report_to_json_text(report));
            if (!quiet) {
                std::cerr << "cliques: " << report.cliques.size()
                          << ", compared pairs: " << report.audit.n_compared << " of "
                          << report.audit.n_total_pairs << ", edges: " << report.audit.n_edges
                          << '\n';
            }
            return sc::kExitOk;
        }

        if (cmd_calibrate->parsed()) {
            std::vector<sc::GroundTruthLabel> labels;
            if (!calibrate_labels.empty()) labels = sc::load_ground_truth(calibrate_labels);
            const auto data = sc::prepare_pipeline(sc::load_corpus(calibrate_corpus), analysis);
            const auto rows = sc::sweep(data, analysis, labels, sweep_min, sweep_max, sweep_step);
            std::ostringstream csv;
            sc::write_calibration_csv(rows, csv);
            emit(calibrate_out, csv.str());
            return sc::kExitOk;
        }

        if (cmd_blocking->parsed()) {
            const auto report = sc::load_report(blocking_report);
            std::vector<sc::NamedFilterList> lists;
            for (const auto& list_arg : blocking_lists) {
                auto eq = list_arg.find('=');
                if (eq == std::string::npos || eq == 0) {
                    std::cerr << "--list expects name=path, got: " << list_arg << '\n';
                    return sc::kExitUsage;
                }
                sc::NamedFilterList list;
                list.name = list_arg.substr(0, eq);
                auto parsed = sc::parse_filter_list(read_text_file(list_arg.substr(eq + 1)));
                if (!quiet) {
                    std::cerr << "list " << list.name << ": " << parsed.rules.size()
                              << " rules, " << parsed.skipped.size() << " skipped\n";
                }
                list.rules = std::move(parsed.rules);
                lists.push_back(std::move(list));
            }
            const auto rows = sc::counterblock_report(report, lists);
            std::ostringstream csv;
            sc::write_counterblock_csv(rows, csv);
            emit(blocking_out, csv.str());
            return sc::kExitOk;
        }

        if (cmd_categorize->parsed()) {
            const auto report = sc::load_report(categorize_report);
            const auto table = sc::categorize(report, categorize_map, categorize_basis);
            std::ostringstream csv;
            sc::write_category_csv(table, csv);
            emit(categorize_out, csv.str());
            return sc::kExitOk;
        }

        if (cmd_top->parsed()) {
            const auto report = sc::load_report(top_report);
            const auto rows = sc::top_cliques(report, top_k);
            std::ostringstream csv;
            sc::write_top_csv(rows, csv);
            emit(top_out, csv.str());
            return sc::kExitOk;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return sc::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return sc::kExitData;
    }
    return sc::kExitUsage;
}
