// cwnnk: channel-wise NNK graph construction and channel-overlap analysis.

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cwnnk/cwnnk.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Settings {
    std::size_t k = 50;
    cwnnk::KernelConfig kernel;
    double weight_threshold = 1e-6;
    unsigned threads = 1;
    fs::path output_dir = ".";
};

struct GlobalFlags {
    std::size_t k = 50;
    double sigma = 1.0;
    std::string sigma_mode = "adaptive";
    double scale_factor = 1.0;
    double weight_threshold = 1e-6;
    unsigned threads = 1;
    std::string output_dir = ".";
    std::string config_path;

    CLI::Option* k_opt = nullptr;
    CLI::Option* sigma_opt = nullptr;
    CLI::Option* mode_opt = nullptr;
    CLI::Option* scale_opt = nullptr;
    CLI::Option* threshold_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
    CLI::Option* out_opt = nullptr;
};

cwnnk::SigmaMode parse_sigma_mode(const std::string& s) {
    if (s == "fixed") return cwnnk::SigmaMode::fixed;
    if (s == "adaptive" || s == "adaptive_mean_knn_dist") return cwnnk::SigmaMode::adaptive_mean_knn_dist;
    throw UsageError("unknown sigma mode '" + s + "'");
}

void require_file(const std::string& path, const std::string& what) {
    if (path.empty()) throw UsageError("missing " + what);
    if (!fs::is_regular_file(path)) throw UsageError(what + " not found: " + path);
}

// flags > config file > defaults; CWNNK_THREADS stands in for an absent --threads
Settings resolve_settings(const GlobalFlags& f) {
    Settings s;
    if (!f.config_path.empty()) {
        require_file(f.config_path, "config file");
        json cfg;
        try {
            std::ifstream in(f.config_path);
            cfg = json::parse(in);
            if (cfg.contains("k")) s.k = cfg["k"].get<std::size_t>();
            if (cfg.contains("sigma")) {
                s.kernel.sigma = cfg["sigma"].get<double>();
                s.kernel.sigma_mode = cwnnk::SigmaMode::fixed;
            }
            if (cfg.contains("sigma_mode")) s.kernel.sigma_mode = parse_sigma_mode(cfg["sigma_mode"].get<std::string>());
            if (cfg.contains("scale_factor")) s.kernel.scale_factor = cfg["scale_factor"].get<double>();
            if (cfg.contains("weight_threshold")) s.weight_threshold = cfg["weight_threshold"].get<double>();
            if (cfg.contains("threads")) s.threads = cfg["threads"].get<unsigned>();
            if (cfg.contains("output_dir")) s.output_dir = cfg["output_dir"].get<std::string>();
        } catch (const json::exception& e) {
            throw UsageError(std::string("bad config file: ") + e.what());
        }
    }
    if (f.k_opt->count()) s.k = f.k;
    if (f.sigma_opt->count()) {
        s.kernel.sigma = f.sigma;
        s.kernel.sigma_mode = cwnnk::SigmaMode::fixed;
    }
    if (f.mode_opt->count()) s.kernel.sigma_mode = parse_sigma_mode(f.sigma_mode);
    if (f.scale_opt->count()) s.kernel.scale_factor = f.scale_factor;
    if (f.threshold_opt->count()) s.weight_threshold = f.weight_threshold;
    if (f.threads_opt->count()) {
        s.threads = f.threads;
    } else if (const char* env = std::getenv("CWNNK_THREADS"); env && *env) {
        try {
            s.threads = static_cast<unsigned>(std::stoul(env));
        } catch (const std::exception&) {
            throw UsageError(std::string("CWNNK_THREADS is not a number: ") + env);
        }
    }
    if (f.out_opt->count()) s.output_dir = f.output_dir;
    if (s.k < 1) throw UsageError("--k must be positive");
    if (s.threads < 1) s.threads = 1;
    return s;
}

cwnnk::NNKOptions nnk_options(const Settings& s) {
    cwnnk::NNKOptions o;
    o.weight_threshold = s.weight_threshold;
    o.threads = s.threads;
    return o;
}

std::string file_stem(std::string name) {
    for (char& ch : name)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '.') ch = '_';
    return name.empty() ? std::string("layer") : name;
}

cwnnk::AggregateInit parse_init(const std::string& s) {
    if (s == "union") return cwnnk::AggregateInit::union_of_channel_knn;
    if (s == "aggregate") return cwnnk::AggregateInit::aggregate_knn;
    throw UsageError("unknown --init '" + s + "' (expected union or aggregate)");
}

std::string init_name(cwnnk::AggregateInit init) {
    return init == cwnnk::AggregateInit::union_of_channel_knn ? "union" : "aggregate";
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw cwnnk::Error(cwnnk::ErrorCode::io_failure, "cannot write " + path.string());
    out << text;
}

// -----------------------------------------------------------------------------
// build / overlap / neighbors
// -----------------------------------------------------------------------------

json write_layer_graphs(const cwnnk::FeatureSet& features, const cwnnk::LayerAnalysis& analysis,
                        const Settings& s, cwnnk::AggregateInit init) {
    const std::string stem = file_stem(features.layer_name());
    json meta;
    meta["layer_name"] = features.layer_name();
    meta["n_points"] = features.size();
    meta["k"] = s.k;
    meta["sigma"] = analysis.sigma;
    meta["weight_threshold"] = s.weight_threshold;
    meta["aggregate_init"] = init_name(init);
    meta["channels"] = json::array();
    for (std::size_t c = 0; c < analysis.bundle.channel_count(); ++c) {
        const std::string file = stem + "." + file_stem(analysis.bundle.channel_names[c]) + ".cwng";
        cwnnk::io::save_graph(s.output_dir / file, analysis.bundle.per_channel[c]);
        meta["channels"].push_back({{"name", analysis.bundle.channel_names[c]}, {"graph", file}});
    }
    const std::string agg_file = stem + ".aggregate.cwng";
    cwnnk::io::save_graph(s.output_dir / agg_file, analysis.aggregate);
    meta["aggregate_graph"] = agg_file;
    return meta;
}

int cmd_build(const Settings& s, const std::string& features_path, const std::string& manifest_path,
              const std::string& init_str) {
    require_file(features_path, "--features");
    require_file(manifest_path, "--manifest");
    const auto init = parse_init(init_str);
    const auto features = cwnnk::io::load_features(features_path, manifest_path);
    const auto analysis = cwnnk::analyze_layer(features, s.k, s.kernel, nnk_options(s), init);
    const auto meta = write_layer_graphs(features, analysis, s, init);
    const fs::path meta_path = s.output_dir / (file_stem(features.layer_name()) + ".graphs.json");
    cwnnk::io::write_json(meta_path, meta);
    std::cout << meta_path.string() << "\n";
    return 0;
}

struct LoadedGraphs {
    json meta;
    cwnnk::ChannelGraphBundle bundle;
    cwnnk::NNKGraph aggregate;
};

LoadedGraphs load_graphs(const std::string& meta_path) {
    require_file(meta_path, "--graphs");
    LoadedGraphs g;
    std::ifstream in(meta_path);
    try {
        g.meta = json::parse(in);
        const fs::path dir = fs::path(meta_path).parent_path();
        g.bundle.k_used = g.meta.at("k").get<std::size_t>();
        g.bundle.sigma_used = g.meta.at("sigma").get<double>();
        for (const auto& c : g.meta.at("channels")) {
            g.bundle.channel_names.push_back(c.at("name").get<std::string>());
            g.bundle.per_channel.push_back(cwnnk::io::load_graph(dir / c.at("graph").get<std::string>()));
        }
        g.aggregate = cwnnk::io::load_graph(dir / g.meta.at("aggregate_graph").get<std::string>());
    } catch (const json::exception& e) {
        throw cwnnk::Error(cwnnk::ErrorCode::parse_error, std::string("malformed graph metadata: ") + e.what());
    }
    cwnnk::validate_bundle(g.bundle);
    return g;
}

std::string pair_matrix_csv(const cwnnk::OverlapReport& r) {
    cwnnk::report::CsvTable t;
    std::vector<std::string> header{"channel"};
    header.insert(header.end(), r.channel_names.begin(), r.channel_names.end());
    t.push_back(header);
    for (std::size_t a = 0; a < r.pairs.channels; ++a) {
        std::vector<std::string> row{r.channel_names[a]};
        for (std::size_t b = 0; b < r.pairs.channels; ++b) row.push_back(cwnnk::report::format_number(r.pairs.at(a, b)));
        t.push_back(row);
    }
    return cwnnk::report::to_csv(t);
}

int cmd_overlap(const Settings& s, const std::string& graphs_path) {
    const auto g = load_graphs(graphs_path);
    const std::string layer = g.meta.value("layer_name", std::string());
    const auto report = cwnnk::make_overlap_report(layer, g.bundle, g.aggregate);
    const std::string stem = file_stem(layer);
    cwnnk::io::write_json(s.output_dir / (stem + ".overlap.json"), cwnnk::io::to_json(report));
    write_text(s.output_dir / (stem + ".pairs.csv"), pair_matrix_csv(report));
    std::cout << json{{"layer_name", layer},
                      {"cw_overlap", report.cw_overlap},
                      {"cw_overlap_pair_normalized", report.cw_overlap_pair_normalized},
                      {"mean_aggregate_nnk_count", *report.mean_aggregate_nnk_count}}
                     .dump()
              << "\n";
    return 0;
}

int cmd_neighbors(const Settings& s, const std::string& graphs_path, std::size_t query, const std::string& channels) {
    const auto g = load_graphs(graphs_path);
    std::vector<std::string> names;
    if (channels.empty()) {
        names = g.bundle.channel_names;
    } else {
        std::stringstream ss(channels);
        for (std::string item; std::getline(ss, item, ',');)
            if (!item.empty()) names.push_back(item);
    }
    const auto listing = cwnnk::neighbor_listing(g.bundle, query, names);
    json out;
    out["layer_name"] = g.meta.value("layer_name", std::string());
    out["query"] = query;
    out["channels"] = json::array();
    for (const auto& l : listing)
        out["channels"].push_back({{"name", l.channel}, {"neighbors", l.neighbor_indices}, {"weights", l.weights}});
    cwnnk::io::write_json(s.output_dir / (file_stem(out["layer_name"].get<std::string>()) + ".neighbors_" +
                                          std::to_string(query) + ".json"),
                          out);
    std::cout << out.dump() << "\n";
    return 0;
}

// -----------------------------------------------------------------------------
// verify
// -----------------------------------------------------------------------------

void accumulate(cwnnk::TheoremReport& total, const cwnnk::TheoremReport& r) {
    total.instances_checked += r.instances_checked;
    total.violations += r.violations;
    for (const auto& v : r.violation_details)
        if (total.violation_details.size() < cwnnk::TheoremReport::max_details) total.violation_details.push_back(v);
    total.three_node_checked += r.three_node_checked;
    total.three_node_violations += r.three_node_violations;
    total.lower_bound_checked += r.lower_bound_checked;
    total.lower_bound_violations += r.lower_bound_violations;
    total.precondition_unmet += r.precondition_unmet;
    total.near_misses += r.near_misses;
    for (const auto& v : r.near_miss_details)
        if (total.near_miss_details.size() < cwnnk::TheoremReport::max_details) total.near_miss_details.push_back(v);
}

struct VerifyArgs {
    std::string theorem = "t2";
    std::size_t trials = 10000;
    std::uint64_t seed = 42;
    std::string features;
    std::string manifest;
    std::string init = "union";
    std::size_t sets = 20;
    std::size_t points = 200;
    std::size_t dim = 8;
    std::size_t channels = 2;
};

int cmd_verify(const Settings& s, const VerifyArgs& a) {
    std::string th = a.theorem;
    std::transform(th.begin(), th.end(), th.begin(), [](unsigned char ch) { return std::tolower(ch); });
    cwnnk::TheoremReport report;
    json extra = json::object();

    if (th == "t2") {
        report = cwnnk::verify_theorem2(a.trials, a.seed, s.threads);
        extra = {{"trials", a.trials}, {"seed", a.seed}};
    } else if (th == "l1") {
        report = cwnnk::search_lemma1_witnesses(a.trials, a.seed, s.threads);
        extra = {{"trials", a.trials}, {"seed", a.seed}};
    } else if (th == "t1" || th == "c1") {
        const bool is_t1 = th == "t1";
        report.theorem_id = is_t1 ? cwnnk::TheoremId::T1 : cwnnk::TheoremId::C1;
        const auto init = parse_init(a.init);
        const auto opts = nnk_options(s);
        auto run = [&](const cwnnk::FeatureSet& f) {
            return is_t1 ? cwnnk::verify_theorem1(f, s.k, s.kernel, opts)
                         : cwnnk::verify_corollary1(f, s.k, s.kernel, init, opts);
        };
        if (!a.features.empty() || !a.manifest.empty()) {
            require_file(a.features, "--features");
            require_file(a.manifest, "--manifest");
            accumulate(report, run(cwnnk::io::load_features(a.features, a.manifest)));
            extra = {{"features", a.features}};
        } else {
            for (std::size_t set = 0; set < a.sets; ++set) {
                const auto f = cwnnk::synthetic::gaussian_features(a.points, a.dim, a.channels,
                                                                   cwnnk::substream_seed(a.seed, set));
                accumulate(report, run(f));
            }
            extra = {{"synthetic_sets", a.sets}, {"points", a.points}, {"dim", a.dim},
                     {"channels", a.channels},   {"seed", a.seed}};
        }
        extra["k"] = s.k;
        if (!is_t1) extra["aggregate_init"] = a.init;
    } else {
        throw UsageError("unknown theorem '" + a.theorem + "' (expected t1, c1, t2 or l1)");
    }

    json out = cwnnk::io::to_json(report);
    out["run"] = extra;
    cwnnk::io::write_json(s.output_dir / ("verify_" + th + ".json"), out);
    std::cout << json{{"theorem_id", out["theorem_id"]},
                      {"instances_checked", report.instances_checked},
                      {"violations", report.violations},
                      {"passed", report.passed()}}
                     .dump()
              << "\n";
    return report.passed() ? 0 : 1;
}

// -----------------------------------------------------------------------------
// sweep / correlate
// -----------------------------------------------------------------------------

std::string tag_of(const json& source) {
    if (source.contains("model_tag") && source["model_tag"].is_string()) return source["model_tag"].get<std::string>();
    if (source.contains("dropout") && source["dropout"].is_number())
        return "dropout=" + cwnnk::report::format_number(source["dropout"].get<double>());
    return "default";
}

struct LayerEntry {
    std::string tag;
    std::optional<std::size_t> layer_index;
    std::string stem;
    cwnnk::FeatureSet features;
};

json run_sweep(const Settings& s, const std::string& input_dir) {
    if (input_dir.empty() || !fs::is_directory(input_dir)) throw UsageError("--input-dir is not a directory: " + input_dir);
    std::vector<fs::path> manifests;
    for (const auto& e : fs::directory_iterator(input_dir))
        if (e.is_regular_file() && e.path().extension() == ".json") manifests.push_back(e.path());
    std::sort(manifests.begin(), manifests.end());

    std::vector<std::string> warnings;
    std::vector<LayerEntry> entries;
    for (const auto& m : manifests) {
        fs::path tensor = m;
        tensor.replace_extension(".bin");
        if (!fs::exists(tensor)) tensor.replace_extension(".csv");
        if (!fs::exists(tensor)) {
            warnings.push_back("no tensor next to " + m.filename().string() + ", skipped");
            continue;
        }
        auto f = cwnnk::io::load_features(tensor, m);
        LayerEntry e{tag_of(f.source()), std::nullopt, m.stem().string(), std::move(f)};
        if (e.features.source().contains("layer_index")) e.layer_index = e.features.source()["layer_index"].get<std::size_t>();
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw UsageError("no layer dumps found in " + input_dir);

    std::map<std::string, std::vector<const LayerEntry*>> by_tag;
    for (const auto& e : entries) by_tag[e.tag].push_back(&e);

    std::vector<cwnnk::report::SweepRow> rows;
    const auto opts = nnk_options(s);
    for (auto& [tag, layers] : by_tag) {
        std::stable_sort(layers.begin(), layers.end(), [](const LayerEntry* a, const LayerEntry* b) {
            if (a->layer_index && b->layer_index) return *a->layer_index < *b->layer_index;
            if (a->layer_index != b->layer_index) return a->layer_index.has_value();
            return a->stem < b->stem;
        });
        std::vector<cwnnk::OverlapReport> reports;
        std::optional<double> test_error;
        for (const LayerEntry* e : layers) {
            if (!e->layer_index) warnings.push_back(tag + ": " + e->stem + " has no layer_index, ordered by file name");
            const auto& src = e->features.source();
            if (src.contains("test_error") && src["test_error"].is_number()) test_error = src["test_error"].get<double>();
            const auto analysis = cwnnk::analyze_layer(e->features, s.k, s.kernel, opts);
            reports.push_back(cwnnk::layer_report(e->features, analysis));
        }
        auto series = cwnnk::report::layer_sweep(reports, tag, test_error);
        for (auto& w : series.warnings) warnings.push_back(tag + ": " + w);
        rows.insert(rows.end(), series.rows.begin(), series.rows.end());
    }

    json out;
    out["k"] = s.k;
    out["rows"] = json::array();
    for (const auto& r : rows) out["rows"].push_back(cwnnk::report::to_json(r));
    out["warnings"] = warnings;
    cwnnk::io::write_json(s.output_dir / "sweep.json", out);
    write_text(s.output_dir / "sweep.csv", cwnnk::report::sweep_to_csv(rows));
    for (const auto& w : warnings) std::cerr << json{{"warning", w}}.dump() << "\n";
    return out;
}

int cmd_sweep(const Settings& s, const std::string& input_dir) {
    const auto out = run_sweep(s, input_dir);
    std::cout << (s.output_dir / "sweep.csv").string() << "\n";
    return 0;
}

int cmd_correlate(const Settings& s, const std::string& sweep_path, const std::string& input_dir) {
    json sweep;
    if (!sweep_path.empty()) {
        require_file(sweep_path, "--sweep");
        std::ifstream in(sweep_path);
        try {
            sweep = json::parse(in);
        } catch (const json::exception& e) {
            throw cwnnk::Error(cwnnk::ErrorCode::parse_error, std::string("malformed sweep file: ") + e.what());
        }
    } else if (!input_dir.empty()) {
        sweep = run_sweep(s, input_dir);
    } else {
        throw UsageError("correlate needs --sweep or --input-dir");
    }

    std::map<std::string, cwnnk::report::SweepRow> last;
    for (const auto& j : sweep.at("rows")) {
        auto row = cwnnk::report::sweep_row_from_json(j);
        auto it = last.find(row.model_tag);
        if (it == last.end() || row.layer_index >= it->second.layer_index) last[row.model_tag] = row;
    }
    std::vector<std::pair<std::string, double>> raw, normalized, errors;
    cwnnk::report::CsvTable series{{"model_tag", "test_error", "cw_overlap", "cw_overlap_pair_normalized"}};
    for (const auto& [tag, row] : last) {
        raw.emplace_back(tag, row.cw_overlap);
        normalized.emplace_back(tag, row.cw_overlap_pair_normalized);
        if (row.test_error) errors.emplace_back(tag, *row.test_error);
        series.push_back({tag, row.test_error ? cwnnk::report::format_number(*row.test_error) : "",
                          cwnnk::report::format_number(row.cw_overlap),
                          cwnnk::report::format_number(row.cw_overlap_pair_normalized)});
    }
    json out;
    out["cw_overlap"] = cwnnk::report::to_json(cwnnk::report::correlation(raw, errors));
    out["cw_overlap_pair_normalized"] = cwnnk::report::to_json(cwnnk::report::correlation(normalized, errors));
    cwnnk::io::write_json(s.output_dir / "correlation.json", out);
    write_text(s.output_dir / "correlation.csv", cwnnk::report::to_csv(series));
    std::cout << out.dump() << "\n";
    return 0;
}

void print_error(std::string_view code, const std::string& message) {
    std::cerr << json{{"error", code}, {"message", message}}.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Channel-wise NNK graphs: construction, channel overlap and neighborhood checks", "cwnnk"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags g;
    g.k_opt = app.add_option("--k", g.k, "KNN initialization size")->capture_default_str();
    g.sigma_opt = app.add_option("--sigma", g.sigma, "fixed kernel bandwidth (implies --sigma-mode fixed)");
    g.mode_opt = app.add_option("--sigma-mode", g.sigma_mode, "fixed | adaptive")->capture_default_str();
    g.scale_opt = app.add_option("--scale-factor", g.scale_factor, "multiplier on the adaptive bandwidth");
    g.threshold_opt =
        app.add_option("--weight-threshold", g.weight_threshold, "NNK weights at or below this are pruned")
            ->capture_default_str();
    g.threads_opt = app.add_option("--threads", g.threads, "worker threads (env CWNNK_THREADS)");
    g.out_opt = app.add_option("--output-dir", g.output_dir, "directory for output files")->capture_default_str();
    app.add_option("--config", g.config_path, "JSON config file (flags take precedence)");

    std::string features, manifest, init = "union", graphs, channels, input_dir, sweep_path;
    std::size_t query = 0;
    VerifyArgs verify;

    auto* build = app.add_subcommand("build", "features -> per-channel and aggregate NNK graphs");
    build->add_option("--features", features, "feature tensor (.bin or .csv)");
    build->add_option("--manifest", manifest, "manifest JSON");
    build->add_option("--init", init, "aggregate initialization: union | aggregate")->capture_default_str();

    auto* overlap = app.add_subcommand("overlap", "graphs -> overlap report");
    overlap->add_option("--graphs", graphs, "graph metadata written by build");

    auto* verify_cmd = app.add_subcommand("verify", "run a theorem check");
    verify_cmd->add_option("--theorem", verify.theorem, "t1 | c1 | t2 | l1")->capture_default_str();
    verify_cmd->add_option("--trials", verify.trials, "trials for t2 / l1")->capture_default_str();
    verify_cmd->add_option("--seed", verify.seed, "random seed")->capture_default_str();
    verify_cmd->add_option("--features", verify.features, "feature tensor for t1 / c1 (default: synthetic sets)");
    verify_cmd->add_option("--manifest", verify.manifest, "manifest for --features");
    verify_cmd->add_option("--init", verify.init, "c1 aggregate initialization: union | aggregate")
        ->capture_default_str();
    verify_cmd->add_option("--sets", verify.sets, "synthetic feature sets for t1 / c1")->capture_default_str();
    verify_cmd->add_option("--points", verify.points, "points per synthetic set")->capture_default_str();
    verify_cmd->add_option("--dim", verify.dim, "dimension of synthetic sets")->capture_default_str();
    verify_cmd->add_option("--channels", verify.channels, "channels of synthetic sets")->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "directory of layer dumps -> depth series");
    sweep->add_option("--input-dir", input_dir, "directory with <name>.json manifests and <name>.bin tensors");

    auto* correlate = app.add_subcommand("correlate", "last-layer overlap vs test error");
    correlate->add_option("--sweep", sweep_path, "sweep.json written by sweep");
    correlate->add_option("--input-dir", input_dir, "run a sweep on this directory first");

    auto* neighbors = app.add_subcommand("neighbors", "per-channel neighbor listing for one query");
    neighbors->add_option("--graphs", graphs, "graph metadata written by build");
    neighbors->add_option("--query", query, "query node id")->required();
    neighbors->add_option("--channels", channels, "comma-separated channel names (default: all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("usage", e.what());
        std::cerr << app.help();
        return 2;
    }

    try {
        const Settings s = resolve_settings(g);
        if (*build) return cmd_build(s, features, manifest, init);
        if (*overlap) return cmd_overlap(s, graphs);
        if (*verify_cmd) return cmd_verify(s, verify);
        if (*sweep) return cmd_sweep(s, input_dir);
        if (*correlate) return cmd_correlate(s, sweep_path, input_dir);
        if (*neighbors) return cmd_neighbors(s, graphs, query, channels);
    } catch (const UsageError& e) {
        print_error("usage", e.what());
        return 2;
    } catch (const cwnnk::Error& e) {
        print_error(cwnnk::to_string(e.code()), e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
    return 2;
}
