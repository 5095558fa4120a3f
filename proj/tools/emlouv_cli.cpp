// emlouv: embedding-augmented Louvain community detection pipeline.
//
// detect     run embeddings -> Louvain -> optional merging -> metrics
// sweep      rerun the merging stage at several thresholds from one cached partition
// hypothesis per-class embedding separation table
// eval       score an externally produced partition file

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "emlouv/dataset.hpp"
#include "emlouv/embedding.hpp"
#include "emlouv/louvain.hpp"
#include "emlouv/merging.hpp"
#include "emlouv/metrics.hpp"

using json = nlohmann::ordered_json;

namespace {

struct CommonOpts {
    std::string content;
    std::string cites;
    std::string embedding_file; // empty: propagate features instead
    int hops = 2;
    emlouv::LouvainConfig louvain;
    std::string out; // empty: stdout
    bool omit_timings = false;
    std::string config_file; // consumed before CLI11 parsing, see expand_config
};

struct MergeOpts {
    bool enabled = false;
    emlouv::MergeConfig config;
};

struct StageTimer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double lap() {
        const auto t = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(t - t0).count();
        t0 = t;
        return s;
    }
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_objective) {
    cmd->add_option("--content", o.content, "path to the .content file")->required();
    cmd->add_option("--cites", o.cites, "path to the .cites file")->required();
    cmd->add_option("--embedding-file", o.embedding_file,
                    "CSV of precomputed embeddings (default: propagate features)");
    cmd->add_option("--hops", o.hops, "propagation hops when no embedding file is given")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    if (with_objective) {
        const std::map<std::string, emlouv::LouvainConfig::Objective> names{
            {"modularity", emlouv::LouvainConfig::Objective::modularity_only},
            {"modularity_only", emlouv::LouvainConfig::Objective::modularity_only},
            {"combined", emlouv::LouvainConfig::Objective::combined}};
        cmd->add_option("--objective", o.louvain.objective, "move objective")
            ->transform(CLI::CheckedTransformer(names, CLI::ignore_case))
            ->default_str("combined");
        cmd->add_option("--log-base", o.louvain.log_base_p, "log base of the combined score")
            ->capture_default_str();
        cmd->add_option("--distance-epsilon", o.louvain.distance_epsilon,
                        "lower clamp for centroid distances in the combined score")
            ->capture_default_str();
        cmd->add_option("--min-gain", o.louvain.min_gain, "required improvement over staying put")
            ->capture_default_str();
        cmd->add_option("--max-levels", o.louvain.max_levels, "coarsening level cap")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    }
    cmd->add_option("--seed", o.louvain.seed, "seed for every random draw")->capture_default_str();
    cmd->add_option("--out", o.out, "output path (default: stdout)");
    cmd->add_flag("--omit-timings", o.omit_timings, "drop the timings block for byte-stable output");
    cmd->add_option("--config", o.config_file, "flat key=value config file; flags win");
}

void add_merge(CLI::App* cmd, MergeOpts& m) {
    cmd->add_flag("--merge", m.enabled, "run the threshold-decay merging stage");
    cmd->add_option("--t-initial", m.config.t_initial, "starting merge threshold")
        ->capture_default_str();
    cmd->add_option("--alpha", m.config.alpha, "threshold decrement after a zero-merge pass")
        ->capture_default_str();
    cmd->add_option("--t-min", m.config.t_min, "threshold floor")->capture_default_str();
    cmd->add_option("--it-max", m.config.it_max, "merge pass cap")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--target", m.config.target_communities,
                    "desired community count (0 = unsupervised)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--outer-max", m.config.outer_max, "round cap when a target is set")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

emlouv::LabeledDataset load_dataset(const CommonOpts& o) {
    emlouv::LabeledDataset ds = emlouv::load_citation_dataset(o.content, o.cites);
    const auto& st = ds.stats;
    std::cerr << "dataset: " << ds.graph.node_count() << " nodes, " << ds.feature_dim
              << " features, " << ds.class_count << " classes, " << st.unique_undirected_edges
              << " unique undirected edges (" << st.cites_lines << " citation lines, "
              << st.duplicate_pairs << " duplicates, " << st.self_citations << " self-citations, "
              << st.dropped_unknown << " dropped)\n";
    return ds;
}

emlouv::EmbeddingMatrix make_embeddings(const CommonOpts& o, const emlouv::LabeledDataset& ds) {
    emlouv::EmbeddingMatrix e =
        o.embedding_file.empty()
            ? emlouv::propagate_features(ds, o.hops)
            : emlouv::load_embeddings(o.embedding_file,
                                      static_cast<std::size_t>(ds.graph.node_count()));
    emlouv::l2_normalize_rows(e);
    return e;
}

json config_echo(const std::string& command, const CommonOpts& o, const MergeOpts* m) {
    json c;
    c["command"] = command;
    c["content"] = o.content;
    c["cites"] = o.cites;
    if (o.embedding_file.empty()) {
        c["embedding_source"] = "propagate";
        c["hops"] = o.hops;
    } else {
        c["embedding_source"] = "file";
        c["embedding_file"] = o.embedding_file;
    }
    c["objective"] = o.louvain.objective == emlouv::LouvainConfig::Objective::combined
                         ? "combined"
                         : "modularity_only";
    c["log_base"] = o.louvain.log_base_p;
    c["distance_epsilon"] = o.louvain.distance_epsilon;
    c["min_gain"] = o.louvain.min_gain;
    c["max_levels"] = o.louvain.max_levels;
    c["seed"] = o.louvain.seed;
    if (m) {
        json mj;
        mj["enabled"] = m->enabled;
        mj["t_initial"] = m->config.t_initial;
        mj["alpha"] = m->config.alpha;
        mj["t_min"] = m->config.t_min;
        mj["it_max"] = m->config.it_max;
        mj["target"] = m->config.target_communities;
        mj["outer_max"] = m->config.outer_max;
        c["merge"] = std::move(mj);
    }
    return c;
}

json partition_block(const emlouv::Partition& p, const std::vector<std::string>& names) {
    json pj;
    pj["community_count"] = p.community_count;
    pj["node_names"] = names;
    pj["assignment"] = p.assignment;
    return pj;
}

json metrics_block(const emlouv::EvalReport& report, const std::vector<std::string>& class_names) {
    json mj;
    mj["community_count"] = report.community_count;
    mj["modularity"] = report.modularity;
    mj["inter_accuracy"] = report.inter_accuracy;
    mj["size_weighted_accuracy"] = report.size_weighted_accuracy;
    json rows = json::array();
    for (const auto& s : report.per_community) {
        json r;
        r["community"] = s.community;
        r["size"] = s.size;
        r["majority_class"] = s.majority_class;
        r["majority_class_name"] = class_names[static_cast<std::size_t>(s.majority_class)];
        r["intra_accuracy"] = s.intra_accuracy;
        rows.push_back(std::move(r));
    }
    mj["per_community"] = std::move(rows);
    return mj;
}

json merge_trace_block(const emlouv::MergeTrace& t) {
    json tj;
    tj["stop_reason"] = emlouv::to_string(t.stop_reason);
    tj["rounds"] = t.rounds;
    json recs = json::array();
    for (const auto& r : t.records) {
        json rj;
        rj["threshold"] = r.threshold;
        rj["merges"] = r.merges;
        rj["community_count"] = r.community_count;
        recs.push_back(std::move(rj));
    }
    tj["records"] = std::move(recs);
    return tj;
}

json louvain_trace_block(const emlouv::LouvainResult& r) {
    json lv = json::array();
    for (const auto& l : r.levels) {
        json lj;
        lj["level"] = l.levels_so_far;
        lj["community_count"] = l.partition.community_count;
        lj["modularity"] = l.modularity;
        lv.push_back(std::move(lj));
    }
    return lv;
}

// Everything is serialized in memory first so a failure never leaves a
// truncated output file behind.
void emit(const std::string& path, const std::string& body) {
    if (path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output: " + path);
    out << body;
    if (!out) throw std::runtime_error("failed while writing output: " + path);
}

void write_partition_csv(const std::string& path, const emlouv::Partition& p,
                         const std::vector<std::string>& names) {
    std::ostringstream body;
    body << "node_name,community_id\n";
    for (int i = 0; i < p.size(); ++i)
        body << names[static_cast<std::size_t>(i)] << ','
             << p.assignment[static_cast<std::size_t>(i)] << '\n';
    emit(path, body.str());
}

emlouv::Partition read_partition_csv(const std::string& path, const emlouv::LabeledDataset& ds) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open partition file: " + path);
    std::unordered_map<std::string, int> index;
    index.reserve(ds.node_names.size());
    for (std::size_t i = 0; i < ds.node_names.size(); ++i)
        index[ds.node_names[i]] = static_cast<int>(i);

    std::vector<int> labels(ds.node_names.size(), -1);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line == "node_name,community_id") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected name,id");
        const std::string name = line.substr(0, comma);
        const auto it = index.find(name);
        if (it == index.end())
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": unknown node '" +
                                     name + "'");
        int id = 0;
        try {
            std::size_t used = 0;
            id = std::stoi(line.substr(comma + 1), &used);
            if (used != line.size() - comma - 1) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": bad community id '" + line.substr(comma + 1) + "'");
        }
        if (id < 0)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": negative community id");
        if (labels[static_cast<std::size_t>(it->second)] != -1)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": duplicate node '" +
                                     name + "'");
        labels[static_cast<std::size_t>(it->second)] = id;
    }
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == -1)
            throw std::runtime_error(path + ": node '" + ds.node_names[i] + "' has no community");
    return emlouv::Partition::from_labels(labels);
}

std::string format_csv_double(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

// CLI11 only applies config files registered on the root app, but every
// option here lives on a subcommand, so the flat key=value file is expanded
// into ordinary --key=value tokens instead. Keys the command line already
// carries are skipped: flags win.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
    }
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    const auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        const std::string key = eq == std::string::npos ? std::string() : trim(line.substr(0, eq));
        if (key.empty())
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key=value");
        const std::string flag = "--" + key;
        bool overridden = false;
        for (std::size_t i = 1; i < args.size() && !overridden; ++i)
            overridden = args[i] == flag || args[i].rfind(flag + "=", 0) == 0;
        if (!overridden) args.push_back(flag + "=" + trim(line.substr(eq + 1)));
    }
    return args;
}

int cmd_detect(const CommonOpts& o, const MergeOpts& m, const std::string& format,
               const std::string& partition_out) {
    StageTimer timer;
    json timings;

    const emlouv::LabeledDataset ds = load_dataset(o);
    timings["load_s"] = timer.lap();

    const emlouv::EmbeddingMatrix emb = make_embeddings(o, ds);
    timings["embed_s"] = timer.lap();

    const emlouv::LouvainResult louv = emlouv::run_louvain(ds.graph, &emb, o.louvain);
    timings["louvain_s"] = timer.lap();

    emlouv::Partition partition = louv.partition;
    json merge_trace;
    if (m.enabled) {
        emlouv::MergeResult merged = emlouv::iterative_merge(partition, emb, m.config);
        partition = std::move(merged.partition);
        merge_trace = merge_trace_block(merged.trace);
    }
    timings["merge_s"] = timer.lap();

    const emlouv::EvalReport report = emlouv::evaluate_partition(partition, ds.labels, &ds.graph);
    timings["metrics_s"] = timer.lap();

    if (!partition_out.empty()) write_partition_csv(partition_out, partition, ds.node_names);

    if (format == "csv") {
        std::ostringstream body;
        body << "community,size,majority_class,intra_accuracy\n";
        for (const auto& s : report.per_community)
            body << s.community << ',' << s.size << ','
                 << ds.class_names[static_cast<std::size_t>(s.majority_class)] << ','
                 << format_csv_double(s.intra_accuracy) << '\n';
        emit(o.out, body.str());
        return 0;
    }

    json doc;
    doc["partition"] = partition_block(partition, ds.node_names);
    doc["metrics"] = metrics_block(report, ds.class_names);
    json trace;
    trace["louvain_levels"] = louvain_trace_block(louv);
    trace["louvain_modularity"] = louv.modularity;
    trace["merge"] = m.enabled ? merge_trace : json(nullptr);
    doc["trace"] = std::move(trace);
    doc["config"] = config_echo("detect", o, &m);
    if (!o.omit_timings) doc["timings"] = std::move(timings);
    emit(o.out, doc.dump(2) + "\n");
    return 0;
}

int cmd_sweep(const CommonOpts& o, const MergeOpts& m, std::vector<double> thresholds) {
    const emlouv::LabeledDataset ds = load_dataset(o);
    const emlouv::EmbeddingMatrix emb = make_embeddings(o, ds);
    const emlouv::LouvainResult louv = emlouv::run_louvain(ds.graph, &emb, o.louvain);

    std::ostringstream body;
    body << "threshold,community_count,inter_accuracy\n";
    for (const double t : thresholds) {
        emlouv::MergeConfig cfg = m.config;
        cfg.t_initial = t;
        // hold the threshold fixed: the decay would blur what the sweep isolates
        cfg.t_min = t;
        const emlouv::MergeResult merged = emlouv::iterative_merge(louv.partition, emb, cfg);
        const emlouv::EvalReport report = emlouv::evaluate_partition(merged.partition, ds.labels);
        body << format_csv_double(t) << ',' << report.community_count << ','
             << format_csv_double(report.inter_accuracy) << '\n';
    }
    emit(o.out, body.str());
    return 0;
}

int cmd_hypothesis(const CommonOpts& o, int nodes_per_class, int samples) {
    const emlouv::LabeledDataset ds = load_dataset(o);
    const emlouv::EmbeddingMatrix emb = make_embeddings(o, ds);
    const auto rows = emlouv::hypothesis_check(ds, emb, nodes_per_class, samples, o.louvain.seed);

    std::ostringstream body;
    body << "class,kind,mean_distance\n";
    for (const auto& r : rows) {
        body << r.class_name << ",same," << format_csv_double(r.mean_same_class_distance) << '\n';
        body << r.class_name << ",other," << format_csv_double(r.mean_other_class_distance) << '\n';
    }
    emit(o.out, body.str());
    return 0;
}

int cmd_eval(const CommonOpts& o, const std::string& partition_path) {
    StageTimer timer;
    json timings;

    const emlouv::LabeledDataset ds = load_dataset(o);
    timings["load_s"] = timer.lap();

    const emlouv::Partition partition = read_partition_csv(partition_path, ds);
    timings["partition_s"] = timer.lap();

    const emlouv::EvalReport report = emlouv::evaluate_partition(partition, ds.labels, &ds.graph);
    timings["metrics_s"] = timer.lap();

    json doc;
    doc["partition"] = partition_block(partition, ds.node_names);
    doc["metrics"] = metrics_block(report, ds.class_names);
    doc["trace"] = json(nullptr);
    json c = config_echo("eval", o, nullptr);
    c["partition_file"] = partition_path;
    doc["config"] = std::move(c);
    if (!o.omit_timings) doc["timings"] = std::move(timings);
    emit(o.out, doc.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"embedding-augmented Louvain community detection"};
    app.require_subcommand(1);

    CommonOpts detect_opts;
    detect_opts.louvain.objective = emlouv::LouvainConfig::Objective::combined;
    MergeOpts detect_merge;
    std::string detect_format = "json";
    std::string detect_partition_out;
    auto* detect = app.add_subcommand("detect", "run the full detection pipeline");
    add_common(detect, detect_opts, true);
    add_merge(detect, detect_merge);
    detect->add_option("--format", detect_format, "result format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    detect->add_option("--partition-out", detect_partition_out,
                       "also write the partition as node_name,community_id CSV");

    CommonOpts sweep_opts;
    sweep_opts.louvain.objective = emlouv::LouvainConfig::Objective::combined;
    MergeOpts sweep_merge;
    std::vector<double> sweep_thresholds;
    auto* sweep = app.add_subcommand(
        "sweep", "rerun the merge stage per threshold from one cached partition");
    add_common(sweep, sweep_opts, true);
    add_merge(sweep, sweep_merge);
    sweep->add_option("--thresholds", sweep_thresholds, "merge thresholds to evaluate")
        ->required()
        ->expected(-1);

    CommonOpts hyp_opts;
    int nodes_per_class = 50;
    int samples = 200;
    auto* hyp = app.add_subcommand("hypothesis", "per-class embedding separation table");
    add_common(hyp, hyp_opts, false);
    hyp->add_option("--nodes-per-class", nodes_per_class, "sampled community size per class")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    hyp->add_option("--samples", samples, "probe count per class and kind")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    CommonOpts eval_opts;
    std::string eval_partition;
    auto* eval = app.add_subcommand("eval", "score a partition file against the labels");
    add_common(eval, eval_opts, false);
    eval->add_option("--partition", eval_partition, "node_name,community_id CSV")->required();

    std::vector<std::string> args;
    try {
        args = expand_config(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    std::vector<char*> argp;
    argp.reserve(args.size());
    for (auto& a : args) argp.push_back(a.data());
    CLI11_PARSE(app, static_cast<int>(argp.size()), argp.data());

    try {
        if (detect->parsed()) return cmd_detect(detect_opts, detect_merge, detect_format, detect_partition_out);
        if (sweep->parsed()) return cmd_sweep(sweep_opts, sweep_merge, sweep_thresholds);
        if (hyp->parsed()) return cmd_hypothesis(hyp_opts, nodes_per_class, samples);
        if (eval->parsed()) return cmd_eval(eval_opts, eval_partition);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
