#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ctdne/embedder.hpp"
#include "ctdne/evaluation.hpp"
#include "ctdne/io.hpp"
#include "ctdne/rng.hpp"
#include "ctdne/sampling.hpp"
#include "ctdne/temporal_graph.hpp"
#include "ctdne/walker.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace ctdne;

namespace {

struct Options {
    std::string input;
    std::string out_dir = "out";
    bool directed = false;
    std::int64_t unit_scale = 1;

    std::string fs_name = "unif";
    std::string fg_name = "unif";
    std::size_t omega = 10;
    std::size_t max_len = 80;
    std::uint64_t beta = 0;          // 0: derive from R
    std::uint64_t walks_per_node = 10;   // R
    bool relax = true;

    std::size_t dim = 128;
    std::size_t negatives = 5;
    double lr = 0.025;
    double lr_min = 1e-4;
    double online_lr = 0.0;
    std::size_t epochs = 1;

    std::uint64_t seed = 0;
    std::size_t n_seeds = 10;
    int threads = 1;

    double exp_scale = 0.0;
    std::string exp_favor = "late";
    std::string linear_favor = "early";

    double split_fraction = 0.75;
    std::string negatives_exclude = "all";

    bool all_variants = false;
    bool static_mode = false;

    std::size_t snapshots = 4;
    std::string inactive_policy = "zeros";
    std::string snapshot_mode = "equal-time";

    std::size_t walks_per_edge = 10;
    double warmup = 0.0;

    bool dump_walks = false;
    std::string config_path;
};

// key=value lines applied to any option not already given on the command
// line, so flags override the file and the file overrides defaults.
void apply_config_file(CLI::App* cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#' || line[first] == '%') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
        std::string key = line.substr(first, eq - first);
        std::string value = line.substr(eq + 1);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        const auto vstart = value.find_first_not_of(" \t");
        value = vstart == std::string::npos ? "" : value.substr(vstart);
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr)
            throw UsageError(path + ":" + std::to_string(line_no) + ": unknown key '" + key +
                             "'");
        if (opt->count() > 0) continue;   // command line wins
        opt->add_result(value);
        opt->run_callback();
    }
}

class StageClock {
public:
    void start(const std::string& stage) {
        stage_ = stage;
        t0_ = std::chrono::steady_clock::now();
    }
    void stop() {
        const auto dt = std::chrono::steady_clock::now() - t0_;
        timings_[stage_] =
            std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(dt).count();
    }
    const json& timings() const { return timings_; }

private:
    std::string stage_;
    std::chrono::steady_clock::time_point t0_;
    json timings_ = json::object();
};

std::string dataset_name(const std::string& path) {
    std::string stem = fs::path(path).stem().string();
    if (has_gz_extension(path)) stem = fs::path(stem).stem().string();
    return stem;
}

BiasOptions bias_options(const Options& o) {
    BiasOptions b;
    b.exp_scale = o.exp_scale;
    b.exp_favor_late = o.exp_favor == "late";
    b.linear_favor_early = o.linear_favor == "early";
    return b;
}

WalkBudget walk_budget(const Options& o, std::size_t n_nodes) {
    WalkBudget b;
    b.omega = o.omega;
    b.max_len = o.max_len;
    b.relax_isolated = o.relax;
    b.beta = o.beta > 0 ? o.beta
                        : beta_from_walks_per_node(o.walks_per_node, n_nodes, o.max_len, o.omega);
    b.validate();
    return b;
}

TrainConfig train_config(const Options& o) {
    TrainConfig t;
    t.dim = o.dim;
    t.omega = o.omega;
    t.negatives = o.negatives;
    t.lr0 = o.lr;
    t.lr_min = o.lr_min;
    t.online_lr = o.online_lr;
    t.epochs = o.epochs;
    t.seed = o.seed;
    t.threads = o.threads;
    t.validate();
    return t;
}

InactivePolicy inactive_policy(const std::string& name) {
    if (name == "zeros") return InactivePolicy::Zeros;
    if (name == "last") return InactivePolicy::LastActive;
    if (name == "mean") return InactivePolicy::MeanActive;
    throw UsageError("unknown inactive policy '" + name + "' (expected zeros|last|mean)");
}

json manifest_parameters(const Options& o, const WalkBudget* budget) {
    json p;
    p["input"] = o.input;
    p["directed"] = o.directed;
    p["unit_scale"] = o.unit_scale;
    p["fs"] = o.fs_name;
    p["fg"] = o.fg_name;
    p["omega"] = o.omega;
    p["max_len"] = o.max_len;
    p["beta"] = budget ? budget->beta : o.beta;
    p["walks_per_node"] = o.walks_per_node;
    p["relax"] = o.relax;
    p["dim"] = o.dim;
    p["negatives"] = o.negatives;
    p["lr"] = o.lr;
    p["lr_min"] = o.lr_min;
    p["online_lr"] = o.online_lr;
    p["epochs"] = o.epochs;
    p["seed"] = o.seed;
    p["seeds"] = o.n_seeds;
    p["threads"] = o.threads;
    p["exp_scale"] = o.exp_scale;
    p["exp_favor"] = o.exp_favor;
    p["linear_favor"] = o.linear_favor;
    p["split_fraction"] = o.split_fraction;
    p["negatives_exclude"] = o.negatives_exclude;
    p["static"] = o.static_mode;
    p["snapshots"] = o.snapshots;
    p["inactive_policy"] = o.inactive_policy;
    p["snapshot_mode"] = o.snapshot_mode;
    p["walks_per_edge"] = o.walks_per_edge;
    p["warmup"] = o.warmup;
    p["out"] = o.out_dir;
    return p;
}

json write_manifest(const Options& o, const std::string& command, const WalkBudget* budget,
                    const StageClock& clock, const TemporalGraph* g = nullptr) {
    json m;
    m["command"] = command;
    m["parameters"] = manifest_parameters(o, budget);
    if (g != nullptr && g->edge_count() > 0) {
        const GraphStats s = g->stats();
        m["graph"] = {{"nodes", g->node_count()},
                      {"edges", s.n_edges},
                      {"mean_degree", s.mean_degree},
                      {"max_degree", s.max_degree},
                      {"timespan_days", s.timespan_days}};
    }
    m["timings_ms"] = clock.timings();
    std::ofstream out(fs::path(o.out_dir) / "manifest.json");
    out << m.dump(2) << "\n";
    return m;
}

void write_walk_stats(const Options& o, const TemporalGraph& g,
                      std::span<const TemporalWalk> walks) {
    const WalkStats stats = walk_stats(walks, g.node_count());
    {
        std::ofstream out(fs::path(o.out_dir) / "stats_length.csv");
        out << "length,count\n";
        for (const auto& [len, count] : stats.length_histogram)
            out << len << "," << count << "\n";
    }
    {
        std::ofstream out(fs::path(o.out_dir) / "stats_occurrences.csv");
        out << "node,occurrences\n";
        for (NodeId v = 0; v < g.node_count(); ++v)
            out << g.label(v) << "," << stats.occurrences[v] << "\n";
    }
    {
        std::ofstream out(fs::path(o.out_dir) / "stats_starts.csv");
        out << "node,starts\n";
        for (NodeId v = 0; v < g.node_count(); ++v)
            out << g.label(v) << "," << stats.starts[v] << "\n";
    }
}

void dump_walks_file(const Options& o, const TemporalGraph& g,
                     std::span<const TemporalWalk> walks) {
    std::ofstream out(fs::path(o.out_dir) / "walks.txt");
    for (const TemporalWalk& w : walks) {
        for (std::size_t i = 0; i < w.nodes.size(); ++i) {
            if (i) out << ' ';
            out << g.label(w.nodes[i]);
        }
        out << '\n';
    }
}

std::vector<std::string> graph_labels(const TemporalGraph& g) {
    std::vector<std::string> labels;
    labels.reserve(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v) labels.push_back(g.label(v));
    return labels;
}

std::vector<TemporalWalk> make_walks(const Options& o, const TemporalGraph& g,
                                     const WalkBudget& budget) {
    if (o.static_mode) return static_walks(g, budget, o.seed, o.threads);
    BiasOptions opts = bias_options(o);
    if (opts.exp_scale == 0.0) opts.exp_scale = opts.resolve_exp_scale(g.t_min(), g.t_max());
    return generate_walks(g, budget, bias_kind_from_string(o.fs_name),
                          bias_kind_from_string(o.fg_name), opts, o.seed, o.threads);
}

int cmd_train(const Options& o) {
    StageClock clock;
    clock.start("load");
    TemporalGraph g = load_edge_list(o.input, o.directed, o.unit_scale);
    clock.stop();

    const WalkBudget budget = walk_budget(o, g.node_count());
    fs::create_directories(o.out_dir);

    clock.start("walks");
    auto walks = make_walks(o, g, budget);
    clock.stop();

    clock.start("train");
    EmbeddingMatrix Z = train(walks, train_config(o), g.node_count());
    clock.stop();

    clock.start("write");
    save_embeddings(Z, graph_labels(g), (fs::path(o.out_dir) / "embeddings.txt").string());
    write_walk_stats(o, g, walks);
    if (o.dump_walks) dump_walks_file(o, g, walks);
    clock.stop();

    const json manifest = write_manifest(o, "train", &budget, clock, &g);
    std::cout << manifest.dump(2) << "\n";
    return 0;
}

int cmd_stats(const Options& o) {
    StageClock clock;
    clock.start("load");
    TemporalGraph g = load_edge_list(o.input, o.directed, o.unit_scale);
    clock.stop();

    const WalkBudget budget = walk_budget(o, g.node_count());
    fs::create_directories(o.out_dir);

    clock.start("walks");
    auto walks = make_walks(o, g, budget);
    clock.stop();

    clock.start("write");
    write_walk_stats(o, g, walks);
    if (o.dump_walks) dump_walks_file(o, g, walks);
    clock.stop();

    write_manifest(o, "stats", &budget, clock, &g);
    std::cout << "walk statistics for " << walks.size() << " walks -> " << o.out_dir << "\n";
    return 0;
}

LinkPredictionConfig link_prediction_config(const Options& o, const TemporalGraph& g,
                                            const WalkBudget& budget) {
    LinkPredictionConfig cfg;
    cfg.budget = budget;
    cfg.fs = bias_kind_from_string(o.fs_name);
    cfg.fg = bias_kind_from_string(o.fg_name);
    cfg.bias = bias_options(o);
    if (cfg.bias.exp_scale == 0.0 && g.edge_count() > 0)
        cfg.bias.exp_scale = cfg.bias.resolve_exp_scale(g.t_min(), g.t_max());
    cfg.train = train_config(o);
    cfg.train.threads = 1;   // per-seed pipelines stay deterministic
    cfg.split.fraction = o.split_fraction;
    cfg.split.negatives_exclude_all_time = o.negatives_exclude == "all";
    cfg.n_seeds = o.n_seeds;
    cfg.base_seed = o.seed;
    cfg.static_mode = o.static_mode;
    cfg.threads = o.threads;
    return cfg;
}

json per_seed_json(const LinkPredictionResult& r) {
    json arr = json::array();
    for (const SeedResult& s : r.per_seed)
        arr.push_back({{"seed", s.seed}, {"auc", s.auc}, {"operator", to_string(s.op)}});
    return arr;
}

int cmd_eval(const Options& o) {
    StageClock clock;
    clock.start("load");
    TemporalGraph g = load_edge_list(o.input, o.directed, o.unit_scale);
    clock.stop();

    const WalkBudget budget = walk_budget(o, g.node_count());
    fs::create_directories(o.out_dir);
    const std::string dataset = dataset_name(o.input);

    std::vector<std::pair<BiasKind, BiasKind>> variants;
    if (o.all_variants) {
        for (BiasKind fs : {BiasKind::Uniform, BiasKind::Linear, BiasKind::Exponential})
            for (BiasKind fg : {BiasKind::Uniform, BiasKind::Linear, BiasKind::Exponential})
                variants.emplace_back(fs, fg);
    } else {
        variants.emplace_back(bias_kind_from_string(o.fs_name),
                              bias_kind_from_string(o.fg_name));
    }

    clock.start("evaluate");
    std::ofstream csv(fs::path(o.out_dir) / "results.csv");
    csv << "dataset,variant,operator,seed,auc\n";
    json summary;
    summary["dataset"] = dataset;
    summary["results"] = json::array();
    double best_mean = -1.0;
    std::string best_variant;
    for (const auto& [fs_kind, fg_kind] : variants) {
        LinkPredictionConfig cfg = link_prediction_config(o, g, budget);
        cfg.fs = fs_kind;
        cfg.fg = fg_kind;
        const std::string variant =
            o.static_mode ? "static"
                          : std::string(to_string(fs_kind)) + "-" + to_string(fg_kind);
        LinkPredictionResult r = run_link_prediction(g, cfg);
        for (const SeedResult& s : r.per_seed)
            csv << dataset << "," << variant << "," << to_string(s.op) << "," << s.seed << ","
                << format_double(s.auc) << "\n";
        summary["results"].push_back({{"variant", variant},
                                      {"fs", to_string(fs_kind)},
                                      {"fg", to_string(fg_kind)},
                                      {"operator", to_string(r.chosen_op)},
                                      {"mean_auc", r.mean_auc},
                                      {"std_auc", r.std_auc},
                                      {"per_seed", per_seed_json(r)}});
        if (r.mean_auc > best_mean) {
            best_mean = r.mean_auc;
            best_variant = variant;
        }
        std::cout << dataset << " " << variant << ": mean AUC "
                  << format_double(r.mean_auc) << " (std " << format_double(r.std_auc)
                  << ", operator " << to_string(r.chosen_op) << ")\n";
    }
    if (o.all_variants) summary["best_variant"] = best_variant;
    clock.stop();

    std::ofstream sj(fs::path(o.out_dir) / "summary.json");
    sj << summary.dump(2) << "\n";
    write_manifest(o, "eval", &budget, clock, &g);
    return 0;
}

int cmd_snapshots(const Options& o) {
    if (o.snapshots == 0 || o.dim % o.snapshots != 0)
        throw UsageError("snapshot count must divide the embedding dimension");

    StageClock clock;
    clock.start("load");
    TemporalGraph g = load_edge_list(o.input, o.directed, o.unit_scale);
    clock.stop();

    const WalkBudget budget = walk_budget(o, g.node_count());
    fs::create_directories(o.out_dir);
    const std::string dataset = dataset_name(o.input);

    SnapshotConfig snap;
    snap.snapshots = o.snapshots;
    snap.policy = inactive_policy(o.inactive_policy);
    snap.equal_count = o.snapshot_mode == "equal-count";

    clock.start("dtdne");
    LinkPredictionConfig cfg = link_prediction_config(o, g, budget);
    LinkPredictionResult dtdne = dtdne_baseline(g, snap, cfg);
    clock.stop();

    clock.start("ctdne");
    LinkPredictionConfig ctdne_cfg = cfg;
    ctdne_cfg.fs = BiasKind::Uniform;
    ctdne_cfg.fg = BiasKind::Uniform;
    LinkPredictionResult ctdne = run_link_prediction(g, ctdne_cfg);
    clock.stop();

    const double gain_pct = (ctdne.mean_auc - dtdne.mean_auc) / dtdne.mean_auc * 100.0;

    std::ofstream csv(fs::path(o.out_dir) / "results.csv");
    csv << "dataset,snapshots,dim,dtdne_auc,ctdne_auc,gain_pct\n";
    csv << dataset << "," << o.snapshots << "," << o.dim << ","
        << format_double(dtdne.mean_auc) << "," << format_double(ctdne.mean_auc) << ","
        << format_double(gain_pct) << "\n";

    json summary;
    summary["dataset"] = dataset;
    summary["snapshots"] = o.snapshots;
    summary["inactive_policy"] = o.inactive_policy;
    summary["snapshot_mode"] = o.snapshot_mode;
    summary["dtdne"] = {{"mean_auc", dtdne.mean_auc},
                        {"std_auc", dtdne.std_auc},
                        {"per_seed", per_seed_json(dtdne)}};
    summary["ctdne_unif"] = {{"mean_auc", ctdne.mean_auc},
                             {"std_auc", ctdne.std_auc},
                             {"per_seed", per_seed_json(ctdne)}};
    summary["gain_pct"] = gain_pct;
    std::ofstream sj(fs::path(o.out_dir) / "summary.json");
    sj << summary.dump(2) << "\n";

    write_manifest(o, "snapshots", &budget, clock, &g);
    std::cout << dataset << ": DTDNE " << format_double(dtdne.mean_auc) << " vs CTDNE-Unif "
              << format_double(ctdne.mean_auc) << " (gain " << format_double(gain_pct)
              << "%)\n";
    return 0;
}

int cmd_stream(const Options& o) {
    StageClock clock;
    clock.start("load");
    TemporalGraph full = load_edge_list(o.input, o.directed, o.unit_scale);
    clock.stop();

    fs::create_directories(o.out_dir);
    TrainConfig tcfg = train_config(o);
    const BiasKind fg = bias_kind_from_string(o.fg_name);
    const BiasOptions opts = bias_options(o);

    // Replaying in time order reproduces the canonical id assignment, so the
    // streamed graph and the bulk-loaded one agree on ids and labels.
    TemporalGraph g(o.directed);
    EmbeddingMatrix Z(0, tcfg.dim, tcfg.seed);
    OnlineState state(tcfg.seed);
    Rng walk_rng = Rng::split(tcfg.seed, 0x7374726DULL);

    const std::size_t m = full.edge_count();
    const std::size_t n_warm = static_cast<std::size_t>(o.warmup * static_cast<double>(m));

    clock.start("warmup");
    for (std::size_t i = 0; i < n_warm; ++i) {
        const TemporalEdge& e = full.edges()[i];
        g.add_edge(full.label(e.src), full.label(e.dst), e.time);
    }
    Z.grow(g.node_count(), tcfg.seed);
    clock.stop();

    std::vector<double> latencies_ms;
    latencies_ms.reserve(m - n_warm);

    clock.start("stream");
    for (std::size_t i = n_warm; i < m; ++i) {
        const TemporalEdge& e = full.edges()[i];
        const std::string& su = full.label(e.src);
        const std::string& sv = full.label(e.dst);
        const auto t0 = std::chrono::steady_clock::now();
        g.add_edge(su, sv, e.time);
        const TemporalEdge inserted{g.find(su).value(), g.find(sv).value(), e.time};
        auto walks = backward_walks_for_edge(g, inserted, o.walks_per_edge, o.omega, o.max_len,
                                             fg, opts, walk_rng);
        online_update(Z, walks, tcfg, state);
        const auto t1 = std::chrono::steady_clock::now();
        latencies_ms.push_back(
            std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t1 - t0)
                .count());
    }
    clock.stop();

    clock.start("write");
    Z.grow(g.node_count(), tcfg.seed);
    save_embeddings(Z, graph_labels(g), (fs::path(o.out_dir) / "embeddings.txt").string());
    clock.stop();

    json summary;
    summary["dataset"] = dataset_name(o.input);
    summary["edges_total"] = m;
    summary["edges_streamed"] = latencies_ms.size();
    summary["walks_per_edge"] = o.walks_per_edge;
    if (latencies_ms.empty()) {
        summary["latency_ms"] = nullptr;
    } else {
        std::vector<double> sorted = latencies_ms;
        std::sort(sorted.begin(), sorted.end());
        double sum = 0.0;
        for (double v : sorted) sum += v;
        const double mean = sum / static_cast<double>(sorted.size());
        const double median = sorted[sorted.size() / 2];
        const double p99 = sorted[std::min(sorted.size() - 1,
                                           static_cast<std::size_t>(0.99 * sorted.size()))];
        summary["latency_ms"] = {{"mean", mean}, {"median", median}, {"p99", p99}};
        std::cout << "streamed " << latencies_ms.size() << " edges: mean "
                  << format_double(mean) << " ms, median " << format_double(median)
                  << " ms, p99 " << format_double(p99) << " ms per edge\n";
    }
    std::ofstream sj(fs::path(o.out_dir) / "summary.json");
    sj << summary.dump(2) << "\n";

    write_manifest(o, "stream", nullptr, clock, &full);
    return 0;
}

void add_common_options(CLI::App* cmd, Options& o) {
    cmd->add_option("input", o.input, "edge list file (src dst [weight] time; .gz ok)")
        ->required();
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_flag("--directed", o.directed, "treat edges as directed");
    cmd->add_option("--unit-scale", o.unit_scale, "divide timestamps by this at ingest");
    cmd->add_option("--seed", o.seed, "base random seed")->envname("CTDNE_SEED");
    cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--config", o.config_path, "key=value config file");
}

void add_walk_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--fs", o.fs_name, "initial edge bias: unif|lin|exp");
    cmd->add_option("--fg", o.fg_name, "neighbor bias: unif|lin|exp");
    cmd->add_option("--omega", o.omega, "context window / minimum walk length");
    cmd->add_option("--L,--max-len", o.max_len, "maximum walk length");
    auto* beta = cmd->add_option("--beta", o.beta, "total context-window budget");
    auto* r = cmd->add_option("--R,--walks-per-node", o.walks_per_node,
                              "walks per node; beta = R*N*(L-omega+1)");
    beta->excludes(r);
    r->excludes(beta);
    cmd->add_flag("!--no-relax", o.relax, "disable relaxed fallback walks");
    cmd->add_option("--exp-scale", o.exp_scale,
                    "time rescale inside exponentials (0 = 1/timespan)");
    cmd->add_option("--exp-favor", o.exp_favor, "exponential bias direction: late|early")
        ->check(CLI::IsMember({"late", "early"}));
    cmd->add_option("--linear-favor", o.linear_favor,
                    "linear rank direction: early|late")
        ->check(CLI::IsMember({"early", "late"}));
    cmd->add_flag("--static", o.static_mode, "time-ignoring walk baseline");
}

void add_train_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--D,--dim", o.dim, "embedding dimension");
    cmd->add_option("--negatives", o.negatives, "negative samples per pair");
    cmd->add_option("--lr", o.lr, "initial step size");
    cmd->add_option("--lr-min", o.lr_min, "final step size");
    cmd->add_option("--epochs", o.epochs, "training epochs");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamic node embeddings from timestamped edge streams"};
    app.require_subcommand(1);

    Options o;

    CLI::App* train_cmd = app.add_subcommand("train", "batch temporal-walk embedding");
    add_common_options(train_cmd, o);
    add_walk_options(train_cmd, o);
    add_train_options(train_cmd, o);
    train_cmd->add_flag("--dump-walks", o.dump_walks, "also write walks.txt");

    CLI::App* stream_cmd =
        app.add_subcommand("stream", "replay edges and update embeddings online");
    add_common_options(stream_cmd, o);
    add_walk_options(stream_cmd, o);
    add_train_options(stream_cmd, o);
    stream_cmd->add_option("--walks-per-edge", o.walks_per_edge,
                           "backward walks per streamed edge")
        ->check(CLI::PositiveNumber);
    stream_cmd->add_option("--warmup", o.warmup, "bulk-load this edge fraction first")
        ->check(CLI::Range(0.0, 1.0));
    stream_cmd->add_option("--online-lr", o.online_lr, "fixed online step size (0 = lr/10)");

    CLI::App* eval_cmd = app.add_subcommand("eval", "temporal link prediction");
    add_common_options(eval_cmd, o);
    add_walk_options(eval_cmd, o);
    add_train_options(eval_cmd, o);
    eval_cmd->add_option("--seeds", o.n_seeds, "number of evaluation seeds")
        ->check(CLI::PositiveNumber);
    eval_cmd->add_option("--split-fraction", o.split_fraction, "training fraction by time");
    eval_cmd->add_option("--negatives-exclude", o.negatives_exclude,
                         "negative pairs avoid edges from: all|train")
        ->check(CLI::IsMember({"all", "train"}));
    eval_cmd->add_flag("--all-variants", o.all_variants, "sweep the 3x3 fs/fg matrix");

    CLI::App* snap_cmd =
        app.add_subcommand("snapshots", "discrete-snapshot baseline vs temporal walks");
    add_common_options(snap_cmd, o);
    add_walk_options(snap_cmd, o);
    add_train_options(snap_cmd, o);
    snap_cmd->add_option("--seeds", o.n_seeds, "number of evaluation seeds")
        ->check(CLI::PositiveNumber);
    snap_cmd->add_option("--split-fraction", o.split_fraction, "training fraction by time");
    snap_cmd->add_option("--negatives-exclude", o.negatives_exclude,
                         "negative pairs avoid edges from: all|train")
        ->check(CLI::IsMember({"all", "train"}));
    snap_cmd->add_option("--snapshots,-T", o.snapshots, "snapshot count (must divide dim)");
    snap_cmd->add_option("--inactive-policy", o.inactive_policy,
                         "inactive node fill: zeros|last|mean")
        ->check(CLI::IsMember({"zeros", "last", "mean"}));
    snap_cmd->add_option("--snapshot-mode", o.snapshot_mode, "equal-time|equal-count")
        ->check(CLI::IsMember({"equal-time", "equal-count"}));

    CLI::App* stats_cmd = app.add_subcommand("stats", "walk statistics tables");
    add_common_options(stats_cmd, o);
    add_walk_options(stats_cmd, o);
    stats_cmd->add_flag("--dump-walks", o.dump_walks, "also write walks.txt");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        CLI::App* active = nullptr;
        for (CLI::App* cmd : {train_cmd, stream_cmd, eval_cmd, snap_cmd, stats_cmd})
            if (cmd->parsed()) active = cmd;
        if (active == nullptr) throw UsageError("no subcommand given");
        if (!o.config_path.empty()) apply_config_file(active, o.config_path);

        if (active == train_cmd) return cmd_train(o);
        if (active == stream_cmd) return cmd_stream(o);
        if (active == eval_cmd) return cmd_eval(o);
        if (active == snap_cmd) return cmd_snapshots(o);
        return cmd_stats(o);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
