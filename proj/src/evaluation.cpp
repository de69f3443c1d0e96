#include "ctdne/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <thread>
#include <unordered_set>

namespace ctdne {

namespace {

constexpr std::uint64_t kSeedTag = 0x73656564;
constexpr std::uint64_t kSplitTag = 0x73706C74;
constexpr std::uint64_t kWalkTag = 0x6577616C;
constexpr std::uint64_t kSgnsTag = 0x73676E73;
constexpr std::uint64_t kClfTag = 0x636C6673;
constexpr std::uint64_t kSnapTag = 0x736E6170;
constexpr std::uint64_t kEmbTag = 0x656D6264;

std::uint64_t pair_key(NodeId a, NodeId b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

NodePair normalized(NodeId a, NodeId b) {
    return a <= b ? NodePair{a, b} : NodePair{b, a};
}

} // namespace

const char* to_string(EdgeOperator op) {
    switch (op) {
        case EdgeOperator::Mean: return "mean";
        case EdgeOperator::Hadamard: return "hadamard";
        case EdgeOperator::AbsDiff: return "absdiff";
        case EdgeOperator::SquaredDiff: return "squareddiff";
    }
    throw InternalError("unknown EdgeOperator");
}

const char* to_string(InactivePolicy policy) {
    switch (policy) {
        case InactivePolicy::Zeros: return "zeros";
        case InactivePolicy::LastActive: return "last";
        case InactivePolicy::MeanActive: return "mean";
    }
    throw InternalError("unknown InactivePolicy");
}

EvalSplit temporal_split(const TemporalGraph& g, const SplitOptions& opts) {
    if (g.edge_count() < 4) throw DataError("need at least 4 edges to split");
    if (opts.fraction <= 0.0 || opts.fraction >= 1.0)
        throw UsageError("split fraction must lie in (0, 1)");

    const std::size_t m = g.edge_count();
    const std::size_t k = static_cast<std::size_t>(opts.fraction * static_cast<double>(m));

    EvalSplit split;
    split.split_fraction = opts.fraction;
    split.train_graph = g.prefix(k);

    std::unordered_set<std::uint64_t> train_pairs;
    for (std::size_t i = 0; i < k; ++i)
        train_pairs.insert(pair_key(g.edges()[i].src, g.edges()[i].dst));

    std::unordered_set<std::uint64_t> positive_keys;
    for (std::size_t i = k; i < m; ++i) {
        const TemporalEdge& e = g.edges()[i];
        if (e.src == e.dst) continue;
        const std::uint64_t key = pair_key(e.src, e.dst);
        if (train_pairs.count(key) || positive_keys.count(key)) continue;
        positive_keys.insert(key);
        split.positives.push_back(normalized(e.src, e.dst));
    }
    if (split.positives.empty())
        throw DataError("test window fully overlaps training pairs");

    std::unordered_set<std::uint64_t> excluded = train_pairs;
    if (opts.negatives_exclude_all_time)
        for (const TemporalEdge& e : g.edges()) excluded.insert(pair_key(e.src, e.dst));
    for (std::uint64_t key : positive_keys) excluded.insert(key);

    Rng rng = Rng::split(opts.seed, kSplitTag);
    const std::size_t n_nodes = g.node_count();
    std::unordered_set<std::uint64_t> negative_keys;
    std::size_t attempts = 0;
    const std::size_t max_attempts = 1000 * split.positives.size() + 100000;
    while (split.negatives.size() < split.positives.size()) {
        if (++attempts > max_attempts)
            throw DataError("could not sample enough non-adjacent negative pairs");
        const NodeId u = static_cast<NodeId>(rng.below(n_nodes));
        const NodeId v = static_cast<NodeId>(rng.below(n_nodes));
        if (u == v) continue;
        const std::uint64_t key = pair_key(u, v);
        if (excluded.count(key) || negative_keys.count(key)) continue;
        negative_keys.insert(key);
        split.negatives.push_back(normalized(u, v));
    }
    return split;
}

std::vector<double> edge_embedding(std::span<const double> zi, std::span<const double> zj,
                                   EdgeOperator op) {
    if (zi.size() != zj.size()) throw DataError("edge embedding dimension mismatch");
    std::vector<double> out(zi.size());
    switch (op) {
        case EdgeOperator::Mean:
            for (std::size_t d = 0; d < zi.size(); ++d) out[d] = (zi[d] + zj[d]) / 2.0;
            break;
        case EdgeOperator::Hadamard:
            for (std::size_t d = 0; d < zi.size(); ++d) out[d] = zi[d] * zj[d];
            break;
        case EdgeOperator::AbsDiff:
            for (std::size_t d = 0; d < zi.size(); ++d) out[d] = std::abs(zi[d] - zj[d]);
            break;
        case EdgeOperator::SquaredDiff:
            for (std::size_t d = 0; d < zi.size(); ++d)
                out[d] = (zi[d] - zj[d]) * (zi[d] - zj[d]);
            break;
    }
    return out;
}

double LinearClassifier::score(std::span<const double> x) const {
    if (x.size() != weights.size()) throw DataError("feature dimension mismatch");
    double z = bias;
    for (std::size_t d = 0; d < x.size(); ++d)
        z += weights[d] * (x[d] - feat_mean[d]) / feat_scale[d];
    return stable_sigmoid(z);
}

FitResult train_classifier(const std::vector<std::vector<double>>& features,
                           const std::vector<int>& labels, double holdout_fraction,
                           std::uint64_t seed, double l2) {
    const std::size_t n = features.size();
    if (n != labels.size()) throw UsageError("feature/label count mismatch");
    std::size_t n_pos = 0;
    for (int y : labels) n_pos += (y != 0);
    if (n_pos < 2 || n - n_pos < 2) throw DataError("need at least 2 examples per class");
    const std::size_t dim = features.front().size();
    for (const auto& f : features)
        if (f.size() != dim) throw DataError("inconsistent feature dimensions");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng = Rng::split(seed, kClfTag);
    for (std::size_t i = n; i > 1; --i)
        std::swap(order[i - 1], order[rng.below(i)]);

    const std::size_t n_holdout = static_cast<std::size_t>(holdout_fraction * n);
    const std::size_t n_fit = n - n_holdout;
    if (n_fit == 0) throw UsageError("holdout fraction leaves no fit data");

    FitResult result;
    auto& model = result.model;
    model.feat_mean.assign(dim, 0.0);
    model.feat_scale.assign(dim, 1.0);
    for (std::size_t i = 0; i < n_fit; ++i)
        for (std::size_t d = 0; d < dim; ++d) model.feat_mean[d] += features[order[i]][d];
    for (double& m : model.feat_mean) m /= static_cast<double>(n_fit);
    std::vector<double> var(dim, 0.0);
    for (std::size_t i = 0; i < n_fit; ++i)
        for (std::size_t d = 0; d < dim; ++d) {
            const double c = features[order[i]][d] - model.feat_mean[d];
            var[d] += c * c;
        }
    for (std::size_t d = 0; d < dim; ++d) {
        const double s = std::sqrt(var[d] / static_cast<double>(n_fit));
        model.feat_scale[d] = s > 1e-12 ? s : 1.0;
    }

    // Standardized fit matrix.
    std::vector<double> X(n_fit * dim);
    std::vector<double> Y(n_fit);
    double max_sqnorm = 0.0;
    for (std::size_t i = 0; i < n_fit; ++i) {
        double sq = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double v =
                (features[order[i]][d] - model.feat_mean[d]) / model.feat_scale[d];
            X[i * dim + d] = v;
            sq += v * v;
        }
        max_sqnorm = std::max(max_sqnorm, sq);
        Y[i] = labels[order[i]] != 0 ? 1.0 : 0.0;
    }

    model.weights.assign(dim, 0.0);
    model.bias = 0.0;
    std::vector<double> grad(dim), vel(dim, 0.0);
    double vel_bias = 0.0;
    const double lr = 1.0 / (0.25 * (max_sqnorm + 1.0) + l2);
    const double momentum = 0.9;
    const double inv_n = 1.0 / static_cast<double>(n_fit);

    for (std::size_t iter = 0; iter < 3000; ++iter) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_bias = 0.0;
        for (std::size_t i = 0; i < n_fit; ++i) {
            double z = model.bias;
            const double* row = X.data() + i * dim;
            for (std::size_t d = 0; d < dim; ++d) z += model.weights[d] * row[d];
            const double r = stable_sigmoid(z) - Y[i];
            for (std::size_t d = 0; d < dim; ++d) grad[d] += r * row[d];
            grad_bias += r;
        }
        double max_grad = std::abs(grad_bias * inv_n);
        for (std::size_t d = 0; d < dim; ++d) {
            grad[d] = grad[d] * inv_n + l2 * model.weights[d];
            max_grad = std::max(max_grad, std::abs(grad[d]));
        }
        grad_bias *= inv_n;
        if (max_grad < 1e-7) break;
        for (std::size_t d = 0; d < dim; ++d) {
            vel[d] = momentum * vel[d] - lr * grad[d];
            model.weights[d] += vel[d];
        }
        vel_bias = momentum * vel_bias - lr * grad_bias;
        model.bias += vel_bias;
    }

    double nll = 0.0;
    for (std::size_t i = 0; i < n_fit; ++i) {
        double z = model.bias;
        const double* row = X.data() + i * dim;
        for (std::size_t d = 0; d < dim; ++d) z += model.weights[d] * row[d];
        const double p = stable_sigmoid(z);
        nll -= Y[i] > 0.5 ? std::log(std::max(p, 1e-300))
                          : std::log(std::max(1.0 - p, 1e-300));
    }
    result.fit_log_loss = nll * inv_n;

    if (n_holdout > 0) {
        std::vector<double> scores(n_holdout);
        std::vector<int> ho_labels(n_holdout);
        std::size_t correct = 0;
        bool has_pos = false, has_neg = false;
        for (std::size_t i = 0; i < n_holdout; ++i) {
            const std::size_t idx = order[n_fit + i];
            scores[i] = model.score(features[idx]);
            ho_labels[i] = labels[idx] != 0;
            (ho_labels[i] ? has_pos : has_neg) = true;
            correct += (scores[i] >= 0.5) == (ho_labels[i] == 1);
        }
        result.holdout_accuracy = static_cast<double>(correct) / static_cast<double>(n_holdout);
        result.holdout_auc = (has_pos && has_neg) ? auc(scores, ho_labels) : 0.5;
    }
    return result;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw UsageError("score/label count mismatch");
    const std::size_t n = scores.size();
    std::uint64_t n_pos = 0;
    for (int y : labels) n_pos += (y != 0);
    const std::uint64_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw DataError("AUC needs both classes");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Twice the Mann-Whitney numerator stays integral, ties included.
    std::uint64_t num2 = 0;
    std::uint64_t neg_below = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        std::uint64_t pos_here = 0, neg_here = 0;
        while (j < n && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] != 0 ? pos_here : neg_here) += 1;
            ++j;
        }
        num2 += pos_here * (2 * neg_below + neg_here);
        neg_below += neg_here;
        i = j;
    }
    return static_cast<double>(num2) / (2.0 * static_cast<double>(n_pos * n_neg));
}

namespace {

// Node-indexed embedding rows, whatever produced them.
using RowLookup = std::function<std::span<const double>(NodeId)>;

struct SeedOutcome {
    double auc = 0.0;
    EdgeOperator op = EdgeOperator::Mean;
};

SeedOutcome evaluate_rows(const EvalSplit& split, const RowLookup& rows, std::uint64_t clf_seed) {
    const std::size_t n_pairs = split.positives.size() + split.negatives.size();
    std::vector<int> labels;
    labels.reserve(n_pairs);
    for (std::size_t i = 0; i < split.positives.size(); ++i) labels.push_back(1);
    for (std::size_t i = 0; i < split.negatives.size(); ++i) labels.push_back(0);

    SeedOutcome best;
    best.auc = -1.0;
    for (EdgeOperator op : kAllEdgeOperators) {
        std::vector<std::vector<double>> features;
        features.reserve(n_pairs);
        for (const auto& [u, v] : split.positives)
            features.push_back(edge_embedding(rows(u), rows(v), op));
        for (const auto& [u, v] : split.negatives)
            features.push_back(edge_embedding(rows(u), rows(v), op));
        FitResult fit = train_classifier(features, labels, 0.25, clf_seed);
        if (fit.holdout_auc > best.auc) {
            best.auc = fit.holdout_auc;
            best.op = op;
        }
    }
    return best;
}

LinkPredictionResult summarize(std::vector<SeedResult> per_seed) {
    LinkPredictionResult result;
    result.per_seed = std::move(per_seed);
    double sum = 0.0, sum_sq = 0.0;
    std::array<std::size_t, 4> op_votes{};
    for (const SeedResult& s : result.per_seed) {
        sum += s.auc;
        sum_sq += s.auc * s.auc;
        op_votes[static_cast<std::size_t>(s.op)] += 1;
    }
    const double n = static_cast<double>(result.per_seed.size());
    result.mean_auc = sum / n;
    result.std_auc = std::sqrt(std::max(0.0, sum_sq / n - result.mean_auc * result.mean_auc));
    std::size_t best_vote = 0;
    for (std::size_t k = 0; k < op_votes.size(); ++k)
        if (op_votes[k] > best_vote) {
            best_vote = op_votes[k];
            result.chosen_op = static_cast<EdgeOperator>(k);
        }
    return result;
}

// Per-seed embedding hook: produces node rows for a trained model over the
// train graph.
using EmbedFn = std::function<std::pair<std::vector<double>, std::size_t>(
    const TemporalGraph& train_graph, std::uint64_t seed_index)>;

LinkPredictionResult run_seeds(const TemporalGraph& g, const LinkPredictionConfig& cfg,
                               const EmbedFn& embed) {
    if (cfg.n_seeds == 0) throw UsageError("need at least one evaluation seed");
    std::vector<SeedResult> per_seed(cfg.n_seeds);

    auto run_one = [&](std::size_t i) {
        const std::uint64_t seed_i = Rng::derive(cfg.base_seed, kSeedTag, i);
        SplitOptions sopts = cfg.split;
        sopts.seed = Rng::derive(seed_i, kSplitTag);
        EvalSplit split = temporal_split(g, sopts);

        auto [data, dim] = embed(split.train_graph, i);
        RowLookup rows = [&data, dim](NodeId v) {
            return std::span<const double>(data.data() + v * dim, dim);
        };
        SeedOutcome outcome = evaluate_rows(split, rows, Rng::derive(seed_i, kClfTag));
        per_seed[i] = SeedResult{i, outcome.auc, outcome.op};
    };

    const std::size_t workers =
        std::min<std::size_t>(std::max(cfg.threads, 1), cfg.n_seeds);
    if (workers <= 1) {
        for (std::size_t i = 0; i < cfg.n_seeds; ++i) run_one(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= cfg.n_seeds) break;
                    run_one(i);
                }
            });
        for (auto& t : pool) t.join();
    }
    return summarize(std::move(per_seed));
}

BiasOptions resolve_bias(const BiasOptions& bias, const TemporalGraph& g) {
    BiasOptions opts = bias;
    if (opts.exp_scale == 0.0 && g.edge_count() > 0)
        opts.exp_scale = opts.resolve_exp_scale(g.t_min(), g.t_max());
    return opts;
}

} // namespace

LinkPredictionResult run_link_prediction(const TemporalGraph& g, const LinkPredictionConfig& cfg) {
    EmbedFn embed = [&](const TemporalGraph& train_graph, std::uint64_t i) {
        const std::uint64_t seed_i = Rng::derive(cfg.base_seed, kSeedTag, i);
        const BiasOptions opts = resolve_bias(cfg.bias, train_graph);
        std::vector<TemporalWalk> walks =
            cfg.static_mode
                ? static_walks(train_graph, cfg.budget, Rng::derive(seed_i, kWalkTag), 1)
                : generate_walks(train_graph, cfg.budget, cfg.fs, cfg.fg, opts,
                                 Rng::derive(seed_i, kWalkTag), 1);
        TrainConfig tcfg = cfg.train;
        tcfg.seed = Rng::derive(seed_i, kSgnsTag);
        EmbeddingMatrix Z = train(walks, tcfg, train_graph.node_count());
        std::vector<double> data(Z.rows() * Z.dim());
        for (std::size_t r = 0; r < Z.rows(); ++r) {
            const auto row = Z.in_row(static_cast<NodeId>(r));
            std::copy(row.begin(), row.end(), data.begin() + r * Z.dim());
        }
        return std::make_pair(std::move(data), Z.dim());
    };
    return run_seeds(g, cfg, embed);
}

std::vector<std::vector<TemporalEdge>> snapshot_buckets(const TemporalGraph& g,
                                                        std::size_t snapshots, bool equal_count) {
    if (snapshots == 0) throw UsageError("need at least one snapshot");
    if (g.edge_count() == 0) throw DataError("cannot bucket an empty graph");
    std::vector<std::vector<TemporalEdge>> buckets(snapshots);
    const auto& edges = g.edges();
    if (equal_count) {
        const std::size_t m = edges.size();
        for (std::size_t k = 0; k < snapshots; ++k) {
            const std::size_t lo = k * m / snapshots;
            const std::size_t hi = (k + 1) * m / snapshots;
            buckets[k].assign(edges.begin() + lo, edges.begin() + hi);
        }
        return buckets;
    }
    const Timestamp t0 = g.t_min();
    const unsigned __int128 span = static_cast<unsigned __int128>(g.t_max() - t0) + 1;
    for (const TemporalEdge& e : edges) {
        const unsigned __int128 offset = static_cast<unsigned __int128>(e.time - t0);
        std::size_t idx = static_cast<std::size_t>(offset * snapshots / span);
        if (idx >= snapshots) idx = snapshots - 1;
        buckets[idx].push_back(e);
    }
    return buckets;
}

DtdneEmbedding dtdne_embeddings(const TemporalGraph& g, const SnapshotConfig& snap,
                                const WalkBudget& budget, const TrainConfig& tcfg,
                                std::uint64_t seed, int threads) {
    if (snap.snapshots == 0) throw UsageError("need at least one snapshot");
    if (tcfg.dim % snap.snapshots != 0)
        throw UsageError("snapshot count must divide the embedding dimension");
    const std::size_t block_dim = tcfg.dim / snap.snapshots;
    const std::size_t n = g.node_count();

    DtdneEmbedding result;
    result.dim = tcfg.dim;
    result.data.assign(n * tcfg.dim, 0.0);

    auto buckets = snapshot_buckets(g, snap.snapshots, snap.equal_count);
    std::vector<int> last_active(n, -1);

    for (std::size_t k = 0; k < snap.snapshots; ++k) {
        const std::size_t col = k * block_dim;
        std::vector<char> active(n, 0);
        bool any_active = false;
        for (const TemporalEdge& e : buckets[k]) {
            active[e.src] = active[e.dst] = 1;
            any_active = true;
        }

        if (!any_active) {
            std::cerr << "warning: snapshot " << k
                      << " has no edges; filling with the inactive-node policy\n";
        } else {
            TemporalGraph snap_graph = TemporalGraph::from_edges(n, buckets[k], g.directed());
            std::size_t n_active = 0;
            for (char a : active) n_active += a;
            WalkBudget snap_budget = budget;
            snap_budget.beta = std::max<std::uint64_t>(
                1, budget.beta * n_active / std::max<std::size_t>(n, 1));
            auto walks =
                static_walks(snap_graph, snap_budget, Rng::derive(seed, kSnapTag, k), threads);
            TrainConfig block_cfg = tcfg;
            block_cfg.dim = block_dim;
            block_cfg.seed = Rng::derive(seed, kEmbTag, k);
            EmbeddingMatrix Z = train(walks, block_cfg, n);
            for (NodeId v = 0; v < n; ++v) {
                if (!active[v]) continue;
                const auto row = Z.in_row(v);
                std::copy(row.begin(), row.end(), result.data.begin() + v * tcfg.dim + col);
            }
        }

        switch (snap.policy) {
            case InactivePolicy::Zeros:
                break;   // block already zero
            case InactivePolicy::LastActive:
                for (NodeId v = 0; v < n; ++v) {
                    if (active[v] || last_active[v] < 0) continue;
                    const std::size_t src_col =
                        static_cast<std::size_t>(last_active[v]) * block_dim;
                    std::copy_n(result.data.begin() + v * tcfg.dim + src_col, block_dim,
                                result.data.begin() + v * tcfg.dim + col);
                }
                break;
            case InactivePolicy::MeanActive: {
                std::vector<double> mean(block_dim, 0.0);
                std::size_t n_active = 0;
                for (NodeId v = 0; v < n; ++v) {
                    if (!active[v]) continue;
                    ++n_active;
                    for (std::size_t d = 0; d < block_dim; ++d)
                        mean[d] += result.data[v * tcfg.dim + col + d];
                }
                if (n_active > 0)
                    for (double& m : mean) m /= static_cast<double>(n_active);
                for (NodeId v = 0; v < n; ++v) {
                    if (active[v]) continue;
                    std::copy(mean.begin(), mean.end(),
                              result.data.begin() + v * tcfg.dim + col);
                }
                break;
            }
        }
        for (NodeId v = 0; v < n; ++v)
            if (active[v]) last_active[v] = static_cast<int>(k);
    }
    return result;
}

LinkPredictionResult dtdne_baseline(const TemporalGraph& g, const SnapshotConfig& snap,
                                    const LinkPredictionConfig& cfg) {
    EmbedFn embed = [&](const TemporalGraph& train_graph, std::uint64_t i) {
        const std::uint64_t seed_i = Rng::derive(cfg.base_seed, kSeedTag, i);
        DtdneEmbedding emb = dtdne_embeddings(train_graph, snap, cfg.budget, cfg.train,
                                              Rng::derive(seed_i, kWalkTag), 1);
        return std::make_pair(std::move(emb.data), emb.dim);
    };
    return run_seeds(g, cfg, embed);
}

} // namespace ctdne
