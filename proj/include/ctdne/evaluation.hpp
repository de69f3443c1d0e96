#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctdne/embedder.hpp"
#include "ctdne/sampling.hpp"
#include "ctdne/temporal_graph.hpp"
#include "ctdne/walker.hpp"

namespace ctdne {

enum class EdgeOperator { Mean, Hadamard, AbsDiff, SquaredDiff };

constexpr std::array<EdgeOperator, 4> kAllEdgeOperators = {
    EdgeOperator::Mean, EdgeOperator::Hadamard, EdgeOperator::AbsDiff,
    EdgeOperator::SquaredDiff};

const char* to_string(EdgeOperator op);

// Unordered node pair, stored (min, max).
using NodePair = std::pair<NodeId, NodeId>;

struct SplitOptions {
    double fraction = 0.75;
    std::uint64_t seed = 0;
    // true excludes pairs adjacent at any time from the negatives; false
    // excludes only training-time pairs.
    bool negatives_exclude_all_time = true;
};

struct EvalSplit {
    TemporalGraph train_graph;          // first-fraction edges, full node universe
    std::vector<NodePair> positives;    // test-window pairs absent from train
    std::vector<NodePair> negatives;    // equal count, non-adjacent, seeded
    double split_fraction = 0.75;
};

// Time-ordered split: first floor(fraction * M) edges train, remaining edges
// deduplicated to unordered pairs with training pairs removed.
EvalSplit temporal_split(const TemporalGraph& g, const SplitOptions& opts);

std::vector<double> edge_embedding(std::span<const double> zi, std::span<const double> zj,
                                   EdgeOperator op);

// Logistic regression with feature standardization; scores are s(w.x + b).
struct LinearClassifier {
    std::vector<double> weights;
    double bias = 0.0;
    std::vector<double> feat_mean;
    std::vector<double> feat_scale;

    double score(std::span<const double> x) const;
};

struct FitResult {
    LinearClassifier model;
    double holdout_auc = 0.0;
    double holdout_accuracy = 0.0;
    double fit_log_loss = 0.0;   // regularized mean NLL on the fit portion
};

// Fits on a seeded 1-holdout_fraction share by gradient descent with an L2
// penalty; the held-out share scores operator selection.
FitResult train_classifier(const std::vector<std::vector<double>>& features,
                           const std::vector<int>& labels, double holdout_fraction,
                           std::uint64_t seed, double l2 = 1e-4);

// ROC AUC as the Mann-Whitney rank statistic; ties contribute one half.
double auc(std::span<const double> scores, std::span<const int> labels);

struct LinkPredictionConfig {
    WalkBudget budget;
    BiasKind fs = BiasKind::Uniform;
    BiasKind fg = BiasKind::Uniform;
    BiasOptions bias;
    TrainConfig train;
    SplitOptions split;
    std::size_t n_seeds = 10;
    std::uint64_t base_seed = 0;
    bool static_mode = false;   // time-ignoring walk baseline
    int threads = 1;
};

struct SeedResult {
    std::uint64_t seed = 0;
    double auc = 0.0;
    EdgeOperator op = EdgeOperator::Mean;
};

struct LinkPredictionResult {
    double mean_auc = 0.0;
    double std_auc = 0.0;
    std::vector<SeedResult> per_seed;
    EdgeOperator chosen_op = EdgeOperator::Mean;   // most frequent across seeds
};

// Full pipeline per seed: split, walk the train graph, train embeddings,
// build pair features, pick the best-of-four operator by hold-out AUC.
LinkPredictionResult run_link_prediction(const TemporalGraph& g, const LinkPredictionConfig& cfg);

enum class InactivePolicy { Zeros, LastActive, MeanActive };

const char* to_string(InactivePolicy policy);

struct SnapshotConfig {
    std::size_t snapshots = 4;        // T; must divide the embedding dimension
    InactivePolicy policy = InactivePolicy::Zeros;
    bool equal_count = false;         // false: equal-width time intervals
};

// Per-snapshot edge buckets over the graph's timespan.
std::vector<std::vector<TemporalEdge>> snapshot_buckets(const TemporalGraph& g,
                                                        std::size_t snapshots, bool equal_count);

struct DtdneEmbedding {
    std::vector<double> data;   // n_nodes x dim, concatenated snapshot blocks
    std::size_t dim = 0;

    std::span<const double> row(NodeId v) const { return {data.data() + v * dim, dim}; }
};

// Discrete-snapshot baseline embedding: T static graphs over the timespan,
// a (D/T)-dimensional embedding per snapshot, concatenated; inactive nodes
// filled per policy.
DtdneEmbedding dtdne_embeddings(const TemporalGraph& g, const SnapshotConfig& snap,
                                const WalkBudget& budget, const TrainConfig& tcfg,
                                std::uint64_t seed, int threads = 1);

// DTDNE baseline through the identical split/feature/classifier pipeline.
LinkPredictionResult dtdne_baseline(const TemporalGraph& g, const SnapshotConfig& snap,
                                    const LinkPredictionConfig& cfg);

} // namespace ctdne
