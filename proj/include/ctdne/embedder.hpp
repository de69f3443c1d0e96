#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ctdne/rng.hpp"
#include "ctdne/types.hpp"
#include "ctdne/walker.hpp"

namespace ctdne {

struct TrainConfig {
    std::size_t dim = 128;
    std::size_t omega = 10;       // symmetric context window
    std::size_t negatives = 5;    // per positive pair
    double lr0 = 0.025;
    double lr_min = 1e-4;
    double online_lr = 0.0;       // 0 -> lr0 / 10; fixed, no decay
    std::size_t epochs = 1;
    std::uint64_t seed = 0;
    bool shrink_window = false;   // per-center random window in [1, omega]
    int threads = 1;              // >1: lock-free row updates, nondeterministic

    double resolved_online_lr() const { return online_lr > 0.0 ? online_lr : lr0 / 10.0; }

    void validate() const {
        if (dim == 0) throw DataError("embedding dimension must be >= 1");
        if (omega < 1) throw UsageError("context window must be >= 1");
        if (negatives < 1) throw UsageError("negative count must be >= 1");
        if (lr_min <= 0.0 || lr_min > lr0) throw UsageError("need 0 < lr_min <= lr0");
    }
};

// Input ("in") and context ("out") vectors, N x D each. Rows grow as new
// nodes arrive; row initialization is a pure function of (seed, row), so a
// matrix grown in any order matches one built at full size.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;
    EmbeddingMatrix(std::size_t rows, std::size_t dim, std::uint64_t seed);

    void grow(std::size_t rows, std::uint64_t seed);

    std::span<double> in_row(NodeId v) { return {in_.data() + v * dim_, dim_}; }
    std::span<const double> in_row(NodeId v) const { return {in_.data() + v * dim_, dim_}; }
    std::span<double> out_row(NodeId v) { return {out_.data() + v * dim_, dim_}; }
    std::span<const double> out_row(NodeId v) const { return {out_.data() + v * dim_, dim_}; }

    std::size_t rows() const { return dim_ == 0 ? 0 : in_.size() / dim_; }
    std::size_t dim() const { return dim_; }

    friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> in_;
    std::vector<double> out_;
};

double stable_sigmoid(double x);

// Negative-sampling surrogate loss for one (center, context, negatives)
// triple: -log s(zc.zo) - sum_k log s(-zc.znk).
double sgns_pair_loss(const EmbeddingMatrix& Z, NodeId center, NodeId context,
                      std::span<const NodeId> negatives);

// Gradients of sgns_pair_loss with respect to the center in-row and each
// target out-row (context first, negatives after).
void sgns_pair_gradients(const EmbeddingMatrix& Z, NodeId center, NodeId context,
                         std::span<const NodeId> negatives, std::vector<double>& d_center,
                         std::vector<std::vector<double>>& d_targets);

// One SGD step on the pair loss at step size lr. scratch must hold dim
// doubles; target rows see gradients computed at the pre-step center value.
void sgns_pair_step(EmbeddingMatrix& Z, NodeId center, NodeId context,
                    std::span<const NodeId> negatives, double lr, std::span<double> scratch);

// Batch skip-gram training over a walk corpus. Negatives come from the
// walk-frequency unigram distribution raised to 0.75; the step size decays
// linearly from lr0 to lr_min over the total pair count.
EmbeddingMatrix train(std::span<const TemporalWalk> walks, const TrainConfig& cfg,
                      std::size_t n_nodes);

// Noise distribution plus bookkeeping carried between online updates. The
// distribution is rebuilt at most every refresh_interval update calls;
// occurrence counts accumulate on every call.
struct OnlineState {
    explicit OnlineState(std::uint64_t seed);

    std::vector<std::uint64_t> counts;
    std::vector<double> noise_cdf;
    std::vector<NodeId> noise_ids;
    std::uint64_t updates_since_refresh = 0;
    std::uint64_t refresh_interval = 10000;
    Rng rng;
};

// Incremental update: same pair generation and gradients as train, at the
// fixed online step size, touching only rows named by the walks (plus
// negatives). Unseen nodes get freshly initialized rows. Never rejects;
// an empty walk set is a bit-exact no-op.
void online_update(EmbeddingMatrix& Z, std::span<const TemporalWalk> walks,
                   const TrainConfig& cfg, OnlineState& state);

struct LabeledEmbeddings {
    std::vector<std::string> labels;
    EmbeddingMatrix matrix;
};

// Text format: header "N D", then one line per node "label f1 ... fD" with
// shortest round-trip rendering. .gz paths are compressed/decompressed.
void save_embeddings(const EmbeddingMatrix& Z, std::span<const std::string> labels,
                     const std::string& path);
LabeledEmbeddings load_embeddings(const std::string& path);

} // namespace ctdne
