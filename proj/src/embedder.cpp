#include "ctdne/embedder.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <thread>

#include "ctdne/io.hpp"

namespace ctdne {

namespace {

constexpr std::uint64_t kInitTag = 0x696E6974;
constexpr std::uint64_t kNegTag = 0x6E656773;
constexpr std::uint64_t kShrinkTag = 0x7368726B;
constexpr double kUnigramPower = 0.75;

} // namespace

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim, std::uint64_t seed)
    : dim_(dim) {
    if (dim == 0) throw DataError("embedding dimension must be >= 1");
    grow(rows, seed);
}

void EmbeddingMatrix::grow(std::size_t rows, std::uint64_t seed) {
    const std::size_t old_rows = this->rows();
    if (rows <= old_rows) return;
    in_.resize(rows * dim_);
    out_.resize(rows * dim_, 0.0);
    const std::uint64_t init_seed = Rng::derive(seed, kInitTag);
    const double inv_dim = 1.0 / static_cast<double>(dim_);
    for (std::size_t r = old_rows; r < rows; ++r) {
        Rng rng = Rng::split(init_seed, r);
        double* row = in_.data() + r * dim_;
        for (std::size_t j = 0; j < dim_; ++j) row[j] = (rng.uniform01() - 0.5) * inv_dim;
    }
}

double sgns_pair_loss(const EmbeddingMatrix& Z, NodeId center, NodeId context,
                      std::span<const NodeId> negatives) {
    const auto zc = Z.in_row(center);
    auto dot_with = [&](NodeId target) {
        const auto zo = Z.out_row(target);
        double f = 0.0;
        for (std::size_t j = 0; j < zc.size(); ++j) f += zc[j] * zo[j];
        return f;
    };
    double loss = -std::log(std::max(stable_sigmoid(dot_with(context)), 1e-300));
    for (NodeId n : negatives)
        loss -= std::log(std::max(stable_sigmoid(-dot_with(n)), 1e-300));
    return loss;
}

void sgns_pair_gradients(const EmbeddingMatrix& Z, NodeId center, NodeId context,
                         std::span<const NodeId> negatives, std::vector<double>& d_center,
                         std::vector<std::vector<double>>& d_targets) {
    const std::size_t dim = Z.dim();
    const auto zc = Z.in_row(center);
    d_center.assign(dim, 0.0);
    d_targets.assign(negatives.size() + 1, std::vector<double>(dim, 0.0));

    auto accumulate = [&](NodeId target, double label, std::vector<double>& d_target) {
        const auto zo = Z.out_row(target);
        double f = 0.0;
        for (std::size_t j = 0; j < dim; ++j) f += zc[j] * zo[j];
        const double residual = stable_sigmoid(f) - label;   // d loss / d f
        for (std::size_t j = 0; j < dim; ++j) {
            d_center[j] += residual * zo[j];
            d_target[j] = residual * zc[j];
        }
    };
    accumulate(context, 1.0, d_targets[0]);
    for (std::size_t k = 0; k < negatives.size(); ++k)
        accumulate(negatives[k], 0.0, d_targets[k + 1]);
}

void sgns_pair_step(EmbeddingMatrix& Z, NodeId center, NodeId context,
                    std::span<const NodeId> negatives, double lr, std::span<double> scratch) {
    const std::size_t dim = Z.dim();
    auto zc = Z.in_row(center);
    std::fill(scratch.begin(), scratch.end(), 0.0);

    auto step_target = [&](NodeId target, double label) {
        auto zo = Z.out_row(target);
        double f = 0.0;
        for (std::size_t j = 0; j < dim; ++j) f += zc[j] * zo[j];
        const double g = (label - stable_sigmoid(f)) * lr;
        for (std::size_t j = 0; j < dim; ++j) scratch[j] += g * zo[j];
        for (std::size_t j = 0; j < dim; ++j) zo[j] += g * zc[j];
    };
    step_target(context, 1.0);
    for (NodeId n : negatives) step_target(n, 0.0);
    for (std::size_t j = 0; j < dim; ++j) zc[j] += scratch[j];
}

namespace {

struct NoiseCdf {
    std::vector<double> cdf;
    std::vector<NodeId> ids;

    bool empty() const { return ids.empty(); }

    NodeId sample(Rng& rng) const {
        const double u = rng.uniform01();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t idx = static_cast<std::size_t>(it - cdf.begin());
        if (idx >= ids.size()) idx = ids.size() - 1;
        return ids[idx];
    }
};

NoiseCdf build_noise(std::span<const std::uint64_t> counts) {
    NoiseCdf noise;
    double total = 0.0;
    for (NodeId v = 0; v < counts.size(); ++v) {
        if (counts[v] == 0) continue;
        total += std::pow(static_cast<double>(counts[v]), kUnigramPower);
        noise.ids.push_back(v);
        noise.cdf.push_back(total);
    }
    for (double& c : noise.cdf) c /= total;
    return noise;
}

std::vector<std::uint64_t> count_occurrences(std::span<const TemporalWalk> walks,
                                             std::size_t n_nodes) {
    std::vector<std::uint64_t> counts(n_nodes, 0);
    for (const TemporalWalk& w : walks)
        for (NodeId v : w.nodes) ++counts[v];
    return counts;
}

std::uint64_t pair_count(std::span<const TemporalWalk> walks, std::size_t omega) {
    std::uint64_t total = 0;
    for (const TemporalWalk& w : walks) {
        const std::size_t len = w.nodes.size();
        for (std::size_t i = 0; i < len; ++i) {
            const std::size_t lo = i >= omega ? i - omega : 0;
            const std::size_t hi = std::min(len - 1, i + omega);
            total += hi - lo;   // window size minus the center itself
        }
    }
    return total;
}

// Trains one contiguous walk range. lr decay follows the shared pair
// counter, so multi-threaded runs decay on global progress.
void train_range(EmbeddingMatrix& Z, std::span<const TemporalWalk> walks, const TrainConfig& cfg,
                 const NoiseCdf& noise, std::uint64_t thread_id,
                 std::atomic<std::uint64_t>& pairs_done, std::uint64_t total_pairs) {
    Rng neg_rng(Rng::derive(cfg.seed, kNegTag, thread_id));
    Rng shrink_rng(Rng::derive(cfg.seed, kShrinkTag, thread_id));
    std::vector<double> scratch(cfg.dim);
    std::vector<NodeId> negatives;
    const double span = static_cast<double>(std::max<std::uint64_t>(total_pairs, 1));

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (const TemporalWalk& w : walks) {
            const std::size_t len = w.nodes.size();
            for (std::size_t i = 0; i < len; ++i) {
                std::size_t window = cfg.omega;
                if (cfg.shrink_window) window = 1 + shrink_rng.below(cfg.omega);
                const std::size_t lo = i >= window ? i - window : 0;
                const std::size_t hi = std::min(len - 1, i + window);
                const NodeId center = w.nodes[i];
                for (std::size_t j = lo; j <= hi; ++j) {
                    if (j == i) continue;
                    const NodeId context = w.nodes[j];
                    const std::uint64_t done =
                        pairs_done.fetch_add(1, std::memory_order_relaxed);
                    double lr =
                        cfg.lr0 - (cfg.lr0 - cfg.lr_min) * (static_cast<double>(done) / span);
                    if (lr < cfg.lr_min) lr = cfg.lr_min;
                    negatives.clear();
                    for (std::size_t k = 0; k < cfg.negatives; ++k) {
                        const NodeId cand = noise.sample(neg_rng);
                        if (cand == center || cand == context) continue;
                        negatives.push_back(cand);
                    }
                    sgns_pair_step(Z, center, context, negatives, lr, scratch);
                }
            }
        }
    }
}

} // namespace

EmbeddingMatrix train(std::span<const TemporalWalk> walks, const TrainConfig& cfg,
                      std::size_t n_nodes) {
    cfg.validate();
    if (walks.empty()) throw DataError("cannot train on an empty walk set");
    for (const TemporalWalk& w : walks)
        if (w.nodes.size() < 2) throw DataError("walks must have length >= 2");

    EmbeddingMatrix Z(n_nodes, cfg.dim, cfg.seed);
    const NoiseCdf noise = build_noise(count_occurrences(walks, n_nodes));
    const std::uint64_t total_pairs =
        static_cast<std::uint64_t>(cfg.epochs) * pair_count(walks, cfg.omega);
    std::atomic<std::uint64_t> pairs_done{0};

    if (cfg.threads <= 1 || walks.size() < 2) {
        train_range(Z, walks, cfg, noise, 0, pairs_done, total_pairs);
        return Z;
    }

    // Lock-free row updates across threads; overlapping rows may lose
    // updates (asynchronous SGD contract), determinism is not guaranteed.
    const std::size_t n_threads = std::min<std::size_t>(cfg.threads, walks.size());
    const std::size_t per = (walks.size() + n_threads - 1) / n_threads;
    std::vector<std::thread> workers;
    for (std::size_t t = 0; t < n_threads; ++t) {
        const std::size_t lo = t * per;
        const std::size_t hi = std::min(walks.size(), lo + per);
        if (lo >= hi) break;
        workers.emplace_back([&, lo, hi, t] {
            train_range(Z, walks.subspan(lo, hi - lo), cfg, noise, t, pairs_done,
                        total_pairs);
        });
    }
    for (auto& w : workers) w.join();
    return Z;
}

OnlineState::OnlineState(std::uint64_t seed) : rng(Rng::derive(seed, kNegTag)) {}

void online_update(EmbeddingMatrix& Z, std::span<const TemporalWalk> walks,
                   const TrainConfig& cfg, OnlineState& state) {
    if (walks.empty()) return;
    cfg.validate();

    std::size_t max_node = 0;
    for (const TemporalWalk& w : walks)
        for (NodeId v : w.nodes) max_node = std::max<std::size_t>(max_node, v);
    if (max_node >= Z.rows()) Z.grow(max_node + 1, cfg.seed);
    if (max_node >= state.counts.size()) state.counts.resize(max_node + 1, 0);
    for (const TemporalWalk& w : walks)
        for (NodeId v : w.nodes) ++state.counts[v];

    if (state.noise_ids.empty() || state.updates_since_refresh >= state.refresh_interval) {
        NoiseCdf rebuilt = build_noise(state.counts);
        state.noise_cdf = std::move(rebuilt.cdf);
        state.noise_ids = std::move(rebuilt.ids);
        state.updates_since_refresh = 0;
    }
    ++state.updates_since_refresh;

    NoiseCdf noise;
    noise.cdf = std::move(state.noise_cdf);
    noise.ids = std::move(state.noise_ids);

    const double lr = cfg.resolved_online_lr();
    std::vector<double> scratch(cfg.dim);
    std::vector<NodeId> negatives;
    for (const TemporalWalk& w : walks) {
        const std::size_t len = w.nodes.size();
        for (std::size_t i = 0; i < len; ++i) {
            const std::size_t lo = i >= cfg.omega ? i - cfg.omega : 0;
            const std::size_t hi = std::min(len - 1, i + cfg.omega);
            for (std::size_t j = lo; j <= hi; ++j) {
                if (j == i) continue;
                negatives.clear();
                for (std::size_t k = 0; k < cfg.negatives; ++k) {
                    const NodeId cand = noise.sample(state.rng);
                    if (cand == w.nodes[i] || cand == w.nodes[j]) continue;
                    negatives.push_back(cand);
                }
                sgns_pair_step(Z, w.nodes[i], w.nodes[j], negatives, lr, scratch);
            }
        }
    }

    state.noise_cdf = std::move(noise.cdf);
    state.noise_ids = std::move(noise.ids);
}

void save_embeddings(const EmbeddingMatrix& Z, std::span<const std::string> labels,
                     const std::string& path) {
    if (labels.size() != Z.rows())
        throw UsageError("label count does not match embedding rows");
    TextWriter out(path);
    std::string buf;
    buf = std::to_string(Z.rows()) + " " + std::to_string(Z.dim()) + "\n";
    out.write(buf);
    for (std::size_t r = 0; r < Z.rows(); ++r) {
        buf = labels[r];
        const auto row = Z.in_row(static_cast<NodeId>(r));
        for (double v : row) {
            buf += ' ';
            buf += format_double(v);
        }
        buf += '\n';
        out.write(buf);
    }
    out.close();
}

LabeledEmbeddings load_embeddings(const std::string& path) {
    LineReader reader(path);
    std::string line;
    if (!reader.next(line)) throw DataError(path + ": empty embedding file");

    auto parse_size = [&](const std::string& tok, std::size_t& out) {
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
        return ec == std::errc() && ptr == tok.data() + tok.size();
    };

    std::vector<std::string> header;
    {
        std::string cur;
        for (char c : line) {
            if (c == ' ' || c == '\t') {
                if (!cur.empty()) header.push_back(cur), cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (!cur.empty()) header.push_back(cur);
    }
    std::size_t n = 0, dim = 0;
    if (header.size() != 2 || !parse_size(header[0], n) || !parse_size(header[1], dim) ||
        dim == 0)
        throw DataError(path + ": malformed header '" + line + "' (expected 'N D')");

    LabeledEmbeddings result;
    result.matrix = EmbeddingMatrix(n, dim, 0);
    result.labels.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        if (!reader.next(line))
            throw DataError(path + ": expected " + std::to_string(n) + " rows, got " +
                            std::to_string(r));
        std::size_t pos = 0;
        auto next_token = [&](std::string& tok) {
            while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
            if (pos >= line.size()) return false;
            std::size_t start = pos;
            while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
            tok = line.substr(start, pos - start);
            return true;
        };
        std::string label;
        if (!next_token(label))
            throw DataError(path + ": row " + std::to_string(r) + " is empty");
        auto row = result.matrix.in_row(static_cast<NodeId>(r));
        std::string tok;
        std::size_t j = 0;
        while (next_token(tok)) {
            if (j >= dim)
                throw DataError(path + ": row " + std::to_string(r) + " ('" + label +
                                "'): expected " + std::to_string(dim) + " values, got more");
            double v;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || ptr != tok.data() + tok.size())
                throw DataError(path + ": row " + std::to_string(r) + " ('" + label +
                                "'): bad value '" + tok + "'");
            row[j++] = v;
        }
        if (j != dim)
            throw DataError(path + ": row " + std::to_string(r) + " ('" + label +
                            "'): expected " + std::to_string(dim) + " values, got " +
                            std::to_string(j));
        result.labels.push_back(std::move(label));
    }
    return result;
}

} // namespace ctdne
