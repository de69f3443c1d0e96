#include "ctdne/walker.hpp"

#include <algorithm>
#include <thread>

namespace ctdne {

namespace {

// Stream family tags so walks, relaxed fallbacks, and other stages never
// share rng streams.
constexpr std::uint64_t kWalkTag = 0x77616C6B;
constexpr std::uint64_t kRelaxTag = 0x72656C78;

TemporalWalk static_walk_from(const TemporalGraph& g, NodeId src, NodeId dst, Timestamp t,
                              std::size_t limit, Rng& rng) {
    TemporalWalk w;
    w.nodes = {src, dst};
    w.times = {t};
    NodeId cur = dst;
    while (w.nodes.size() < limit) {
        auto nb = g.neighbors(cur);
        if (nb.empty()) break;
        const NeighborEntry& pick = nb[rng.below(nb.size())];
        w.nodes.push_back(pick.node);
        w.times.push_back(pick.time);
        cur = pick.node;
    }
    return w;
}

} // namespace

std::uint64_t beta_from_walks_per_node(std::uint64_t r, std::size_t n_nodes, std::size_t max_len,
                                       std::size_t omega) {
    if (max_len < omega) throw UsageError("max walk length must be >= omega");
    if (r == 0 || n_nodes == 0) throw UsageError("walks-per-node and node count must be positive");
    return r * static_cast<std::uint64_t>(n_nodes) *
           static_cast<std::uint64_t>(max_len - omega + 1);
}

TemporalWalk temporal_walk(const TemporalGraph& g, const TemporalEdge& start, Timestamp t,
                           std::size_t max_len, std::size_t cap, BiasKind fg,
                           const BiasOptions& opts, Rng& rng) {
    if (cap < 2) throw UsageError("walk cap must be >= 2");
    if (!g.has_edge(start)) throw DataError("start edge not in graph");
    const std::size_t limit = std::min(max_len, cap);

    TemporalWalk w;
    w.nodes = {start.src, start.dst};
    w.times = {start.time};
    NodeId cur = start.dst;
    Timestamp now = t;
    while (w.nodes.size() < limit) {
        auto nb = g.temporal_neighbors(cur, now);
        if (nb.empty()) break;
        NeighborEntry pick;
        if (fg == BiasKind::Uniform) {
            pick = nb[rng.below(nb.size())];
        } else {
            auto weights = neighbor_weights(nb, fg, opts);
            pick = sample_neighbor(weights, nb, rng);
        }
        w.nodes.push_back(pick.node);
        w.times.push_back(pick.time);
        cur = pick.node;
        now = pick.time;
    }
    return w;
}

namespace {

// Shared driver for the temporal corpus and the time-ignoring baseline.
//
// Every attempt is generated at the full length cap L from its own
// (seed, index) rng stream; the residual budget cap is applied afterwards by
// truncation. Truncating is identical to walking with the smaller cap, since
// each extension step consumes the same draws either way, and it makes the
// output independent of the worker count.
std::vector<TemporalWalk> run_budget(const TemporalGraph& g, const WalkBudget& budget, BiasKind fs,
                                     BiasKind fg, const BiasOptions& opts, std::uint64_t seed,
                                     int threads, bool ignore_time) {
    budget.validate();
    if (g.edge_count() == 0) throw DataError("cannot generate walks on an empty graph");

    const EdgeCdf cdf = build_initial_edge_cdf(g, ignore_time ? BiasKind::Uniform : fs, opts);
    const std::uint64_t walk_seed = Rng::derive(seed, kWalkTag);

    auto attempt_walk = [&](std::uint64_t index) {
        Rng rng = Rng::split(walk_seed, index);
        const TemporalEdge& e = sample_initial_edge(cdf, g, rng);
        if (ignore_time)
            return static_walk_from(g, e.src, e.dst, e.time, budget.max_len, rng);
        return temporal_walk(g, e, e.time, budget.max_len, budget.max_len, fg, opts, rng);
    };

    std::vector<TemporalWalk> kept;
    std::uint64_t collected = 0;
    std::uint64_t next_index = 0;
    std::uint64_t consecutive_rejects = 0;
    const std::uint64_t reject_limit = 100 * budget.beta;

    const std::size_t chunk =
        threads > 1 ? static_cast<std::size_t>(threads) * 64 : std::size_t{1};
    std::vector<TemporalWalk> batch(chunk);

    while (collected < budget.beta) {
        const std::uint64_t base = next_index;
        if (chunk == 1) {
            batch[0] = attempt_walk(base);
        } else {
            std::vector<std::thread> workers;
            const std::size_t per = (chunk + threads - 1) / threads;
            for (int w = 0; w < threads; ++w) {
                const std::size_t lo = static_cast<std::size_t>(w) * per;
                const std::size_t hi = std::min(chunk, lo + per);
                if (lo >= hi) break;
                workers.emplace_back([&, lo, hi] {
                    for (std::size_t i = lo; i < hi; ++i) batch[i] = attempt_walk(base + i);
                });
            }
            for (auto& t : workers) t.join();
        }
        next_index += chunk;

        for (std::size_t i = 0; i < chunk && collected < budget.beta; ++i) {
            TemporalWalk& w = batch[i];
            const std::size_t cap = std::min<std::uint64_t>(
                budget.max_len, budget.omega + (budget.beta - collected) - 1);
            if (w.nodes.size() > cap) {
                w.nodes.resize(cap);
                w.times.resize(cap - 1);
            }
            if (w.nodes.size() < budget.omega) {
                if (++consecutive_rejects >= reject_limit)
                    throw DataError(
                        "walk budget stalled: " + std::to_string(consecutive_rejects) +
                        " consecutive walks shorter than omega (graph may have no "
                        "temporally extendable edges)");
                continue;
            }
            consecutive_rejects = 0;
            collected += w.nodes.size() - budget.omega + 1;
            kept.push_back(std::move(w));
        }
    }

    if (budget.relax_isolated) {
        std::vector<char> seen(g.node_count(), 0);
        for (const TemporalWalk& w : kept)
            for (NodeId v : w.nodes) seen[v] = 1;
        const std::uint64_t relax_seed = Rng::derive(seed, kRelaxTag);
        for (NodeId v = 0; v < g.node_count(); ++v) {
            if (seen[v] || g.neighbors(v).empty()) continue;
            Rng rng = Rng::split(relax_seed, v);
            auto nb = g.neighbors(v);
            const NeighborEntry& first = nb[rng.below(nb.size())];
            TemporalWalk w = static_walk_from(g, v, first.node, first.time, budget.omega, rng);
            w.relaxed = true;
            if (w.nodes.size() >= 2) kept.push_back(std::move(w));
        }
    }
    return kept;
}

} // namespace

std::vector<TemporalWalk> generate_walks(const TemporalGraph& g, const WalkBudget& budget,
                                         BiasKind fs, BiasKind fg, const BiasOptions& opts,
                                         std::uint64_t seed, int threads) {
    return run_budget(g, budget, fs, fg, opts, seed, threads, /*ignore_time=*/false);
}

std::vector<TemporalWalk> static_walks(const TemporalGraph& g, const WalkBudget& budget,
                                       std::uint64_t seed, int threads) {
    return run_budget(g, budget, BiasKind::Uniform, BiasKind::Uniform, {}, seed, threads,
                      /*ignore_time=*/true);
}

std::vector<TemporalWalk> backward_walks_for_edge(const TemporalGraph& g, const TemporalEdge& e,
                                                  std::size_t count, std::size_t omega,
                                                  std::size_t max_len, BiasKind fg,
                                                  const BiasOptions& opts, Rng& rng) {
    (void)omega;   // online walks are kept whatever their length
    if (max_len < 2) throw UsageError("max walk length must be >= 2");
    if (!g.has_edge(e)) throw DataError("edge not in graph");

    std::vector<TemporalWalk> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<NodeId> rev_nodes{e.dst, e.src};
        std::vector<Timestamp> rev_times{e.time};
        NodeId cur = e.src;
        Timestamp now = e.time;
        while (rev_nodes.size() < max_len) {
            auto pred = g.temporal_predecessors(cur, now);
            if (pred.empty()) break;
            NeighborEntry pick;
            if (fg == BiasKind::Uniform) {
                pick = pred[rng.below(pred.size())];
            } else {
                auto weights = neighbor_weights(pred, fg, opts, /*mirrored=*/true);
                pick = sample_neighbor(weights, pred, rng);
            }
            rev_nodes.push_back(pick.node);
            rev_times.push_back(pick.time);
            cur = pick.node;
            now = pick.time;
        }
        TemporalWalk w;
        w.nodes.assign(rev_nodes.rbegin(), rev_nodes.rend());
        w.times.assign(rev_times.rbegin(), rev_times.rend());
        out.push_back(std::move(w));
    }
    return out;
}

WalkStats walk_stats(std::span<const TemporalWalk> walks, std::size_t n_nodes) {
    if (walks.empty()) throw DataError("no walks to summarize");
    WalkStats s;
    s.occurrences.assign(n_nodes, 0);
    s.starts.assign(n_nodes, 0);
    for (const TemporalWalk& w : walks) {
        ++s.length_histogram[w.nodes.size()];
        ++s.starts[w.nodes.front()];
        for (NodeId v : w.nodes) ++s.occurrences[v];
    }
    return s;
}

} // namespace ctdne
