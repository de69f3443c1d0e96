#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "ctdne/rng.hpp"
#include "ctdne/sampling.hpp"
#include "ctdne/temporal_graph.hpp"
#include "ctdne/types.hpp"

namespace ctdne {

// A walk through the graph: nodes plus the traversed edge times
// (times.size() == nodes.size() - 1). Temporal walks have strictly
// increasing times; relaxed fallback walks may violate time and are tagged.
struct TemporalWalk {
    std::vector<NodeId> nodes;
    std::vector<Timestamp> times;
    bool relaxed = false;

    friend bool operator==(const TemporalWalk&, const TemporalWalk&) = default;
};

struct WalkBudget {
    std::uint64_t beta = 1;     // total context windows to collect
    std::size_t omega = 10;     // context window size; also the minimum length
    std::size_t max_len = 80;   // L
    bool relax_isolated = true; // one relaxed walk per otherwise-unwalked node

    void validate() const {
        if (omega < 2) throw UsageError("omega must be >= 2");
        if (max_len < omega) throw UsageError("max walk length must be >= omega");
        if (beta < 1) throw UsageError("beta must be >= 1");
    }
};

// Context-window budget from a walks-per-node count: beta = R * N * (L - w + 1).
std::uint64_t beta_from_walks_per_node(std::uint64_t r, std::size_t n_nodes, std::size_t max_len,
                                       std::size_t omega);

// One forward temporal walk from start_edge at time t. Starts [src, dst],
// extends via strictly-later incident edges of the last node, and stops at a
// dead end or at min(max_len, cap) nodes.
TemporalWalk temporal_walk(const TemporalGraph& g, const TemporalEdge& start, Timestamp t,
                           std::size_t max_len, std::size_t cap, BiasKind fg,
                           const BiasOptions& opts, Rng& rng);

// Batch walk corpus: repeatedly samples a start edge from fs, walks with a
// cap of min(L, omega + beta - C - 1), keeps walks of length >= omega, and
// stops once C = sum(len - omega + 1) reaches beta. Deterministic for a
// fixed seed at any thread count (per-walk rng streams).
std::vector<TemporalWalk> generate_walks(const TemporalGraph& g, const WalkBudget& budget,
                                         BiasKind fs, BiasKind fg, const BiasOptions& opts,
                                         std::uint64_t seed, int threads = 1);

// Walks that end at edge e, built backward through strictly-earlier incident
// edges (in-edges when directed) and returned in forward orientation. Walks
// shorter than omega are kept; the online setting has no budget bookkeeping.
std::vector<TemporalWalk> backward_walks_for_edge(const TemporalGraph& g, const TemporalEdge& e,
                                                  std::size_t count, std::size_t omega,
                                                  std::size_t max_len, BiasKind fg,
                                                  const BiasOptions& opts, Rng& rng);

// Time-ignoring baseline: uniform start edge, uniform next neighbor over the
// full adjacency, same budget accounting as generate_walks.
std::vector<TemporalWalk> static_walks(const TemporalGraph& g, const WalkBudget& budget,
                                       std::uint64_t seed, int threads = 1);

struct WalkStats {
    std::map<std::size_t, std::uint64_t> length_histogram;
    std::vector<std::uint64_t> occurrences;   // per node, every appearance
    std::vector<std::uint64_t> starts;        // per node, walks started there
};

WalkStats walk_stats(std::span<const TemporalWalk> walks, std::size_t n_nodes);

} // namespace ctdne
