#pragma once

#include <span>
#include <string>
#include <vector>

#include "ctdne/rng.hpp"
#include "ctdne/temporal_graph.hpp"
#include "ctdne/types.hpp"

namespace ctdne {

// Temporal bias applied independently to initial-edge selection and
// temporal-neighbor selection (nine variants in total).
enum class BiasKind { Uniform, Linear, Exponential };

const char* to_string(BiasKind kind);
BiasKind bias_kind_from_string(const std::string& name);

struct BiasOptions {
    // Rescale applied inside exponentials; 0 selects 1/(t_max - t_min) so
    // exponents stay in [-1, 0] before shifting. Raw second-scale
    // differences overflow double for real datasets.
    double exp_scale = 0.0;

    // Sign of the exponential bias. true keeps the written form, which
    // weights later neighbor times higher; false negates the exponent so
    // the smallest time gap wins.
    bool exp_favor_late = true;

    // Linear ranks: true gives the largest rank to the neighbor closest in
    // time to the current node; false is the literal descending-rank
    // reading (latest time wins).
    bool linear_favor_early = true;

    double resolve_exp_scale(Timestamp t_min, Timestamp t_max) const {
        if (exp_scale > 0.0) return exp_scale;
        if (t_max <= t_min) return 0.0;   // degenerate span: all weights equal
        return 1.0 / static_cast<double>(t_max - t_min);
    }
};

// Cumulative distribution over the time-sorted edge array; sampling is a
// binary search, O(log M).
struct EdgeCdf {
    std::vector<double> cumulative;   // monotone, last value 1.0 within 1e-9
    BiasKind kind = BiasKind::Uniform;
};

EdgeCdf build_initial_edge_cdf(const TemporalGraph& g, BiasKind kind,
                               const BiasOptions& opts = {});

const TemporalEdge& sample_initial_edge(const EdgeCdf& cdf, const TemporalGraph& g, Rng& rng);

// Probability of each entry of a time-ordered neighbor view. `mirrored`
// treats the view as traversed backward in time (ascending-time prefixes of
// an adjacency list, where the *last* entry is nearest to the current time).
std::vector<double> neighbor_weights(std::span<const NeighborEntry> neighbors, BiasKind kind,
                                     const BiasOptions& opts = {}, bool mirrored = false);

// Weighted pick via prefix sums; uniform selection should bypass this and
// index directly (O(1)).
std::size_t sample_index(std::span<const double> weights, Rng& rng);

const NeighborEntry& sample_neighbor(std::span<const double> weights,
                                     std::span<const NeighborEntry> neighbors, Rng& rng);

} // namespace ctdne
