#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctdne/types.hpp"

namespace ctdne {

struct GraphStats {
    std::size_t n_edges = 0;
    double mean_degree = 0.0;     // sum of adjacency entries over N
    std::size_t max_degree = 0;   // largest adjacency multiset
    double timespan_days = 0.0;   // (t_max - t_min) in days, seconds assumed
};

// In-memory continuous-time dynamic network: a globally time-sorted edge
// array plus per-node time-sorted adjacency, so the temporal neighborhood
// at time t is a binary-searched contiguous suffix. Parallel edges (same
// endpoints, any timestamps) are allowed; self-loops count once.
//
// Readers (neighbor queries, stats) may run concurrently; add_edge needs
// exclusive access (single writer, multiple readers).
class TemporalGraph {
public:
    explicit TemporalGraph(bool directed = false) : directed_(directed) {}

    // Graph over anonymous dense nodes 0..n-1 (labels are the decimal ids).
    static TemporalGraph from_edges(std::size_t n_nodes, std::span<const TemporalEdge> edges,
                                    bool directed = false);

    // Returns the id for a label, creating it if unseen.
    NodeId intern(std::string_view label);
    std::optional<NodeId> find(std::string_view label) const;
    const std::string& label(NodeId v) const;

    // Streaming insert; never rejects. New ids must come through intern().
    void add_edge(NodeId src, NodeId dst, Timestamp t);
    void add_edge(std::string_view src, std::string_view dst, Timestamp t);

    std::size_t node_count() const { return labels_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    bool directed() const { return directed_; }
    const std::vector<TemporalEdge>& edges() const { return edges_; }
    Timestamp t_min() const;
    Timestamp t_max() const;

    // Full time-sorted adjacency of v (out-edges when directed).
    std::span<const NeighborEntry> neighbors(NodeId v) const;

    // Entries of the adjacency with time strictly greater than t, as a
    // contiguous suffix located in O(log |Γ(v)|).
    std::span<const NeighborEntry> temporal_neighbors(NodeId v, Timestamp t) const;

    // Entries with time strictly less than t (in-edges when directed),
    // ascending by time; the prefix mirror of temporal_neighbors.
    std::span<const NeighborEntry> temporal_predecessors(NodeId v, Timestamp t) const;

    bool has_edge(const TemporalEdge& e) const;

    GraphStats stats(double seconds_per_unit = 1.0) const;

    // Subgraph holding only the first k time-sorted edges but the full node
    // universe and label map (later-only nodes become isolated).
    TemporalGraph prefix(std::size_t k) const;

private:
    void insert_adjacency(std::vector<NeighborEntry>& adj, NodeId nbr, Timestamp t);

    bool directed_;
    std::vector<TemporalEdge> edges_;              // ascending by time
    std::vector<std::vector<NeighborEntry>> adj_;  // out (or undirected) lists
    std::vector<std::vector<NeighborEntry>> in_adj_;  // directed only
    std::vector<std::string> labels_;
    std::unordered_map<std::string, NodeId> label_to_id_;
};

// Parses "src dst time" / "src dst weight time" lines (whitespace or comma
// separated, '%'/'#' comments, optional .gz). Timestamps are divided by
// unit_scale at ingest. Edges are re-sorted by time regardless of file order.
TemporalGraph load_edge_list(const std::string& path, bool directed = false,
                             std::int64_t unit_scale = 1);

} // namespace ctdne
