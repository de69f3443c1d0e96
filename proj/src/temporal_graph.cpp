#include "ctdne/temporal_graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "ctdne/io.hpp"

namespace ctdne {

namespace {

bool entry_time_less(const NeighborEntry& e, Timestamp t) { return e.time < t; }
bool time_entry_less(Timestamp t, const NeighborEntry& e) { return t < e.time; }

} // namespace

TemporalGraph TemporalGraph::from_edges(std::size_t n_nodes, std::span<const TemporalEdge> edges,
                                        bool directed) {
    TemporalGraph g(directed);
    g.labels_.reserve(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        g.labels_.push_back(std::to_string(i));
        g.label_to_id_.emplace(g.labels_.back(), static_cast<NodeId>(i));
    }
    g.adj_.resize(n_nodes);
    if (directed) g.in_adj_.resize(n_nodes);
    for (const TemporalEdge& e : edges) g.add_edge(e.src, e.dst, e.time);
    return g;
}

NodeId TemporalGraph::intern(std::string_view label) {
    auto it = label_to_id_.find(std::string(label));
    if (it != label_to_id_.end()) return it->second;
    NodeId id = static_cast<NodeId>(labels_.size());
    labels_.emplace_back(label);
    label_to_id_.emplace(labels_.back(), id);
    adj_.emplace_back();
    if (directed_) in_adj_.emplace_back();
    return id;
}

std::optional<NodeId> TemporalGraph::find(std::string_view label) const {
    auto it = label_to_id_.find(std::string(label));
    if (it == label_to_id_.end()) return std::nullopt;
    return it->second;
}

const std::string& TemporalGraph::label(NodeId v) const {
    if (v >= labels_.size()) throw std::out_of_range("node id out of range");
    return labels_[v];
}

void TemporalGraph::insert_adjacency(std::vector<NeighborEntry>& adj, NodeId nbr, Timestamp t) {
    if (adj.empty() || adj.back().time <= t) {
        adj.push_back({nbr, t});
        return;
    }
    auto pos = std::upper_bound(adj.begin(), adj.end(), t, time_entry_less);
    adj.insert(pos, {nbr, t});
}

void TemporalGraph::add_edge(NodeId src, NodeId dst, Timestamp t) {
    if (src >= labels_.size() || dst >= labels_.size())
        throw UsageError("add_edge: node id out of range; intern labels first");
    if (edges_.empty() || edges_.back().time <= t) {
        edges_.push_back({src, dst, t});
    } else {
        auto pos = std::upper_bound(
            edges_.begin(), edges_.end(), t,
            [](Timestamp lhs, const TemporalEdge& e) { return lhs < e.time; });
        edges_.insert(pos, {src, dst, t});
    }
    insert_adjacency(adj_[src], dst, t);
    if (directed_) {
        insert_adjacency(in_adj_[dst], src, t);
    } else if (src != dst) {
        insert_adjacency(adj_[dst], src, t);
    }
}

void TemporalGraph::add_edge(std::string_view src, std::string_view dst, Timestamp t) {
    add_edge(intern(src), intern(dst), t);
}

Timestamp TemporalGraph::t_min() const {
    if (edges_.empty()) throw DataError("empty graph has no t_min");
    return edges_.front().time;
}

Timestamp TemporalGraph::t_max() const {
    if (edges_.empty()) throw DataError("empty graph has no t_max");
    return edges_.back().time;
}

std::span<const NeighborEntry> TemporalGraph::neighbors(NodeId v) const {
    if (v >= adj_.size()) throw std::out_of_range("node id out of range");
    return adj_[v];
}

std::span<const NeighborEntry> TemporalGraph::temporal_neighbors(NodeId v, Timestamp t) const {
    if (v >= adj_.size()) throw std::out_of_range("node id out of range");
    const auto& adj = adj_[v];
    auto first = std::upper_bound(adj.begin(), adj.end(), t, time_entry_less);
    return {first, adj.end()};
}

std::span<const NeighborEntry> TemporalGraph::temporal_predecessors(NodeId v, Timestamp t) const {
    const auto& lists = directed_ ? in_adj_ : adj_;
    if (v >= lists.size()) throw std::out_of_range("node id out of range");
    const auto& adj = lists[v];
    auto last = std::lower_bound(adj.begin(), adj.end(), t, entry_time_less);
    return {adj.begin(), last};
}

bool TemporalGraph::has_edge(const TemporalEdge& e) const {
    if (e.src >= adj_.size() || e.dst >= adj_.size()) return false;
    const auto& adj = adj_[e.src];
    auto first = std::lower_bound(adj.begin(), adj.end(), e.time, entry_time_less);
    for (; first != adj.end() && first->time == e.time; ++first)
        if (first->node == e.dst) return true;
    return false;
}

GraphStats TemporalGraph::stats(double seconds_per_unit) const {
    if (edges_.empty()) throw DataError("empty graph has no stats");
    GraphStats s;
    s.n_edges = edges_.size();
    std::size_t total = 0;
    for (const auto& adj : adj_) {
        total += adj.size();
        s.max_degree = std::max(s.max_degree, adj.size());
    }
    s.mean_degree = static_cast<double>(total) / static_cast<double>(labels_.size());
    s.timespan_days =
        static_cast<double>(t_max() - t_min()) * seconds_per_unit / 86400.0;
    return s;
}

TemporalGraph TemporalGraph::prefix(std::size_t k) const {
    TemporalGraph g(directed_);
    g.labels_ = labels_;
    g.label_to_id_ = label_to_id_;
    g.adj_.resize(labels_.size());
    if (directed_) g.in_adj_.resize(labels_.size());
    k = std::min(k, edges_.size());
    for (std::size_t i = 0; i < k; ++i) g.add_edge(edges_[i].src, edges_[i].dst, edges_[i].time);
    return g;
}

namespace {

struct ParsedEdge {
    std::string src;
    std::string dst;
    Timestamp time;
};

// Accepts integers with an optional fractional part (truncated); some
// datasets render epoch seconds as "123.0".
bool parse_timestamp(const std::string& tok, Timestamp& out) {
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc()) return false;
    if (ptr == end) return true;
    if (*ptr != '.') return false;
    for (++ptr; ptr != end; ++ptr)
        if (!std::isdigit(static_cast<unsigned char>(*ptr))) return false;
    return true;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
            if (!cur.empty()) fields.push_back(std::move(cur)), cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) fields.push_back(std::move(cur));
    return fields;
}

} // namespace

TemporalGraph load_edge_list(const std::string& path, bool directed, std::int64_t unit_scale) {
    if (unit_scale <= 0) throw UsageError("unit_scale must be positive");
    LineReader reader(path);
    std::vector<ParsedEdge> records;
    std::string line;
    std::size_t line_no = 0;
    while (reader.next(line)) {
        ++line_no;
        if (line.empty() || line[0] == '%' || line[0] == '#') continue;
        auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (fields.size() < 3 || fields.size() > 4)
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": expected 3 or 4 fields, got " + std::to_string(fields.size()));
        Timestamp t;
        if (!parse_timestamp(fields.back(), t))
            throw DataError(path + ":" + std::to_string(line_no) + ": bad timestamp '" +
                            fields.back() + "'");
        if (t < 0)
            throw DataError(path + ":" + std::to_string(line_no) + ": negative timestamp");
        records.push_back({std::move(fields[0]), std::move(fields[1]), t / unit_scale});
    }
    if (records.empty()) throw DataError(path + ": no edges");

    // Canonical order: time, then labels. Makes ingestion insensitive to the
    // ordering of input lines, ties included; dense ids follow this order.
    std::stable_sort(records.begin(), records.end(),
                     [](const ParsedEdge& a, const ParsedEdge& b) {
                         if (a.time != b.time) return a.time < b.time;
                         if (a.src != b.src) return a.src < b.src;
                         return a.dst < b.dst;
                     });

    TemporalGraph g(directed);
    for (const ParsedEdge& r : records) g.add_edge(r.src, r.dst, r.time);
    return g;
}

} // namespace ctdne
