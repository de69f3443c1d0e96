#pragma once

// Shared test helpers: reference statistics, brute-force oracles, graph
// builders. Everything here is independent of the library's sampling and
// walking code paths so it can serve as an oracle for them.

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ctdne/temporal_graph.hpp"
#include "ctdne/types.hpp"
#include "ctdne/walker.hpp"

namespace testsupport {

using ctdne::NodeId;
using ctdne::TemporalEdge;
using ctdne::TemporalGraph;
using ctdne::Timestamp;

// ---------------------------------------------------------------------------
// chi-square survival function via the regularized incomplete gamma function
// (series for x < a+1, continued fraction otherwise).

inline double gamma_series(double a, double x) {
    double sum = 1.0 / a, term = sum;
    for (int n = 1; n < 500; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// P(Chi2_dof >= x)
inline double chi2_sf(double x, double dof) {
    if (x <= 0.0) return 1.0;
    const double a = dof / 2.0, half = x / 2.0;
    if (half < a + 1.0) return 1.0 - gamma_series(a, half);
    return gamma_cf(a, half);
}

// Goodness-of-fit p-value with expected counts under probs * n; cells with
// expected count below min_expected are pooled into one.
inline double chi2_gof_pvalue(const std::vector<double>& observed,
                              const std::vector<double>& probs, double n,
                              double min_expected = 5.0) {
    double stat = 0.0;
    double pooled_obs = 0.0, pooled_exp = 0.0;
    int cells = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double expected = probs[i] * n;
        if (expected < min_expected) {
            pooled_obs += observed[i];
            pooled_exp += expected;
            continue;
        }
        stat += (observed[i] - expected) * (observed[i] - expected) / expected;
        ++cells;
    }
    if (pooled_exp > 0.0) {
        stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
        ++cells;
    }
    if (cells < 2) return 1.0;
    return chi2_sf(stat, static_cast<double>(cells - 1));
}

// ---------------------------------------------------------------------------
// Shared example graphs.

// Eight-edge contact stream over six nodes used across the suites:
// a-b@1, b-c@2, c-d@3, d-a@4, c-d@5, e-c@7, b-e@8, f-c@10.
inline TemporalGraph example_stream_graph(bool directed = false) {
    std::vector<TemporalEdge> edges = {
        {0, 1, 1}, {1, 2, 2}, {2, 3, 3}, {3, 0, 4},
        {2, 3, 5}, {4, 2, 7}, {1, 4, 8}, {5, 2, 10},
    };
    return TemporalGraph::from_edges(6, edges, directed);
}

inline std::string example_stream_file_contents() {
    return "% comment line\n"
           "1 2 1\n2 3 2\n3 4 3\n4 1 4\n3 4 5\n5 3 7\n2 5 8\n6 3 10\n";
}

// ---------------------------------------------------------------------------
// Brute-force oracles.

// All (neighbor, time) pairs of v with time strictly greater than t, by
// scanning the raw edge list.
inline std::vector<ctdne::NeighborEntry> brute_temporal_neighbors(const TemporalGraph& g,
                                                                  NodeId v, Timestamp t) {
    std::vector<ctdne::NeighborEntry> out;
    for (const TemporalEdge& e : g.edges()) {
        if (e.time <= t) continue;
        if (e.src == v) out.push_back({e.dst, e.time});
        if (!g.directed() && e.dst == v && e.src != e.dst) out.push_back({e.src, e.time});
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.time < b.time;
    });
    return out;
}

// A complete walk: extended until no strictly-later incident edge exists or
// max_len nodes are reached. Enumerates every complete walk from every start
// edge together with its probability under uniform start / uniform neighbor
// selection.
struct EnumeratedWalk {
    std::vector<NodeId> nodes;
    std::vector<Timestamp> times;
    double probability = 0.0;

    bool operator<(const EnumeratedWalk& other) const {
        if (nodes != other.nodes) return nodes < other.nodes;
        return times < other.times;
    }
};

inline void enumerate_extensions(const TemporalGraph& g, std::vector<NodeId>& nodes,
                                 std::vector<Timestamp>& times, double prob,
                                 std::size_t max_len, std::vector<EnumeratedWalk>& out) {
    const NodeId cur = nodes.back();
    const Timestamp now = times.back();
    auto nb = g.temporal_neighbors(cur, now);
    if (nb.empty() || nodes.size() >= max_len) {
        out.push_back({nodes, times, prob});
        return;
    }
    const double step = prob / static_cast<double>(nb.size());
    for (const auto& entry : nb) {
        nodes.push_back(entry.node);
        times.push_back(entry.time);
        enumerate_extensions(g, nodes, times, step, max_len, out);
        nodes.pop_back();
        times.pop_back();
    }
}

inline std::vector<EnumeratedWalk> enumerate_complete_walks(const TemporalGraph& g,
                                                            std::size_t max_len) {
    std::vector<EnumeratedWalk> out;
    const double edge_prob = 1.0 / static_cast<double>(g.edge_count());
    for (const TemporalEdge& e : g.edges()) {
        std::vector<NodeId> nodes = {e.src, e.dst};
        std::vector<Timestamp> times = {e.time};
        enumerate_extensions(g, nodes, times, edge_prob, max_len, out);
    }
    std::sort(out.begin(), out.end());
    // Parallel equal-time edges make identical walks reachable through
    // distinct draws; merge them.
    std::vector<EnumeratedWalk> merged;
    for (const EnumeratedWalk& w : out) {
        if (!merged.empty() && merged.back().nodes == w.nodes && merged.back().times == w.times)
            merged.back().probability += w.probability;
        else
            merged.push_back(w);
    }
    return merged;
}

inline std::string walk_key(const std::vector<NodeId>& nodes,
                            const std::vector<Timestamp>& times) {
    std::string key;
    for (NodeId v : nodes) key += std::to_string(v) + ",";
    key += "|";
    for (Timestamp t : times) key += std::to_string(t) + ",";
    return key;
}

// Random small temporal multigraph (std::mt19937 so the generator is
// independent of the library's rng).
inline TemporalGraph random_temporal_graph(std::mt19937& gen, std::size_t max_nodes = 6,
                                           std::size_t max_edges = 10,
                                           Timestamp max_time = 10, bool allow_directed = true) {
    std::uniform_int_distribution<std::size_t> node_count(2, max_nodes);
    std::uniform_int_distribution<std::size_t> edge_count(2, max_edges);
    const std::size_t n = node_count(gen);
    const std::size_t m = edge_count(gen);
    std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(n - 1));
    std::uniform_int_distribution<Timestamp> time(0, max_time);
    std::vector<TemporalEdge> edges;
    for (std::size_t i = 0; i < m; ++i) {
        NodeId u = node(gen), v = node(gen);
        while (v == u) v = node(gen);
        edges.push_back({u, v, time(gen)});
    }
    std::sort(edges.begin(), edges.end(),
              [](const TemporalEdge& a, const TemporalEdge& b) { return a.time < b.time; });
    const bool directed = allow_directed && (gen() & 1);
    return TemporalGraph::from_edges(n, edges, directed);
}

// ---------------------------------------------------------------------------
// Scratch directories for file-based tests.

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("ctdne_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }

    std::filesystem::path file(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

    std::string write(const std::string& name, const std::string& contents) const {
        const auto p = file(name);
        std::ofstream out(p);
        out << contents;
        return p.string();
    }

private:
    std::filesystem::path path_;
};

} // namespace testsupport
