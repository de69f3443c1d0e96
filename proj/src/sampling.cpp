#include "ctdne/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ctdne {

const char* to_string(BiasKind kind) {
    switch (kind) {
        case BiasKind::Uniform: return "unif";
        case BiasKind::Linear: return "lin";
        case BiasKind::Exponential: return "exp";
    }
    throw InternalError("unknown BiasKind");
}

BiasKind bias_kind_from_string(const std::string& name) {
    if (name == "unif" || name == "uniform") return BiasKind::Uniform;
    if (name == "lin" || name == "linear") return BiasKind::Linear;
    if (name == "exp" || name == "exponential") return BiasKind::Exponential;
    throw UsageError("unknown bias kind '" + name + "' (expected unif|lin|exp)");
}

EdgeCdf build_initial_edge_cdf(const TemporalGraph& g, BiasKind kind, const BiasOptions& opts) {
    const std::size_t m = g.edge_count();
    if (m == 0) throw DataError("cannot build edge distribution for empty graph");

    EdgeCdf cdf;
    cdf.kind = kind;
    cdf.cumulative.resize(m);

    const auto& edges = g.edges();
    double running = 0.0;
    switch (kind) {
        case BiasKind::Uniform:
            for (std::size_t i = 0; i < m; ++i) running += 1.0, cdf.cumulative[i] = running;
            break;
        case BiasKind::Linear:
            // Ascending time rank 1..M; equal times keep their array position.
            for (std::size_t i = 0; i < m; ++i)
                running += static_cast<double>(i + 1), cdf.cumulative[i] = running;
            break;
        case BiasKind::Exponential: {
            const double s = opts.resolve_exp_scale(g.t_min(), g.t_max());
            // Shifted so the largest exponent is 0: exp(x - x_max) never
            // overflows and the most recent edge always has weight 1.
            const double x_max = static_cast<double>(g.t_max() - g.t_min()) * s;
            for (std::size_t i = 0; i < m; ++i) {
                double x = static_cast<double>(edges[i].time - g.t_min()) * s;
                running += std::exp(x - x_max);
                cdf.cumulative[i] = running;
            }
            break;
        }
    }
    const double total = cdf.cumulative.back();
    for (double& c : cdf.cumulative) c /= total;
    return cdf;
}

const TemporalEdge& sample_initial_edge(const EdgeCdf& cdf, const TemporalGraph& g, Rng& rng) {
    if (cdf.cumulative.size() != g.edge_count())
        throw UsageError("edge distribution does not match graph");
    const double u = rng.uniform01();
    auto it = std::upper_bound(cdf.cumulative.begin(), cdf.cumulative.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cdf.cumulative.begin());
    if (idx >= cdf.cumulative.size()) idx = cdf.cumulative.size() - 1;
    return g.edges()[idx];
}

std::vector<double> neighbor_weights(std::span<const NeighborEntry> neighbors, BiasKind kind,
                                     const BiasOptions& opts, bool mirrored) {
    const std::size_t k = neighbors.size();
    if (k == 0) throw DataError("neighbor weights over an empty set");

    std::vector<double> w(k);
    switch (kind) {
        case BiasKind::Uniform: {
            std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(k));
            return w;
        }
        case BiasKind::Linear: {
            // gap rank 0 = closest in time to the current node. Forward views
            // start at the nearest future time; mirrored (backward) views end
            // at the nearest past time.
            double total = static_cast<double>(k) * static_cast<double>(k + 1) / 2.0;
            for (std::size_t p = 0; p < k; ++p) {
                std::size_t gap_rank = mirrored ? (k - 1 - p) : p;
                double rank = opts.linear_favor_early ? static_cast<double>(k - gap_rank)
                                                      : static_cast<double>(gap_rank + 1);
                w[p] = rank / total;
            }
            return w;
        }
        case BiasKind::Exponential: {
            const Timestamp lo = neighbors.front().time;
            const Timestamp hi = neighbors.back().time;
            // Callers that hold the graph resolve the rescale against the full
            // timespan; bare views fall back to their own span.
            const double s = opts.resolve_exp_scale(lo, hi);
            double sign = opts.exp_favor_late ? 1.0 : -1.0;
            if (mirrored) sign = -sign;   // time axis mirrored about the current node
            double x_max = -std::numeric_limits<double>::infinity();
            for (std::size_t p = 0; p < k; ++p) {
                double x = sign * static_cast<double>(neighbors[p].time - lo) * s;
                w[p] = x;
                x_max = std::max(x_max, x);
            }
            double total = 0.0;
            for (double& x : w) {
                x = std::exp(x - x_max);
                total += x;
            }
            for (double& x : w) x /= total;
            return w;
        }
    }
    throw InternalError("unknown BiasKind");
}

std::size_t sample_index(std::span<const double> weights, Rng& rng) {
    if (weights.empty()) throw DataError("sample over empty weight sequence");
    double total = 0.0;
    for (double w : weights) total += w;
    const double u = rng.uniform01() * total;
    double running = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        running += weights[i];
        if (u < running) return i;
    }
    return weights.size() - 1;
}

const NeighborEntry& sample_neighbor(std::span<const double> weights,
                                     std::span<const NeighborEntry> neighbors, Rng& rng) {
    if (weights.size() != neighbors.size())
        throw UsageError("weight/neighbor length mismatch");
    return neighbors[sample_index(weights, rng)];
}

} // namespace ctdne
