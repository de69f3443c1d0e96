#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ctdne {

// Dense node index, contiguous 0..N-1 after ingestion.
using NodeId = std::uint32_t;

// Edge timestamp in source units (seconds or milliseconds, as given).
using Timestamp = std::int64_t;

struct TemporalEdge {
    NodeId src;
    NodeId dst;
    Timestamp time;

    friend bool operator==(const TemporalEdge&, const TemporalEdge&) = default;
};

// One (neighbor, edge time) entry of a time-sorted adjacency list.
struct NeighborEntry {
    NodeId node;
    Timestamp time;

    friend bool operator==(const NeighborEntry&, const NeighborEntry&) = default;
};

// Bad input data (files, graphs, label sets). CLI exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller violated an interface contract. CLI exit code 1.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Broken internal invariant. CLI exit code 3.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace ctdne
