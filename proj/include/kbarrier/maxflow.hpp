#pragma once

#include <cstdint>
#include <vector>

namespace kbarrier {

/// Dinic max-flow on integer capacities. Small and allocation-friendly; the
/// barrier search builds one of these per bound evaluation.
class MaxFlow {
public:
    explicit MaxFlow(int nodes);

    /// Adds a directed arc and returns its index (the reverse arc is index + 1).
    int add_arc(int from, int to, std::int64_t capacity);

    std::int64_t solve(int source, int sink);

    /// Flow on an arc returned by `add_arc`, valid after `solve`.
    std::int64_t flow(int arc) const { return arcs_[static_cast<std::size_t>(arc) ^ 1U].cap; }

    int node_count() const { return static_cast<int>(head_.size()); }

private:
    struct Arc {
        int to;
        int next;
        std::int64_t cap;
    };

    bool build_levels(int source, int sink);
    std::int64_t push(int node, int sink, std::int64_t limit);

    std::vector<Arc> arcs_;
    std::vector<int> head_;
    std::vector<int> level_;
    std::vector<int> cursor_;
};

}  // namespace kbarrier
