#include "kbarrier/maxflow.hpp"

#include <algorithm>
#include <limits>

namespace kbarrier {

MaxFlow::MaxFlow(int nodes) : head_(static_cast<std::size_t>(nodes), -1) {}

int MaxFlow::add_arc(int from, int to, std::int64_t capacity) {
    const int id = static_cast<int>(arcs_.size());
    arcs_.push_back({to, head_[static_cast<std::size_t>(from)], capacity});
    head_[static_cast<std::size_t>(from)] = id;
    arcs_.push_back({from, head_[static_cast<std::size_t>(to)], 0});
    head_[static_cast<std::size_t>(to)] = id + 1;
    return id;
}

bool MaxFlow::build_levels(int source, int sink) {
    level_.assign(head_.size(), -1);
    std::vector<int> queue;
    queue.reserve(head_.size());
    queue.push_back(source);
    level_[static_cast<std::size_t>(source)] = 0;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const int v = queue[qi];
        for (int a = head_[static_cast<std::size_t>(v)]; a != -1; a = arcs_[static_cast<std::size_t>(a)].next) {
            const Arc& arc = arcs_[static_cast<std::size_t>(a)];
            if (arc.cap > 0 && level_[static_cast<std::size_t>(arc.to)] < 0) {
                level_[static_cast<std::size_t>(arc.to)] = level_[static_cast<std::size_t>(v)] + 1;
                queue.push_back(arc.to);
            }
        }
    }
    return level_[static_cast<std::size_t>(sink)] >= 0;
}

std::int64_t MaxFlow::push(int node, int sink, std::int64_t limit) {
    if (node == sink) return limit;
    for (int& a = cursor_[static_cast<std::size_t>(node)]; a != -1; a = arcs_[static_cast<std::size_t>(a)].next) {
        Arc& arc = arcs_[static_cast<std::size_t>(a)];
        if (arc.cap <= 0 || level_[static_cast<std::size_t>(arc.to)] != level_[static_cast<std::size_t>(node)] + 1)
            continue;
        const std::int64_t pushed = push(arc.to, sink, std::min(limit, arc.cap));
        if (pushed > 0) {
            arc.cap -= pushed;
            arcs_[static_cast<std::size_t>(a) ^ 1U].cap += pushed;
            return pushed;
        }
    }
    return 0;
}

std::int64_t MaxFlow::solve(int source, int sink) {
    std::int64_t total = 0;
    while (build_levels(source, sink)) {
        cursor_ = head_;
        while (const std::int64_t f = push(source, sink, std::numeric_limits<std::int64_t>::max()))
            total += f;
    }
    return total;
}

}  // namespace kbarrier
