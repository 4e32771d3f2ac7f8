#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "kbarrier/deployment.hpp"
#include "kbarrier/execution.hpp"
#include "kbarrier/geometry.hpp"

namespace kbarrier::coverage {

/// Binary sensing model, boundary inclusive.
bool is_covered(Point point, Point sensor, double rs);

/// Undirected link between sensors `u < v`. `crossing_sign` is the signed
/// crossing of the cut ray when the edge is traversed u -> v: +1 when the
/// traversal crosses counter-clockwise, -1 clockwise, 0 when it misses the ray.
struct Edge {
    int u = 0;
    int v = 0;
    int crossing_sign = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Half-edge as seen from one endpoint; `sign` already oriented for this direction.
struct Arc {
    int to = 0;
    int sign = 0;
};

struct CoverageGraph {
    int vertex_count = 0;
    std::vector<Edge> edges;
    std::vector<std::vector<Arc>> adjacency;
    /// Sensor positions relative to the region center.
    std::vector<Point> positions;
    double link_threshold = 0.0;
    /// Direction of the cut ray in radians (0 = +x), rotated away from sensors when needed.
    double cut_angle = 0.0;
    /// Edges discarded because their segment passes within 1e-9 m of the center.
    int dropped_center_edges = 0;
};

/// Graph over arbitrary positions (already relative to the center).
CoverageGraph build_graph(std::span<const Point> relative_positions, double link_threshold,
                          Execution exec = Execution::parallel);

/// Edges where pairwise distance <= min(2 Rs, Rtx). Throws GeometryError for a
/// sensor exactly at the center.
CoverageGraph build_coverage_graph(const deployment::SensorField& field,
                                   Execution exec = Execution::parallel);

/// Copy of `g` without edge `edge_index`.
CoverageGraph without_edge(const CoverageGraph& g, std::size_t edge_index);

/// Signed crossing of the ray at `angle` by the segment a -> b (points relative
/// to the center); 0 if the segment misses the ray.
int ray_crossing(Point a, Point b, double angle);

/// Winding number of a closed vertex sequence about the center, from summed
/// subtended angles. Returns the nearest integer; `residual` receives the
/// distance of the angle sum from that multiple of 2*pi.
int winding_number(const CoverageGraph& g, std::span<const int> cycle, double* residual = nullptr);

struct BarrierCount {
    int k = 0;
    std::vector<std::vector<int>> witness;
    /// Proven upper bound; equals k when `exact`.
    int upper_bound = 0;
    bool exact = true;
    std::uint64_t search_nodes = 0;
};

struct SearchLimits {
    /// Branch-and-bound nodes.
    std::uint64_t max_nodes = 100'000;
    /// Adjacency scans across the whole search (BFS expansions, DFS
    /// extensions, flow-network arcs). Roughly a few nanoseconds each.
    std::uint64_t max_work = 50'000'000;
    /// Extra adjacency scans granted per graph edge, so that the effort
    /// spent on a count grows with the size of the instance.
    std::uint64_t work_per_edge = 0;

    std::uint64_t work_budget(std::size_t edges) const { return max_work + work_per_edge * edges; }
};

/// Maximum number of vertex-disjoint cycles with winding number +-1.
///
/// Exact branch-and-bound. When a limit is hit the search stops with
/// `exact == false`; `k` is then the best packing found (a valid lower bound,
/// with witnesses) and `upper_bound` a proven upper bound.
BarrierCount count_barriers(const CoverageGraph& g, SearchLimits limits = {});

/// Max-flow over the cut-ray network: vertices split for unit capacity,
/// non-crossing edges kept, sources on post-cut endpoints of +1 crossings and
/// sinks on their pre-cut endpoints. Every disjoint winding packing routes one
/// unit per cycle, so this bounds count_barriers from above.
int cut_ray_flow(const CoverageGraph& g);

/// Exhaustive oracle for tests. Throws BudgetError above 14 vertices.
BarrierCount brute_force_barriers(const CoverageGraph& g);

inline constexpr int kBruteForceMaxVertices = 14;

/// floor(n / k). Throws ValidationError for k == 0.
std::int64_t max_barrier_paths(std::int64_t n, std::int64_t k);

/// `i,j,crossing_sign` edge list.
void write_edges_csv(std::ostream& out, const CoverageGraph& g);

/// Witness cycles as a JSON array of index arrays.
void write_witness_json(std::ostream& out, const BarrierCount& count);

}  // namespace kbarrier::coverage
