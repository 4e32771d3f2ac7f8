#include "kbarrier/coverage.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>

#include "kbarrier/error.hpp"

namespace kbarrier::coverage {

namespace {

constexpr double kCenterClearance = 1e-9;
constexpr double kRayAngleClearance = 1e-12;

double angle_of(Point p) { return std::atan2(p.y, p.x); }

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a;
}

bool on_ray(Point p, double angle) {
    double d = std::fabs(wrap_angle(angle_of(p)) - wrap_angle(angle));
    d = std::min(d, 2.0 * kPi - d);
    return d < kRayAngleClearance;
}

// Middle of the widest angular gap between sensors.
double widest_gap_angle(std::span<const Point> pts) {
    std::vector<double> angles;
    angles.reserve(pts.size());
    for (Point p : pts) angles.push_back(wrap_angle(angle_of(p)));
    std::sort(angles.begin(), angles.end());
    double best_gap = -1.0;
    double best_mid = 0.0;
    for (std::size_t i = 0; i < angles.size(); ++i) {
        const double a = angles[i];
        const double b = i + 1 < angles.size() ? angles[i + 1] : angles[0] + 2.0 * kPi;
        if (b - a > best_gap) {
            best_gap = b - a;
            best_mid = wrap_angle(0.5 * (a + b));
        }
    }
    return best_mid;
}

struct Candidate {
    int u;
    int v;
};

std::vector<Candidate> pairs_within_serial(std::span<const Point> pts, double threshold) {
    std::vector<Candidate> out;
    const int n = static_cast<int>(pts.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (distance(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]) <= threshold)
                out.push_back({i, j});
    return out;
}

std::vector<Candidate> pairs_within_parallel(std::span<const Point> pts, double threshold) {
    const int n = static_cast<int>(pts.size());
    std::vector<std::vector<Candidate>> rows(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 0; i < n; ++i) {
        auto& row = rows[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j)
            if (distance(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]) <= threshold)
                row.push_back({i, j});
    }
    std::vector<Candidate> out;
    for (auto& row : rows) out.insert(out.end(), row.begin(), row.end());
    return out;
}

void rebuild_adjacency(CoverageGraph& g) {
    g.adjacency.assign(static_cast<std::size_t>(g.vertex_count), {});
    for (const Edge& e : g.edges) {
        g.adjacency[static_cast<std::size_t>(e.u)].push_back({e.v, e.crossing_sign});
        g.adjacency[static_cast<std::size_t>(e.v)].push_back({e.u, -e.crossing_sign});
    }
}

}  // namespace

bool is_covered(Point point, Point sensor, double rs) { return distance(point, sensor) <= rs; }

int ray_crossing(Point a, Point b, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const Point ra{a.x * c + a.y * s, -a.x * s + a.y * c};
    const Point rb{b.x * c + b.y * s, -b.x * s + b.y * c};
    const bool a_below = ra.y < 0.0;
    const bool b_below = rb.y < 0.0;
    if (a_below == b_below) return 0;
    const double t = ra.y / (ra.y - rb.y);
    const double x = ra.x + t * (rb.x - ra.x);
    if (x <= 0.0) return 0;
    return a_below ? +1 : -1;
}

CoverageGraph build_graph(std::span<const Point> pts, double link_threshold, Execution exec) {
    if (!(link_threshold > 0.0)) throw ValidationError("link threshold must be positive");
    CoverageGraph g;
    g.vertex_count = static_cast<int>(pts.size());
    g.positions.assign(pts.begin(), pts.end());
    g.link_threshold = link_threshold;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (norm(pts[i]) == 0.0)
            throw GeometryError("sensor " + std::to_string(i) +
                                " lies exactly at the region center; winding is undefined");

    g.cut_angle = 0.0;
    if (std::any_of(pts.begin(), pts.end(), [](Point p) { return on_ray(p, 0.0); }))
        g.cut_angle = widest_gap_angle(pts);

    const auto candidates = exec == Execution::parallel ? pairs_within_parallel(pts, link_threshold)
                                                        : pairs_within_serial(pts, link_threshold);
    g.edges.reserve(candidates.size());
    for (const Candidate& c : candidates) {
        const Point a = pts[static_cast<std::size_t>(c.u)];
        const Point b = pts[static_cast<std::size_t>(c.v)];
        if (segment_distance(Point{}, a, b) <= kCenterClearance) {
            ++g.dropped_center_edges;
            continue;
        }
        g.edges.push_back({c.u, c.v, ray_crossing(a, b, g.cut_angle)});
    }
    rebuild_adjacency(g);
    return g;
}

CoverageGraph build_coverage_graph(const deployment::SensorField& field, Execution exec) {
    std::vector<Point> rel;
    rel.reserve(field.positions.size());
    for (Point p : field.positions) rel.push_back(p - field.region.center);
    const double threshold = std::min(2.0 * field.sensing_range_m, field.tx_range_m);
    return build_graph(rel, threshold, exec);
}

CoverageGraph without_edge(const CoverageGraph& g, std::size_t edge_index) {
    if (edge_index >= g.edges.size()) throw ValidationError("edge index out of range");
    CoverageGraph out = g;
    out.edges.erase(out.edges.begin() + static_cast<std::ptrdiff_t>(edge_index));
    rebuild_adjacency(out);
    return out;
}

int winding_number(const CoverageGraph& g, std::span<const int> cycle, double* residual) {
    double total = 0.0;
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        const Point a = g.positions[static_cast<std::size_t>(cycle[i])];
        const Point b = g.positions[static_cast<std::size_t>(cycle[(i + 1) % cycle.size()])];
        total += std::atan2(cross(a, b), dot(a, b));
    }
    const double turns = std::round(total / (2.0 * kPi));
    if (residual) *residual = std::fabs(total - turns * 2.0 * kPi);
    return static_cast<int>(turns);
}

std::int64_t max_barrier_paths(std::int64_t n, std::int64_t k) {
    if (k <= 0) throw ValidationError("k must be >= 1 for BP_max, got " + std::to_string(k));
    if (n < 0) throw ValidationError("sensor count must be non-negative");
    return n / k;
}

BarrierCount brute_force_barriers(const CoverageGraph& g) {
    const int n = g.vertex_count;
    if (n > kBruteForceMaxVertices)
        throw BudgetError("brute-force oracle refuses " + std::to_string(n) +
                          " vertices (budget " + std::to_string(kBruteForceMaxVertices) + ")");
    BarrierCount result;
    if (n < 3) return result;

    // reach[mask * n + v]: bit (level + n) set when a simple path from the lowest
    // vertex of `mask` through exactly `mask` ends at v with net crossing `level`.
    const std::uint32_t full = 1U << n;
    std::vector<std::uint32_t> reach(static_cast<std::size_t>(full) * static_cast<std::size_t>(n), 0U);
    auto at = [&](std::uint32_t mask, int v) -> std::uint32_t& {
        return reach[static_cast<std::size_t>(mask) * static_cast<std::size_t>(n) + static_cast<std::size_t>(v)];
    };
    for (int s = 0; s < n; ++s) at(1U << s, s) = 1U << n;

    std::vector<char> winding_set(full, 0);
    for (std::uint32_t mask = 1; mask < full; ++mask) {
        const int s = std::countr_zero(mask);
        for (int v = 0; v < n; ++v) {
            const std::uint32_t levels = at(mask, v);
            if (!levels) continue;
            for (const Arc& arc : g.adjacency[static_cast<std::size_t>(v)]) {
                if (arc.to == s) {
                    if (std::popcount(mask) < 3) continue;
                    const std::uint32_t closed =
                        arc.sign > 0 ? levels << 1 : (arc.sign < 0 ? levels >> 1 : levels);
                    if (closed & ((1U << (n + 1)) | (1U << (n - 1)))) winding_set[mask] = 1;
                    continue;
                }
                if (arc.to < s || (mask >> arc.to) & 1U) continue;
                const std::uint32_t moved =
                    arc.sign > 0 ? levels << 1 : (arc.sign < 0 ? levels >> 1 : levels);
                at(mask | (1U << arc.to), arc.to) |= moved;
            }
        }
    }

    // best[mask]: maximum number of disjoint winding sets inside mask.
    std::vector<std::uint8_t> best(full, 0);
    std::vector<std::uint32_t> choice(full, 0);
    for (std::uint32_t mask = 1; mask < full; ++mask) {
        const std::uint32_t low = mask & (~mask + 1U);
        best[mask] = best[mask ^ low];
        choice[mask] = 0;
        const std::uint32_t rest = mask ^ low;
        for (std::uint32_t sub = rest;; sub = (sub - 1U) & rest) {
            const std::uint32_t set = sub | low;
            if (winding_set[set] && best[mask ^ set] + 1 > best[mask]) {
                best[mask] = static_cast<std::uint8_t>(best[mask ^ set] + 1);
                choice[mask] = set;
            }
            if (sub == 0) break;
        }
    }

    result.k = best[full - 1];
    result.upper_bound = result.k;
    result.exact = true;

    // Recover an explicit cycle for each chosen vertex set.
    auto hamiltonian_winding = [&](std::uint32_t set) {
        const int s = std::countr_zero(set);
        const int size = std::popcount(set);
        std::vector<int> path{s};
        std::vector<int> found;
        auto dfs = [&](auto&& self, int v, std::uint32_t used, int level) -> bool {
            if (static_cast<int>(path.size()) == size) {
                for (const Arc& arc : g.adjacency[static_cast<std::size_t>(v)])
                    if (arc.to == s && std::abs(level + arc.sign) == 1) {
                        found = path;
                        return true;
                    }
                return false;
            }
            for (const Arc& arc : g.adjacency[static_cast<std::size_t>(v)]) {
                if (!((set >> arc.to) & 1U) || ((used >> arc.to) & 1U)) continue;
                path.push_back(arc.to);
                if (self(self, arc.to, used | (1U << arc.to), level + arc.sign)) return true;
                path.pop_back();
            }
            return false;
        };
        dfs(dfs, s, 1U << s, 0);
        return found;
    };
    for (std::uint32_t mask = full - 1; mask && best[mask] > 0;) {
        const std::uint32_t set = choice[mask];
        if (set == 0) {
            mask ^= mask & (~mask + 1U);
            continue;
        }
        result.witness.push_back(hamiltonian_winding(set));
        mask ^= set;
    }
    return result;
}

void write_edges_csv(std::ostream& out, const CoverageGraph& g) {
    out << "i,j,crossing_sign\n";
    for (const Edge& e : g.edges) out << e.u << ',' << e.v << ',' << e.crossing_sign << '\n';
}

void write_witness_json(std::ostream& out, const BarrierCount& count) {
    out << '[';
    for (std::size_t c = 0; c < count.witness.size(); ++c) {
        if (c) out << ',';
        out << '[';
        for (std::size_t i = 0; i < count.witness[c].size(); ++i) {
            if (i) out << ',';
            out << count.witness[c][i];
        }
        out << ']';
    }
    out << "]\n";
}

}  // namespace kbarrier::coverage
