// Exact packing of vertex-disjoint winding cycles.
//
// Upper bounds: for each of a few cut rays, the max-flow from post-cut to
// pre-cut endpoints of +1 crossing edges (vertex capacities 1, crossing edges
// removed); floor(n / 3); and sum over vertices of 1 / (shortest winding walk
// through the vertex). Lower bounds come from greedy constructions with a
// one-for-two exchange pass. When the bounds disagree the search branches on a
// short winding cycle C: every maximum packing meets V(C), so with u_1..u_L
// the vertices of C, branch i deletes u_1..u_{i-1} and fixes a cycle through
// u_i whose vertex set is minimal.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kbarrier/coverage.hpp"
#include "kbarrier/maxflow.hpp"

namespace kbarrier::coverage {

namespace {

using Mask = std::vector<char>;
using Cycle = std::vector<int>;
using Packing = std::vector<Cycle>;

constexpr int kBoundRays = 4;
constexpr std::size_t kGreedySources = 4;

struct Neighbor {
    int to;
    int sign;  // main cut ray, oriented from this vertex
};

struct OutOfBudget {};

class Search {
public:
    Search(const CoverageGraph& g, SearchLimits limits)
        : g_(g), n_(g.vertex_count), span_(2 * g.vertex_count + 1), limits_(limits),
          work_budget_(limits.work_budget(g.edges.size())) {
        adj_.resize(static_cast<std::size_t>(n_));
        sign_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0);
        for (const Edge& e : g.edges) {
            adj_[idx(e.u)].push_back({e.v, e.crossing_sign});
            adj_[idx(e.v)].push_back({e.u, -e.crossing_sign});
            sign_[pair(e.u, e.v)] = static_cast<signed char>(e.crossing_sign + 2);
            sign_[pair(e.v, e.u)] = static_cast<signed char>(-e.crossing_sign + 2);
        }
        choose_rays();

        std::vector<double> ang(static_cast<std::size_t>(n_));
        radius_order_.resize(static_cast<std::size_t>(n_));
        std::iota(radius_order_.begin(), radius_order_.end(), 0);
        angle_order_ = radius_order_;
        for (int v = 0; v < n_; ++v) {
            const Point p = g.positions[idx(v)];
            ang[idx(v)] = std::atan2(p.y, p.x);
        }
        std::stable_sort(angle_order_.begin(), angle_order_.end(),
                         [&](int a, int b) { return ang[idx(a)] < ang[idx(b)]; });
        std::stable_sort(radius_order_.begin(), radius_order_.end(), [&](int a, int b) {
            return norm(g.positions[idx(a)]) < norm(g.positions[idx(b)]);
        });

        const std::size_t states = static_cast<std::size_t>(n_) * static_cast<std::size_t>(span_);
        stamp_.assign(states, 0);
        parent_.assign(states, -1);
        dist_.assign(states, 0);
    }

    BarrierCount run() {
        Mask alive(static_cast<std::size_t>(n_), 1);
        reduce(alive);
        const std::vector<Mask> roots = components(alive);

        // Per root component: the packing to report and its upper bound. The
        // greedy packings are built outside the budget so an aborted search
        // still reports a valid lower bound.
        std::vector<Packing> parts;
        root_bounds_.clear();
        metered_ = false;
        for (const Mask& comp : roots) {
            parts.push_back(greedy_triangles(comp));
            root_bounds_.push_back(static_cast<int>(std::count(comp.begin(), comp.end(), 1)) / 3);
        }
        metered_ = true;
        try {
            for (std::size_t r = 0; r < roots.size(); ++r) {
                root_ = static_cast<int>(r);
                root_incumbent_.clear();
                Packing part = solve_component(roots[r]);
                if (part.size() >= parts[r].size()) parts[r] = std::move(part);
                root_bounds_[r] = static_cast<int>(parts[r].size());
            }
        } catch (const OutOfBudget&) {
            aborted_ = true;
            const auto r = static_cast<std::size_t>(root_);
            if (root_incumbent_.size() > parts[r].size()) parts[r] = std::move(root_incumbent_);
        }

        BarrierCount out;
        for (std::size_t r = 0; r < roots.size(); ++r) {
            out.upper_bound += std::max(root_bounds_[r], static_cast<int>(parts[r].size()));
            for (Cycle& c : parts[r]) out.witness.push_back(std::move(c));
        }
        out.k = static_cast<int>(out.witness.size());
        out.exact = !aborted_;
        out.search_nodes = nodes_;
        return out;
    }

    int flow_bound_for_ray(const Mask& alive, std::size_t ray) const {
        const auto& signs = ray_signs_[ray];
        MaxFlow flow(2 * n_ + 2);
        const int source = 2 * n_;
        const int sink = 2 * n_ + 1;
        Mask is_source(static_cast<std::size_t>(n_), 0);
        Mask is_sink(static_cast<std::size_t>(n_), 0);
        for (int v = 0; v < n_; ++v)
            if (alive[idx(v)]) flow.add_arc(2 * v, 2 * v + 1, 1);
        for (std::size_t e = 0; e < g_.edges.size(); ++e) {
            const Edge& ed = g_.edges[e];
            if (!alive[idx(ed.u)] || !alive[idx(ed.v)]) continue;
            const int s = signs[e];
            if (s == 0) {
                flow.add_arc(2 * ed.u + 1, 2 * ed.v, 1);
                flow.add_arc(2 * ed.v + 1, 2 * ed.u, 1);
                continue;
            }
            // pre -> post crosses counter-clockwise
            const int pre = s > 0 ? ed.u : ed.v;
            const int post = s > 0 ? ed.v : ed.u;
            is_source[idx(post)] = 1;
            is_sink[idx(pre)] = 1;
        }
        for (int v = 0; v < n_; ++v) {
            if (is_source[idx(v)]) flow.add_arc(source, 2 * v, 1);
            if (is_sink[idx(v)]) flow.add_arc(2 * v + 1, sink, 1);
        }
        return static_cast<int>(flow.solve(source, sink));
    }

private:
    static std::size_t idx(int v) { return static_cast<std::size_t>(v); }
    std::size_t pair(int a, int b) const {
        return static_cast<std::size_t>(a) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(b);
    }
    int state(int v, int level) const { return v * span_ + level + n_; }

    void spend(std::uint64_t units = 1) {
        if (!metered_) return;
        work_ += units;
        if (work_ > work_budget_) throw OutOfBudget{};
    }

    // ---- bounds ---------------------------------------------------------------

    void choose_rays() {
        std::vector<double> angles;
        for (Point p : g_.positions) {
            double a = std::atan2(p.y, p.x);
            if (a < 0) a += 2 * kPi;
            angles.push_back(a);
        }
        std::sort(angles.begin(), angles.end());
        auto clear_of_vertices = [&](double a) {
            for (double b : angles) {
                double d = std::fabs(a - b);
                d = std::min(d, 2 * kPi - d);
                if (d < 1e-9) return false;
            }
            return true;
        };
        for (int r = 0; r < kBoundRays; ++r) {
            double angle = std::fmod(g_.cut_angle + r * (2 * kPi / kBoundRays), 2 * kPi);
            if (r > 0 && !clear_of_vertices(angle)) {
                auto it = std::upper_bound(angles.begin(), angles.end(), angle);
                const double hi = it == angles.end() ? angles.front() + 2 * kPi : *it;
                const double lo = it == angles.begin() ? angles.back() - 2 * kPi : *std::prev(it);
                angle = std::fmod(0.5 * (lo + hi) + 2 * kPi, 2 * kPi);
                if (!clear_of_vertices(angle)) continue;
            }
            std::vector<int> signs(g_.edges.size());
            for (std::size_t e = 0; e < g_.edges.size(); ++e) {
                const Edge& ed = g_.edges[e];
                signs[e] = r == 0 ? ed.crossing_sign
                                  : ray_crossing(g_.positions[idx(ed.u)], g_.positions[idx(ed.v)], angle);
            }
            ray_signs_.push_back(std::move(signs));
        }
    }

    // Sum of 1/len over vertices, where len is the shortest winding walk
    // through the vertex: a cycle C has |C| >= len(v) for each v in C, so it
    // contributes at least 1 to the sum.
    double length_bound(const Mask& comp) {
        double total = 0.0;
        for (int v = 0; v < n_; ++v) {
            if (!comp[idx(v)]) continue;
            const int len = shortest_walk_length(comp, v);
            if (len > 0) total += 1.0 / len;
        }
        return total;
    }

    // Stops refining once the bound drops to `known` (a packing size already
    // achieved), since nothing tighter is needed then.
    int component_bound(const Mask& comp, bool with_length, int known = 0) {
        const int count = static_cast<int>(std::count(comp.begin(), comp.end(), 1));
        int bound = count / 3;
        for (std::size_t r = 0; r < ray_signs_.size() && bound > known; ++r) {
            spend(static_cast<std::uint64_t>(count) + g_.edges.size() / 8);
            bound = std::min(bound, flow_bound_for_ray(comp, r));
        }
        if (with_length && bound > known)
            bound = std::min(bound, static_cast<int>(std::floor(length_bound(comp) + 1e-9)));
        return bound;
    }

    int total_bound(Mask alive) {
        reduce(alive);
        int total = 0;
        for (const Mask& comp : components(alive)) total += component_bound(comp, false);
        return total;
    }

    // ---- graph helpers --------------------------------------------------------

    int alive_degree(const Mask& alive, int v) const {
        int d = 0;
        for (const Neighbor& nb : adj_[idx(v)]) d += alive[idx(nb.to)];
        return d;
    }

    // Drops vertices that cannot lie on any cycle.
    void reduce(Mask& alive) const {
        std::vector<int> stack;
        for (int v = 0; v < n_; ++v)
            if (alive[idx(v)] && alive_degree(alive, v) < 2) stack.push_back(v);
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            if (!alive[idx(v)]) continue;
            alive[idx(v)] = 0;
            for (const Neighbor& nb : adj_[idx(v)])
                if (alive[idx(nb.to)] && alive_degree(alive, nb.to) < 2) stack.push_back(nb.to);
        }
    }

    std::vector<Mask> components(const Mask& alive) const {
        std::vector<Mask> out;
        Mask seen(static_cast<std::size_t>(n_), 0);
        for (int s = 0; s < n_; ++s) {
            if (!alive[idx(s)] || seen[idx(s)]) continue;
            Mask comp(static_cast<std::size_t>(n_), 0);
            std::vector<int> queue{s};
            seen[idx(s)] = 1;
            for (std::size_t qi = 0; qi < queue.size(); ++qi) {
                const int v = queue[qi];
                comp[idx(v)] = 1;
                for (const Neighbor& nb : adj_[idx(v)]) {
                    if (alive[idx(nb.to)] && !seen[idx(nb.to)]) {
                        seen[idx(nb.to)] = 1;
                        queue.push_back(nb.to);
                    }
                }
            }
            out.push_back(std::move(comp));
        }
        return out;
    }

    bool is_edge(int a, int b) const { return sign_[pair(a, b)] != 0; }
    int sign_between(int a, int b) const { return sign_[pair(a, b)] - 2; }

    int walk_winding(const Cycle& c) const {
        int w = 0;
        for (std::size_t i = 0; i < c.size(); ++i) w += sign_between(c[i], c[(i + 1) % c.size()]);
        return w;
    }

    // Reduces a closed walk with winding +-1 to a simple cycle with winding
    // +-1 on a subset of its vertices, when the split structure allows it.
    Cycle simplify(const Cycle& walk) const {
        for (std::size_t i = 0; i < walk.size(); ++i)
            for (std::size_t j = i + 1; j < walk.size(); ++j) {
                if (walk[i] != walk[j]) continue;
                const auto bi = walk.begin() + static_cast<std::ptrdiff_t>(i);
                const auto bj = walk.begin() + static_cast<std::ptrdiff_t>(j);
                Cycle inner(bi, bj);
                Cycle outer(walk.begin(), bi);
                outer.insert(outer.end(), bj, walk.end());
                for (const Cycle* part : {&inner, &outer}) {
                    if (part->size() >= 3 && std::abs(walk_winding(*part)) == 1) {
                        Cycle s = simplify(*part);
                        if (!s.empty()) return s;
                    }
                }
                return {};
            }
        return walk.size() >= 3 ? walk : Cycle{};
    }

    // BFS over the lifted graph from (s, 0) until (s, 1) is reached. Returns the
    // walk length (0 when unreachable); fills parent_ for reconstruction.
    int lifted_bfs(const Mask& alive, int s, int max_length, int level_cap) {
        ++epoch_;
        const int start = state(s, 0);
        const int target = state(s, 1);
        std::vector<int>& queue = queue_;
        queue.clear();
        queue.push_back(start);
        stamp_[idx(start)] = epoch_;
        parent_[idx(start)] = -1;
        dist_[idx(start)] = 0;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            const int st = queue[qi];
            const int v = st / span_;
            const int level = st % span_ - n_;
            const int d = dist_[idx(st)];
            if (d >= max_length) break;
            spend(adj_[idx(v)].size());
            for (const Neighbor& nb : adj_[idx(v)]) {
                if (!alive[idx(nb.to)]) continue;
                const int nl = level + nb.sign;
                if (nl < -level_cap || nl > level_cap) continue;
                const int next = state(nb.to, nl);
                if (stamp_[idx(next)] == epoch_) continue;
                stamp_[idx(next)] = epoch_;
                parent_[idx(next)] = st;
                dist_[idx(next)] = d + 1;
                if (next == target) return d + 1;
                queue.push_back(next);
            }
        }
        return 0;
    }

    int shortest_walk_length(const Mask& alive, int s) {
        return lifted_bfs(alive, s, n_ + 1, n_);
    }

    Cycle shortest_through(const Mask& alive, int s, int max_length) {
        // Only walks whose running winding stays within +-2; far cheaper on
        // dense graphs, and find_cycle falls back to exhaustive search.
        const int len = lifted_bfs(alive, s, max_length, std::min(2, n_));
        if (len == 0) return {};
        Cycle walk;
        for (int cur = parent_[idx(state(s, 1))]; cur != -1; cur = parent_[idx(cur)]) walk.push_back(cur / span_);
        std::reverse(walk.begin(), walk.end());
        return simplify(walk);
    }

    // Vertices incident to a main-ray crossing edge, nearest to the center first.
    // Every winding cycle uses such an edge.
    std::vector<int> crossing_endpoints(const Mask& alive) const {
        std::vector<int> out;
        for (int v : radius_order_) {
            if (!alive[idx(v)]) continue;
            for (const Neighbor& nb : adj_[idx(v)])
                if (nb.sign != 0 && alive[idx(nb.to)]) {
                    out.push_back(v);
                    break;
                }
        }
        return out;
    }

    // A short winding cycle in `alive`, or empty if there is none.
    Cycle find_cycle(const Mask& alive) {
        Cycle best;
        std::size_t tried = 0;
        for (int s : crossing_endpoints(alive)) {
            const int cap = best.empty() ? n_ + 1 : static_cast<int>(best.size()) - 1;
            Cycle c = shortest_through(alive, s, cap);
            if (c.empty()) continue;
            if (best.empty() || c.size() < best.size()) best = std::move(c);
            if (best.size() == 3 || ++tried >= kGreedySources) break;
        }
        if (best.empty()) {
            // Every BFS walk failed to simplify; fall back to exhaustive search.
            for (int s : crossing_endpoints(alive)) {
                auto found = minimal_cycles_through(alive, s, true);
                if (!found.empty()) return found.front();
            }
        }
        return best;
    }

    static void remove(Mask& alive, const Cycle& c) {
        for (int v : c) alive[idx(v)] = 0;
    }

    Packing greedy_shortest(Mask alive) {
        Packing out;
        while (true) {
            reduce(alive);
            Cycle c = find_cycle(alive);
            if (c.empty()) break;
            remove(alive, c);
            out.push_back(std::move(c));
        }
        return out;
    }

    // Dense fields: split the angular order into thirds and try the triangles
    // (i, i+m, i+2m) before finishing greedily.
    Packing greedy_triangles(Mask alive) {
        std::vector<int> order;
        for (int v : angle_order_)
            if (alive[idx(v)]) order.push_back(v);
        const std::size_t m = order.size() / 3;
        Packing out;
        for (std::size_t i = 0; i < m; ++i) {
            Cycle tri{order[i], order[i + m], order[i + 2 * m]};
            if (!is_edge(tri[0], tri[1]) || !is_edge(tri[1], tri[2]) || !is_edge(tri[2], tri[0])) continue;
            if (std::abs(walk_winding(tri)) != 1) continue;
            remove(alive, tri);
            out.push_back(std::move(tri));
        }
        Packing rest = greedy_shortest(std::move(alive));
        out.insert(out.end(), std::make_move_iterator(rest.begin()), std::make_move_iterator(rest.end()));
        return out;
    }

    // Replace one cycle by two whenever the freed vertices allow it.
    void exchange(const Mask& comp, Packing& packing) {
        bool improved = true;
        while (improved) {
            improved = false;
            Mask free = comp;
            for (const Cycle& c : packing) remove(free, c);
            for (std::size_t i = 0; i < packing.size() && !improved; ++i) {
                Mask trial = free;
                for (int v : packing[i]) trial[idx(v)] = 1;
                Packing two = greedy_shortest(trial);
                if (two.size() >= 2) {
                    packing.erase(packing.begin() + static_cast<std::ptrdiff_t>(i));
                    packing.insert(packing.end(), two.begin(), two.end());
                    improved = true;
                }
            }
        }
    }

    Packing greedy(const Mask& comp, int ub) {
        Packing best = greedy_triangles(comp);
        if (static_cast<int>(best.size()) >= ub) return best;
        Packing other = greedy_shortest(comp);
        if (other.size() > best.size()) best = std::move(other);
        return best;
    }

    // Simple winding cycles through u whose vertex sets are inclusion-minimal
    // among those containing u, shortest first. Iterative deepening on the
    // cycle length. A partial path u..x is abandoned when
    //   - its vertex set already contains a found set, or
    //   - the new vertex x has a chord to an earlier path vertex p that closes
    //     a loop p..x of winding 0: the chord then splits any completion into
    //     that loop and a strictly smaller winding cycle through u, or
    //   - no walk from x back to u closes the winding within the length cap
    //     while avoiding the path and every vertex that would complete a
    //     found set (such a vertex can never appear on a minimal extension).
    std::vector<Cycle> minimal_cycles_through(const Mask& alive, int u, bool first_only) {
        const int alive_count = static_cast<int>(std::count(alive.begin(), alive.end(), 1));
        const int shortest = shortest_walk_length(alive, u);
        if (shortest == 0) return {};

        std::vector<Cycle> found_seq;
        std::vector<std::vector<std::size_t>> sets_with(static_cast<std::size_t>(n_));
        std::vector<int> path{u};
        std::vector<int> levels{0};
        Mask on_path(static_cast<std::size_t>(n_), 0);
        on_path[idx(u)] = 1;
        std::vector<int> blocked(static_cast<std::size_t>(n_), 0);
        int block_epoch = 0;
        std::vector<int> seen(static_cast<std::size_t>(n_) * static_cast<std::size_t>(span_), 0);
        int seen_epoch = 0;
        std::vector<std::pair<int, int>> frontier;
        std::vector<std::pair<int, int>> next_frontier;

        auto covers_found = [&](int x) {
            spend(sets_with[idx(x)].size());
            for (std::size_t id : sets_with[idx(x)]) {
                const Cycle& seq = found_seq[id];
                if (seq.size() > path.size()) continue;
                if (std::all_of(seq.begin(), seq.end(), [&](int v) { return on_path[idx(v)] != 0; }))
                    return true;
            }
            return false;
        };

        // Marks vertices that alone would complete a found set.
        auto mark_blocked = [&] {
            ++block_epoch;
            spend(found_seq.size());
            for (const Cycle& seq : found_seq) {
                int missing = -1;
                int count = 0;
                for (int v : seq) {
                    if (!on_path[idx(v)]) {
                        missing = v;
                        if (++count > 1) break;
                    }
                }
                if (count == 1) blocked[idx(missing)] = block_epoch;
            }
        };
        auto usable = [&](int v) {
            return alive[idx(v)] && !on_path[idx(v)] && blocked[idx(v)] != block_epoch;
        };

        // Layered search from (x, level) to (u, +-1) in at most `steps` edges.
        auto can_close = [&](int x, int level, int steps) {
            ++seen_epoch;
            frontier.assign(1, {x, level});
            seen[idx(state(x, level))] = seen_epoch;
            for (int step = 0; step < steps && !frontier.empty(); ++step) {
                next_frontier.clear();
                for (auto [v, lv] : frontier) {
                    spend(adj_[idx(v)].size());
                    for (const Neighbor& nb : adj_[idx(v)]) {
                        const int nl = lv + nb.sign;
                        if (nb.to == u) {
                            if (std::abs(nl) == 1) return true;
                            continue;
                        }
                        if (!usable(nb.to) || nl < -n_ || nl > n_) continue;
                        int& mark = seen[idx(state(nb.to, nl))];
                        if (mark == seen_epoch) continue;
                        mark = seen_epoch;
                        next_frontier.emplace_back(nb.to, nl);
                    }
                }
                frontier.swap(next_frontier);
            }
            return false;
        };

        // Path vertices other than the last one, checked for a chord to x.
        auto has_flat_chord = [&](int x, int level) {
            spend(path.size());
            for (std::size_t j = 0; j + 1 < path.size(); ++j) {
                const int p = path[j];
                if (!is_edge(x, p)) continue;
                if (level + sign_between(x, p) - levels[j] == 0) return true;
            }
            return false;
        };

        int cap = 3;
        auto dfs = [&](auto&& self, int v, int level) -> bool {
            spend(adj_[idx(v)].size());
            const int used_edges = static_cast<int>(path.size()) - 1;
            for (const Neighbor& nb : adj_[idx(v)]) {
                if (!alive[idx(nb.to)]) continue;
                const int nl = level + nb.sign;
                if (nb.to == u) {
                    if (static_cast<int>(path.size()) == cap && std::abs(nl) == 1) {
                        found_seq.push_back(path);
                        const std::size_t id = found_seq.size() - 1;
                        for (int x : path) sets_with[idx(x)].push_back(id);
                        if (first_only) return true;
                    }
                    continue;
                }
                if (on_path[idx(nb.to)] || nl < -n_ || nl > n_) continue;
                if (static_cast<int>(path.size()) + 1 > cap) continue;
                if (has_flat_chord(nb.to, nl)) continue;
                path.push_back(nb.to);
                levels.push_back(nl);
                on_path[idx(nb.to)] = 1;
                bool stop = false;
                if (!covers_found(nb.to)) {
                    mark_blocked();
                    if (can_close(nb.to, nl, cap - used_edges - 1)) stop = self(self, nb.to, nl);
                }
                on_path[idx(nb.to)] = 0;
                path.pop_back();
                levels.pop_back();
                if (stop) return true;
            }
            return false;
        };
        for (cap = std::max(3, shortest); cap <= alive_count; ++cap) {
            ++block_epoch;
            if (!can_close(u, 0, cap)) break;
            if (dfs(dfs, u, 0)) break;
        }
        return found_seq;
    }

    // ---- search ---------------------------------------------------------------

    Packing solve(Mask alive) {
        reduce(alive);
        Packing total;
        for (const Mask& comp : components(alive)) {
            Packing part = solve_component(comp);
            total.insert(total.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
        }
        return total;
    }

    Packing solve_component(const Mask& comp) {
        if (++nodes_ > limits_.max_nodes) throw OutOfBudget{};
        const int count = static_cast<int>(std::count(comp.begin(), comp.end(), 1));
        Packing best = greedy(comp, count / 3);
        const auto have = [&] { return static_cast<int>(best.size()); };
        const bool at_root = depth_ == 0;
        int ub = component_bound(comp, false, have());
        if (at_root) root_bounds_[static_cast<std::size_t>(root_)] = ub;
        if (have() >= ub) return best;
        exchange(comp, best);
        if (have() >= ub) return best;
        ub = std::min(ub, component_bound(comp, true, have()));
        if (at_root) root_bounds_[static_cast<std::size_t>(root_)] = ub;
        if (have() >= ub) return best;
        if (at_root) root_incumbent_ = best;
        ++depth_;
        struct Leave {
            int& depth;
            ~Leave() { --depth; }
        } leave{depth_};

        const Cycle pivot = best.empty() ? find_cycle(comp) : best.front();
        if (pivot.empty()) return best;

        Mask branch = comp;
        for (std::size_t i = 0; i < pivot.size(); ++i) {
            if (i > 0) branch[idx(pivot[i - 1])] = 0;
            Mask reduced = branch;
            reduce(reduced);
            if (!reduced[idx(pivot[i])]) continue;
            if (total_bound(reduced) <= static_cast<int>(best.size())) break;

            for (const Cycle& d : minimal_cycles_through(reduced, pivot[i], false)) {
                Mask rest = reduced;
                remove(rest, d);
                if (1 + total_bound(rest) <= static_cast<int>(best.size())) continue;
                Packing sub = solve(rest);
                if (1 + sub.size() > best.size()) {
                    sub.insert(sub.begin(), d);
                    best = std::move(sub);
                    if (at_root) root_incumbent_ = best;
                    if (static_cast<int>(best.size()) >= ub) return best;
                }
            }
        }
        return best;
    }

    const CoverageGraph& g_;
    int n_;
    int span_;
    SearchLimits limits_;
    std::uint64_t work_budget_;
    std::vector<std::vector<Neighbor>> adj_;
    std::vector<signed char> sign_;
    std::vector<std::vector<int>> ray_signs_;
    std::vector<int> angle_order_;
    std::vector<int> radius_order_;
    std::vector<int> stamp_;
    std::vector<int> parent_;
    std::vector<int> dist_;
    std::vector<int> queue_;
    int epoch_ = 0;
    std::uint64_t nodes_ = 0;
    std::uint64_t work_ = 0;
    bool aborted_ = false;
    bool metered_ = true;
    int depth_ = 0;
    int root_ = 0;
    std::vector<int> root_bounds_;
    Packing root_incumbent_;
};

}  // namespace

BarrierCount count_barriers(const CoverageGraph& g, SearchLimits limits) {
    if (g.vertex_count == 0 || g.edges.empty()) return {};
    Search search(g, limits);
    BarrierCount out = search.run();
    for (Cycle& c : out.witness)
        if (winding_number(g, c) < 0) std::reverse(c.begin() + 1, c.end());
    return out;
}

int cut_ray_flow(const CoverageGraph& g) {
    if (g.vertex_count == 0) return 0;
    Search search(g, {});
    return search.flow_bound_for_ray(std::vector<char>(static_cast<std::size_t>(g.vertex_count), 1), 0);
}

}  // namespace kbarrier::coverage
