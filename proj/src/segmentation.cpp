#include "cartonsynth/segmentation.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>

#include "cartonsynth/errors.hpp"

namespace cartonsynth {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void merge(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

int CostMatrix::finite_count() const {
    int n = 0;
    for (auto v : finite) n += v;
    return n;
}

int CostMatrix::row_count(int i) const {
    int n = 0;
    for (int j = 0; j < size; ++j) n += connected(i, j) ? 1 : 0;
    return n;
}

int CostMatrix::col_count(int j) const {
    int n = 0;
    for (int i = 0; i < size; ++i) n += connected(i, j) ? 1 : 0;
    return n;
}

PointClusters cluster_faceted_points(const std::vector<Point2D>& points, double psi) {
    if (points.size() < 3) throw DataError("cluster_faceted_points: need at least 3 points");
    if (psi <= 0.0) throw DataError("cluster_faceted_points: psi must be positive");

    const int n = static_cast<int>(points.size());
    UnionFind uf(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (distance(points[i], points[j]) <= psi) uf.merge(i, j);

    PointClusters out;
    out.cluster_of.assign(n, -1);
    std::vector<int> root_to_cluster(n, -1);
    for (int i = 0; i < n; ++i) {
        const int root = uf.find(i);
        if (root_to_cluster[root] < 0) {
            root_to_cluster[root] = static_cast<int>(out.groups.size());
            out.groups.emplace_back();
        }
        const int c = root_to_cluster[root];
        out.cluster_of[i] = c;
        out.groups[c].push_back(i);
    }

    out.unique_points.reserve(out.groups.size());
    for (const auto& group : out.groups) {
        Point2D mean{0, 0};
        for (int idx : group) mean = mean + points[idx];
        out.unique_points.push_back(mean * (1.0 / static_cast<double>(group.size())));
    }

    out.merged_sequence.reserve(n);
    for (int i = 0; i < n; ++i) out.merged_sequence.push_back(out.unique_points[out.cluster_of[i]]);
    return out;
}

CostMatrix build_cost_matrix(const PointClusters& clusters) {
    const int k = clusters.cluster_count();
    CostMatrix v;
    v.size = k;
    v.finite.assign(static_cast<std::size_t>(k) * k, 0);

    const int n = static_cast<int>(clusters.cluster_of.size());
    for (int t = 0; t < n; ++t) {
        const int i = clusters.cluster_of[t];
        const int j = clusters.cluster_of[(t + 1) % n];
        if (i == j) continue;  // diagonal stays infinite
        v.finite[static_cast<std::size_t>(i) * k + j] = 1;
    }
    return v;
}

std::optional<std::vector<int>> find_min_cycle(const CostMatrix& v, int start) {
    // Breadth-first over simple paths; all finite edges cost 1 so the first
    // level that closes a cycle holds every minimum. Degrees are <=3 and the
    // graphs are tiny, so the path frontier stays small.
    struct State {
        std::vector<int> path;
        std::uint64_t visited;
    };

    std::deque<State> frontier;
    frontier.push_back({{start}, 1ULL << start});
    std::optional<std::vector<int>> best;

    while (!frontier.empty() && !best) {
        std::deque<State> next;
        std::vector<std::vector<int>> closed;
        for (const auto& st : frontier) {
            const int cur = st.path.back();
            for (int j = 0; j < v.size; ++j) {
                if (!v.connected(cur, j)) continue;
                if (j == start && st.path.size() >= 3) {
                    closed.push_back(st.path);
                } else if (!(st.visited >> j & 1)) {
                    State ns = st;
                    ns.path.push_back(j);
                    ns.visited |= 1ULL << j;
                    next.push_back(std::move(ns));
                }
            }
        }
        if (!closed.empty()) best = *std::min_element(closed.begin(), closed.end());
        frontier = std::move(next);
    }
    return best;
}

std::vector<int> canonical_loop(const std::vector<int>& loop) {
    const auto it = std::min_element(loop.begin(), loop.end());
    std::vector<int> out(it, loop.end());
    out.insert(out.end(), loop.begin(), it);
    return out;
}

std::vector<Point2D> loop_polygon(const PointClusters& clusters, const std::vector<int>& loop) {
    std::vector<Point2D> poly;
    poly.reserve(loop.size());
    for (int c : loop) poly.push_back(clusters.unique_points[c]);
    return poly;
}

Segmentation extract_surfaces(const LabeledInstance& inst, double psi) {
    check_instance_invariants(inst);

    Segmentation seg;
    seg.clusters = cluster_faceted_points(inst.points, psi);
    seg.surfaces.instance_id = inst.id;

    const int k = seg.clusters.cluster_count();
    if (k > 63) throw DataError("extract_surfaces: too many clusters");
    const CostMatrix v = build_cost_matrix(seg.clusters);

    for (int c = 0; c < k; ++c) {
        if (v.row_count(c) > 3 || v.col_count(c) > 3)
            throw DataError("extract_surfaces: cluster " + std::to_string(c) +
                            " connected more than 3 times (instance " + std::to_string(inst.id) + ")");
    }

    std::vector<std::vector<int>> loops;
    for (int c = 0; c < k; ++c) {
        if (!seg.clusters.is_two_line(c)) continue;
        auto cycle = find_min_cycle(v, c);
        if (!cycle) continue;
        auto canon = canonical_loop(*cycle);
        if (std::find(loops.begin(), loops.end(), canon) == loops.end()) loops.push_back(std::move(canon));
    }

    if (loops.empty() || loops.size() > 3)
        throw DataError("extract_surfaces: instance " + std::to_string(inst.id) + " produced " +
                        std::to_string(loops.size()) + " loops (expected 1-3)");

    // Coverage: directed loop edges must tile the finite entries of V exactly.
    std::vector<std::uint8_t> covered(v.finite.size(), 0);
    std::size_t loop_edges = 0;
    for (const auto& loop : loops) {
        for (std::size_t t = 0; t < loop.size(); ++t) {
            const int i = loop[t];
            const int j = loop[(t + 1) % loop.size()];
            auto& c = covered[static_cast<std::size_t>(i) * k + j];
            if (!v.connected(i, j) || c)
                throw DataError("extract_surfaces: loops overlap or leave the labeled edge set "
                                "(instance " + std::to_string(inst.id) + ")");
            c = 1;
            ++loop_edges;
        }
    }
    if (static_cast<int>(loop_edges) != v.finite_count())
        throw DataError("extract_surfaces: loops do not cover every labeled edge (instance " +
                        std::to_string(inst.id) + ")");

    // Common lines: undirected edges present in two loops.
    std::map<std::pair<int, int>, int> edge_use;
    for (const auto& loop : loops)
        for (std::size_t t = 0; t < loop.size(); ++t) {
            const int i = loop[t];
            const int j = loop[(t + 1) % loop.size()];
            ++edge_use[{std::min(i, j), std::max(i, j)}];
        }
    for (const auto& [edge, uses] : edge_use)
        if (uses == 2) seg.surfaces.common_lines.insert(edge);

    seg.surfaces.loops = std::move(loops);
    return seg;
}

}  // namespace cartonsynth
