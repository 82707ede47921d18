#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "cartonsynth/annotation.hpp"
#include "cartonsynth/geometry.hpp"

namespace cartonsynth {

// Result of merging same-faceted clicks. Cluster ids index unique_points and
// run in first-occurrence order of the clicked sequence.
struct PointClusters {
    std::vector<Point2D> merged_sequence;   // same length as input, cluster means
    std::vector<Point2D> unique_points;     // one entry per cluster
    std::vector<std::vector<int>> groups;   // cluster id -> indices into the input
    std::vector<int> cluster_of;            // input index -> cluster id

    int cluster_count() const { return static_cast<int>(unique_points.size()); }
    bool is_two_line(int cluster) const { return groups[cluster].size() == 1; }
};

// Directed adjacency over clusters. Finite entries cost 1, everything else
// (including the diagonal) is infinite.
struct CostMatrix {
    int size = 0;
    std::vector<std::uint8_t> finite;  // row-major, 1 = connected

    bool connected(int i, int j) const { return finite[static_cast<std::size_t>(i) * size + j] != 0; }
    int finite_count() const;
    int row_count(int i) const;
    int col_count(int j) const;
};

struct SurfaceSet {
    int instance_id = 0;
    std::vector<std::vector<int>> loops;              // cluster-id cycles, canonical rotation
    std::set<std::pair<int, int>> common_lines;       // unordered pairs, first < second
};

// Transitive-closure clustering over the pairwise distance-<=psi predicate;
// merged coordinates are group means.
PointClusters cluster_faceted_points(const std::vector<Point2D>& points, double psi);

// One directed edge per consecutive click pair, wrap-around included.
// Self-pairs (adjacent clicks merged into one cluster) stay infinite.
CostMatrix build_cost_matrix(const PointClusters& clusters);

// Minimum-edge-count simple directed cycle through `start`. Ties are broken
// by the lexicographically smallest vertex-id sequence. nullopt when no cycle
// returns to `start`.
std::optional<std::vector<int>> find_min_cycle(const CostMatrix& v, int start);

// Rotates so the smallest cluster id is first; direction is preserved.
std::vector<int> canonical_loop(const std::vector<int>& loop);

struct Segmentation {
    PointClusters clusters;
    SurfaceSet surfaces;
};

// Full Algorithm: cluster, build the cost matrix, search a minimal cycle from
// every two-line cluster, deduplicate, and check the edge-partition coverage.
// Throws DataError when loops number 0 or >3 or do not tile the edge set.
Segmentation extract_surfaces(const LabeledInstance& inst, double psi);

// Loop vertex ids resolved to merged coordinates.
std::vector<Point2D> loop_polygon(const PointClusters& clusters, const std::vector<int>& loop);

}  // namespace cartonsynth
