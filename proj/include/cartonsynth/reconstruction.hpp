#pragma once

#include <array>
#include <optional>
#include <vector>

#include "cartonsynth/annotation.hpp"
#include "cartonsynth/geometry.hpp"
#include "cartonsynth/segmentation.hpp"

namespace cartonsynth {

inline constexpr double kOnLineTol = 1e-6;

// Normalized line through two distinct points. Throws DataError when the
// points coincide.
LineCoeffs line_through(const Point2D& p, const Point2D& q);

struct ConvexitySignature {
    int beta = 0;  // sum of per-point signs, on-line points count 0
    int m = 0;     // points on the line
    int n = 0;     // total points
};

ConvexitySignature convexity_signature(const LineCoeffs& line, const std::vector<Point2D>& contour);

// True when all off-line points lie strictly on one side: |beta| == n - m.
bool is_constructed_line(const LineCoeffs& line, const std::vector<Point2D>& contour);

struct Parallelogram {
    std::array<Point2D, 4> vertices;  // clockwise under y-down
    double area = 0.0;

    std::array<Point2D, 2> edge_directions() const {
        return {vertices[1] - vertices[0], vertices[2] - vertices[1]};
    }
};

// Anchors the parallelogram on edge (i, i+1) and its successor (i+1, i+2).
// Returns nullopt when either edge fails the constructed-line test; throws on
// a degenerate (parallel) corner.
std::optional<Parallelogram> build_parallelogram(const std::vector<Point2D>& contour, int edge_index);

enum class ContourSource { Original, Parallelogram };

struct ReconstructedSurface {
    int surface_index = 0;
    std::vector<Point2D> contour;  // 4 points unless source=Original kept a longer one
    ContourSource source = ContourSource::Original;
};

// Single visible surface. occlusion=All keeps the contour; otherwise picks
// the minimum-area parallelogram over all edge anchors, reverting to the
// original 4-point contour when gamma < area(original)/area(best).
ReconstructedSurface reconstruct_single(const std::vector<Point2D>& contour, Occlusion occlusion,
                                        double gamma);

// Two or three visible surfaces: only common-line edges anchor the
// construction, then shared segments are snapped so adjacent surfaces quote
// bit-equal common-line coordinates.
std::vector<ReconstructedSurface> reconstruct_multi(const SurfaceSet& surfaces,
                                                    const PointClusters& coords,
                                                    Occlusion occlusion);

// Dispatches on loop count; gamma only applies to the single-surface path.
std::vector<ReconstructedSurface> reconstruct_instance(const Segmentation& seg, Occlusion occlusion,
                                                       double gamma);

}  // namespace cartonsynth
