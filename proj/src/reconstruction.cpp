#include "cartonsynth/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cartonsynth/errors.hpp"

namespace cartonsynth {

LineCoeffs line_through(const Point2D& p, const Point2D& q) {
    const Point2D d = q - p;
    const double len = norm(d);
    if (len < 1e-12) throw DataError("line_through: coincident points");
    LineCoeffs line;
    line.a = d.y / len;
    line.b = -d.x / len;
    line.c = -(line.a * p.x + line.b * p.y);
    return line;
}

ConvexitySignature convexity_signature(const LineCoeffs& line, const std::vector<Point2D>& contour) {
    ConvexitySignature sig;
    sig.n = static_cast<int>(contour.size());
    for (const auto& p : contour) {
        const double v = line.eval(p);
        if (std::abs(v) <= kOnLineTol) {
            ++sig.m;
        } else {
            sig.beta += v > 0 ? 1 : -1;
        }
    }
    return sig;
}

bool is_constructed_line(const LineCoeffs& line, const std::vector<Point2D>& contour) {
    const ConvexitySignature sig = convexity_signature(line, contour);
    return std::abs(sig.beta) == sig.n - sig.m;
}

namespace {

// Farthest contour point from the line; ties keep the first index.
Point2D farthest_point(const LineCoeffs& line, const std::vector<Point2D>& contour) {
    Point2D best = contour[0];
    double best_d = point_line_distance(line, contour[0]);
    for (const auto& p : contour) {
        const double d = point_line_distance(line, p);
        if (d > best_d) {
            best_d = d;
            best = p;
        }
    }
    return best;
}

LineCoeffs parallel_through(const LineCoeffs& line, const Point2D& p) {
    return {line.a, line.b, -(line.a * p.x + line.b * p.y)};
}

Point2D corner(const LineCoeffs& l1, const LineCoeffs& l2) {
    const auto p = intersect(l1, l2);
    if (!p) throw ReconstructionError("build_parallelogram: adjacent edges are parallel");
    return *p;
}

}  // namespace

std::optional<Parallelogram> build_parallelogram(const std::vector<Point2D>& contour, int edge_index) {
    const int n = static_cast<int>(contour.size());
    if (n < 3) throw DataError("build_parallelogram: contour needs at least 3 points");

    const Point2D& p0 = contour[edge_index % n];
    const Point2D& p1 = contour[(edge_index + 1) % n];
    const Point2D& p2 = contour[(edge_index + 2) % n];

    const LineCoeffs line1 = line_through(p0, p1);
    const LineCoeffs line2 = line_through(p1, p2);
    if (!is_constructed_line(line1, contour) || !is_constructed_line(line2, contour))
        return std::nullopt;

    const LineCoeffs line3 = parallel_through(line1, farthest_point(line1, contour));
    const LineCoeffs line4 = parallel_through(line2, farthest_point(line2, contour));

    Parallelogram para;
    para.vertices = {corner(line1, line2), corner(line2, line3), corner(line3, line4),
                     corner(line4, line1)};
    double area = signed_area(para.vertices);
    if (area < 0) {
        std::swap(para.vertices[1], para.vertices[3]);
        area = -area;
    }
    para.area = area;
    if (para.area <= 0) throw ReconstructionError("build_parallelogram: degenerate (zero-area) result");
    return para;
}

ReconstructedSurface reconstruct_single(const std::vector<Point2D>& contour, Occlusion occlusion,
                                        double gamma) {
    if (occlusion == Occlusion::All) return {0, contour, ContourSource::Original};

    const int n = static_cast<int>(contour.size());
    std::optional<Parallelogram> best;
    for (int i = 0; i < n; ++i) {
        const auto cand = build_parallelogram(contour, i);
        if (cand && (!best || cand->area < best->area)) best = cand;
    }
    if (!best) throw ReconstructionError("reconstruct_single: no edge yields a parallelogram");

    if (n == 4) {
        const double ratio = polygon_area(contour) / best->area;
        if (gamma < ratio) return {0, contour, ContourSource::Original};
    }
    return {0, {best->vertices.begin(), best->vertices.end()}, ContourSource::Parallelogram};
}

namespace {

struct QuadEdgeRef {
    int vertex_index;  // edge (vertex_index, vertex_index+1 mod 4)
};

// Finds the quad edge lying on `line` (both endpoints within tolerance).
std::optional<QuadEdgeRef> edge_on_line(const std::vector<Point2D>& quad, const LineCoeffs& line) {
    double scale = 1.0;
    for (const auto& p : quad) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
    const double tol = 1e-6 * scale;
    for (int k = 0; k < 4; ++k) {
        if (point_line_distance(line, quad[k]) < tol &&
            point_line_distance(line, quad[(k + 1) % 4]) < tol)
            return QuadEdgeRef{k};
    }
    return std::nullopt;
}

std::vector<Point2D> rotate_quad(const std::vector<Point2D>& quad, int first) {
    std::vector<Point2D> out;
    for (int k = 0; k < 4; ++k) out.push_back(quad[(first + k) % 4]);
    return out;
}

// Minimum-area parallelogram for one loop using only common-line anchored
// edge pairs (the common line serves as line1 or line2).
std::vector<Point2D> fit_common_anchored(const std::vector<Point2D>& poly,
                                         const std::vector<int>& loop,
                                         const std::set<std::pair<int, int>>& common_lines) {
    const int n = static_cast<int>(loop.size());
    auto is_common = [&](int t) {
        const int a = loop[t % n];
        const int b = loop[(t + 1) % n];
        return common_lines.count({std::min(a, b), std::max(a, b)}) > 0;
    };

    std::optional<Parallelogram> best;
    for (int i = 0; i < n; ++i) {
        if (!is_common(i) && !is_common(i + 1)) continue;
        const auto cand = build_parallelogram(poly, i);
        if (cand && (!best || cand->area < best->area)) best = cand;
    }
    if (!best)
        throw ReconstructionError("reconstruct_multi: common line is not a constructed line");
    return {best->vertices.begin(), best->vertices.end()};
}

}  // namespace

std::vector<ReconstructedSurface> reconstruct_multi(const SurfaceSet& surfaces,
                                                    const PointClusters& coords,
                                                    Occlusion occlusion) {
    const int loop_count = static_cast<int>(surfaces.loops.size());
    if (loop_count < 2 || loop_count > 3)
        throw DataError("reconstruct_multi: expected 2 or 3 loops");

    std::vector<ReconstructedSurface> out;
    if (occlusion == Occlusion::All) {
        for (int li = 0; li < loop_count; ++li)
            out.push_back({li, loop_polygon(coords, surfaces.loops[li]), ContourSource::Original});
        return out;
    }

    std::vector<std::vector<Point2D>> quads;
    for (int li = 0; li < loop_count; ++li) {
        const auto poly = loop_polygon(coords, surfaces.loops[li]);
        quads.push_back(fit_common_anchored(poly, surfaces.loops[li], surfaces.common_lines));
    }

    // Which loops touch which common line.
    std::map<std::pair<int, int>, std::vector<int>> line_loops;
    for (const auto& cl : surfaces.common_lines)
        for (int li = 0; li < loop_count; ++li) {
            const auto& loop = surfaces.loops[li];
            const int n = static_cast<int>(loop.size());
            for (int t = 0; t < n; ++t) {
                const int a = loop[t];
                const int b = loop[(t + 1) % n];
                if (std::minmax(a, b) == std::minmax(cl.first, cl.second)) {
                    line_loops[cl].push_back(li);
                    break;
                }
            }
        }

    if (loop_count == 2) {
        // One shared line: snap endpoints to midpoints, translate the far
        // edge to keep each quad a parallelogram, and rotate so the shared
        // edge leads (common-line-first convention).
        const auto& cl = *surfaces.common_lines.begin();
        const Point2D anchor_a = coords.unique_points[cl.first];
        const Point2D anchor_b = coords.unique_points[cl.second];
        const LineCoeffs cline = line_through(anchor_a, anchor_b);

        std::array<QuadEdgeRef, 2> refs{};
        std::array<Point2D, 2> end_a{}, end_b{};  // per quad, matched to anchor_a / anchor_b
        for (int q = 0; q < 2; ++q) {
            const auto ref = edge_on_line(quads[q], cline);
            if (!ref)
                throw ReconstructionError("reconstruct_multi: fitted quad lost its common edge");
            refs[q] = *ref;
            const Point2D e0 = quads[q][ref->vertex_index];
            const Point2D e1 = quads[q][(ref->vertex_index + 1) % 4];
            const bool e0_is_a = distance(e0, anchor_a) <= distance(e1, anchor_a);
            end_a[q] = e0_is_a ? e0 : e1;
            end_b[q] = e0_is_a ? e1 : e0;
        }
        const Point2D snap_a = (end_a[0] + end_a[1]) * 0.5;
        const Point2D snap_b = (end_b[0] + end_b[1]) * 0.5;

        for (int q = 0; q < 2; ++q) {
            const auto rot = rotate_quad(quads[q], refs[q].vertex_index);
            const Point2D side = rot[2] - rot[1];  // parallelogram: also rot[3] - rot[0]
            const Point2D u0 = distance(rot[0], anchor_a) <= distance(rot[1], anchor_a) ? snap_a : snap_b;
            const Point2D u1 = (u0 == snap_a) ? snap_b : snap_a;
            out.push_back({q, {u0, u1, u1 + side, u0 + side}, ContourSource::Parallelogram});
        }
        return out;
    }

    // Three surfaces: the common lines meet at one shared corner cluster.
    // Snap that corner to the mean of every quad's estimate, snap each common
    // line's far endpoint to the mean of its two quads, then rebuild each
    // quad from its two shared edge vectors.
    std::map<int, int> cluster_uses;
    for (const auto& cl : surfaces.common_lines) {
        ++cluster_uses[cl.first];
        ++cluster_uses[cl.second];
    }
    int center_cluster = -1;
    for (const auto& [c, uses] : cluster_uses)
        if (uses >= 2) center_cluster = c;
    if (center_cluster < 0)
        throw ReconstructionError("reconstruct_multi: three surfaces without a shared corner");
    const Point2D center_anchor = coords.unique_points[center_cluster];

    // Per (loop, common line): the quad endpoints nearest center / farthest.
    struct EdgeObs {
        Point2D near_center;
        Point2D far;
    };
    std::map<std::pair<int, int>, std::map<int, EdgeObs>> obs;  // line -> loop -> endpoints
    Point2D center_sum{0, 0};
    int center_n = 0;
    for (const auto& [cl, loops] : line_loops) {
        const LineCoeffs cline =
            line_through(coords.unique_points[cl.first], coords.unique_points[cl.second]);
        for (int li : loops) {
            const auto ref = edge_on_line(quads[li], cline);
            if (!ref)
                throw ReconstructionError("reconstruct_multi: fitted quad lost its common edge");
            const Point2D e0 = quads[li][ref->vertex_index];
            const Point2D e1 = quads[li][(ref->vertex_index + 1) % 4];
            const bool e0_near = distance(e0, center_anchor) <= distance(e1, center_anchor);
            EdgeObs o{e0_near ? e0 : e1, e0_near ? e1 : e0};
            obs[cl][li] = o;
            center_sum = center_sum + o.near_center;
            ++center_n;
        }
    }
    const Point2D center = center_sum * (1.0 / center_n);

    std::map<std::pair<int, int>, Point2D> far_snap;
    for (const auto& [cl, per_loop] : obs) {
        Point2D sum{0, 0};
        for (const auto& [li, o] : per_loop) sum = sum + o.far;
        far_snap[cl] = sum * (1.0 / static_cast<double>(per_loop.size()));
    }

    for (int li = 0; li < loop_count; ++li) {
        std::vector<Point2D> fars;
        for (const auto& [cl, per_loop] : obs)
            if (per_loop.count(li)) fars.push_back(far_snap[cl]);
        if (fars.size() != 2)
            throw ReconstructionError("reconstruct_multi: surface does not touch two common lines");
        Point2D u = fars[0] - center;
        Point2D w = fars[1] - center;
        if (cross(u, w) < 0) std::swap(u, w);  // keep the quad clockwise
        out.push_back(
            {li, {center, center + u, center + u + w, center + w}, ContourSource::Parallelogram});
    }
    return out;
}

std::vector<ReconstructedSurface> reconstruct_instance(const Segmentation& seg, Occlusion occlusion,
                                                       double gamma) {
    if (seg.surfaces.loops.size() == 1) {
        auto rec = reconstruct_single(loop_polygon(seg.clusters, seg.surfaces.loops[0]), occlusion, gamma);
        rec.surface_index = 0;
        return {rec};
    }
    return reconstruct_multi(seg.surfaces, seg.clusters, occlusion);
}

}  // namespace cartonsynth
