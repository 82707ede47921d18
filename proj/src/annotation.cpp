#include "cartonsynth/annotation.hpp"

#include <json.hpp>

#include "cartonsynth/errors.hpp"
#include "cartonsynth/segmentation.hpp"

#include <fstream>
#include <sstream>

namespace cartonsynth {

using nlohmann::json;

std::string to_string(Occlusion o) { return o == Occlusion::All ? "All" : "Occlusion"; }

Occlusion occlusion_from_string(const std::string& s) {
    if (s == "All") return Occlusion::All;
    if (s == "Occlusion") return Occlusion::Occlusion;
    throw DataError("unknown occlusion tag \"" + s + "\"");
}

void check_instance_invariants(const LabeledInstance& inst) {
    const auto& pts = inst.points;
    if (pts.size() < 3)
        throw DataError("instance " + std::to_string(inst.id) + ": points length >= 3 violated");
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2D& a = pts[i];
        const Point2D& b = pts[(i + 1) % n];
        if (!std::isfinite(a.x) || !std::isfinite(a.y))
            throw DataError("instance " + std::to_string(inst.id) + ": non-finite coordinate");
        if (a.x == b.x && a.y == b.y)
            throw DataError("instance " + std::to_string(inst.id) + ": zero-length edge at position " +
                            std::to_string(i));
    }
}

namespace {

LabeledInstance instance_from_json(const json& j) {
    LabeledInstance inst;
    inst.id = j.at("id").get<int>();
    inst.occlusion = occlusion_from_string(j.at("occlusion").get<std::string>());
    for (const auto& p : j.at("points")) {
        if (!p.is_array() || p.size() != 2) throw DataError("point must be an [x, y] pair");
        inst.points.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    check_instance_invariants(inst);
    return inst;
}

SkeletonRecord record_from_json(const json& j) {
    SkeletonRecord rec;
    rec.image_path = j.at("image").get<std::string>();
    rec.width = j.at("width").get<int>();
    rec.height = j.at("height").get<int>();
    if (rec.width <= 0 || rec.height <= 0) throw DataError("non-positive image dimensions");
    for (const auto& ij : j.at("instances")) {
        LabeledInstance inst = instance_from_json(ij);
        for (const auto& p : inst.points)
            if (p.x < 0 || p.y < 0 || p.x > rec.width || p.y > rec.height)
                throw DataError("instance " + std::to_string(inst.id) +
                                ": point outside image bounds");
        rec.instances.push_back(std::move(inst));
    }
    return rec;
}

}  // namespace

std::vector<SkeletonRecord> parse_skeleton_annotations(const std::string& bytes) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }
    try {
        std::vector<SkeletonRecord> records;
        if (doc.is_array()) {
            for (const auto& j : doc) records.push_back(record_from_json(j));
        } else {
            records.push_back(record_from_json(doc));
        }
        return records;
    } catch (const json::exception& e) {
        throw DataError(std::string("skeleton annotation: ") + e.what());
    }
}

std::vector<SkeletonRecord> load_skeleton_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open skeleton file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_skeleton_annotations(ss.str());
}

std::string serialize_skeleton_annotations(const std::vector<SkeletonRecord>& records) {
    json arr = json::array();
    for (const auto& rec : records) {
        json instances = json::array();
        for (const auto& inst : rec.instances) {
            json pts = json::array();
            for (const auto& p : inst.points) pts.push_back({p.x, p.y});
            instances.push_back({{"id", inst.id},
                                 {"occlusion", to_string(inst.occlusion)},
                                 {"points", pts}});
        }
        arr.push_back({{"image", rec.image_path},
                       {"width", rec.width},
                       {"height", rec.height},
                       {"instances", instances}});
    }
    return arr.dump(2);
}

ValidationReport validate_instance(const LabeledInstance& inst, double psi) {
    check_instance_invariants(inst);

    ValidationReport report;
    report.instance_id = inst.id;

    const PointClusters clusters = cluster_faceted_points(inst.points, psi);
    for (int c = 0; c < clusters.cluster_count(); ++c)
        report.point_classes[c] =
            clusters.is_two_line(c) ? PointClass::TwoLine : PointClass::ThreeLine;

    // R1: the first click must sit in a two-line cluster.
    if (!clusters.is_two_line(clusters.cluster_of[0]))
        report.violations.push_back(
            {"R1", "start point belongs to a faceted (three-line) cluster"});

    // R3: every undirected edge appears once, or twice in opposite directions.
    const CostMatrix v = build_cost_matrix(clusters);
    std::map<std::pair<int, int>, std::pair<int, int>> dir_count;  // (i<j) -> (fwd, rev)
    const int n = static_cast<int>(clusters.cluster_of.size());
    for (int t = 0; t < n; ++t) {
        const int i = clusters.cluster_of[t];
        const int j = clusters.cluster_of[(t + 1) % n];
        if (i == j) continue;
        auto& [fwd, rev] = dir_count[{std::min(i, j), std::max(i, j)}];
        (i < j ? fwd : rev) += 1;
    }
    for (const auto& [edge, counts] : dir_count) {
        const auto& [fwd, rev] = counts;
        if (fwd + rev == 2 && (fwd != 1 || rev != 1))
            report.violations.push_back(
                {"R3", "common line " + std::to_string(edge.first) + "-" +
                           std::to_string(edge.second) + " labeled twice in the same direction"});
        if (fwd + rev > 2)
            report.violations.push_back(
                {"R3", "line " + std::to_string(edge.first) + "-" + std::to_string(edge.second) +
                           " labeled more than twice"});
    }

    // R2: every recoverable loop must be clockwise (non-negative y-down area).
    try {
        const Segmentation seg = extract_surfaces(inst, psi);
        for (std::size_t li = 0; li < seg.surfaces.loops.size(); ++li) {
            const auto poly = loop_polygon(seg.clusters, seg.surfaces.loops[li]);
            if (signed_area(poly) < 0.0)
                report.violations.push_back(
                    {"R2", "surface loop " + std::to_string(li) + " is counter-clockwise"});
        }
    } catch (const DataError& e) {
        report.violations.push_back({"R2", std::string("surfaces not recoverable: ") + e.what()});
    }

    return report;
}

}  // namespace cartonsynth
