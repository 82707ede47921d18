#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cartonsynth/annotation.hpp"
#include "cartonsynth/errors.hpp"
#include "cartonsynth/pipeline.hpp"
#include "cartonsynth/reconstruction.hpp"
#include "cartonsynth/segmentation.hpp"
#include "cartonsynth/warp.hpp"

namespace py = pybind11;
using namespace cartonsynth;

namespace {

using PyPoint = std::pair<double, double>;

std::vector<Point2D> to_points(const std::vector<PyPoint>& pts) {
    std::vector<Point2D> out;
    out.reserve(pts.size());
    for (const auto& [x, y] : pts) out.push_back({x, y});
    return out;
}

std::vector<PyPoint> from_points(const std::vector<Point2D>& pts) {
    std::vector<PyPoint> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.emplace_back(p.x, p.y);
    return out;
}

LabeledInstance make_instance(int id, const std::string& occlusion,
                              const std::vector<PyPoint>& points) {
    LabeledInstance inst;
    inst.id = id;
    inst.occlusion = occlusion_from_string(occlusion);
    inst.points = to_points(points);
    return inst;
}

py::dict segment_py(const std::vector<PyPoint>& points, const std::string& occlusion, double psi) {
    const Segmentation seg = extract_surfaces(make_instance(0, occlusion, points), psi);
    py::dict out;
    out["loops"] = seg.surfaces.loops;
    std::vector<std::pair<int, int>> lines(seg.surfaces.common_lines.begin(),
                                           seg.surfaces.common_lines.end());
    out["common_lines"] = lines;
    out["unique_points"] = from_points(seg.clusters.unique_points);
    std::vector<std::vector<PyPoint>> polys;
    for (const auto& loop : seg.surfaces.loops)
        polys.push_back(from_points(loop_polygon(seg.clusters, loop)));
    out["polygons"] = polys;
    return out;
}

py::dict validate_py(const std::vector<PyPoint>& points, const std::string& occlusion, double psi) {
    const ValidationReport report = validate_instance(make_instance(0, occlusion, points), psi);
    py::dict out;
    std::vector<std::pair<std::string, std::string>> violations;
    for (const auto& v : report.violations) violations.emplace_back(v.rule, v.message);
    out["violations"] = violations;
    py::dict classes;
    for (const auto& [cluster, cls] : report.point_classes)
        classes[py::int_(cluster)] = cls == PointClass::TwoLine ? "two_line" : "three_line";
    out["point_classes"] = classes;
    out["ok"] = report.ok();
    return out;
}

py::dict reconstruct_py(const std::vector<PyPoint>& points, const std::string& occlusion,
                        double psi, double gamma) {
    const Segmentation seg = extract_surfaces(make_instance(0, occlusion, points), psi);
    const auto recs = reconstruct_instance(seg, occlusion_from_string(occlusion), gamma);
    py::list surfaces;
    for (const auto& r : recs) {
        py::dict d;
        d["surface"] = r.surface_index;
        d["source"] = r.source == ContourSource::Original ? "original" : "parallelogram";
        d["contour"] = from_points(r.contour);
        surfaces.append(d);
    }
    py::dict out;
    out["surfaces"] = surfaces;
    return out;
}

std::array<Point2D, 4> to_quad(const std::vector<PyPoint>& pts) {
    if (pts.size() != 4) throw DataError("quad must have exactly 4 points");
    const auto v = to_points(pts);
    return {v[0], v[1], v[2], v[3]};
}

std::vector<std::vector<double>> homography_py(const std::vector<PyPoint>& texture_quad,
                                               const std::vector<PyPoint>& contour_quad) {
    const Homography h = solve_homography(to_quad(texture_quad), to_quad(contour_quad));
    return {{h.m[0], h.m[1], h.m[2]}, {h.m[3], h.m[4], h.m[5]}, {h.m[6], h.m[7], h.m[8]}};
}

SynthesisConfig config_from_kwargs(const py::kwargs& kwargs) {
    SynthesisConfig cfg;
    for (const auto& [key, value] : kwargs) {
        const std::string k = py::cast<std::string>(key);
        if (k == "psi") cfg.psi = py::cast<double>(value);
        else if (k == "gamma") cfg.gamma = py::cast<double>(value);
        else if (k == "noise_prob") cfg.noise_prob = py::cast<double>(value);
        else if (k == "fusion_sigma") cfg.fusion_sigma = py::cast<double>(value);
        else if (k == "count") cfg.count = py::cast<int>(value);
        else if (k == "seed") cfg.seed = py::cast<std::uint64_t>(value);
        else if (k == "jobs") cfg.jobs = py::cast<int>(value);
        else if (k == "skeletons") cfg.skeleton_dir = py::cast<std::string>(value);
        else if (k == "textures") cfg.texture_manifest = py::cast<std::string>(value);
        else if (k == "out") cfg.output_dir = py::cast<std::string>(value);
        else throw ConfigError("unknown config key \"" + k + "\"");
    }
    return cfg;
}

py::dict generate_py(const py::kwargs& kwargs) {
    const auto manifest = run_generation(config_from_kwargs(kwargs));
    int noise = 0, textured = 0, failed = 0;
    for (const auto& img : manifest)
        for (const auto& inst : img.instances) {
            if (!inst.error.empty()) ++failed;
            else if (inst.noise) ++noise;
            else ++textured;
        }
    py::dict out;
    out["images"] = static_cast<int>(manifest.size());
    out["instances_textured"] = textured;
    out["instances_noise"] = noise;
    out["instances_failed"] = failed;
    return out;
}

}  // namespace

PYBIND11_MODULE(_cartonsynth, m) {
    m.doc() = "carton dataset synthesis: surface segmentation, contour reconstruction, "
              "texture replacement";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

    m.def("segment_surfaces", &segment_py, py::arg("points"), py::arg("occlusion") = "All",
          py::arg("psi") = 25.0,
          "Cluster faceted clicks and split the sequence into 1-3 surface loops.");
    m.def("validate_instance", &validate_py, py::arg("points"), py::arg("occlusion") = "All",
          py::arg("psi") = 25.0, "Check the labeling rules; violations come back as data.");
    m.def("reconstruct_contours", &reconstruct_py, py::arg("points"),
          py::arg("occlusion") = "Occlusion", py::arg("psi") = 25.0, py::arg("gamma") = 2.0 / 3.0,
          "Segment and complete each surface to its minimum-area parallelogram.");
    m.def("solve_homography", &homography_py, py::arg("texture_quad"), py::arg("contour_quad"),
          "3x3 projective transform mapping the contour quad onto the texture quad.");
    m.def("generate", &generate_py,
          "Run batch synthesis; accepts the CLI config keys as keyword arguments.");
}
