#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cartonsynth/geometry.hpp"

namespace cartonsynth {

enum class Occlusion { All, Occlusion };

std::string to_string(Occlusion o);
Occlusion occlusion_from_string(const std::string& s);

// One labeled carton: the clicked point sequence plus the occlusion tag.
// Consecutive clicks (including the wrap-around last->first pair) form the
// directed edge list the segmentation stage works on.
struct LabeledInstance {
    int id = 0;
    Occlusion occlusion = Occlusion::All;
    std::vector<Point2D> points;
};

struct SkeletonRecord {
    std::string image_path;
    int width = 0;
    int height = 0;
    std::vector<LabeledInstance> instances;
};

enum class PointClass { TwoLine, ThreeLine };

struct Violation {
    std::string rule;  // "R1", "R2", "R3"
    std::string message;
};

struct ValidationReport {
    int instance_id = 0;
    std::vector<Violation> violations;
    std::map<int, PointClass> point_classes;  // cluster id -> class

    bool ok() const { return violations.empty(); }
};

// Parses the skeleton annotation JSON (UTF-8). Throws ParseError on malformed
// documents and DataError when coordinates fall outside the image.
std::vector<SkeletonRecord> parse_skeleton_annotations(const std::string& bytes);

std::vector<SkeletonRecord> load_skeleton_file(const std::string& path);

std::string serialize_skeleton_annotations(const std::vector<SkeletonRecord>& records);

// Checks the three labeling rules. Violations are data, not exceptions:
//   R1  the start point belongs to a two-line cluster
//   R2  every recovered surface loop is clockwise (y-down shoelace >= 0)
//   R3  every common line appears exactly twice in the directed edge multiset
ValidationReport validate_instance(const LabeledInstance& inst, double psi);

// Throws DataError describing the first violated structural invariant
// (>= 3 points, no zero-length edge); used by the parser and callers alike.
void check_instance_invariants(const LabeledInstance& inst);

}  // namespace cartonsynth
