#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cartonsynth/annotation.hpp"
#include "cartonsynth/errors.hpp"
#include "test_support.hpp"

using namespace cartonsynth;
using namespace testsupport;

namespace {

const char* kValidDoc = R"([
  {
    "image": "img_000.png",
    "width": 640,
    "height": 480,
    "instances": [
      {
        "id": 1,
        "occlusion": "All",
        "points": [[100, 100], [300, 100], [300, 300], [100, 300]]
      }
    ]
  }
])";

}  // namespace

TEST_CASE("parse: valid document") {
    const auto records = parse_skeleton_annotations(kValidDoc);
    REQUIRE(records.size() == 1);
    CHECK(records[0].image_path == "img_000.png");
    CHECK(records[0].width == 640);
    CHECK(records[0].height == 480);
    REQUIRE(records[0].instances.size() == 1);
    const auto& inst = records[0].instances[0];
    CHECK(inst.id == 1);
    CHECK(inst.occlusion == Occlusion::All);
    REQUIRE(inst.points.size() == 4);
    CHECK(inst.points[1] == Point2D{300, 100});
}

TEST_CASE("parse: a single record object is accepted too") {
    const std::string doc = R"({"image":"a.png","width":10,"height":10,"instances":[]})";
    const auto records = parse_skeleton_annotations(doc);
    REQUIRE(records.size() == 1);
    CHECK(records[0].instances.empty());
}

TEST_CASE("parse: malformed JSON reports the byte offset") {
    try {
        parse_skeleton_annotations("[{\"image\": }]");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.byte_offset > 0);
    }
}

TEST_CASE("parse: structural errors raise DataError") {
    auto doc = [](const std::string& points, const std::string& occ = "\"All\"",
                  int w = 640, int h = 480) {
        return "[{\"image\":\"a.png\",\"width\":" + std::to_string(w) +
               ",\"height\":" + std::to_string(h) +
               ",\"instances\":[{\"id\":1,\"occlusion\":" + occ + ",\"points\":" + points + "}]}]";
    };

    SUBCASE("missing field") {
        CHECK_THROWS_AS(parse_skeleton_annotations("[{\"image\":\"a.png\"}]"), DataError);
    }
    SUBCASE("fewer than 3 points") {
        CHECK_THROWS_AS(parse_skeleton_annotations(doc("[[0,0],[5,5]]")), DataError);
    }
    SUBCASE("zero-length interior edge") {
        CHECK_THROWS_AS(parse_skeleton_annotations(doc("[[0,0],[0,0],[5,5],[0,5]]")), DataError);
    }
    SUBCASE("zero-length wrap edge") {
        CHECK_THROWS_AS(parse_skeleton_annotations(doc("[[0,0],[5,0],[5,5],[0,0]]")), DataError);
    }
    SUBCASE("point outside the image") {
        CHECK_THROWS_AS(parse_skeleton_annotations(doc("[[0,0],[700,0],[5,5]]")), DataError);
    }
    SUBCASE("unknown occlusion tag") {
        CHECK_THROWS_AS(parse_skeleton_annotations(doc("[[0,0],[5,0],[5,5]]", "\"Partial\"")),
                        DataError);
    }
    SUBCASE("non-positive dimensions") {
        CHECK_THROWS_AS(parse_skeleton_annotations(doc("[[0,0],[5,0],[5,5]]", "\"All\"", 0, 480)),
                        DataError);
    }
    SUBCASE("point not an [x, y] pair") {
        CHECK_THROWS_AS(parse_skeleton_annotations(doc("[[0,0],[5,0],[5,5,1]]")), DataError);
    }
}

TEST_CASE("serialize then parse round-trips") {
    const auto records = parse_skeleton_annotations(kValidDoc);
    const auto again = parse_skeleton_annotations(serialize_skeleton_annotations(records));
    REQUIRE(again.size() == records.size());
    CHECK(again[0].image_path == records[0].image_path);
    CHECK(again[0].instances[0].points == records[0].instances[0].points);
}

TEST_CASE("validate: box fixture passes and classifies all points") {
    const BoxFixture box;
    const ValidationReport report = validate_instance(box.instance(), 25.0);
    CHECK(report.ok());

    const auto cl = box.label_to_cluster();
    for (int label : {2, 4, 5, 8})
        CHECK(report.point_classes.at(cl.at(label)) == PointClass::ThreeLine);
    for (int label : {1, 3, 6, 7, 9})
        CHECK(report.point_classes.at(cl.at(label)) == PointClass::TwoLine);
}

TEST_CASE("validate: R1 flags a start on a faceted point") {
    // rotate the Eulerian click order so it starts on three-line point 2;
    // the edge multiset (with the wrap edge) is unchanged
    BoxFixture box;
    std::rotate(box.click_order.begin(), box.click_order.begin() + 1, box.click_order.end());
    const ValidationReport report = validate_instance(box.instance(), 25.0);
    CHECK_FALSE(report.ok());
    bool has_r1 = false;
    for (const auto& v : report.violations) has_r1 |= v.rule == "R1";
    CHECK(has_r1);
}

TEST_CASE("validate: R2 flags a counter-clockwise loop") {
    const ValidationReport report = validate_instance(square_instance(/*clockwise=*/false), 25.0);
    CHECK_FALSE(report.ok());
    bool has_r2 = false;
    for (const auto& v : report.violations) has_r2 |= v.rule == "R2";
    CHECK(has_r2);
}

TEST_CASE("validate: R3 flags a common line labeled twice in one direction") {
    // edges b->c twice, never c->b
    const Point2D a{0, 0}, b{100, 0}, c{50, 80}, d{150, 80};
    LabeledInstance inst;
    inst.id = 3;
    inst.points = {a, b, c, d, b, c};
    const ValidationReport report = validate_instance(inst, 10.0);
    CHECK_FALSE(report.ok());
    bool has_r3 = false;
    for (const auto& v : report.violations) has_r3 |= v.rule == "R3";
    CHECK(has_r3);
}

TEST_CASE("validate: structural invariants still throw") {
    LabeledInstance inst;
    inst.id = 4;
    inst.points = {{0, 0}, {1, 1}};
    CHECK_THROWS_AS(validate_instance(inst, 25.0), DataError);
}
