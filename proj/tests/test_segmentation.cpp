#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cartonsynth/errors.hpp"
#include "cartonsynth/segmentation.hpp"
#include "test_support.hpp"

using namespace cartonsynth;
using namespace testsupport;

TEST_CASE("clustering: all-distant points stay singletons") {
    const std::vector<Point2D> pts{{0, 0}, {100, 0}, {100, 100}, {0, 100}};
    const PointClusters c = cluster_faceted_points(pts, 25.0);
    CHECK(c.cluster_count() == 4);
    for (const auto& g : c.groups) CHECK(g.size() == 1);
    CHECK(c.merged_sequence == pts);
}

TEST_CASE("clustering: two near points merge to their mean") {
    const std::vector<Point2D> pts{{100, 100}, {110, 115}, {500, 500}};
    const PointClusters c = cluster_faceted_points(pts, 25.0);
    REQUIRE(c.cluster_count() == 2);
    CHECK(c.unique_points[0].x == doctest::Approx(105.0));
    CHECK(c.unique_points[0].y == doctest::Approx(107.5));
    CHECK(c.merged_sequence[0] == c.merged_sequence[1]);
}

TEST_CASE("clustering: matches the brute-force oracle and partitions indices") {
    RandomStream rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Point2D> pts;
        const int n = 3 + static_cast<int>(rng.next_below(12));
        for (int i = 0; i < n; ++i)
            pts.push_back({rng.next_double() * 300.0, rng.next_double() * 300.0});
        const double psi = 5.0 + rng.next_double() * 60.0;

        const PointClusters got = cluster_faceted_points(pts, psi);
        const OracleClusters want = oracle_cluster(pts, psi);
        REQUIRE(got.cluster_of.size() == want.cluster_of.size());
        CHECK(got.cluster_of == want.cluster_of);
        for (int c = 0; c < got.cluster_count(); ++c) {
            CHECK(got.unique_points[c].x == doctest::Approx(want.means[c].x));
            CHECK(got.unique_points[c].y == doctest::Approx(want.means[c].y));
        }

        // partition property
        std::vector<int> seen(pts.size(), 0);
        for (const auto& g : got.groups)
            for (int idx : g) ++seen[idx];
        CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
    }
}

TEST_CASE("cost matrix: square gives one directed 4-cycle") {
    const auto inst = square_instance();
    const CostMatrix v = build_cost_matrix(cluster_faceted_points(inst.points, 25.0));
    CHECK(v.size == 4);
    CHECK(v.finite_count() == 4);
    CHECK(v.connected(0, 1));
    CHECK(v.connected(1, 2));
    CHECK(v.connected(2, 3));
    CHECK(v.connected(3, 0));
    for (int i = 0; i < 4; ++i) CHECK_FALSE(v.connected(i, i));
}

TEST_CASE("cost matrix: common line labeled twice gives both directions") {
    // two triangles sharing edge b-c, clicked a,b,c,b,d,c
    const std::vector<Point2D> clicks{{0, 0}, {100, 0}, {50, 80}, {100, 0}, {150, 80}, {50, 80}};
    const PointClusters c = cluster_faceted_points(clicks, 10.0);
    const CostMatrix v = build_cost_matrix(c);
    CHECK(v.connected(1, 2));  // b -> c
    CHECK(v.connected(2, 1));  // c -> b
}

TEST_CASE("cost matrix: box fixture is 9x9 with 14 finite entries") {
    const BoxFixture box;
    const auto inst = box.instance();
    const PointClusters c = cluster_faceted_points(inst.points, 25.0);
    const CostMatrix v = build_cost_matrix(c);
    CHECK(v.size == 9);
    CHECK(v.finite_count() == 14);

    const auto cl = box.label_to_cluster();
    CHECK(v.row_count(cl.at(5)) == 3);
    CHECK(v.col_count(cl.at(5)) == 3);
}

TEST_CASE("find_min_cycle on the box fixture") {
    const BoxFixture box;
    const PointClusters c = cluster_faceted_points(box.instance().points, 25.0);
    const CostMatrix v = build_cost_matrix(c);
    const auto cl = box.label_to_cluster();

    auto to_clusters = [&](std::vector<int> labels) {
        std::vector<int> out;
        for (int l : labels) out.push_back(cl.at(l));
        return canonical_loop(out);
    };

    SUBCASE("start at point 1 finds the front face") {
        const auto cycle = find_min_cycle(v, cl.at(1));
        REQUIRE(cycle.has_value());
        CHECK(canonical_loop(*cycle) == to_clusters({1, 2, 5, 8, 9}));
    }
    SUBCASE("start at point 3 finds the top face") {
        const auto cycle = find_min_cycle(v, cl.at(3));
        REQUIRE(cycle.has_value());
        CHECK(canonical_loop(*cycle) == to_clusters({3, 4, 5, 2}));
    }
}

TEST_CASE("find_min_cycle: open chain has no cycle") {
    CostMatrix v;
    v.size = 3;
    v.finite.assign(9, 0);
    v.finite[0 * 3 + 1] = 1;
    v.finite[1 * 3 + 2] = 1;
    CHECK_FALSE(find_min_cycle(v, 0).has_value());
}

TEST_CASE("extract_surfaces: square gives one loop, no common lines") {
    const Segmentation seg = extract_surfaces(square_instance(), 25.0);
    REQUIRE(seg.surfaces.loops.size() == 1);
    CHECK(seg.surfaces.loops[0] == std::vector<int>{0, 1, 2, 3});
    CHECK(seg.surfaces.common_lines.empty());
}

TEST_CASE("extract_surfaces: two-surface box with one common line") {
    // surfaces {a,b,c,d} and {b,e,f,c} sharing edge b-c, clicked as the
    // Eulerian sequence a,b,e,f,c,b,c,d
    const Point2D a{0, 0}, b{100, 0}, c{100, 100}, d{0, 100}, e{200, 0}, f{200, 100};
    LabeledInstance inst;
    inst.id = 7;
    inst.points = {a, b, e, f, c, b, c, d};

    const Segmentation seg = extract_surfaces(inst, 10.0);
    REQUIRE(seg.surfaces.loops.size() == 2);
    // first-occurrence cluster ids: a=0 b=1 e=2 f=3 c=4 d=5
    const std::set<std::vector<int>> want{{0, 1, 4, 5}, {1, 2, 3, 4}};
    CHECK(as_set(seg.surfaces.loops) == want);
    CHECK(seg.surfaces.common_lines == std::set<std::pair<int, int>>{{1, 4}});
}

TEST_CASE("extract_surfaces: box fixture recovers its three known loops") {
    const BoxFixture box;
    const Segmentation seg = extract_surfaces(box.instance(), 25.0);
    const auto cl = box.label_to_cluster();

    auto to_clusters = [&](std::vector<int> labels) {
        std::vector<int> out;
        for (int l : labels) out.push_back(cl.at(l));
        return canonical_loop(out);
    };

    REQUIRE(seg.surfaces.loops.size() == 3);
    const std::set<std::vector<int>> want{to_clusters({2, 3, 4, 5}), to_clusters({4, 6, 7, 8, 5}),
                                          to_clusters({1, 2, 5, 8, 9})};
    CHECK(as_set(seg.surfaces.loops) == want);

    const std::set<std::pair<int, int>> want_lines{
        {std::min(cl.at(2), cl.at(5)), std::max(cl.at(2), cl.at(5))},
        {std::min(cl.at(4), cl.at(5)), std::max(cl.at(4), cl.at(5))},
        {std::min(cl.at(5), cl.at(8)), std::max(cl.at(5), cl.at(8))}};
    CHECK(seg.surfaces.common_lines == want_lines);
}

TEST_CASE("extract_surfaces: idempotent and stable") {
    const BoxFixture box;
    const Segmentation s1 = extract_surfaces(box.instance(), 25.0);
    const Segmentation s2 = extract_surfaces(box.instance(), 25.0);
    CHECK(s1.surfaces.loops == s2.surfaces.loops);
    CHECK(s1.surfaces.common_lines == s2.surfaces.common_lines);
}

TEST_CASE("extract_surfaces: every click contributes exactly one directed edge") {
    RandomStream rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const int k = 1 + static_cast<int>(rng.next_below(3));
        const auto synth = make_synthetic(k, 100.0, 8.0, rng);
        const PointClusters c = cluster_faceted_points(synth.instance.points, 25.0);
        const CostMatrix v = build_cost_matrix(c);
        CHECK(v.finite_count() == static_cast<int>(synth.instance.points.size()));
    }
}

TEST_CASE("extract_surfaces: recovers generated loops, agrees with the oracle") {
    RandomStream rng(12345);
    for (int trial = 0; trial < 60; ++trial) {
        const int k = 1 + static_cast<int>(rng.next_below(3));
        // separation > 2*psi, jitter < psi/2
        const auto synth = make_synthetic(k, 120.0, 12.0, rng);
        const Segmentation seg = extract_surfaces(synth.instance, 25.0);
        REQUIRE(seg.surfaces.loops.size() == static_cast<std::size_t>(k));

        const auto mapped = map_loops_to_truth(seg, synth.truth_points, 30.0);
        REQUIRE(mapped.has_value());
        CHECK(*mapped == as_set(synth.truth_loops));

        // independent route: exhaustive cycle enumeration + partition search
        const CostMatrix v = build_cost_matrix(seg.clusters);
        const auto partition = oracle_edge_partition(v);
        REQUIRE(partition.has_value());
        CHECK(as_set(seg.surfaces.loops) == *partition);
    }
}

TEST_CASE("extract_surfaces: degree bound violation raises a coverage error") {
    // a hub clicked between four spokes is connected 4 times
    const Point2D hub{200, 200};
    LabeledInstance inst;
    inst.id = 9;
    inst.points = {{0, 0}, hub, {400, 0}, hub, {400, 400}, hub, {0, 400}, hub};
    CHECK_THROWS_AS(extract_surfaces(inst, 10.0), DataError);
}
