#include "doctest.h"

#include "gridfusion/reference.hpp"
#include "support.hpp"

using namespace gridfusion;
using namespace testsupport;

namespace {

ProjectedPoint pixel_point(double x, double y, MotionState state = MotionState::Static) {
    const double vx = state == MotionState::Dynamic ? 1.0 : 0.0;
    return ProjectedPoint(x, y, GridPoint(10.0, 0.0, vx, 0.0, state));
}

}  // namespace

TEST_CASE("fusion_region evaluates the band thresholds") {
    SUBCASE("box x 100-200, y 40-120") {
        const FusionRegion r = fusion_region(BoundingBox2D("car", 0.9, 100, 40, 200, 120));
        CHECK(r.x_min == 100.0);
        CHECK(r.x_max == 200.0);
        CHECK(r.y_band_low == 100.0);   // (3*120 + 40) / 4
        CHECK(r.y_band_high == 140.0);  // (5*120 - 40) / 4
    }
    SUBCASE("box x 0-10, y 0-8") {
        const FusionRegion r = fusion_region(BoundingBox2D("car", 0.9, 0, 0, 10, 8));
        CHECK(r.y_band_low == 6.0);
        CHECK(r.y_band_high == 10.0);
    }
    SUBCASE("nearly degenerate box: band height epsilon/2 centered on y_max") {
        const double eps = 1e-6;
        const FusionRegion r =
            fusion_region(BoundingBox2D("car", 0.9, 0, 100.0 - eps, 10, 100.0));
        CHECK(near(r.y_band_high - r.y_band_low, eps / 2.0, 1e-12));
        CHECK(near((r.y_band_low + r.y_band_high) / 2.0, 100.0, 1e-12));
    }
}

TEST_CASE("band geometry invariants over random boxes") {
    Rng rng(31);
    for (int i = 0; i < 2000; ++i) {
        const BoundingBox2D box = random_box(rng);
        const FusionRegion r = fusion_region(box);
        CHECK(r.x_min == box.x_min);
        CHECK(r.x_max == box.x_max);
        CHECK(near(r.y_band_high - r.y_band_low, box.height() / 2.0, 1e-12));
        CHECK(near((r.y_band_low + r.y_band_high) / 2.0, box.y_max, 1e-12));
    }
}

TEST_CASE("point_in_region uses strict inequalities") {
    const FusionRegion region = fusion_region(BoundingBox2D("car", 0.9, 100, 40, 200, 120));
    CHECK(point_in_region(region, pixel_point(150, 120)));
    CHECK_FALSE(point_in_region(region, pixel_point(150, 90)));    // above the band
    CHECK_FALSE(point_in_region(region, pixel_point(100, 120)));   // on the x boundary
    CHECK_FALSE(point_in_region(region, pixel_point(150, 100)));   // on the band edge
    CHECK_FALSE(point_in_region(region, pixel_point(150, 140)));
    CHECK_FALSE(point_in_region(region, pixel_point(200, 120)));
}

TEST_CASE("fuse_frame spec cases") {
    const BoundingBox2D box("car", 0.9, 100, 40, 200, 120);  // band y in (100, 140)

    SUBCASE("no points: the region is discarded") {
        const std::vector<ProjectedPoint> none;
        CHECK(fuse_frame(std::vector<BoundingBox2D>{box}, none).empty());
    }

    SUBCASE("three points inside, split 2 dynamic / 1 static") {
        const std::vector<ProjectedPoint> pts{
            pixel_point(150, 110, MotionState::Dynamic),
            pixel_point(160, 120, MotionState::Static),
            pixel_point(170, 130, MotionState::Dynamic),
        };
        const auto assignments = fuse_frame(std::vector<BoundingBox2D>{box}, pts);
        REQUIRE(assignments.size() == 1);
        CHECK(assignments[0].dynamic_points.size() == 2);
        CHECK(assignments[0].static_points.size() == 1);
        CHECK(assignments[0].dynamic_points[0] == pts[0]);
        CHECK(assignments[0].dynamic_points[1] == pts[2]);
    }

    SUBCASE("a point inside two overlapping bands lands in both assignments") {
        const BoundingBox2D other("car", 0.8, 120, 44, 220, 124);  // band y in (104, 144)
        const std::vector<ProjectedPoint> pts{pixel_point(150, 118, MotionState::Dynamic)};
        const auto assignments =
            fuse_frame(std::vector<BoundingBox2D>{box, other}, pts);
        REQUIRE(assignments.size() == 2);
        CHECK(assignments[0].dynamic_points.size() == 1);
        CHECK(assignments[1].dynamic_points.size() == 1);
    }
}

TEST_CASE("fuse_frame matches the brute-force reference on random frames") {
    Rng rng(4242);
    for (int trial = 0; trial < 40; ++trial) {
        const int n_boxes = rng.uniform_int(0, 30);
        const int n_points = rng.uniform_int(0, 800);
        std::vector<BoundingBox2D> boxes;
        boxes.reserve(std::size_t(n_boxes));
        for (int i = 0; i < n_boxes; ++i) boxes.push_back(random_box(rng));
        std::vector<ProjectedPoint> points;
        points.reserve(std::size_t(n_points));
        for (int i = 0; i < n_points; ++i) points.push_back(random_projected_point(rng));

        const auto parallel = fuse_frame(boxes, points);
        const auto reference = serial::fuse_frame(boxes, points);
        CHECK(assignments_equal(parallel, reference));
    }
}

TEST_CASE("membership is invariant under joint translation") {
    Rng rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const BoundingBox2D box = random_box(rng);
        const ProjectedPoint p = random_projected_point(rng);
        const double dx = rng.uniform(-500, 500);
        const double dy = rng.uniform(-500, 500);

        const BoundingBox2D moved_box(box.class_label, box.confidence, box.x_min + dx,
                                      box.y_min + dy, box.x_max + dx, box.y_max + dy);
        const ProjectedPoint moved_p(p.x_i + dx, p.y_i + dy, p.source);

        // exact translation can still flip strict comparisons at the boundary;
        // perturb away from edges
        const FusionRegion region = fusion_region(box);
        const FusionRegion moved_region = fusion_region(moved_box);
        const bool near_edge =
            std::min({std::abs(p.x_i - region.x_min), std::abs(p.x_i - region.x_max),
                      std::abs(p.y_i - region.y_band_low),
                      std::abs(p.y_i - region.y_band_high)}) < 1e-6;
        if (near_edge) continue;
        CHECK(point_in_region(region, p) == point_in_region(moved_region, moved_p));
    }
}

TEST_CASE("no assignment is empty on both sides") {
    Rng rng(88);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<BoundingBox2D> boxes;
        for (int i = 0; i < 15; ++i) boxes.push_back(random_box(rng));
        std::vector<ProjectedPoint> points;
        for (int i = 0; i < 200; ++i) points.push_back(random_projected_point(rng));
        for (const RegionAssignment& a : fuse_frame(boxes, points)) {
            CHECK(a.point_count() >= 1);
            for (const ProjectedPoint& p : a.dynamic_points) {
                CHECK(p.source.state == MotionState::Dynamic);
                CHECK(point_in_region(a.region, p));
            }
            for (const ProjectedPoint& p : a.static_points) {
                CHECK(p.source.state == MotionState::Static);
                CHECK(point_in_region(a.region, p));
            }
        }
    }
}
