#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gridfusion/eval.hpp"
#include "gridfusion/fusion.hpp"
#include "gridfusion/pfp.hpp"
#include "gridfusion/pipeline.hpp"
#include "gridfusion/projection.hpp"
#include "gridfusion/rng.hpp"
#include "gridfusion/types.hpp"

namespace testsupport {

using namespace gridfusion;

/// Forward-looking camera on a KITTI-sized image: grid x (forward) maps to
/// camera z, grid y (left) to camera -x, up to camera -y.
inline CameraCalibration kitti_like_calibration(double ground_height = -1.6) {
    const Mat3 axes{{0.0, -1.0, 0.0,
                     0.0, 0.0, -1.0,
                     1.0, 0.0, 0.0}};
    return CameraCalibration(700.0, 700.0, 621.0, 187.5, Mat3::identity(),
                             RigidTransform{axes, Vec3{}}, 1242, 375, ground_height);
}

/// Trivial calibration whose grid plane is a constant-depth slice: grid
/// (x, y) lands on pixel (fx*x/d + cx, fy*y/d + cy) with d = ground_height.
inline CameraCalibration flat_depth_calibration(double depth = 10.0) {
    return CameraCalibration(1000.0, 1000.0, 621.0, 187.5, Mat3::identity(), RigidTransform{},
                             1242, 375, depth);
}

inline GridPoint random_grid_point(Rng& rng) {
    const bool dynamic = rng.bernoulli(0.5);
    const double vx = dynamic ? rng.uniform(-10.0, 10.0) : 0.0;
    const double vy = dynamic ? rng.uniform(-3.0, 3.0) : 0.0;
    return GridPoint(rng.uniform(1.0, 60.0), rng.uniform(-20.0, 20.0), vx, vy,
                     dynamic ? MotionState::Dynamic : MotionState::Static);
}

inline ProjectedPoint random_projected_point(Rng& rng) {
    return ProjectedPoint(rng.uniform(0.0, 1242.0), rng.uniform(0.0, 375.0),
                          random_grid_point(rng));
}

inline BoundingBox2D random_box(Rng& rng) {
    const double x0 = rng.uniform(0.0, 1000.0);
    const double y0 = rng.uniform(0.0, 300.0);
    const double w = rng.uniform(0.5, 240.0);
    const double h = rng.uniform(0.5, 150.0);
    return BoundingBox2D("car", rng.uniform(0.0, 1.0), x0, y0, x0 + w, y0 + h);
}

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline bool objects_match(const FusedObject& a, const FusedObject& b, double tol = 1e-9) {
    if (a.class_label != b.class_label || a.motion != b.motion) return false;
    if (a.n_dynamic != b.n_dynamic || a.n_static != b.n_static) return false;
    if (a.demoted != b.demoted || a.frame_id != b.frame_id) return false;
    if (!(a.source_box == b.source_box)) return false;
    if (!near(a.position.x, b.position.x, tol) || !near(a.position.y, b.position.y, tol))
        return false;
    if (!near(a.velocity.x, b.velocity.x, tol) || !near(a.velocity.y, b.velocity.y, tol))
        return false;
    if (a.heading.has_value() != b.heading.has_value()) return false;
    if (a.heading && !near(*a.heading, *b.heading, tol)) return false;
    return true;
}

inline bool assignments_equal(const std::vector<RegionAssignment>& a,
                              const std::vector<RegionAssignment>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a[i].box == b[i].box) || !(a[i].region == b[i].region)) return false;
        if (a[i].dynamic_points != b[i].dynamic_points) return false;
        if (a[i].static_points != b[i].static_points) return false;
    }
    return true;
}

}  // namespace testsupport
