#pragma once

#include <span>
#include <vector>

#include "gridfusion/fusion.hpp"

namespace gridfusion {

/// Cardinality vote over the two point sets; ties go to Dynamic.
MotionState estimate_motion(const RegionAssignment& a);

/// Component-wise median. Even counts take the mean of the two middle order
/// statistics per component, so the result need not be an input element.
Vec2 median_2d(std::span<const Vec2> values);

/// Quadrant-aware arc tangent of vy/vx, normalized to (-pi, pi].
double heading(double vx, double vy);

/// Point-wise feature extraction for one assignment: motion by cardinality
/// vote, then position/velocity medians over the winning-motion subset only.
/// A dynamic vote whose median velocity is exactly zero is demoted to a
/// static object (heading undefined), flagged via FusedObject::demoted.
FusedObject extract_object(const RegionAssignment& a, int frame_id);

/// Parallel over assignments; output order matches input order.
std::vector<FusedObject> extract_objects(std::span<const RegionAssignment> assignments,
                                         int frame_id);

}  // namespace gridfusion
