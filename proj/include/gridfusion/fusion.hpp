#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gridfusion/types.hpp"

namespace gridfusion {

/// Points captured by one detection's fusion region, split by motion state.
/// Built by fuse_frame and never empty on both sides.
struct RegionAssignment {
    BoundingBox2D box;
    FusionRegion region;
    std::vector<ProjectedPoint> dynamic_points;
    std::vector<ProjectedPoint> static_points;

    std::size_t point_count() const { return dynamic_points.size() + static_points.size(); }
};

/// Fusion band of a box. The x bounds are copied; the vertical band spans
/// (3*y_max + y_min)/4 .. (5*y_max - y_min)/4, i.e. half the box height
/// centered on the bottom edge.
FusionRegion fusion_region(const BoundingBox2D& box);

/// Strict-inequality membership test on both axes.
bool point_in_region(const FusionRegion& region, const ProjectedPoint& p);

/// One assignment per detection whose region contains at least one point;
/// detections with empty regions are discarded. A point inside k overlapping
/// regions appears in all k assignments. Point order within an assignment
/// follows the input. Parallel over detections.
std::vector<RegionAssignment> fuse_frame(std::span<const BoundingBox2D> detections,
                                         std::span<const ProjectedPoint> points);

}  // namespace gridfusion
