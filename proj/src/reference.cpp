#include "gridfusion/reference.hpp"

#include <algorithm>
#include <utility>

#include "gridfusion/pfp.hpp"

namespace gridfusion::serial {

std::vector<ProjectedPoint> project_frame(std::span<const GridPoint> points,
                                          const CameraCalibration& calib) {
    std::vector<ProjectedPoint> out;
    out.reserve(points.size());
    for (const GridPoint& p : points) {
        const Vec3 cam = lift_grid_point(p, calib);
        const auto pixel = project_point(cam, calib);
        if (pixel && in_image(*pixel, calib)) out.emplace_back(pixel->x, pixel->y, p);
    }
    return out;
}

std::vector<RegionAssignment> fuse_frame(std::span<const BoundingBox2D> detections,
                                         std::span<const ProjectedPoint> points) {
    std::vector<RegionAssignment> out;
    for (const BoundingBox2D& box : detections) {
        const double below_bottom = (5.0 * box.y_max - box.y_min) / 4.0;
        const double above_bottom = (3.0 * box.y_max + box.y_min) / 4.0;
        const double band_low = std::min(above_bottom, below_bottom);
        const double band_high = std::max(above_bottom, below_bottom);
        std::vector<ProjectedPoint> dynamic_points;
        std::vector<ProjectedPoint> static_points;
        for (const ProjectedPoint& p : points) {
            const bool inside = box.x_min < p.x_i && p.x_i < box.x_max && band_low < p.y_i &&
                                p.y_i < band_high;
            if (!inside) continue;
            (p.source.state == MotionState::Dynamic ? dynamic_points : static_points).push_back(p);
        }
        if (dynamic_points.empty() && static_points.empty()) continue;
        out.push_back(RegionAssignment{box,
                                       FusionRegion(box.x_min, box.x_max, band_low, band_high),
                                       std::move(dynamic_points), std::move(static_points)});
    }
    return out;
}

std::vector<FusedObject> extract_objects(std::span<const RegionAssignment> assignments,
                                         int frame_id) {
    std::vector<FusedObject> out;
    out.reserve(assignments.size());
    for (const RegionAssignment& a : assignments) out.push_back(extract_object(a, frame_id));
    return out;
}

}  // namespace gridfusion::serial
