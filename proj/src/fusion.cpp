#include "gridfusion/fusion.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>

namespace gridfusion {

FusionRegion fusion_region(const BoundingBox2D& box) {
    // Band edges sit a quarter box-height above and below the bottom edge.
    const double below_bottom = (5.0 * box.y_max - box.y_min) / 4.0;
    const double above_bottom = (3.0 * box.y_max + box.y_min) / 4.0;
    return FusionRegion(box.x_min, box.x_max, std::min(above_bottom, below_bottom),
                        std::max(above_bottom, below_bottom));
}

bool point_in_region(const FusionRegion& region, const ProjectedPoint& p) {
    return region.x_min < p.x_i && p.x_i < region.x_max && region.y_band_low < p.y_i &&
           p.y_i < region.y_band_high;
}

std::vector<RegionAssignment> fuse_frame(std::span<const BoundingBox2D> detections,
                                         std::span<const ProjectedPoint> points) {
    const std::ptrdiff_t n = std::ssize(detections);
    std::vector<std::optional<RegionAssignment>> slots(static_cast<std::size_t>(n));

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const BoundingBox2D& box = detections[std::size_t(i)];
        const FusionRegion region = fusion_region(box);
        std::vector<ProjectedPoint> dynamic_points;
        std::vector<ProjectedPoint> static_points;
        for (const ProjectedPoint& p : points) {
            if (!point_in_region(region, p)) continue;
            (p.source.state == MotionState::Dynamic ? dynamic_points : static_points).push_back(p);
        }
        if (dynamic_points.empty() && static_points.empty()) continue;  // discard empty region
        slots[std::size_t(i)].emplace(
            RegionAssignment{box, region, std::move(dynamic_points), std::move(static_points)});
    }

    std::vector<RegionAssignment> out;
    out.reserve(detections.size());
    for (auto& slot : slots)
        if (slot) out.push_back(std::move(*slot));
    return out;
}

}  // namespace gridfusion
