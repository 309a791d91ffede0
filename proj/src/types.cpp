#include "gridfusion/types.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace gridfusion {

namespace {

void require(bool ok, const char* message) {
    if (!ok) throw InvariantError(message);
}

}  // namespace

const char* to_string(MotionState state) {
    return state == MotionState::Dynamic ? "dynamic" : "static";
}

BoundingBox2D::BoundingBox2D(std::string label, double conf, double x0, double y0, double x1,
                             double y1)
    : class_label(std::move(label)), confidence(conf), x_min(x0), y_min(y0), x_max(x1), y_max(y1) {
    require(std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
                std::isfinite(y_max),
            "bounding box: corners must be finite");
    require(x_min < x_max, "bounding box: x_min must be less than x_max");
    require(y_min < y_max, "bounding box: y_min must be less than y_max");
    require(confidence >= 0.0 && confidence <= 1.0, "bounding box: confidence must be in [0, 1]");
}

GridPoint::GridPoint(double x, double y, double vx, double vy, MotionState s)
    : x_o(x), y_o(y), vx_o(vx), vy_o(vy), state(s) {
    require(std::isfinite(x_o) && std::isfinite(y_o) && std::isfinite(vx_o) && std::isfinite(vy_o),
            "grid point: components must be finite");
    require(state == MotionState::Dynamic || (vx_o == 0.0 && vy_o == 0.0),
            "grid point: static points must have zero velocity");
}

ProjectedPoint::ProjectedPoint(double xi, double yi, GridPoint src)
    : x_i(xi), y_i(yi), source(std::move(src)) {
    require(std::isfinite(x_i) && std::isfinite(y_i),
            "projected point: image coordinates must be finite");
}

FusionRegion::FusionRegion(double x0, double x1, double band_low, double band_high)
    : x_min(x0), x_max(x1), y_band_low(band_low), y_band_high(band_high) {
    require(std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_band_low) &&
                std::isfinite(y_band_high),
            "fusion region: bounds must be finite");
    require(x_min < x_max, "fusion region: x_min must be less than x_max");
    require(y_band_low < y_band_high, "fusion region: band must have positive height");
}

FusedObject::FusedObject(std::string label, MotionState motion_state, Vec2 pos, Vec2 vel,
                         std::optional<double> heading_rad, long dynamic_count, long static_count,
                         bool was_demoted, BoundingBox2D box, int frame)
    : class_label(std::move(label)),
      motion(motion_state),
      position(pos),
      velocity(vel),
      heading(heading_rad),
      n_dynamic(dynamic_count),
      n_static(static_count),
      demoted(was_demoted),
      source_box(std::move(box)),
      frame_id(frame) {
    require(n_dynamic >= 0 && n_static >= 0, "fused object: point counts must be non-negative");
    require(n_dynamic + n_static >= 1, "fused object: at least one supporting point required");
    if (motion == MotionState::Static) {
        require(velocity == Vec2{0.0, 0.0}, "fused object: static objects carry zero velocity");
        require(!heading.has_value(), "fused object: static objects carry no heading");
    } else {
        require(heading.has_value(), "fused object: dynamic objects carry a heading");
        require(*heading > -std::numbers::pi && *heading <= std::numbers::pi,
                "fused object: heading must lie in (-pi, pi]");
    }
}

FrameData::FrameData(int frame, std::vector<BoundingBox2D> dets, std::vector<GridPoint> pts)
    : frame_id(frame), detections(std::move(dets)), points(std::move(pts)) {
    require(frame_id >= 0, "frame: id must be non-negative");
}

}  // namespace gridfusion
