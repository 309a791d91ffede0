#include "gridfusion/projection.hpp"

#include <cmath>
#include <cstddef>

namespace gridfusion {

CameraCalibration::CameraCalibration(double fx_px, double fy_px, double cx_px, double cy_px,
                                     Mat3 rect, RigidTransform g2c, int width, int height,
                                     double ground_z)
    : fx(fx_px),
      fy(fy_px),
      cx(cx_px),
      cy(cy_px),
      rectification(rect),
      grid_to_camera(g2c),
      image_width(width),
      image_height(height),
      ground_height(ground_z) {
    if (!(fx > 0.0) || !(fy > 0.0))
        throw InvariantError("calibration: focal lengths must be positive");
    if (!std::isfinite(cx) || !std::isfinite(cy))
        throw InvariantError("calibration: principal point must be finite");
    if (!is_rotation(rectification))
        throw InvariantError("calibration: rectification must be a proper rotation");
    if (!is_rotation(grid_to_camera.rotation))
        throw InvariantError("calibration: grid-to-camera rotation must be a proper rotation");
    const Vec3& t = grid_to_camera.translation;
    if (!std::isfinite(t.x) || !std::isfinite(t.y) || !std::isfinite(t.z))
        throw InvariantError("calibration: translation must be finite");
    if (image_width <= 0 || image_height <= 0)
        throw InvariantError("calibration: image size must be positive");
    if (!std::isfinite(ground_height))
        throw InvariantError("calibration: ground height must be finite");
}

Vec3 lift_grid_point(const GridPoint& p, const CameraCalibration& calib) {
    return calib.rectification * calib.grid_to_camera({p.x_o, p.y_o, calib.ground_height});
}

std::optional<Vec2> project_point(const Vec3& camera_point, const CameraCalibration& calib) {
    if (camera_point.z <= kMinDepth) return std::nullopt;
    return Vec2{calib.fx * camera_point.x / camera_point.z + calib.cx,
                calib.fy * camera_point.y / camera_point.z + calib.cy};
}

Vec3 back_project(const Vec2& pixel, double depth, const CameraCalibration& calib) {
    return {(pixel.x - calib.cx) / calib.fx * depth, (pixel.y - calib.cy) / calib.fy * depth,
            depth};
}

bool in_image(const Vec2& pixel, const CameraCalibration& calib) {
    return pixel.x >= 0.0 && pixel.x < double(calib.image_width) && pixel.y >= 0.0 &&
           pixel.y < double(calib.image_height);
}

std::vector<ProjectedPoint> project_frame(std::span<const GridPoint> points,
                                          const CameraCalibration& calib) {
    const std::ptrdiff_t n = std::ssize(points);

    // flat scratch keeps the parallel loop free of per-point allocations;
    // points are materialized once during the in-order compaction
    struct PixelSlot {
        double x, y;
        bool keep;
    };
    std::vector<PixelSlot> slots(static_cast<std::size_t>(n));

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const Vec3 cam = lift_grid_point(points[std::size_t(i)], calib);
        const auto pixel = project_point(cam, calib);
        if (pixel && in_image(*pixel, calib))
            slots[std::size_t(i)] = {pixel->x, pixel->y, true};
        else
            slots[std::size_t(i)].keep = false;
    }

    std::vector<ProjectedPoint> out;
    out.reserve(points.size());
    for (std::ptrdiff_t i = 0; i < n; ++i)
        if (slots[std::size_t(i)].keep)
            out.emplace_back(slots[std::size_t(i)].x, slots[std::size_t(i)].y,
                             points[std::size_t(i)]);
    return out;
}

std::vector<ProjectedPoint> project_frame(const FrameData& frame, const CameraCalibration& calib) {
    return project_frame(std::span<const GridPoint>(frame.points), calib);
}

}  // namespace gridfusion
