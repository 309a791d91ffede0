#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gridfusion/geometry.hpp"
#include "gridfusion/types.hpp"

namespace gridfusion {

struct RigidTransform {
    Mat3 rotation = Mat3::identity();
    Vec3 translation;

    Vec3 operator()(const Vec3& p) const { return rotation * p + translation; }

    bool operator==(const RigidTransform&) const = default;
};

/// Zero-skew pinhole camera plus the grid-to-camera alignment. Images are
/// assumed rectified; grid points are lifted to 3D at ground_height before
/// projection.
struct CameraCalibration {
    double fx, fy;  // focal lengths, pixels
    double cx, cy;  // principal point, pixels
    Mat3 rectification = Mat3::identity();
    RigidTransform grid_to_camera;
    int image_width = 0;
    int image_height = 0;
    double ground_height = 0.0;  // meters, z assigned to grid points when lifting

    CameraCalibration(double fx_px, double fy_px, double cx_px, double cy_px, Mat3 rect,
                      RigidTransform g2c, int width, int height, double ground_z);

    bool operator==(const CameraCalibration&) const = default;
};

/// Depth at or below this counts as behind the camera plane.
inline constexpr double kMinDepth = 1e-6;

/// Grid sample lifted to a 3D point in the rectified camera frame:
/// rectification applied after the grid-to-camera rigid transform.
Vec3 lift_grid_point(const GridPoint& p, const CameraCalibration& calib);

/// Pinhole projection; nullopt when the point is at or behind the camera.
std::optional<Vec2> project_point(const Vec3& camera_point, const CameraCalibration& calib);

/// Inverse of project_point along the pixel ray at a fixed depth.
Vec3 back_project(const Vec2& pixel, double depth, const CameraCalibration& calib);

/// Half-open bounds test: [0, width) x [0, height).
bool in_image(const Vec2& pixel, const CameraCalibration& calib);

/// Projects every grid point, dropping points behind the camera or outside
/// the image. Input order is preserved. Parallel over points.
std::vector<ProjectedPoint> project_frame(std::span<const GridPoint> points,
                                          const CameraCalibration& calib);

std::vector<ProjectedPoint> project_frame(const FrameData& frame, const CameraCalibration& calib);

}  // namespace gridfusion
