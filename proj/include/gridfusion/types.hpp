#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridfusion/errors.hpp"
#include "gridfusion/geometry.hpp"

namespace gridfusion {

enum class MotionState { Static, Dynamic };

const char* to_string(MotionState state);

/// Detector output box in raster pixel coordinates: origin top-left, y grows
/// downward, (x_min, y_min) is the top-left corner.
struct BoundingBox2D {
    std::string class_label;
    double confidence;  // [0, 1]
    double x_min, y_min;
    double x_max, y_max;

    BoundingBox2D(std::string label, double conf, double x0, double y0, double x1, double y1);

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }

    bool operator==(const BoundingBox2D&) const = default;
};

/// One occupancy-grid cell sample in the vehicle frame: x forward, y left.
/// Static points always carry zero velocity.
struct GridPoint {
    double x_o, y_o;    // meters
    double vx_o, vy_o;  // meters/second
    MotionState state;

    GridPoint(double x, double y, double vx, double vy, MotionState s);

    bool operator==(const GridPoint&) const = default;
};

/// A grid point together with its image-plane projection.
struct ProjectedPoint {
    double x_i, y_i;  // pixels
    GridPoint source;

    ProjectedPoint(double xi, double yi, GridPoint src);

    bool operator==(const ProjectedPoint&) const = default;
};

/// Pixel band searched for grid points: full box width, half box height,
/// centered on the box's bottom edge.
struct FusionRegion {
    double x_min, x_max;
    double y_band_low, y_band_high;

    FusionRegion(double x0, double x1, double band_low, double band_high);

    bool operator==(const FusionRegion&) const = default;
};

/// Final per-object pipeline output.
struct FusedObject {
    std::string class_label;
    MotionState motion;
    Vec2 position;                  // meters, grid frame
    Vec2 velocity;                  // meters/second; exactly (0, 0) for static objects
    std::optional<double> heading;  // radians in (-pi, pi]; dynamic objects only
    long n_dynamic = 0;             // supporting point counts
    long n_static = 0;
    bool demoted = false;  // dynamic vote whose median velocity was exactly zero
    BoundingBox2D source_box;
    int frame_id = 0;

    FusedObject(std::string label, MotionState motion_state, Vec2 pos, Vec2 vel,
                std::optional<double> heading_rad, long dynamic_count, long static_count,
                bool was_demoted, BoundingBox2D box, int frame);

    bool operator==(const FusedObject&) const = default;
};

/// All inputs belonging to one frame.
struct FrameData {
    int frame_id = 0;
    std::vector<BoundingBox2D> detections;
    std::vector<GridPoint> points;

    FrameData(int frame, std::vector<BoundingBox2D> dets, std::vector<GridPoint> pts);
};

}  // namespace gridfusion
