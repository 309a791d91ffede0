#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gridfusion/eval.hpp"
#include "gridfusion/projection.hpp"
#include "gridfusion/types.hpp"

namespace gridfusion {

/// Image size and ground height do not live in KITTI calibration files; they
/// are supplied alongside.
struct CalibrationOptions {
    int image_width = 1242;
    int image_height = 375;
    double ground_height = -1.73;
};

/// KITTI calibration text: "KEY: v1 v2 ..." lines. Requires P2 (3x4,
/// intrinsics from its left 3x3), R0_rect (3x3) and Tr_velo_to_cam (3x4);
/// unknown keys are ignored.
CameraCalibration parse_calibration(std::string_view text,
                                    const CalibrationOptions& options = {});
std::string write_calibration(const CameraCalibration& calib);

/// CSV, one record per line: frame_id,class,confidence,x_min,y_min,x_max,y_max.
/// Blank lines and lines starting with '#' are skipped.
std::vector<std::pair<int, BoundingBox2D>> parse_detections(std::string_view text);
std::string write_detections(std::span<const std::pair<int, BoundingBox2D>> detections);

/// CSV, one record per line: frame_id,x_o,y_o,vx_o,vy_o,state with state in
/// {S, D}. A static record with nonzero velocity is rejected.
std::vector<std::pair<int, GridPoint>> parse_grid_points(std::string_view text);
std::string write_grid_points(std::span<const std::pair<int, GridPoint>> points);

/// Line-delimited JSON records, fixed field order, numbers at 6 decimal
/// places. Static objects omit the heading field. Re-parsing reproduces the
/// objects exactly at that precision.
std::string write_fused_objects(std::span<const FusedObject> objects);
std::vector<FusedObject> parse_fused_objects(std::string_view text);

/// KITTI label format: whitespace-separated, type in column 1, 2D box in
/// columns 5-8, optional 3D location in columns 12-14 whose z is the
/// longitudinal distance. DontCare rows are skipped.
std::vector<GroundTruthObject> parse_kitti_labels(std::string_view text, int frame_id);
std::string write_kitti_labels(std::span<const GroundTruthObject> objects);

/// Groups flat (frame, record) lists into per-frame data, ascending frame id.
/// Frames appearing in either list are included.
std::vector<FrameData> assemble_frames(std::span<const std::pair<int, BoundingBox2D>> detections,
                                       std::span<const std::pair<int, GridPoint>> points);

/// key=value lines; '#' comments and blank lines ignored; later keys win.
std::map<std::string, std::string> parse_config(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Reads every numeric-named .txt label file in a KITTI-style directory; the
/// file stem is the frame id.
std::vector<GroundTruthObject> load_labels_dir(const std::filesystem::path& dir);

/// Fixed 6-decimal formatting shared by all writers ('.' separator, locale
/// independent).
std::string format_fixed(double value);
void append_fixed(std::string& out, double value);

struct DatasetLayout {
    std::filesystem::path detections_path;
    std::filesystem::path grid_path;
    std::filesystem::path labels_path;
    std::filesystem::path calib_path;
    std::filesystem::path output_path;
};

}  // namespace gridfusion
