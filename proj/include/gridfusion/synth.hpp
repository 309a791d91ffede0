#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gridfusion/eval.hpp"
#include "gridfusion/projection.hpp"
#include "gridfusion/types.hpp"

namespace gridfusion {

struct ObjectSpec {
    std::string class_label;  // detector-style label, e.g. "car"
    MotionState motion = MotionState::Static;
    Vec2 position;             // grid frame, meters (first frame)
    Vec2 velocity;             // meters/second; must be zero for static objects
    int points_per_object = 0;
};

struct NoiseSpec {
    double box_jitter_px = 0.0;    // std-dev added to box corners
    double point_jitter_m = 0.0;   // std-dev added to point positions
    double label_flip_prob = 0.0;  // per-point motion-state flip probability
};

struct SceneSpec {
    std::uint64_t seed = 0;
    int n_frames = 1;
    std::vector<ObjectSpec> objects;  // placed in every frame, advanced by velocity
    NoiseSpec noise;
};

/// JSON scene description; see README for the schema.
SceneSpec parse_scene_spec(std::string_view json_text);

struct GeneratedScene {
    std::vector<FrameData> frames;
    std::vector<GroundTruthObject> ground_truth;
    /// What the pipeline must output, computed by an independent brute-force
    /// pass over the generated data, never by the pipeline itself.
    std::vector<FusedObject> expected;
};

/// Deterministic scene generation for a given seed. Every value that reaches
/// a fixture file is quantized to 6 decimals up front, so the in-memory
/// scene, the written files and the expected output stay bit-consistent.
/// Objects that land behind the camera or outside the image raise
/// UnprojectableError naming the frame and object.
GeneratedScene generate(const SceneSpec& spec, const CameraCalibration& calib);

/// Writes detections.csv, grid_points.csv, calib.txt, labels/<frame>.txt and
/// expected.jsonl under out_dir, using the standard formats.
void write_fixtures(const GeneratedScene& scene, const CameraCalibration& calib,
                    const std::filesystem::path& out_dir);

}  // namespace gridfusion
