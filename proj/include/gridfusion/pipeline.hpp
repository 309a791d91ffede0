#pragma once

#include <span>
#include <string>
#include <vector>

#include "gridfusion/projection.hpp"
#include "gridfusion/types.hpp"

namespace gridfusion {

struct LatencyStats {
    double min_ms = 0.0;
    double median_ms = 0.0;
    double p99_ms = 0.0;
    double max_ms = 0.0;
};

struct RunReport {
    long frames_processed = 0;
    long objects_emitted = 0;
    long discarded_regions = 0;
    LatencyStats fuse_pfp;  // per-frame fuse + feature-extraction latency
};

struct FrameOutcome {
    std::vector<FusedObject> objects;
    long discarded_regions = 0;
    double fuse_pfp_ms = 0.0;
};

/// project -> fuse -> extract for one frame. The reported latency covers the
/// fusion and feature-extraction stages (projection excluded).
FrameOutcome process_frame(const FrameData& frame, const CameraCalibration& calib);

struct RunResult {
    std::vector<FusedObject> objects;  // frame order, detection order within a frame
    RunReport report;
};

/// Worker pool over frames with in-order commit: output order is independent
/// of the worker count. workers = 1 processes frames sequentially and lets
/// the per-frame kernels parallelize internally; workers <= 0 uses the
/// OpenMP default thread count for the frame pool.
RunResult run_frames(std::span<const FrameData> frames, const CameraCalibration& calib,
                     int workers = 0);

std::string format_report(const RunReport& report);

}  // namespace gridfusion
