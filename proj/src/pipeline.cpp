#include "gridfusion/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <exception>

#include "gridfusion/fusion.hpp"
#include "gridfusion/io.hpp"
#include "gridfusion/pfp.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gridfusion {

namespace {

using Clock = std::chrono::steady_clock;

double order_statistic(const std::vector<double>& sorted, double quantile) {
    if (sorted.empty()) return 0.0;
    const double rank = std::ceil(quantile * double(sorted.size()));
    const std::size_t index = std::size_t(std::clamp(rank, 1.0, double(sorted.size()))) - 1;
    return sorted[index];
}

LatencyStats latency_stats(std::vector<double> samples) {
    if (samples.empty()) return {};
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    LatencyStats stats;
    stats.min_ms = samples.front();
    stats.max_ms = samples.back();
    stats.median_ms = n % 2 == 1 ? samples[n / 2] : (samples[n / 2 - 1] + samples[n / 2]) / 2.0;
    stats.p99_ms = order_statistic(samples, 0.99);
    return stats;
}

}  // namespace

FrameOutcome process_frame(const FrameData& frame, const CameraCalibration& calib) {
    const std::vector<ProjectedPoint> projected = project_frame(frame, calib);

    const auto start = Clock::now();
    const std::vector<RegionAssignment> assignments = fuse_frame(frame.detections, projected);
    std::vector<FusedObject> objects = extract_objects(assignments, frame.frame_id);
    const auto stop = Clock::now();

    return {std::move(objects), long(frame.detections.size()) - long(assignments.size()),
            std::chrono::duration<double, std::milli>(stop - start).count()};
}

RunResult run_frames(std::span<const FrameData> frames, const CameraCalibration& calib,
                     int workers) {
    const std::ptrdiff_t n = std::ssize(frames);
    std::vector<FrameOutcome> outcomes(static_cast<std::size_t>(n));

    if (workers == 1) {
        // Sequential frame loop; the per-frame kernels parallelize internally.
        for (std::ptrdiff_t i = 0; i < n; ++i)
            outcomes[std::size_t(i)] = process_frame(frames[std::size_t(i)], calib);
    } else {
#ifdef _OPENMP
        const int pool = workers > 0 ? workers : omp_get_max_threads();
        std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) num_threads(pool)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            try {
                outcomes[std::size_t(i)] = process_frame(frames[std::size_t(i)], calib);
            } catch (...) {
#pragma omp critical
                if (!error) error = std::current_exception();
            }
        }
        if (error) std::rethrow_exception(error);
#else
        for (std::ptrdiff_t i = 0; i < n; ++i)
            outcomes[std::size_t(i)] = process_frame(frames[std::size_t(i)], calib);
#endif
    }

    // In-order commit: results concatenate in frame order no matter which
    // worker finished first.
    RunResult result;
    std::vector<double> latencies;
    latencies.reserve(outcomes.size());
    for (FrameOutcome& outcome : outcomes) {
        result.report.discarded_regions += outcome.discarded_regions;
        latencies.push_back(outcome.fuse_pfp_ms);
        result.objects.insert(result.objects.end(),
                              std::make_move_iterator(outcome.objects.begin()),
                              std::make_move_iterator(outcome.objects.end()));
    }
    result.report.frames_processed = long(n);
    result.report.objects_emitted = long(result.objects.size());
    result.report.fuse_pfp = latency_stats(std::move(latencies));
    return result;
}

std::string format_report(const RunReport& report) {
    std::string out;
    out += "frames_processed=" + std::to_string(report.frames_processed);
    out += " objects_emitted=" + std::to_string(report.objects_emitted);
    out += " discarded_regions=" + std::to_string(report.discarded_regions);
    out += "\nfuse_pfp_latency_ms";
    out += " min=" + format_fixed(report.fuse_pfp.min_ms);
    out += " median=" + format_fixed(report.fuse_pfp.median_ms);
    out += " p99=" + format_fixed(report.fuse_pfp.p99_ms);
    out += " max=" + format_fixed(report.fuse_pfp.max_ms);
    out += '\n';
    return out;
}

}  // namespace gridfusion
