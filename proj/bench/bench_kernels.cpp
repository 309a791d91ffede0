// Benchmark comparing the OpenMP kernels against their serial references on
// the projection, fusion and feature-extraction stages.
//
//   bench_kernels [--boxes N] [--points N] [--reps N]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gridfusion/fusion.hpp"
#include "gridfusion/pfp.hpp"
#include "gridfusion/projection.hpp"
#include "gridfusion/reference.hpp"
#include "gridfusion/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace gridfusion;
using Clock = std::chrono::steady_clock;

namespace {

struct Workload {
    CameraCalibration calib;
    std::vector<GridPoint> grid_points;
    std::vector<BoundingBox2D> boxes;
    std::vector<ProjectedPoint> projected;
};

Workload make_workload(int n_boxes, int n_points, std::uint64_t seed) {
    // constant-depth calibration: every grid point projects inside the image
    Workload w{CameraCalibration(1000.0, 1000.0, 621.0, 187.5, Mat3::identity(),
                                 RigidTransform{}, 1242, 375, 10.0),
               {}, {}, {}};
    Rng rng(seed);
    w.grid_points.reserve(std::size_t(n_points));
    for (int i = 0; i < n_points; ++i) {
        const bool dynamic = rng.bernoulli(0.5);
        w.grid_points.emplace_back(rng.uniform(-6.0, 6.0), rng.uniform(-1.8, 1.8),
                                   dynamic ? rng.uniform(-10.0, 10.0) : 0.0,
                                   dynamic ? rng.uniform(-3.0, 3.0) : 0.0,
                                   dynamic ? MotionState::Dynamic : MotionState::Static);
    }
    w.boxes.reserve(std::size_t(n_boxes));
    for (int i = 0; i < n_boxes; ++i) {
        const double x0 = rng.uniform(0.0, 1000.0);
        const double y0 = rng.uniform(0.0, 280.0);
        w.boxes.emplace_back("car", rng.uniform(0.0, 1.0), x0, y0,
                             x0 + rng.uniform(60.0, 240.0), y0 + rng.uniform(50.0, 90.0));
    }
    w.projected = serial::project_frame(w.grid_points, w.calib);
    return w;
}

template <typename Fn>
double median_ms(int reps, Fn&& fn) {
    std::vector<double> times;
    times.reserve(std::size_t(reps));
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        fn();
        const auto t1 = Clock::now();
        times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

}  // namespace

int main(int argc, char** argv) {
    int n_boxes = 50;
    int n_points = 10000;
    int reps = 20;
    CLI::App app{"serial vs OpenMP kernel benchmark"};
    app.add_option("--boxes", n_boxes, "detections per frame");
    app.add_option("--points", n_points, "grid points per frame");
    app.add_option("--reps", reps, "repetitions per measurement");
    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("openmp: disabled at build time\n");
#endif
    std::printf("workload: %d boxes x %d points, %d reps, median times\n\n", n_boxes, n_points,
                reps);

    const Workload w = make_workload(n_boxes, n_points, 12345);

    // correctness cross-check before timing anything
    const auto serial_fused = serial::fuse_frame(w.boxes, w.projected);
    const auto parallel_fused = fuse_frame(w.boxes, w.projected);
    bool equal = serial_fused.size() == parallel_fused.size();
    for (std::size_t i = 0; equal && i < serial_fused.size(); ++i)
        equal = serial_fused[i].dynamic_points == parallel_fused[i].dynamic_points &&
                serial_fused[i].static_points == parallel_fused[i].static_points;
    if (!equal || serial::project_frame(w.grid_points, w.calib) !=
                      project_frame(w.grid_points, w.calib)) {
        std::fprintf(stderr, "kernel outputs diverge; refusing to benchmark\n");
        return 1;
    }

    const double project_serial =
        median_ms(reps, [&] { (void)serial::project_frame(w.grid_points, w.calib); });
    const double project_parallel =
        median_ms(reps, [&] { (void)project_frame(w.grid_points, w.calib); });

    const double fuse_serial =
        median_ms(reps, [&] { (void)serial::fuse_frame(w.boxes, w.projected); });
    const double fuse_parallel = median_ms(reps, [&] { (void)fuse_frame(w.boxes, w.projected); });

    const double extract_serial =
        median_ms(reps, [&] { (void)serial::extract_objects(serial_fused, 0); });
    const double extract_parallel =
        median_ms(reps, [&] { (void)extract_objects(serial_fused, 0); });

    const double pipeline_serial = median_ms(reps, [&] {
        const auto assignments = serial::fuse_frame(w.boxes, w.projected);
        (void)serial::extract_objects(assignments, 0);
    });
    const double pipeline_parallel = median_ms(reps, [&] {
        const auto assignments = fuse_frame(w.boxes, w.projected);
        (void)extract_objects(assignments, 0);
    });

    const auto row = [](const char* name, double serial_time, double parallel_time) {
        std::printf("%-14s serial %8.3f ms   openmp %8.3f ms   speedup %.2fx\n", name,
                    serial_time, parallel_time,
                    parallel_time > 0.0 ? serial_time / parallel_time : 0.0);
    };
    row("project", project_serial, project_parallel);
    row("fuse", fuse_serial, fuse_parallel);
    row("extract", extract_serial, extract_parallel);
    row("fuse+extract", pipeline_serial, pipeline_parallel);
    return 0;
}
