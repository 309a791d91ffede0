#include "gridfusion/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <utility>

#include "json.hpp"

#include "gridfusion/io.hpp"
#include "gridfusion/rng.hpp"

namespace gridfusion {

namespace {

/// Everything that reaches a fixture file is quantized to the writers'
/// 6-decimal precision, so file round trips are exact.
double q6(double v) { return std::round(v * 1e6) / 1e6; }

/// Deterministic symmetric point layout around an object center; odd counts
/// have their component-wise median exactly at the center.
Vec2 layout_offset(int k) {
    if (k == 0) return {0.0, 0.0};
    const int ring = (k + 1) / 2;
    const double sign = k % 2 == 1 ? 1.0 : -1.0;
    return {sign * 0.2 * double(ring), sign * 0.1 * double(ring)};
}

void validate(const SceneSpec& spec) {
    if (spec.n_frames < 0) throw InvariantError("scene: n_frames must be non-negative");
    const NoiseSpec& n = spec.noise;
    if (!(n.box_jitter_px >= 0.0) || !(n.point_jitter_m >= 0.0))
        throw InvariantError("scene: jitter std-devs must be non-negative");
    if (!(n.label_flip_prob >= 0.0 && n.label_flip_prob <= 1.0))
        throw InvariantError("scene: label flip probability must be in [0, 1]");
    for (const ObjectSpec& obj : spec.objects) {
        if (obj.points_per_object < 0)
            throw InvariantError("scene: points_per_object must be non-negative");
        if (obj.motion == MotionState::Static && obj.velocity != Vec2{0.0, 0.0})
            throw InvariantError("scene: static objects must have zero velocity");
        if (!std::isfinite(obj.position.x) || !std::isfinite(obj.position.y) ||
            !std::isfinite(obj.velocity.x) || !std::isfinite(obj.velocity.y))
            throw InvariantError("scene: object position and velocity must be finite");
    }
}

std::optional<Vec2> project_visible(const GridPoint& p, const CameraCalibration& calib) {
    const auto pixel = project_point(lift_grid_point(p, calib), calib);
    if (pixel && in_image(*pixel, calib)) return pixel;
    return std::nullopt;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

/// The expected-output oracle: direct per-point band membership, direct
/// cardinality vote and direct medians, written out independently of the
/// fusion and pfp modules.
void append_expected(std::vector<FusedObject>& out, int frame_id,
                     const std::vector<BoundingBox2D>& detections,
                     const std::vector<GridPoint>& points, const CameraCalibration& calib) {
    struct VisiblePoint {
        double px, py;
        const GridPoint* src;
    };
    std::vector<VisiblePoint> visible;
    visible.reserve(points.size());
    for (const GridPoint& p : points)
        if (const auto pixel = project_visible(p, calib)) visible.push_back({pixel->x, pixel->y, &p});

    for (const BoundingBox2D& box : detections) {
        const double below_bottom = (5.0 * box.y_max - box.y_min) / 4.0;
        const double above_bottom = (3.0 * box.y_max + box.y_min) / 4.0;
        const double band_low = std::min(above_bottom, below_bottom);
        const double band_high = std::max(above_bottom, below_bottom);

        std::vector<const GridPoint*> dynamic_set;
        std::vector<const GridPoint*> static_set;
        for (const VisiblePoint& p : visible) {
            const bool inside = box.x_min < p.px && p.px < box.x_max && band_low < p.py &&
                                p.py < band_high;
            if (!inside) continue;
            (p.src->state == MotionState::Dynamic ? dynamic_set : static_set).push_back(p.src);
        }
        if (dynamic_set.empty() && static_set.empty()) continue;

        const bool dynamic_wins = dynamic_set.size() >= static_set.size();
        const std::vector<const GridPoint*>& winners = dynamic_wins ? dynamic_set : static_set;

        std::vector<double> xs, ys;
        for (const GridPoint* p : winners) {
            xs.push_back(p->x_o);
            ys.push_back(p->y_o);
        }
        const Vec2 position{median_of(std::move(xs)), median_of(std::move(ys))};

        MotionState motion = dynamic_wins ? MotionState::Dynamic : MotionState::Static;
        Vec2 velocity{0.0, 0.0};
        std::optional<double> head;
        bool demoted = false;
        if (dynamic_wins) {
            std::vector<double> vxs, vys;
            for (const GridPoint* p : winners) {
                vxs.push_back(p->vx_o);
                vys.push_back(p->vy_o);
            }
            velocity = {median_of(std::move(vxs)), median_of(std::move(vys))};
            if (velocity.x == 0.0 && velocity.y == 0.0) {
                motion = MotionState::Static;
                demoted = true;
            } else {
                double h = std::atan2(velocity.y, velocity.x);
                if (h == -std::numbers::pi) h = std::numbers::pi;
                head = h;
            }
        }

        out.emplace_back(box.class_label, motion, position, velocity, head,
                         long(dynamic_set.size()), long(static_set.size()), demoted, box,
                         frame_id);
    }
}

}  // namespace

SceneSpec parse_scene_spec(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(ParseError::Kind::MalformedRecord, 0, 0,
                         std::string("scene spec: ") + e.what());
    }
    try {
        SceneSpec spec;
        spec.seed = doc.value("seed", std::uint64_t{0});
        spec.n_frames = doc.value("n_frames", 1);
        if (doc.contains("noise")) {
            const auto& noise = doc.at("noise");
            spec.noise.box_jitter_px = noise.value("box_jitter_px", 0.0);
            spec.noise.point_jitter_m = noise.value("point_jitter_m", 0.0);
            spec.noise.label_flip_prob = noise.value("label_flip_prob", 0.0);
        }
        if (doc.contains("objects")) {
            for (const auto& entry : doc.at("objects")) {
                ObjectSpec obj;
                obj.class_label = entry.at("class").get<std::string>();
                const std::string motion = entry.at("motion").get<std::string>();
                if (motion == "static") obj.motion = MotionState::Static;
                else if (motion == "dynamic") obj.motion = MotionState::Dynamic;
                else
                    throw ParseError(ParseError::Kind::MalformedRecord, 0, 0,
                                     "scene spec: motion must be \"static\" or \"dynamic\"");
                const auto& pos = entry.at("position");
                if (!pos.is_array() || pos.size() != 2)
                    throw ParseError(ParseError::Kind::MalformedRecord, 0, 0,
                                     "scene spec: position must be [x, y]");
                obj.position = {pos[0].get<double>(), pos[1].get<double>()};
                if (entry.contains("velocity")) {
                    const auto& vel = entry.at("velocity");
                    if (!vel.is_array() || vel.size() != 2)
                        throw ParseError(ParseError::Kind::MalformedRecord, 0, 0,
                                         "scene spec: velocity must be [vx, vy]");
                    obj.velocity = {vel[0].get<double>(), vel[1].get<double>()};
                }
                obj.points_per_object = entry.value("points", 0);
                spec.objects.push_back(std::move(obj));
            }
        }
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(ParseError::Kind::MalformedRecord, 0, 0,
                         std::string("scene spec: ") + e.what());
    }
}

GeneratedScene generate(const SceneSpec& spec, const CameraCalibration& calib) {
    validate(spec);
    Rng rng(spec.seed);
    constexpr double frame_dt = 0.1;  // seconds between synthetic frames

    GeneratedScene scene;
    for (int f = 0; f < spec.n_frames; ++f) {
        std::vector<BoundingBox2D> detections;
        std::vector<GridPoint> points;

        for (std::size_t oi = 0; oi < spec.objects.size(); ++oi) {
            const ObjectSpec& obj = spec.objects[oi];
            const double time = frame_dt * double(f);
            const Vec2 center{q6(obj.position.x + obj.velocity.x * time),
                              q6(obj.position.y + obj.velocity.y * time)};
            const Vec2 velocity{q6(obj.velocity.x), q6(obj.velocity.y)};

            const auto complain = [&](const char* reason) {
                throw UnprojectableError("frame " + std::to_string(f) + " object " +
                                         std::to_string(oi) + " (" + obj.class_label +
                                         "): " + reason);
            };

            const GridPoint probe(center.x, center.y, 0.0, 0.0, MotionState::Static);
            if (!project_visible(probe, calib))
                complain("center is behind the camera or outside the image");

            std::vector<GridPoint> object_points;
            object_points.reserve(std::size_t(obj.points_per_object));
            for (int k = 0; k < obj.points_per_object; ++k) {
                const Vec2 offset = layout_offset(k);
                const double px =
                    q6(center.x + offset.x + rng.gauss(0.0, spec.noise.point_jitter_m));
                const double py =
                    q6(center.y + offset.y + rng.gauss(0.0, spec.noise.point_jitter_m));
                MotionState state = obj.motion;
                double pvx = obj.motion == MotionState::Dynamic ? velocity.x : 0.0;
                double pvy = obj.motion == MotionState::Dynamic ? velocity.y : 0.0;
                if (rng.bernoulli(spec.noise.label_flip_prob)) {
                    // any flip lands on zero velocity: demoted points must obey
                    // the static invariant, promoted ones were static before
                    state = state == MotionState::Dynamic ? MotionState::Static
                                                          : MotionState::Dynamic;
                    pvx = 0.0;
                    pvy = 0.0;
                }
                object_points.emplace_back(px, py, pvx, pvy, state);
            }

            // Pixel extent of the points that survive projection drives the
            // box; the band then covers them with a 10 px margin (pre-noise).
            double px_min = 0, px_max = 0, py_min = 0, py_max = 0;
            bool any_visible = false;
            for (const GridPoint& p : object_points) {
                const auto pixel = project_visible(p, calib);
                if (!pixel) continue;
                if (!any_visible) {
                    px_min = px_max = pixel->x;
                    py_min = py_max = pixel->y;
                    any_visible = true;
                } else {
                    px_min = std::min(px_min, pixel->x);
                    px_max = std::max(px_max, pixel->x);
                    py_min = std::min(py_min, pixel->y);
                    py_max = std::max(py_max, pixel->y);
                }
            }
            if (!any_visible) {
                if (obj.points_per_object > 0) complain("no point projects into the image");
                const auto pixel = project_visible(probe, calib);
                px_min = px_max = pixel->x;
                py_min = py_max = pixel->y;
            }

            const double y_bottom = (py_min + py_max) / 2.0;
            const double box_height = std::max(2.0 * (py_max - py_min) + 40.0, 60.0);
            const double gx0 = q6(px_min - 10.0);
            const double gx1 = q6(px_max + 10.0);
            const double gy0 = q6(y_bottom - box_height);
            const double gy1 = q6(y_bottom);

            const double dx0 = q6(gx0 + rng.gauss(0.0, spec.noise.box_jitter_px));
            const double dy0 = q6(gy0 + rng.gauss(0.0, spec.noise.box_jitter_px));
            const double dx1 = q6(gx1 + rng.gauss(0.0, spec.noise.box_jitter_px));
            const double dy1 = q6(gy1 + rng.gauss(0.0, spec.noise.box_jitter_px));
            const double confidence = q6(rng.uniform(0.5, 0.99));

            detections.emplace_back(obj.class_label, confidence, dx0, dy0, dx1, dy1);
            scene.ground_truth.emplace_back(f, evaluation_label(obj.motion, obj.class_label),
                                            gx0, gy0, gx1, gy1, center.x);
            points.insert(points.end(), object_points.begin(), object_points.end());
        }

        append_expected(scene.expected, f, detections, points, calib);
        scene.frames.emplace_back(f, std::move(detections), std::move(points));
    }
    return scene;
}

void write_fixtures(const GeneratedScene& scene, const CameraCalibration& calib,
                    const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir / "labels");

    std::vector<std::pair<int, BoundingBox2D>> detections;
    std::vector<std::pair<int, GridPoint>> points;
    for (const FrameData& frame : scene.frames) {
        for (const BoundingBox2D& box : frame.detections)
            detections.emplace_back(frame.frame_id, box);
        for (const GridPoint& p : frame.points) points.emplace_back(frame.frame_id, p);
    }

    write_file(out_dir / "detections.csv", write_detections(detections));
    write_file(out_dir / "grid_points.csv", write_grid_points(points));
    write_file(out_dir / "calib.txt", write_calibration(calib));
    write_file(out_dir / "expected.jsonl", write_fused_objects(scene.expected));

    for (const FrameData& frame : scene.frames) {
        std::vector<GroundTruthObject> frame_gts;
        for (const GroundTruthObject& gt : scene.ground_truth)
            if (gt.frame_id == frame.frame_id) frame_gts.push_back(gt);
        char name[32];
        std::snprintf(name, sizeof(name), "%06d.txt", frame.frame_id);
        write_file(out_dir / "labels" / name, write_kitti_labels(frame_gts));
    }
}

}  // namespace gridfusion
