#include "gridfusion/pfp.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <utility>

namespace gridfusion {

MotionState estimate_motion(const RegionAssignment& a) {
    if (a.dynamic_points.empty() && a.static_points.empty()) throw EmptyAssignmentError();
    return a.dynamic_points.size() >= a.static_points.size() ? MotionState::Dynamic
                                                             : MotionState::Static;
}

Vec2 median_2d(std::span<const Vec2> values) {
    if (values.empty()) throw EmptyInputError();
    const auto component_median = [&](auto get) {
        std::vector<double> v;
        v.reserve(values.size());
        for (const Vec2& value : values) v.push_back(get(value));
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
    };
    return {component_median([](const Vec2& v) { return v.x; }),
            component_median([](const Vec2& v) { return v.y; })};
}

double heading(double vx, double vy) {
    if (vx == 0.0 && vy == 0.0) throw ZeroVelocityError();
    const double h = std::atan2(vy, vx);
    // atan2 can land on -pi (e.g. vy = -0.0, vx < 0); fold it onto +pi.
    return h == -std::numbers::pi ? std::numbers::pi : h;
}

FusedObject extract_object(const RegionAssignment& a, int frame_id) {
    MotionState motion = estimate_motion(a);
    const std::vector<ProjectedPoint>& winners =
        motion == MotionState::Dynamic ? a.dynamic_points : a.static_points;

    std::vector<Vec2> positions;
    positions.reserve(winners.size());
    for (const ProjectedPoint& p : winners) positions.push_back({p.source.x_o, p.source.y_o});
    const Vec2 position = median_2d(positions);

    Vec2 velocity{0.0, 0.0};
    std::optional<double> object_heading;
    bool demoted = false;
    if (motion == MotionState::Dynamic) {
        std::vector<Vec2> velocities;
        velocities.reserve(winners.size());
        for (const ProjectedPoint& p : winners)
            velocities.push_back({p.source.vx_o, p.source.vy_o});
        velocity = median_2d(velocities);
        if (velocity.x == 0.0 && velocity.y == 0.0) {
            motion = MotionState::Static;  // heading undefined at zero velocity
            demoted = true;
        } else {
            object_heading = heading(velocity.x, velocity.y);
        }
    }

    return FusedObject(a.box.class_label, motion, position, velocity, object_heading,
                       long(a.dynamic_points.size()), long(a.static_points.size()), demoted,
                       a.box, frame_id);
}

std::vector<FusedObject> extract_objects(std::span<const RegionAssignment> assignments,
                                         int frame_id) {
    const std::ptrdiff_t n = std::ssize(assignments);
    std::vector<std::optional<FusedObject>> slots(static_cast<std::size_t>(n));

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        slots[std::size_t(i)].emplace(extract_object(assignments[std::size_t(i)], frame_id));

    std::vector<FusedObject> out;
    out.reserve(assignments.size());
    for (auto& slot : slots) out.push_back(std::move(*slot));
    return out;
}

}  // namespace gridfusion
