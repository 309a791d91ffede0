#include "gridfusion/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <system_error>

#include "json.hpp"

namespace gridfusion {

namespace {

using Kind = ParseError::Kind;

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool skippable(std::string_view line) {
    const std::string_view t = trim(line);
    return t.empty() || t.front() == '#';
}

// Calls fn(line_number, line) for every line; line numbers are 1-based.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t line_number = 1;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = text.find('\n', start);
        std::string_view line = end == std::string_view::npos ? text.substr(start)
                                                              : text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (end == std::string_view::npos) {
            if (!line.empty()) fn(line_number, line);
            break;
        }
        fn(line_number, line);
        ++line_number;
        start = end + 1;
    }
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t end = s.find(sep, start);
        if (end == std::string_view::npos) {
            fields.push_back(s.substr(start));
            return fields;
        }
        fields.push_back(s.substr(start, end - start));
        start = end + 1;
    }
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) fields.push_back(s.substr(start, i - start));
    }
    return fields;
}

// Whole-token, locale-independent double parse. Rejects NaN and infinities.
std::optional<double> try_parse_double(std::string_view token) {
    const double parsed = [&]() -> double {
        double value = 0.0;
        const char* begin = token.data();
        const char* end = begin + token.size();
        const auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr != end) return std::numeric_limits<double>::quiet_NaN();
        return value;
    }();
    if (!std::isfinite(parsed)) return std::nullopt;
    return parsed;
}

std::optional<long> try_parse_long(std::string_view token) {
    long value = 0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return value;
}

// CSV field parse helpers reporting MalformedRecord on failure.
double csv_double(std::string_view field, std::size_t line) {
    const auto value = try_parse_double(trim(field));
    if (!value)
        throw ParseError(Kind::MalformedRecord, line, 0,
                         "line " + std::to_string(line) + ": malformed number \"" +
                             std::string(trim(field)) + "\"");
    return *value;
}

long csv_long(std::string_view field, std::size_t line) {
    const auto value = try_parse_long(trim(field));
    if (!value)
        throw ParseError(Kind::MalformedRecord, line, 0,
                         "line " + std::to_string(line) + ": malformed integer \"" +
                             std::string(trim(field)) + "\"");
    return *value;
}

void append_exact(std::string& out, double value) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof(buf), value);
    out.append(buf, r.ptr);
}

std::string json_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string format_fixed(double value) {
    std::string out;
    append_fixed(out, value);
    return out;
}

void append_fixed(std::string& out, double value) {
    char buf[400];  // fixed formatting of large magnitudes needs room
    const auto r = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, 6);
    out.append(buf, r.ptr);
}

CameraCalibration parse_calibration(std::string_view text, const CalibrationOptions& options) {
    std::optional<std::vector<double>> p2, r0, tr;

    for_each_line(text, [&](std::size_t line_number, std::string_view line) {
        if (skippable(line)) return;
        const std::size_t colon = line.find(':');
        if (colon == std::string_view::npos) return;  // keyless junk, ignore
        const std::string_view key = trim(line.substr(0, colon));
        const std::string_view rest = line.substr(colon + 1);

        std::size_t expected = 0;
        std::optional<std::vector<double>>* slot = nullptr;
        if (key == "P2") { slot = &p2; expected = 12; }
        else if (key == "R0_rect") { slot = &r0; expected = 9; }
        else if (key == "Tr_velo_to_cam") { slot = &tr; expected = 12; }
        else return;  // unknown key

        std::vector<double> values;
        for (const std::string_view token : split_whitespace(rest)) {
            const auto value = try_parse_double(token);
            if (!value) {
                const std::size_t column = std::size_t(token.data() - line.data()) + 1;
                throw ParseError(Kind::MalformedNumber, line_number, column,
                                 "line " + std::to_string(line_number) + ", column " +
                                     std::to_string(column) + ": malformed number \"" +
                                     std::string(token) + "\" in key \"" + std::string(key) + "\"");
            }
            values.push_back(*value);
        }
        if (values.size() != expected)
            throw ParseError(Kind::WrongArity, line_number, 0,
                             "key \"" + std::string(key) + "\" expects " +
                                 std::to_string(expected) + " values, got " +
                                 std::to_string(values.size()));
        *slot = std::move(values);
    });

    const auto require_key = [](const auto& slot, const char* name) {
        if (!slot)
            throw ParseError(Kind::MissingKey, 0, 0,
                             std::string("missing key \"") + name + "\"");
    };
    require_key(p2, "P2");
    require_key(r0, "R0_rect");
    require_key(tr, "Tr_velo_to_cam");

    const std::vector<double>& p = *p2;
    if (p[1] != 0.0) throw InvariantError("calibration: nonzero skew is unsupported");

    Mat3 rectification{{(*r0)[0], (*r0)[1], (*r0)[2], (*r0)[3], (*r0)[4], (*r0)[5], (*r0)[6],
                        (*r0)[7], (*r0)[8]}};
    const std::vector<double>& t = *tr;
    RigidTransform grid_to_camera{Mat3{{t[0], t[1], t[2], t[4], t[5], t[6], t[8], t[9], t[10]}},
                                  Vec3{t[3], t[7], t[11]}};

    return CameraCalibration(p[0], p[5], p[2], p[6], rectification, grid_to_camera,
                             options.image_width, options.image_height, options.ground_height);
}

std::string write_calibration(const CameraCalibration& calib) {
    std::string out;
    const auto row = [&](std::string_view key, std::initializer_list<double> values) {
        out += key;
        out += ':';
        for (const double v : values) {
            out += ' ';
            append_exact(out, v);
        }
        out += '\n';
    };
    row("P2", {calib.fx, 0.0, calib.cx, 0.0, 0.0, calib.fy, calib.cy, 0.0, 0.0, 0.0, 1.0, 0.0});
    const Mat3& r = calib.rectification;
    row("R0_rect", {r.m[0], r.m[1], r.m[2], r.m[3], r.m[4], r.m[5], r.m[6], r.m[7], r.m[8]});
    const Mat3& g = calib.grid_to_camera.rotation;
    const Vec3& t = calib.grid_to_camera.translation;
    row("Tr_velo_to_cam",
        {g.m[0], g.m[1], g.m[2], t.x, g.m[3], g.m[4], g.m[5], t.y, g.m[6], g.m[7], g.m[8], t.z});
    return out;
}

std::vector<std::pair<int, BoundingBox2D>> parse_detections(std::string_view text) {
    std::vector<std::pair<int, BoundingBox2D>> out;
    for_each_line(text, [&](std::size_t line_number, std::string_view line) {
        if (skippable(line)) return;
        const auto fields = split(line, ',');
        if (fields.size() != 7)
            throw ParseError(Kind::MalformedRecord, line_number, 0,
                             "line " + std::to_string(line_number) +
                                 ": detection record needs 7 fields, got " +
                                 std::to_string(fields.size()));
        const long frame = csv_long(fields[0], line_number);
        if (frame < 0)
            throw ParseError(Kind::InvariantViolation, line_number, 0,
                             "line " + std::to_string(line_number) + ": negative frame id");
        try {
            out.emplace_back(int(frame),
                             BoundingBox2D(std::string(trim(fields[1])),
                                           csv_double(fields[2], line_number),
                                           csv_double(fields[3], line_number),
                                           csv_double(fields[4], line_number),
                                           csv_double(fields[5], line_number),
                                           csv_double(fields[6], line_number)));
        } catch (const InvariantError& e) {
            throw ParseError(Kind::InvariantViolation, line_number, 0,
                             "line " + std::to_string(line_number) + ": " + e.what());
        }
    });
    return out;
}

std::string write_detections(std::span<const std::pair<int, BoundingBox2D>> detections) {
    std::string out;
    for (const auto& [frame, box] : detections) {
        out += std::to_string(frame);
        out += ',';
        out += box.class_label;
        out += ',';
        append_fixed(out, box.confidence);
        out += ',';
        append_fixed(out, box.x_min);
        out += ',';
        append_fixed(out, box.y_min);
        out += ',';
        append_fixed(out, box.x_max);
        out += ',';
        append_fixed(out, box.y_max);
        out += '\n';
    }
    return out;
}

std::vector<std::pair<int, GridPoint>> parse_grid_points(std::string_view text) {
    std::vector<std::pair<int, GridPoint>> out;
    for_each_line(text, [&](std::size_t line_number, std::string_view line) {
        if (skippable(line)) return;
        const auto fields = split(line, ',');
        if (fields.size() != 6)
            throw ParseError(Kind::MalformedRecord, line_number, 0,
                             "line " + std::to_string(line_number) +
                                 ": grid-point record needs 6 fields, got " +
                                 std::to_string(fields.size()));
        const long frame = csv_long(fields[0], line_number);
        if (frame < 0)
            throw ParseError(Kind::InvariantViolation, line_number, 0,
                             "line " + std::to_string(line_number) + ": negative frame id");
        const std::string_view state_field = trim(fields[5]);
        MotionState state;
        if (state_field == "S") state = MotionState::Static;
        else if (state_field == "D") state = MotionState::Dynamic;
        else
            throw ParseError(Kind::MalformedRecord, line_number, 0,
                             "line " + std::to_string(line_number) + ": state must be S or D, got \"" +
                                 std::string(state_field) + "\"");
        const double x = csv_double(fields[1], line_number);
        const double y = csv_double(fields[2], line_number);
        const double vx = csv_double(fields[3], line_number);
        const double vy = csv_double(fields[4], line_number);
        if (state == MotionState::Static && (vx != 0.0 || vy != 0.0))
            throw ParseError(Kind::StaticWithVelocity, line_number, 0,
                             "line " + std::to_string(line_number) +
                                 ": static point carries nonzero velocity");
        try {
            out.emplace_back(int(frame), GridPoint(x, y, vx, vy, state));
        } catch (const InvariantError& e) {
            throw ParseError(Kind::InvariantViolation, line_number, 0,
                             "line " + std::to_string(line_number) + ": " + e.what());
        }
    });
    return out;
}

std::string write_grid_points(std::span<const std::pair<int, GridPoint>> points) {
    std::string out;
    for (const auto& [frame, p] : points) {
        out += std::to_string(frame);
        out += ',';
        append_fixed(out, p.x_o);
        out += ',';
        append_fixed(out, p.y_o);
        out += ',';
        append_fixed(out, p.vx_o);
        out += ',';
        append_fixed(out, p.vy_o);
        out += ',';
        out += p.state == MotionState::Dynamic ? 'D' : 'S';
        out += '\n';
    }
    return out;
}

std::string write_fused_objects(std::span<const FusedObject> objects) {
    std::string out;
    for (const FusedObject& o : objects) {
        out += "{\"frame\":";
        out += std::to_string(o.frame_id);
        out += ",\"class\":\"";
        out += json_escape(o.class_label);
        out += "\",\"motion\":\"";
        out += to_string(o.motion);
        out += "\",\"x\":";
        append_fixed(out, o.position.x);
        out += ",\"y\":";
        append_fixed(out, o.position.y);
        out += ",\"vx\":";
        append_fixed(out, o.velocity.x);
        out += ",\"vy\":";
        append_fixed(out, o.velocity.y);
        if (o.heading) {
            out += ",\"heading\":";
            append_fixed(out, *o.heading);
        }
        out += ",\"n_dynamic\":";
        out += std::to_string(o.n_dynamic);
        out += ",\"n_static\":";
        out += std::to_string(o.n_static);
        out += ",\"demoted\":";
        out += o.demoted ? "true" : "false";
        out += ",\"confidence\":";
        append_fixed(out, o.source_box.confidence);
        out += ",\"box\":[";
        append_fixed(out, o.source_box.x_min);
        out += ',';
        append_fixed(out, o.source_box.y_min);
        out += ',';
        append_fixed(out, o.source_box.x_max);
        out += ',';
        append_fixed(out, o.source_box.y_max);
        out += "]}\n";
    }
    return out;
}

std::vector<FusedObject> parse_fused_objects(std::string_view text) {
    std::vector<FusedObject> out;
    for_each_line(text, [&](std::size_t line_number, std::string_view line) {
        if (skippable(line)) return;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(Kind::MalformedRecord, line_number, 0,
                             "line " + std::to_string(line_number) + ": " + e.what());
        }
        try {
            const std::string motion_text = record.at("motion").get<std::string>();
            MotionState motion;
            if (motion_text == "static") motion = MotionState::Static;
            else if (motion_text == "dynamic") motion = MotionState::Dynamic;
            else
                throw ParseError(Kind::MalformedRecord, line_number, 0,
                                 "line " + std::to_string(line_number) +
                                     ": motion must be static or dynamic");
            std::optional<double> heading;
            if (record.contains("heading")) heading = record.at("heading").get<double>();
            const auto& box = record.at("box");
            if (!box.is_array() || box.size() != 4)
                throw ParseError(Kind::MalformedRecord, line_number, 0,
                                 "line " + std::to_string(line_number) + ": box must have 4 numbers");
            out.emplace_back(record.at("class").get<std::string>(), motion,
                             Vec2{record.at("x").get<double>(), record.at("y").get<double>()},
                             Vec2{record.at("vx").get<double>(), record.at("vy").get<double>()},
                             heading, record.at("n_dynamic").get<long>(),
                             record.at("n_static").get<long>(), record.at("demoted").get<bool>(),
                             BoundingBox2D(record.at("class").get<std::string>(),
                                           record.at("confidence").get<double>(),
                                           box[0].get<double>(), box[1].get<double>(),
                                           box[2].get<double>(), box[3].get<double>()),
                             record.at("frame").get<int>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(Kind::MalformedRecord, line_number, 0,
                             "line " + std::to_string(line_number) + ": " + e.what());
        } catch (const InvariantError& e) {
            throw ParseError(Kind::InvariantViolation, line_number, 0,
                             "line " + std::to_string(line_number) + ": " + e.what());
        }
    });
    return out;
}

std::vector<GroundTruthObject> parse_kitti_labels(std::string_view text, int frame_id) {
    std::vector<GroundTruthObject> out;
    for_each_line(text, [&](std::size_t line_number, std::string_view line) {
        if (skippable(line)) return;
        const auto fields = split_whitespace(line);
        if (fields.size() < 8)
            throw ParseError(Kind::MalformedRecord, line_number, 0,
                             "line " + std::to_string(line_number) +
                                 ": label record needs at least 8 fields, got " +
                                 std::to_string(fields.size()));
        const std::string type(fields[0]);
        if (type == "DontCare") return;
        std::optional<double> distance;
        if (fields.size() >= 14) distance = csv_double(fields[13], line_number);
        try {
            out.emplace_back(frame_id, type, csv_double(fields[4], line_number),
                             csv_double(fields[5], line_number),
                             csv_double(fields[6], line_number),
                             csv_double(fields[7], line_number), distance);
        } catch (const InvariantError& e) {
            throw ParseError(Kind::InvariantViolation, line_number, 0,
                             "line " + std::to_string(line_number) + ": " + e.what());
        }
    });
    return out;
}

std::string write_kitti_labels(std::span<const GroundTruthObject> objects) {
    std::string out;
    for (const GroundTruthObject& gt : objects) {
        out += gt.class_label;
        out += " 0 0 0 ";
        append_fixed(out, gt.box.x_min);
        out += ' ';
        append_fixed(out, gt.box.y_min);
        out += ' ';
        append_fixed(out, gt.box.x_max);
        out += ' ';
        append_fixed(out, gt.box.y_max);
        if (gt.longitudinal_distance) {
            out += " 0 0 0 0 0 ";
            append_fixed(out, *gt.longitudinal_distance);
            out += " 0";
        }
        out += '\n';
    }
    return out;
}

std::vector<FrameData> assemble_frames(
    std::span<const std::pair<int, BoundingBox2D>> detections,
    std::span<const std::pair<int, GridPoint>> points) {
    std::map<int, std::pair<std::vector<BoundingBox2D>, std::vector<GridPoint>>> by_frame;
    for (const auto& [frame, box] : detections) by_frame[frame].first.push_back(box);
    for (const auto& [frame, point] : points) by_frame[frame].second.push_back(point);

    std::vector<FrameData> frames;
    frames.reserve(by_frame.size());
    for (auto& [frame, data] : by_frame)
        frames.emplace_back(frame, std::move(data.first), std::move(data.second));
    return frames;
}

std::map<std::string, std::string> parse_config(std::string_view text) {
    std::map<std::string, std::string> out;
    for_each_line(text, [&](std::size_t line_number, std::string_view line) {
        if (skippable(line)) return;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(Kind::MalformedRecord, line_number, 0,
                             "line " + std::to_string(line_number) +
                                 ": expected key=value");
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty())
            throw ParseError(Kind::MalformedRecord, line_number, 0,
                             "line " + std::to_string(line_number) + ": empty key");
        out[key] = std::string(trim(line.substr(eq + 1)));
    });
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw std::runtime_error("failed reading " + path.string());
    return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<GroundTruthObject> load_labels_dir(const std::filesystem::path& dir) {
    std::vector<std::pair<int, std::filesystem::path>> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        const std::string stem = entry.path().stem().string();
        if (stem.empty() ||
            !std::all_of(stem.begin(), stem.end(),
                         [](unsigned char c) { return std::isdigit(c); }))
            continue;
        files.emplace_back(std::stoi(stem), entry.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<GroundTruthObject> out;
    for (const auto& [frame, path] : files) {
        auto frame_objects = parse_kitti_labels(read_file(path), frame);
        out.insert(out.end(), std::make_move_iterator(frame_objects.begin()),
                   std::make_move_iterator(frame_objects.end()));
    }
    return out;
}

}  // namespace gridfusion
