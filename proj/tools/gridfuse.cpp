#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "gridfusion/eval.hpp"
#include "gridfusion/io.hpp"
#include "gridfusion/pipeline.hpp"
#include "gridfusion/synth.hpp"

namespace fs = std::filesystem;
using namespace gridfusion;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitInternalError = 2;

/// CLI flag > config file > default.
class Settings {
public:
    Settings(const CLI::App& app, const std::string& config_path) : app_(app) {
        if (!config_path.empty()) config_ = parse_config(read_file(config_path));
    }

    template <typename T>
    T resolve(const std::string& flag, const std::string& key, T flag_value, T fallback) const {
        if (app_.count(flag) > 0) return flag_value;
        if (const auto it = config_.find(key); it != config_.end()) return parse_value<T>(key, it->second);
        return fallback;
    }

    std::string resolve_path(const std::string& flag, const std::string& key,
                             const std::string& flag_value) const {
        return resolve<std::string>(flag, key, flag_value, flag_value);
    }

private:
    template <typename T>
    static T parse_value(const std::string& key, const std::string& text) {
        if constexpr (std::is_same_v<T, std::string>) {
            return text;
        } else {
            T value{};
            try {
                if constexpr (std::is_integral_v<T>) value = T(std::stol(text));
                else value = T(std::stod(text));
            } catch (const std::exception&) {
                throw ParseError(ParseError::Kind::MalformedRecord, 0, 0,
                                 "config: bad value for " + key + ": \"" + text + "\"");
            }
            return value;
        }
    }

    const CLI::App& app_;
    std::map<std::string, std::string> config_;
};

std::string parse_error_context(const fs::path& file, const ParseError& e) {
    std::string where = file.string();
    if (e.line() > 0) where += ":" + std::to_string(e.line());
    return where + ": " + e.what();
}

struct CalibFlags {
    std::string calib_path;
    double ground_height = -1.73;
    int image_width = 1242;
    int image_height = 375;
};

void add_calib_flags(CLI::App* cmd, CalibFlags& flags, bool calib_required) {
    auto* opt = cmd->add_option("--calib", flags.calib_path, "KITTI calibration file");
    if (calib_required) opt->required();
    cmd->add_option("--ground-height", flags.ground_height,
                    "z offset applied to grid points before projection (m)");
    cmd->add_option("--image-width", flags.image_width, "image width in pixels");
    cmd->add_option("--image-height", flags.image_height, "image height in pixels");
}

CameraCalibration load_calibration(const Settings& settings, const CalibFlags& flags) {
    const std::string path =
        settings.resolve_path("--calib", "calib", flags.calib_path);
    if (path.empty())
        throw std::runtime_error("no calibration file given (--calib or config key calib)");
    CalibrationOptions options;
    options.ground_height =
        settings.resolve("--ground-height", "ground_height", flags.ground_height, -1.73);
    options.image_width = settings.resolve("--image-width", "image_width", flags.image_width, 1242);
    options.image_height =
        settings.resolve("--image-height", "image_height", flags.image_height, 375);
    try {
        return parse_calibration(read_file(path), options);
    } catch (const ParseError& e) {
        throw std::runtime_error(parse_error_context(path, e));
    }
}

int run_fuse(const CLI::App& cmd, const std::string& config_path, const std::string& detections_path,
             const std::string& grid_path, const std::string& output_flag, const CalibFlags& calib_flags,
             int workers_flag) {
    std::vector<FrameData> frames;
    std::optional<CameraCalibration> calib;
    DatasetLayout layout;
    int workers = 0;
    try {
        const Settings settings(cmd, config_path);
        layout.detections_path = detections_path;
        layout.grid_path = grid_path;
        layout.calib_path = settings.resolve_path("--calib", "calib", calib_flags.calib_path);
        layout.output_path = settings.resolve_path("--output", "output", output_flag);
        if (layout.output_path.empty())
            throw std::runtime_error("no output file given (--output or config key output)");
        workers = settings.resolve("--workers", "workers", workers_flag, 0);
        calib = load_calibration(settings, calib_flags);

        std::vector<std::pair<int, BoundingBox2D>> detections;
        try {
            detections = parse_detections(read_file(layout.detections_path));
        } catch (const ParseError& e) {
            throw std::runtime_error(parse_error_context(layout.detections_path, e));
        }
        std::vector<std::pair<int, GridPoint>> points;
        try {
            points = parse_grid_points(read_file(layout.grid_path));
        } catch (const ParseError& e) {
            throw std::runtime_error(parse_error_context(layout.grid_path, e));
        }
        frames = assemble_frames(detections, points);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    try {
        const RunResult result = run_frames(frames, *calib, workers);
        write_file(layout.output_path, write_fused_objects(result.objects));
        std::cerr << format_report(result.report);
        return kExitOk;
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

int run_eval(const CLI::App& cmd, const std::string& config_path, const std::string& predictions_path,
             const std::string& labels_path, const std::string& report_flag,
             const std::string& pr_curve_flag, double iou_flag, double cutoff_flag,
             bool eleven_point) {
    EvaluationResult result;
    std::string report_path, pr_curve_path;
    try {
        const Settings settings(cmd, config_path);
        EvalConfig config;
        config.iou_threshold = settings.resolve("--iou-threshold", "iou_threshold", iou_flag, 0.5);
        config.cutoff_m = settings.resolve("--cutoff-m", "cutoff_m", cutoff_flag, 30.0);
        config.interpolation =
            eleven_point ? ApInterpolation::ElevenPoint : ApInterpolation::AllPoint;
        report_path = settings.resolve_path("--output", "output", report_flag);
        pr_curve_path = pr_curve_flag;

        std::vector<PredictedObject> predictions;
        try {
            for (const FusedObject& object : parse_fused_objects(read_file(predictions_path)))
                predictions.push_back(to_prediction(object));
        } catch (const ParseError& e) {
            throw std::runtime_error(parse_error_context(predictions_path, e));
        }

        std::vector<GroundTruthObject> ground_truth;
        try {
            if (fs::is_directory(labels_path)) ground_truth = load_labels_dir(labels_path);
            else ground_truth = parse_kitti_labels(read_file(labels_path), 0);
        } catch (const ParseError& e) {
            throw std::runtime_error(parse_error_context(labels_path, e));
        }

        result = evaluate(predictions, ground_truth, config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    try {
        if (!report_path.empty()) write_file(report_path, format_metrics_report(result));
        if (!pr_curve_path.empty()) write_file(pr_curve_path, format_pr_curves_csv(result));
        for (const std::string& label : result.unknown_labels)
            std::cerr << "warning: prediction class \"" << label
                      << "\" absent from ground truth; counted as false positives\n";
        std::cout << format_fixed(result.map) << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

int run_synth(const CLI::App& cmd, const std::string& config_path, const std::string& scene_path,
              const std::string& out_dir, const CalibFlags& calib_flags) {
    try {
        const Settings settings(cmd, config_path);
        const CameraCalibration calib = load_calibration(settings, calib_flags);
        SceneSpec spec;
        try {
            spec = parse_scene_spec(read_file(scene_path));
        } catch (const ParseError& e) {
            throw std::runtime_error(parse_error_context(scene_path, e));
        }
        const GeneratedScene scene = generate(spec, calib);
        write_fixtures(scene, calib, out_dir);
        std::cerr << "wrote " << scene.frames.size() << " frames, "
                  << scene.ground_truth.size() << " ground-truth objects, "
                  << scene.expected.size() << " expected objects to " << out_dir << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Camera / occupancy-grid late fusion: band-based detection-to-point"
                 " association with per-object motion, position, velocity and heading"};
    app.require_subcommand(1);

    // fuse
    auto* fuse = app.add_subcommand("fuse", "run the fusion pipeline over a dataset");
    std::string fuse_detections, fuse_grid, fuse_output, fuse_config;
    CalibFlags fuse_calib;
    int fuse_workers = 0;
    fuse->add_option("--detections", fuse_detections, "detections CSV")->required();
    fuse->add_option("--grid-points", fuse_grid, "grid points CSV")->required();
    fuse->add_option("--output", fuse_output, "fused objects output file (JSON lines)");
    fuse->add_option("--config", fuse_config, "key=value config file");
    fuse->add_option("--workers", fuse_workers, "frame worker count (0 = auto, 1 = sequential)");
    add_calib_flags(fuse, fuse_calib, false);

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate predictions against KITTI-style labels");
    std::string eval_predictions, eval_labels, eval_report, eval_pr_curve, eval_config;
    double eval_iou = 0.5, eval_cutoff = 30.0;
    bool eval_eleven_point = false;
    eval->add_option("--predictions", eval_predictions, "fused objects file (JSON lines)")
        ->required();
    eval->add_option("--labels", eval_labels, "labels directory (or single frame-0 file)")
        ->required();
    eval->add_option("--output", eval_report, "metrics report output file");
    eval->add_option("--pr-curve", eval_pr_curve, "PR curve CSV output file");
    eval->add_option("--config", eval_config, "key=value config file");
    eval->add_option("--iou-threshold", eval_iou, "IoU threshold for matching");
    eval->add_option("--cutoff-m", eval_cutoff, "longitudinal distance cutoff (m)");
    eval->add_flag("--eleven-point", eval_eleven_point, "use 11-point AP interpolation");

    // synth
    auto* synth = app.add_subcommand("synth", "generate synthetic fixtures from a scene spec");
    std::string synth_scene, synth_out, synth_config;
    CalibFlags synth_calib;
    synth->add_option("--scene", synth_scene, "scene spec JSON")->required();
    synth->add_option("--out-dir", synth_out, "output directory")->required();
    synth->add_option("--config", synth_config, "key=value config file");
    add_calib_flags(synth, synth_calib, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (fuse->parsed())
            return run_fuse(*fuse, fuse_config, fuse_detections, fuse_grid, fuse_output,
                            fuse_calib, fuse_workers);
        if (eval->parsed())
            return run_eval(*eval, eval_config, eval_predictions, eval_labels, eval_report,
                            eval_pr_curve, eval_iou, eval_cutoff, eval_eleven_point);
        if (synth->parsed())
            return run_synth(*synth, synth_config, synth_scene, synth_out, synth_calib);
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
