#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gridfusion/types.hpp"

namespace gridfusion {

/// Ground-truth box with a motion-prefixed class label ("dynamicCar",
/// "staticVan", ...). Box confidence is fixed at 1.
struct GroundTruthObject {
    int frame_id;
    std::string class_label;
    BoundingBox2D box;
    std::optional<double> longitudinal_distance;  // meters along the forward axis

    GroundTruthObject(int frame, std::string label, double x0, double y0, double x1, double y1,
                      std::optional<double> distance = std::nullopt);
};

/// A prediction as seen by the evaluator.
struct PredictedObject {
    int frame_id;
    std::string class_label;
    double confidence;
    BoundingBox2D box;
    std::optional<double> longitudinal_distance;
};

/// Motion-prefixed evaluation label: (Dynamic, "car") -> "dynamicCar".
std::string evaluation_label(MotionState motion, std::string_view detector_label);

/// Maps a pipeline output object onto the evaluator's prediction type.
/// Confidence comes from the source box, the longitudinal distance from the
/// forward component of the object position.
PredictedObject to_prediction(const FusedObject& object);

struct ClassMetrics {
    std::string class_label;
    double precision = 0.0;  // percent
    double recall = 0.0;     // percent
    double f1 = 0.0;         // percent
    double ap = 0.0;         // [0, 1]
    long tp = 0, fp = 0, fn = 0;
};

struct PRPoint {
    double confidence;
    double recall;     // [0, 1]
    double precision;  // [0, 1]
};

/// Precision/recall walk of one class, ordered by descending confidence;
/// recall is non-decreasing along the list.
struct PRCurve {
    std::string class_label;
    std::vector<PRPoint> points;
};

/// Intersection over union; 0 for disjoint boxes.
double iou(const BoundingBox2D& a, const BoundingBox2D& b);

/// Keeps objects whose longitudinal distance is within the cutoff. Objects
/// without a distance annotation are always kept.
template <typename T>
std::vector<T> longitudinal_filter(std::span<const T> objects, double cutoff_m) {
    if (!(cutoff_m > 0.0)) throw InvariantError("longitudinal cutoff must be positive");
    std::vector<T> kept;
    kept.reserve(objects.size());
    for (const T& obj : objects)
        if (!obj.longitudinal_distance || *obj.longitudinal_distance <= cutoff_m)
            kept.push_back(obj);
    return kept;
}

struct FrameMatches {
    std::vector<std::pair<std::size_t, std::size_t>> tp;  // (prediction, ground-truth) indices
    std::vector<std::size_t> fp;                          // prediction indices
    std::vector<std::size_t> fn;                          // ground-truth indices
};

/// Greedy matching for one frame: predictions in descending confidence order,
/// each taking the unmatched same-class ground truth with the highest IoU at
/// or above the threshold. Ties break to the lowest ground-truth index.
FrameMatches match_frame(std::span<const PredictedObject> preds,
                         std::span<const GroundTruthObject> gts, double iou_threshold);

enum class ApInterpolation { AllPoint, ElevenPoint };

/// One scored detection outcome; sequences are ordered by descending
/// confidence before AP computation.
struct DetectionOutcome {
    double confidence;
    bool is_tp;
};

/// Average precision: area under the interpolated precision envelope over
/// recall (all-point), or the PASCAL VOC 11-point variant. Zero when the
/// class has no ground truth.
double average_precision(std::span<const DetectionOutcome> outcomes, long n_gt,
                         ApInterpolation interp = ApInterpolation::AllPoint);

struct EvalConfig {
    double iou_threshold = 0.5;
    double cutoff_m = 30.0;
    ApInterpolation interpolation = ApInterpolation::AllPoint;
};

struct EvaluationResult {
    std::vector<ClassMetrics> per_class;  // sorted by class label
    std::vector<PRCurve> curves;          // same order as per_class
    double map = 0.0;                     // mean AP over classes with ground truth in range
    std::vector<std::string> unknown_labels;  // prediction classes absent from the GT vocabulary
};

/// Full protocol: longitudinal filter on both sides, per-frame greedy
/// matching, per-class precision/recall/F1 and AP, mAP over classes with at
/// least one in-range ground-truth instance. Predictions with labels outside
/// the ground-truth vocabulary are reported and score as false positives.
EvaluationResult evaluate(std::span<const PredictedObject> preds,
                          std::span<const GroundTruthObject> gts, const EvalConfig& config = {});

/// Deterministic metrics report: one line per class plus the mAP line.
std::string format_metrics_report(const EvaluationResult& result);

/// CSV: class, confidence, recall, precision.
std::string format_pr_curves_csv(const EvaluationResult& result);

}  // namespace gridfusion
