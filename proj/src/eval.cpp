#include "gridfusion/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "gridfusion/io.hpp"

namespace gridfusion {

GroundTruthObject::GroundTruthObject(int frame, std::string label, double x0, double y0,
                                     double x1, double y1, std::optional<double> distance)
    : frame_id(frame),
      class_label(std::move(label)),
      box(class_label, 1.0, x0, y0, x1, y1),
      longitudinal_distance(distance) {}

std::string evaluation_label(MotionState motion, std::string_view detector_label) {
    std::string label = to_string(motion);
    if (!detector_label.empty()) {
        label += char(std::toupper(static_cast<unsigned char>(detector_label[0])));
        label += detector_label.substr(1);
    }
    return label;
}

PredictedObject to_prediction(const FusedObject& object) {
    return {object.frame_id, evaluation_label(object.motion, object.class_label),
            object.source_box.confidence, object.source_box, object.position.x};
}

double iou(const BoundingBox2D& a, const BoundingBox2D& b) {
    const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (ix <= 0.0 || iy <= 0.0) return 0.0;
    const double intersection = ix * iy;
    const double union_area = a.width() * a.height() + b.width() * b.height() - intersection;
    return intersection / union_area;
}

FrameMatches match_frame(std::span<const PredictedObject> preds,
                         std::span<const GroundTruthObject> gts, double iou_threshold) {
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
        throw InvariantError("iou threshold must be in (0, 1]");

    std::vector<std::size_t> order(preds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return preds[a].confidence > preds[b].confidence;
    });

    std::vector<bool> gt_taken(gts.size(), false);
    FrameMatches out;
    for (const std::size_t pi : order) {
        const PredictedObject& pred = preds[pi];
        double best_iou = 0.0;
        std::size_t best_gt = gts.size();
        for (std::size_t gi = 0; gi < gts.size(); ++gi) {
            if (gt_taken[gi] || gts[gi].class_label != pred.class_label) continue;
            const double overlap = iou(pred.box, gts[gi].box);
            // strict > keeps the lowest ground-truth index on ties
            if (overlap >= iou_threshold && overlap > best_iou) {
                best_iou = overlap;
                best_gt = gi;
            }
        }
        if (best_gt < gts.size()) {
            gt_taken[best_gt] = true;
            out.tp.emplace_back(pi, best_gt);
        } else {
            out.fp.push_back(pi);
        }
    }
    for (std::size_t gi = 0; gi < gts.size(); ++gi)
        if (!gt_taken[gi]) out.fn.push_back(gi);
    return out;
}

double average_precision(std::span<const DetectionOutcome> outcomes, long n_gt,
                         ApInterpolation interp) {
    if (n_gt < 0) throw InvariantError("ground-truth count must be non-negative");
    if (n_gt == 0) return 0.0;

    std::vector<double> recall;
    std::vector<double> precision;
    recall.reserve(outcomes.size());
    precision.reserve(outcomes.size());
    long tp = 0, fp = 0;
    for (const DetectionOutcome& outcome : outcomes) {
        (outcome.is_tp ? tp : fp)++;
        recall.push_back(double(tp) / double(n_gt));
        precision.push_back(double(tp) / double(tp + fp));
    }

    if (interp == ApInterpolation::ElevenPoint) {
        double sum = 0.0;
        for (int k = 0; k <= 10; ++k) {
            const double r = double(k) / 10.0;
            double best = 0.0;
            for (std::size_t i = 0; i < recall.size(); ++i)
                if (recall[i] >= r) best = std::max(best, precision[i]);
            sum += best;
        }
        return sum / 11.0;
    }

    // All-point: integrate the running maximum of precision over recall.
    std::vector<double> envelope = precision;
    for (std::size_t i = envelope.size(); i-- > 1;)
        envelope[i - 1] = std::max(envelope[i - 1], envelope[i]);
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < recall.size(); ++i) {
        ap += (recall[i] - prev_recall) * envelope[i];
        prev_recall = recall[i];
    }
    return ap;
}

namespace {

// One scored prediction after matching, keyed for a deterministic global sort.
struct MatchRecord {
    double confidence;
    int frame_id;
    std::size_t seq;  // index within the frame's prediction list
    bool is_tp;
};

}  // namespace

EvaluationResult evaluate(std::span<const PredictedObject> preds,
                          std::span<const GroundTruthObject> gts, const EvalConfig& config) {
    const std::vector<PredictedObject> kept_preds = longitudinal_filter(preds, config.cutoff_m);
    const std::vector<GroundTruthObject> kept_gts = longitudinal_filter(gts, config.cutoff_m);

    // Vocabulary from the full ground truth, before the distance filter.
    std::set<std::string> vocabulary;
    for (const GroundTruthObject& gt : gts) vocabulary.insert(gt.class_label);

    std::map<int, std::vector<PredictedObject>> preds_by_frame;
    for (const PredictedObject& p : kept_preds) preds_by_frame[p.frame_id].push_back(p);
    std::map<int, std::vector<GroundTruthObject>> gts_by_frame;
    for (const GroundTruthObject& g : kept_gts) gts_by_frame[g.frame_id].push_back(g);

    std::set<int> frame_ids;
    for (const auto& [frame, _] : preds_by_frame) frame_ids.insert(frame);
    for (const auto& [frame, _] : gts_by_frame) frame_ids.insert(frame);

    std::map<std::string, std::vector<MatchRecord>> records_by_class;
    std::map<std::string, long> fn_by_class;
    std::map<std::string, long> gt_count_by_class;
    std::map<std::string, long> unknown_fp_by_class;
    for (const GroundTruthObject& g : kept_gts) gt_count_by_class[g.class_label]++;

    static const std::vector<PredictedObject> no_preds;
    static const std::vector<GroundTruthObject> no_gts;
    for (const int frame : frame_ids) {
        const auto pit = preds_by_frame.find(frame);
        const auto git = gts_by_frame.find(frame);
        const std::vector<PredictedObject>& frame_preds = pit == preds_by_frame.end() ? no_preds : pit->second;
        const std::vector<GroundTruthObject>& frame_gts = git == gts_by_frame.end() ? no_gts : git->second;

        const FrameMatches matches = match_frame(frame_preds, frame_gts, config.iou_threshold);
        for (const auto& [pi, gi] : matches.tp) {
            (void)gi;
            records_by_class[frame_preds[pi].class_label].push_back(
                {frame_preds[pi].confidence, frame, pi, true});
        }
        for (const std::size_t pi : matches.fp) {
            const std::string& label = frame_preds[pi].class_label;
            records_by_class[label].push_back({frame_preds[pi].confidence, frame, pi, false});
            if (!vocabulary.count(label)) unknown_fp_by_class[label]++;
        }
        for (const std::size_t gi : matches.fn) fn_by_class[frame_gts[gi].class_label]++;
    }

    std::set<std::string> class_labels;
    for (const auto& [label, _] : gt_count_by_class) class_labels.insert(label);
    for (const auto& [label, _] : records_by_class) class_labels.insert(label);
    for (const auto& [label, _] : fn_by_class) class_labels.insert(label);

    EvaluationResult result;
    double ap_sum = 0.0;
    long ap_classes = 0;
    for (const std::string& label : class_labels) {
        std::vector<MatchRecord> records;
        if (auto it = records_by_class.find(label); it != records_by_class.end())
            records = it->second;
        std::sort(records.begin(), records.end(), [](const MatchRecord& a, const MatchRecord& b) {
            if (a.confidence != b.confidence) return a.confidence > b.confidence;
            if (a.frame_id != b.frame_id) return a.frame_id < b.frame_id;
            return a.seq < b.seq;
        });

        ClassMetrics metrics;
        metrics.class_label = label;
        for (const MatchRecord& r : records) (r.is_tp ? metrics.tp : metrics.fp)++;
        if (auto it = fn_by_class.find(label); it != fn_by_class.end()) metrics.fn = it->second;

        const long n_gt = gt_count_by_class.count(label) ? gt_count_by_class.at(label) : 0;
        metrics.precision =
            metrics.tp + metrics.fp > 0 ? 100.0 * double(metrics.tp) / double(metrics.tp + metrics.fp) : 0.0;
        metrics.recall =
            metrics.tp + metrics.fn > 0 ? 100.0 * double(metrics.tp) / double(metrics.tp + metrics.fn) : 0.0;
        metrics.f1 = metrics.precision + metrics.recall > 0.0
                         ? 2.0 * metrics.precision * metrics.recall / (metrics.precision + metrics.recall)
                         : 0.0;

        std::vector<DetectionOutcome> outcomes;
        outcomes.reserve(records.size());
        PRCurve curve;
        curve.class_label = label;
        long tp = 0, fp = 0;
        for (const MatchRecord& r : records) {
            outcomes.push_back({r.confidence, r.is_tp});
            (r.is_tp ? tp : fp)++;
            curve.points.push_back({r.confidence,
                                    n_gt > 0 ? double(tp) / double(n_gt) : 0.0,
                                    double(tp) / double(tp + fp)});
        }
        metrics.ap = average_precision(outcomes, n_gt, config.interpolation);

        if (n_gt > 0) {
            ap_sum += metrics.ap;
            ap_classes++;
        }
        result.per_class.push_back(std::move(metrics));
        result.curves.push_back(std::move(curve));
    }
    result.map = ap_classes > 0 ? ap_sum / double(ap_classes) : 0.0;
    for (const auto& [label, _] : unknown_fp_by_class) result.unknown_labels.push_back(label);
    return result;
}

namespace {

std::string format_percent(double value) {
    // two decimals, same fixed formatting rules as the data writers
    const double scaled = std::round(value * 100.0) / 100.0;
    std::string s = format_fixed(scaled);
    return s.substr(0, s.size() - 4);
}

}  // namespace

std::string format_metrics_report(const EvaluationResult& result) {
    std::string out;
    for (const ClassMetrics& m : result.per_class) {
        out += "class=" + m.class_label;
        out += " precision=" + format_percent(m.precision);
        out += " recall=" + format_percent(m.recall);
        out += " f1=" + format_percent(m.f1);
        out += " ap=" + format_fixed(m.ap);
        out += " tp=" + std::to_string(m.tp);
        out += " fp=" + std::to_string(m.fp);
        out += " fn=" + std::to_string(m.fn);
        out += "\n";
    }
    if (!result.unknown_labels.empty()) {
        out += "# unknown prediction classes (counted as false positives):";
        for (const std::string& label : result.unknown_labels) out += " " + label;
        out += "\n";
    }
    out += "mAP=" + format_fixed(result.map) + "\n";
    return out;
}

std::string format_pr_curves_csv(const EvaluationResult& result) {
    std::string out = "class,confidence,recall,precision\n";
    for (const PRCurve& curve : result.curves) {
        for (const PRPoint& p : curve.points) {
            out += curve.class_label;
            out += ',';
            append_fixed(out, p.confidence);
            out += ',';
            append_fixed(out, p.recall);
            out += ',';
            append_fixed(out, p.precision);
            out += '\n';
        }
    }
    return out;
}

}  // namespace gridfusion
