#include "doctest.h"

#include <algorithm>
#include <map>

#include "support.hpp"

using namespace gridfusion;
using namespace testsupport;

namespace {

BoundingBox2D box_at(double x, double y, double w = 40, double h = 30, double conf = 1.0,
                     const std::string& label = "dynamicCar") {
    return BoundingBox2D(label, conf, x, y, x + w, y + h);
}

PredictedObject pred(int frame, const std::string& label, double conf, double x, double y,
                     double w = 40, double h = 30,
                     std::optional<double> distance = std::nullopt) {
    return {frame, label, conf, BoundingBox2D(label, conf, x, y, x + w, y + h), distance};
}

GroundTruthObject gt(int frame, const std::string& label, double x, double y, double w = 40,
                     double h = 30, std::optional<double> distance = std::nullopt) {
    return GroundTruthObject(frame, label, x, y, x + w, y + h, distance);
}

const ClassMetrics& metrics_for(const EvaluationResult& result, const std::string& label) {
    const auto it = std::find_if(result.per_class.begin(), result.per_class.end(),
                                 [&](const ClassMetrics& m) { return m.class_label == label; });
    REQUIRE(it != result.per_class.end());
    return *it;
}

}  // namespace

TEST_CASE("iou") {
    const BoundingBox2D a = box_at(0, 0, 2, 2);
    CHECK(iou(a, a) == 1.0);
    CHECK(iou(a, box_at(10, 10, 2, 2)) == 0.0);
    CHECK(iou(a, box_at(2, 0, 2, 2)) == 0.0);  // touching edges do not intersect
    CHECK(iou(a, box_at(1, 1, 2, 2)) == doctest::Approx(1.0 / 7.0));  // inter 1, union 7
}

TEST_CASE("longitudinal_filter") {
    const std::vector<GroundTruthObject> objects{
        gt(0, "dynamicCar", 0, 0, 40, 30, 25.0),
        gt(0, "dynamicCar", 100, 0, 40, 30, 35.0),
        gt(0, "dynamicCar", 200, 0, 40, 30, std::nullopt),
        gt(0, "dynamicCar", 300, 0, 40, 30, 30.0),  // exactly at the cutoff: kept
    };
    const auto kept = longitudinal_filter(std::span<const GroundTruthObject>(objects), 30.0);
    REQUIRE(kept.size() == 3);
    CHECK(kept[0].box.x_min == 0.0);
    CHECK(kept[1].box.x_min == 200.0);
    CHECK(kept[2].box.x_min == 300.0);
    CHECK_THROWS_AS(longitudinal_filter(std::span<const GroundTruthObject>(objects), 0.0),
                    InvariantError);
}

TEST_CASE("match_frame") {
    SUBCASE("exact hit") {
        const std::vector<PredictedObject> preds{pred(0, "dynamicCar", 0.9, 10, 10)};
        const std::vector<GroundTruthObject> gts{gt(0, "dynamicCar", 10, 10)};
        const FrameMatches m = match_frame(preds, gts, 0.5);
        CHECK(m.tp.size() == 1);
        CHECK(m.fp.empty());
        CHECK(m.fn.empty());
    }
    SUBCASE("prediction without ground truth is a false positive") {
        const std::vector<PredictedObject> preds{pred(0, "dynamicCar", 0.9, 10, 10)};
        const FrameMatches m = match_frame(preds, {}, 0.5);
        CHECK(m.tp.empty());
        REQUIRE(m.fp.size() == 1);
    }
    SUBCASE("two predictions over one ground truth: confidence wins") {
        const std::vector<PredictedObject> preds{pred(0, "dynamicCar", 0.6, 11, 10),
                                                 pred(0, "dynamicCar", 0.9, 10, 11)};
        const std::vector<GroundTruthObject> gts{gt(0, "dynamicCar", 10, 10)};
        const FrameMatches m = match_frame(preds, gts, 0.5);
        REQUIRE(m.tp.size() == 1);
        CHECK(m.tp[0].first == 1);  // the 0.9 prediction
        REQUIRE(m.fp.size() == 1);
        CHECK(m.fp[0] == 0);
    }
    SUBCASE("class labels must match exactly") {
        const std::vector<PredictedObject> preds{pred(0, "dynamicCar", 0.9, 10, 10)};
        const std::vector<GroundTruthObject> gts{gt(0, "staticCar", 10, 10)};
        const FrameMatches m = match_frame(preds, gts, 0.5);
        CHECK(m.tp.empty());
        CHECK(m.fp.size() == 1);
        CHECK(m.fn.size() == 1);
    }
    SUBCASE("equal IoU breaks to the lowest ground-truth index") {
        const std::vector<PredictedObject> preds{pred(0, "dynamicCar", 0.9, 10, 10)};
        const std::vector<GroundTruthObject> gts{gt(0, "dynamicCar", 10, 10),
                                                 gt(0, "dynamicCar", 10, 10)};
        const FrameMatches m = match_frame(preds, gts, 0.5);
        REQUIRE(m.tp.size() == 1);
        CHECK(m.tp[0].second == 0);
        REQUIRE(m.fn.size() == 1);
        CHECK(m.fn[0] == 1);
    }
    SUBCASE("threshold bounds are validated") {
        CHECK_THROWS_AS(match_frame({}, {}, 0.0), InvariantError);
        CHECK_THROWS_AS(match_frame({}, {}, 1.5), InvariantError);
    }
}

TEST_CASE("average_precision") {
    SUBCASE("single ground truth, single hit") {
        const std::vector<DetectionOutcome> outcomes{{0.9, true}};
        CHECK(average_precision(outcomes, 1) == 1.0);
    }
    SUBCASE("hand-computed all-point fixture") {
        // PR walk: (0.5, 1.0), (0.5, 0.5), (1.0, 2/3); envelope area
        // 0.5*1 + 0.5*(2/3) = 5/6
        const std::vector<DetectionOutcome> outcomes{{0.9, true}, {0.8, false}, {0.7, true}};
        CHECK(average_precision(outcomes, 2) == doctest::Approx(5.0 / 6.0).epsilon(1e-9));
    }
    SUBCASE("no hits") {
        const std::vector<DetectionOutcome> outcomes{{0.9, false}, {0.8, false}};
        CHECK(average_precision(outcomes, 3) == 0.0);
    }
    SUBCASE("no ground truth") {
        const std::vector<DetectionOutcome> outcomes{{0.9, false}};
        CHECK(average_precision(outcomes, 0) == 0.0);
    }
    SUBCASE("eleven-point variant on the fixture") {
        // max precision at recall >= r: 1.0 for r <= 0.5, 2/3 above
        // (6*1 + 5*(2/3)) / 11 = 28/33
        const std::vector<DetectionOutcome> outcomes{{0.9, true}, {0.8, false}, {0.7, true}};
        CHECK(average_precision(outcomes, 2, ApInterpolation::ElevenPoint) ==
              doctest::Approx(28.0 / 33.0).epsilon(1e-9));
    }
}

TEST_CASE("AP is invariant under strictly monotone confidence rescaling") {
    Rng rng(555);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<DetectionOutcome> outcomes;
        const int n = rng.uniform_int(1, 40);
        double conf = 1.0;
        for (int i = 0; i < n; ++i) {
            conf -= rng.uniform(0.001, 0.02);  // strictly decreasing
            outcomes.push_back({conf, rng.bernoulli(0.6)});
        }
        const long n_gt = rng.uniform_int(1, 30);
        const double base = average_precision(outcomes, n_gt);

        std::vector<DetectionOutcome> rescaled = outcomes;
        for (DetectionOutcome& o : rescaled) o.confidence = 0.1 + 0.5 * o.confidence * o.confidence;
        CHECK(average_precision(rescaled, n_gt) == base);
    }
}

TEST_CASE("evaluate: perfect predictions") {
    std::vector<GroundTruthObject> gts;
    std::vector<PredictedObject> preds;
    for (int frame = 0; frame < 3; ++frame) {
        for (int k = 0; k < 4; ++k) {
            const std::string label = k % 2 == 0 ? "dynamicCar" : "staticVan";
            gts.push_back(gt(frame, label, 60.0 * k, 20.0 + 5.0 * k));
            preds.push_back(pred(frame, label, 0.9 - 0.05 * k, 60.0 * k, 20.0 + 5.0 * k));
        }
    }
    const EvaluationResult result = evaluate(preds, gts);
    REQUIRE(result.per_class.size() == 2);
    for (const ClassMetrics& m : result.per_class) {
        CHECK(m.precision == 100.0);
        CHECK(m.recall == 100.0);
        CHECK(m.f1 == 100.0);
        CHECK(m.ap == 1.0);
        CHECK(m.fp == 0);
        CHECK(m.fn == 0);
    }
    CHECK(result.map == 1.0);
    CHECK(result.unknown_labels.empty());
}

TEST_CASE("evaluate: no predictions") {
    std::vector<GroundTruthObject> gts{gt(0, "dynamicCar", 10, 10), gt(1, "staticVan", 10, 10)};
    const EvaluationResult result = evaluate({}, gts);
    for (const ClassMetrics& m : result.per_class) {
        CHECK(m.recall == 0.0);
        CHECK(m.tp == 0);
        CHECK(m.fn == 1);
        CHECK(m.ap == 0.0);
    }
    CHECK(result.map == 0.0);
}

TEST_CASE("evaluate: count-shape fixture tp=72 fp=28 fn=26") {
    // one prediction/ground truth per frame slot, exact hits for the 72
    std::vector<GroundTruthObject> gts;
    std::vector<PredictedObject> preds;
    int frame = 0;
    for (int i = 0; i < 72; ++i, ++frame) {
        gts.push_back(gt(frame, "dynamicCar", 10, 10));
        preds.push_back(pred(frame, "dynamicCar", 0.9, 10, 10));
    }
    for (int i = 0; i < 28; ++i, ++frame)
        preds.push_back(pred(frame, "dynamicCar", 0.8, 10, 10));
    for (int i = 0; i < 26; ++i, ++frame) gts.push_back(gt(frame, "dynamicCar", 10, 10));

    const EvaluationResult result = evaluate(preds, gts);
    const ClassMetrics& m = metrics_for(result, "dynamicCar");
    CHECK(m.tp == 72);
    CHECK(m.fp == 28);
    CHECK(m.fn == 26);
    CHECK(m.precision == doctest::Approx(72.0));
    CHECK(m.recall == doctest::Approx(100.0 * 72.0 / 98.0));   // 73.469...
    CHECK(m.f1 == doctest::Approx(100.0 * 144.0 / 198.0));     // 72.727...
}

TEST_CASE("evaluate: unknown prediction classes are reported and count as FP") {
    std::vector<GroundTruthObject> gts{gt(0, "dynamicCar", 10, 10)};
    std::vector<PredictedObject> preds{pred(0, "dynamicCar", 0.9, 10, 10),
                                       pred(0, "dynamicTruck", 0.8, 100, 10)};
    const EvaluationResult result = evaluate(preds, gts);
    REQUIRE(result.unknown_labels.size() == 1);
    CHECK(result.unknown_labels[0] == "dynamicTruck");
    const ClassMetrics& unknown = metrics_for(result, "dynamicTruck");
    CHECK(unknown.fp == 1);
    CHECK(unknown.tp == 0);
    CHECK(result.map == 1.0);  // mAP only over classes with ground truth
}

TEST_CASE("evaluate: cutoff filters both sides symmetrically") {
    std::vector<GroundTruthObject> gts{gt(0, "dynamicCar", 10, 10, 40, 30, 20.0),
                                       gt(0, "dynamicCar", 100, 10, 40, 30, 50.0)};
    std::vector<PredictedObject> preds{pred(0, "dynamicCar", 0.9, 10, 10, 40, 30, 20.0),
                                       pred(0, "dynamicCar", 0.8, 100, 10, 40, 30, 50.0)};
    const EvaluationResult result = evaluate(preds, gts);
    const ClassMetrics& m = metrics_for(result, "dynamicCar");
    // the 50 m pair is gone entirely: no FP, no FN from it
    CHECK(m.tp == 1);
    CHECK(m.fp == 0);
    CHECK(m.fn == 0);
}

namespace {

struct RandomDataset {
    std::vector<PredictedObject> preds;
    std::vector<GroundTruthObject> gts;
};

RandomDataset random_dataset(Rng& rng, int n_frames) {
    static const std::vector<std::string> labels{"dynamicCar", "staticCar", "staticVan"};
    RandomDataset data;
    for (int frame = 0; frame < n_frames; ++frame) {
        const int n_gt = rng.uniform_int(0, 6);
        for (int k = 0; k < n_gt; ++k) {
            const std::string& label = labels[std::size_t(rng.uniform_int(0, 2))];
            const double x = 150.0 * k + rng.uniform(0, 40);
            const double y = rng.uniform(0, 200);
            data.gts.push_back(gt(frame, label, x, y, 60, 50));
            if (rng.bernoulli(0.7)) {  // matched prediction with a small offset
                data.preds.push_back(pred(frame, label, rng.uniform(0.05, 1.0), x + rng.uniform(-5, 5),
                                          y + rng.uniform(-5, 5), 60, 50));
            }
        }
        const int n_fp = rng.uniform_int(0, 3);
        for (int k = 0; k < n_fp; ++k)
            data.preds.push_back(pred(frame, labels[std::size_t(rng.uniform_int(0, 2))],
                                      rng.uniform(0.05, 1.0), 1000 + 80.0 * k, 300, 60, 50));
    }
    return data;
}

}  // namespace

TEST_CASE("evaluate properties on random datasets") {
    Rng rng(90210);
    for (int trial = 0; trial < 15; ++trial) {
        const RandomDataset data = random_dataset(rng, 8);
        const EvaluationResult full = evaluate(data.preds, data.gts);

        // tp + fn equals the (filtered) ground-truth count per class
        std::map<std::string, long> gt_count;
        for (const GroundTruthObject& g : data.gts) gt_count[g.class_label]++;
        for (const ClassMetrics& m : full.per_class)
            CHECK(m.tp + m.fn == (gt_count.count(m.class_label) ? gt_count[m.class_label] : 0));

        // PR curves: recall non-decreasing, envelope non-increasing
        for (const PRCurve& curve : full.curves) {
            for (std::size_t i = 1; i < curve.points.size(); ++i)
                CHECK(curve.points[i].recall >= curve.points[i - 1].recall);
            std::vector<double> envelope;
            envelope.reserve(curve.points.size());
            for (const PRPoint& p : curve.points) envelope.push_back(p.precision);
            for (std::size_t i = envelope.size(); i-- > 1;)
                envelope[i - 1] = std::max(envelope[i - 1], envelope[i]);
            for (std::size_t i = 1; i < envelope.size(); ++i)
                CHECK(envelope[i] <= envelope[i - 1]);
        }

        // frame partition: counts merge
        std::vector<PredictedObject> preds_a, preds_b;
        std::vector<GroundTruthObject> gts_a, gts_b;
        for (const PredictedObject& p : data.preds)
            (p.frame_id % 2 == 0 ? preds_a : preds_b).push_back(p);
        for (const GroundTruthObject& g : data.gts)
            (g.frame_id % 2 == 0 ? gts_a : gts_b).push_back(g);
        const EvaluationResult part_a = evaluate(preds_a, gts_a);
        const EvaluationResult part_b = evaluate(preds_b, gts_b);

        std::map<std::string, std::array<long, 3>> merged;
        for (const EvaluationResult* part : {&part_a, &part_b})
            for (const ClassMetrics& m : part->per_class) {
                merged[m.class_label][0] += m.tp;
                merged[m.class_label][1] += m.fp;
                merged[m.class_label][2] += m.fn;
            }
        for (const ClassMetrics& m : full.per_class) {
            const auto& counts = merged[m.class_label];
            CHECK(m.tp == counts[0]);
            CHECK(m.fp == counts[1]);
            CHECK(m.fn == counts[2]);
        }
    }
}

TEST_CASE("evaluation_label and to_prediction") {
    CHECK(evaluation_label(MotionState::Dynamic, "car") == "dynamicCar");
    CHECK(evaluation_label(MotionState::Static, "van") == "staticVan");

    const BoundingBox2D box("car", 0.85, 100, 40, 200, 120);
    const FusedObject object("car", MotionState::Dynamic, {12.5, -3.0}, {4.0, 0.0}, 0.0, 5, 2,
                             false, box, 7);
    const PredictedObject p = to_prediction(object);
    CHECK(p.frame_id == 7);
    CHECK(p.class_label == "dynamicCar");
    CHECK(p.confidence == 0.85);
    CHECK(p.box == box);
    REQUIRE(p.longitudinal_distance.has_value());
    CHECK(*p.longitudinal_distance == 12.5);
}

TEST_CASE("report formatting is deterministic") {
    Rng rng(42);
    const RandomDataset data = random_dataset(rng, 5);
    const EvaluationResult a = evaluate(data.preds, data.gts);
    const EvaluationResult b = evaluate(data.preds, data.gts);
    CHECK(format_metrics_report(a) == format_metrics_report(b));
    CHECK(format_pr_curves_csv(a) == format_pr_curves_csv(b));
    CHECK(format_metrics_report(a).find("mAP=") != std::string::npos);
}
