#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "doorcount/counter.hpp"

namespace doorcount {

struct GroundTruthEvent {
    std::int64_t frame_index = 0;
    Direction direction = Direction::Enter;

    bool operator==(const GroundTruthEvent&) const = default;
};

struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;

    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
    bool operator==(const ConfusionCounts&) const = default;
};

struct DirectionalCounts {
    ConfusionCounts enter;
    ConfusionCounts exit;

    const ConfusionCounts& operator[](Direction d) const { return d == Direction::Enter ? enter : exit; }
    ConfusionCounts& operator[](Direction d) { return d == Direction::Enter ? enter : exit; }
    ConfusionCounts pooled() const {
        ConfusionCounts c = enter;
        c += exit;
        return c;
    }
};

/// Per direction, walks predictions in frame order and pairs each with the
/// earliest unmatched ground-truth event of that direction within
/// +-tolerance frames. Both inputs must be sorted by frame.
DirectionalCounts match_events(const std::vector<CrossingEvent>& predicted,
                               const std::vector<GroundTruthEvent>& truth, std::int64_t tolerance);

/// tp / (tp + fp); 1 when nothing was predicted.
double precision(const ConfusionCounts& c);
/// tp / (tp + fn); 1 when there was nothing to find.
double recall(const ConfusionCounts& c);
/// Harmonic mean of precision and recall; 0 when both are 0.
double f1(const ConfusionCounts& c);
double average_f1(double f1_enter, double f1_exit);

/// Two-sided exact binomial test of H0: per-event error probability == p0.
/// Sums the probabilities of every outcome no more likely than the observed
/// one.
double significance_test(std::int64_t errors, std::int64_t events, double p0);

struct DirectionMetrics {
    ConfusionCounts counts;
    double precision = 1.0;
    double recall = 1.0;
    double f1 = 1.0;
};

DirectionMetrics compute_metrics(const ConfusionCounts& c);

struct SignificanceResult {
    std::int64_t errors = 0;
    std::int64_t events = 0;
    double p0 = 0.05;
    double p_value = 1.0;
};

/// The "overall" block pools the confusion counts of both directions. The
/// headline figure is average_f1; the accuracy table reports F1 values as
/// percentages under the usual "accuracy" labels.
struct MetricsReport {
    DirectionMetrics enter;
    DirectionMetrics exit;
    DirectionMetrics overall;
    double average_f1 = 1.0;
    SignificanceResult significance;
};

/// The significance test counts errors = fp + fn over events = tp + fp + fn,
/// both pooled over directions.
MetricsReport build_report(const DirectionalCounts& counts, double p0 = 0.05);

nlohmann::ordered_json render_report(const MetricsReport& report);

/// CSV "frame,direction".
std::vector<GroundTruthEvent> read_ground_truth_csv(const std::filesystem::path& path);
void write_ground_truth_csv(const std::vector<GroundTruthEvent>& events,
                            const std::filesystem::path& path);

/// CSV "frame,track_id,direction,x,y" as written by the counting pipeline.
std::vector<CrossingEvent> read_events_csv(const std::filesystem::path& path);

}  // namespace doorcount
