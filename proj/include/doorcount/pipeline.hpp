#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "doorcount/blob.hpp"
#include "doorcount/config.hpp"
#include "doorcount/counter.hpp"
#include "doorcount/eval.hpp"
#include "doorcount/mog2.hpp"
#include "doorcount/synth.hpp"
#include "doorcount/tracker.hpp"
#include "doorcount/video_io.hpp"

namespace doorcount {

/// Accumulated seconds per stage.
struct StageTimes {
    double subtraction = 0.0;
    double morphology = 0.0;
    double labeling = 0.0;
    double tracking = 0.0;  // tracker + counter

    double total() const { return subtraction + morphology + labeling + tracking; }
};

struct FrameResult {
    std::vector<CrossingEvent> events;
};

/// The per-frame chain: subtract, binarize, clean, label, extract blobs,
/// track, count. Stateful; frames must arrive in order.
class Pipeline {
public:
    /// cfg must already be resolved for the frame geometry.
    Pipeline(const PipelineConfig& cfg, int width, int height, int channels);

    FrameResult process(const Frame& frame);

    const BackgroundModel& model() const { return model_; }
    const CentroidTracker& tracker() const { return tracker_; }
    const LineCounter& counter() const { return counter_; }
    const MaskFrame& last_mask() const { return mask_; }
    const BinaryMask& last_clean_mask() const { return clean_; }
    const std::vector<Blob>& last_blobs() const { return blobs_; }
    const StageTimes& times() const { return times_; }

private:
    PipelineConfig cfg_;
    BackgroundModel model_;
    CentroidTracker tracker_;
    LineCounter counter_;
    MaskFrame mask_;
    BinaryMask clean_;
    std::vector<Blob> blobs_;
    std::vector<Track> confirmed_;
    StageTimes times_;
};

/// Fills geometry-dependent defaults and, for synthetic input without an
/// explicit line, takes the scene's line.
PipelineConfig resolve_config(const PipelineConfig& cfg, int width, int height,
                              const std::optional<synth::LineHint>& scene_line = std::nullopt);

/// An opened input plus the ground truth that came with it, if any.
struct OpenedInput {
    std::unique_ptr<FrameStream> stream;
    std::optional<std::vector<GroundTruthEvent>> truth;
    std::optional<synth::LineHint> scene_line;
};

OpenedInput open_input(const PipelineConfig& cfg);

struct RunSummary {
    std::int64_t frames = 0;
    double seconds = 0.0;
    double fps = 0.0;
    std::int64_t enter_total = 0;
    std::int64_t exit_total = 0;
    std::int64_t occupancy = 0;
    std::optional<MetricsReport> metrics;
    StageTimes stages;

    std::string to_string() const;
};

/// Full counting run. Writes events.csv, effective_config.ini and, when
/// ground truth is available, report.json into cfg.output.dir; optionally
/// tracks.csv and masks/NNNNNN.pgm.
RunSummary run_count(const PipelineConfig& cfg);

/// Counting pass over an already opened stream without touching the disk.
struct CountResult {
    RunSummary summary;
    std::vector<CrossingEvent> events;
};
CountResult count_stream(const PipelineConfig& cfg, FrameStream& stream,
                         const std::optional<synth::LineHint>& scene_line = std::nullopt);

synth::ScenePaths run_synth(const std::string& preset, std::uint64_t seed,
                            const std::filesystem::path& output_dir,
                            const synth::PresetOptions& options = {});

/// Re-scores an events CSV against a ground-truth CSV; writes report.json
/// into output_dir when it is given.
MetricsReport run_eval(const std::filesystem::path& predicted_csv,
                       const std::filesystem::path& truth_csv, std::int64_t tolerance,
                       double p0 = 0.05,
                       const std::optional<std::filesystem::path>& output_dir = std::nullopt);

struct BenchRun {
    double seconds = 0.0;
    double fps = 0.0;
    StageTimes stages;
};

struct BenchReport {
    std::int64_t frames = 0;
    int width = 0;
    int height = 0;
    std::vector<BenchRun> runs;
    double mean_fps = 0.0;
    double min_fps = 0.0;

    nlohmann::ordered_json to_json() const;
};

/// Decodes the input once into memory, then times `repeat` full passes.
BenchReport run_bench(const PipelineConfig& cfg, int repeat);

}  // namespace doorcount
