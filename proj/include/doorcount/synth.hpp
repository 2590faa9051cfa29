#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "doorcount/blob.hpp"
#include "doorcount/eval.hpp"
#include "doorcount/frame.hpp"
#include "doorcount/video_io.hpp"

namespace doorcount::synth {

struct Waypoint {
    std::int64_t frame_index = 0;
    double x = 0.0;
    double y = 0.0;
};

/// Filled ellipse moving along a piecewise-linear path. Visible on frames
/// spawn_frame..despawn_frame inclusive.
struct ActorSpec {
    std::int64_t spawn_frame = 0;
    std::int64_t despawn_frame = 1;
    double axis_x = 10.0;
    double axis_y = 16.0;
    std::uint8_t intensity = 200;
    std::vector<Waypoint> waypoints;

    Point2 position_at(double frame) const;
};

/// Where the scene's doorway line sits. Mirrors the counting line but is
/// evaluated independently of the counter.
struct LineHint {
    Point2 p1;
    Point2 p2;
    int enter_sign = -1;
};

struct SceneSpec {
    int width = 320;
    int height = 240;
    std::int64_t frame_count = 1;
    double background_level = 90.0;
    /// Intensity added linearly over the run (frame 0 gets none, the last
    /// frame all of it).
    double background_ramp = 0.0;
    double noise_sigma = 0.0;
    LineHint line;
    std::vector<ActorSpec> actors;
    std::uint64_t seed = 0;

    double level_at(std::int64_t frame) const;

    /// Throws ValidationError naming the offending field.
    void validate() const;
};

/// Renders one frame. Pixel noise is a pure function of (seed, frame, pixel):
/// the splitmix64 output at stream position frame*W*H + pixel + 1 is cut
/// into four 16-bit uniforms whose centred sum, scaled by sqrt(3), gives a
/// unit-variance Irwin-Hall deviate. Only IEEE basic operations and sqrt are
/// used, so frames are bit-identical across platforms.
Frame render_frame(const SceneSpec& spec, std::int64_t frame_index);

/// Crossing events computed from actor geometry alone: one per sign change
/// of the centroid path relative to the line, stamped with the first frame
/// at or after the exact crossing time.
std::vector<GroundTruthEvent> ground_truth(const SceneSpec& spec);

/// Number of sign changes of one actor's path (closed form over waypoints).
int crossing_count(const ActorSpec& actor, const LineHint& line);

/// Lazily renders the frames of a scene.
class SceneStream final : public FrameStream {
public:
    explicit SceneStream(SceneSpec spec);
    std::optional<Frame> next() override;
    std::string describe() const override { return "synthetic scene"; }

private:
    SceneSpec spec_;
    std::int64_t pos_ = 0;
};

struct Scene {
    std::unique_ptr<FrameStream> frames;
    std::vector<GroundTruthEvent> truth;
};

Scene generate_scene(const SceneSpec& spec);

inline constexpr std::string_view kPresetNames[] = {"single_cross", "n_people", "occlusion_pair",
                                                    "lighting_drift"};

struct PresetOptions {
    int people = 10;  // n_people only
    int width = 320;
    int height = 240;
};

/// Builds a named scene. Per-seed variation covers lane offsets, walking
/// speed, and spawn gaps.
SceneSpec preset(std::string_view name, std::uint64_t seed, const PresetOptions& options = {});

struct ScenePaths {
    std::filesystem::path frames_dir;
    std::filesystem::path truth_csv;
    std::size_t frame_count = 0;
};

/// Writes frames/NNNNNN.pgm, truth.csv and scene.json (geometry and line).
ScenePaths write_scene(const SceneSpec& spec, const std::filesystem::path& output_dir);

}  // namespace doorcount::synth
