#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "doorcount/error.hpp"
#include "doorcount/synth.hpp"

namespace fs = std::filesystem;

namespace doorcount::synth {
namespace {

SceneSpec walking_scene() {
    SceneSpec s;
    s.width = 320;
    s.height = 240;
    s.frame_count = 120;
    s.background_level = 90.0;
    s.noise_sigma = 3.0;
    s.seed = 42;
    s.line = {{0.0, 120.0}, {320.0, 120.0}, -1};
    ActorSpec a;
    a.spawn_frame = 10;
    a.despawn_frame = 100;
    a.axis_x = 10;
    a.axis_y = 16;
    a.intensity = 200;
    a.waypoints = {{10, 160.0, 30.0}, {100, 160.0, 200.0}};
    s.actors.push_back(a);
    return s;
}

TEST(GroundTruth, SingleWalkerCrossingFrame) {
    const SceneSpec s = walking_scene();
    const auto truth = ground_truth(s);
    ASSERT_EQ(truth.size(), 1u);
    EXPECT_EQ(truth[0].direction, Direction::Enter);
    // y(t) = 30 + 170 (t - 10) / 90 reaches 120 at t = 10 + 90 * 90 / 170.
    EXPECT_EQ(truth[0].frame_index, static_cast<std::int64_t>(std::ceil(10.0 + 8100.0 / 170.0)));
    EXPECT_EQ(truth[0].frame_index, 58);
    EXPECT_EQ(crossing_count(s.actors[0], s.line), 1);
}

TEST(GroundTruth, ReverseWalkIsExitAndLateCrossingsDropped) {
    SceneSpec s = walking_scene();
    std::swap(s.actors[0].waypoints[0].y, s.actors[0].waypoints[1].y);
    auto truth = ground_truth(s);
    ASSERT_EQ(truth.size(), 1u);
    EXPECT_EQ(truth[0].direction, Direction::Exit);

    s.actors[0].waypoints = {{10, 160.0, 30.0}, {50, 160.0, 100.0}, {100, 160.0, 200.0}};
    s.frame_count = 55;  // crossing at frame 60
    EXPECT_TRUE(ground_truth(s).empty());
}

TEST(GroundTruth, MultiSegmentPath) {
    SceneSpec s = walking_scene();
    s.actors[0].waypoints = {{10, 160, 60}, {40, 160, 180}, {70, 160, 60}, {100, 160, 180}};
    const auto truth = ground_truth(s);
    ASSERT_EQ(truth.size(), 3u);
    EXPECT_EQ(truth[0].direction, Direction::Enter);
    EXPECT_EQ(truth[1].direction, Direction::Exit);
    EXPECT_EQ(truth[2].direction, Direction::Enter);
    EXPECT_EQ(truth[0].frame_index, 25);
    EXPECT_EQ(truth[1].frame_index, 55);
    EXPECT_EQ(truth[2].frame_index, 85);
    EXPECT_EQ(crossing_count(s.actors[0], s.line), 3);
}

TEST(Render, NoiseFreeEmptySceneIsConstant) {
    SceneSpec s;
    s.width = 32;
    s.height = 20;
    s.frame_count = 5;
    s.background_level = 77.0;
    s.line = {{0, 10}, {32, 10}, -1};
    for (std::int64_t f = 0; f < 5; ++f) {
        const Frame fr = render_frame(s, f);
        for (auto v : fr.pixels) ASSERT_EQ(v, 77);
    }
}

TEST(Render, ActorPixelsUseIntensity) {
    SceneSpec s = walking_scene();
    s.noise_sigma = 0.0;
    const Frame f = render_frame(s, 10);
    EXPECT_EQ(f.at(160, 30), 200);
    EXPECT_EQ(f.at(160, 46), 200);   // on the ellipse boundary
    EXPECT_EQ(f.at(160, 47), 90);
    EXPECT_EQ(f.at(5, 5), 90);
}

TEST(Render, NoiseStatistics) {
    SceneSpec s;
    s.width = 200;
    s.height = 200;
    s.frame_count = 1;
    s.background_level = 100.0;
    s.noise_sigma = 5.0;
    s.line = {{0, 100}, {200, 100}, -1};
    s.seed = 9;
    const Frame f = render_frame(s, 0);
    double sum = 0.0;
    double sq = 0.0;
    for (auto v : f.pixels) {
        sum += v;
        sq += static_cast<double>(v) * v;
    }
    const double n = static_cast<double>(f.pixels.size());
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    EXPECT_NEAR(mean, 100.0, 0.1);
    // Rounding adds 1/12 to the variance.
    EXPECT_NEAR(var, 25.0 + 1.0 / 12.0, 0.6);
}

TEST(Render, DeterministicPerSeed) {
    const SceneSpec s = walking_scene();
    EXPECT_EQ(render_frame(s, 33).pixels, render_frame(s, 33).pixels);
    SceneSpec other = s;
    other.seed = 43;
    EXPECT_NE(render_frame(s, 33).pixels, render_frame(other, 33).pixels);
    EXPECT_NE(render_frame(s, 33).pixels, render_frame(s, 34).pixels);
}

TEST(SceneSpecValidation, RejectsBadScenes) {
    SceneSpec s = walking_scene();
    s.actors[0].waypoints.back().frame_index = 99;
    EXPECT_THROW(s.validate(), ValidationError);
    s = walking_scene();
    s.actors[0].waypoints[1].x = 400;
    EXPECT_THROW(s.validate(), ValidationError);
    s = walking_scene();
    s.actors[0].intensity = 90;
    EXPECT_THROW(s.validate(), ValidationError);
    s = walking_scene();
    s.noise_sigma = -1;
    EXPECT_THROW(s.validate(), ValidationError);
    s = walking_scene();
    s.frame_count = 0;
    EXPECT_THROW(s.validate(), ValidationError);
}

TEST(Presets, TruthShapes) {
    const auto ten = ground_truth(preset("n_people", 1, {10, 320, 240}));
    ASSERT_EQ(ten.size(), 10u);
    int enters = 0;
    for (std::size_t i = 0; i < ten.size(); ++i) {
        if (ten[i].direction == Direction::Enter) ++enters;
        if (i > 0) {
            EXPECT_NE(ten[i].direction, ten[i - 1].direction);
        }
    }
    EXPECT_EQ(enters, 5);

    EXPECT_EQ(ground_truth(preset("single_cross", 7)).size(), 1u);

    const SceneSpec occ = preset("occlusion_pair", 7);
    const auto occ_truth = ground_truth(occ);
    ASSERT_EQ(occ_truth.size(), 2u);
    EXPECT_NE(occ_truth[0].direction, occ_truth[1].direction);
    // The two silhouettes overlap at some frame.
    const ActorSpec& a = occ.actors[0];
    const ActorSpec& b = occ.actors[1];
    bool overlap = false;
    for (std::int64_t f = std::max(a.spawn_frame, b.spawn_frame); f <= std::min(a.despawn_frame, b.despawn_frame); ++f) {
        const Point2 pa = a.position_at(static_cast<double>(f));
        const Point2 pb = b.position_at(static_cast<double>(f));
        if (std::abs(pa.x - pb.x) < a.axis_x + b.axis_x && std::abs(pa.y - pb.y) < a.axis_y + b.axis_y) {
            overlap = true;
        }
    }
    EXPECT_TRUE(overlap);

    const SceneSpec drift = preset("lighting_drift", 7);
    EXPECT_TRUE(ground_truth(drift).empty());
    EXPECT_DOUBLE_EQ(drift.level_at(drift.frame_count - 1) - drift.level_at(0), 40.0);
}

TEST(Presets, SeedsVaryAndRepeat) {
    for (std::string_view name : kPresetNames) {
        const SceneSpec a = preset(name, 3);
        const SceneSpec b = preset(name, 3);
        EXPECT_NO_THROW(a.validate()) << name;
        EXPECT_EQ(ground_truth(a), ground_truth(b)) << name;
        EXPECT_EQ(render_frame(a, 160).pixels, render_frame(b, 160).pixels) << name;
    }
    EXPECT_NE(render_frame(preset("n_people", 1), 200).pixels, render_frame(preset("n_people", 2), 200).pixels);
}

TEST(Presets, UnknownNameListsValidOnes) {
    try {
        preset("crowd", 1);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        for (std::string_view name : kPresetNames) EXPECT_NE(msg.find(name), std::string::npos);
    }
}

TEST(Scene, StreamMatchesRender) {
    SceneSpec s = walking_scene();
    s.frame_count = 12;
    Scene scene = generate_scene(s);
    std::int64_t n = 0;
    while (auto f = scene.frames->next()) {
        EXPECT_EQ(f->index, n);
        EXPECT_EQ(f->pixels, render_frame(s, n).pixels);
        ++n;
    }
    EXPECT_EQ(n, 12);
}

TEST(Scene, WriteSceneIsByteIdentical) {
    const fs::path root = fs::temp_directory_path() / ("doorcount_synth_" + std::to_string(::getpid()));
    SceneSpec s = walking_scene();
    s.frame_count = 15;
    const ScenePaths a = write_scene(s, root / "a");
    const ScenePaths b = write_scene(s, root / "b");
    EXPECT_EQ(a.frame_count, 15u);
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    };
    EXPECT_EQ(slurp(a.truth_csv), slurp(b.truth_csv));
    EXPECT_EQ(slurp(a.frames_dir / "000007.pgm"), slurp(b.frames_dir / "000007.pgm"));
    EXPECT_EQ(slurp(root / "a" / "scene.json"), slurp(root / "b" / "scene.json"));
    fs::remove_all(root);
}

}  // namespace
}  // namespace doorcount::synth
