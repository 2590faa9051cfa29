#include "doorcount/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include <json.hpp>

#include "doorcount/error.hpp"

namespace doorcount::synth {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t position) {
    std::uint64_t z = seed + position * kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Approximately standard normal; see render_frame.
double unit_noise(std::uint64_t bits) {
    constexpr double kScale = 1.0 / 65536.0;
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        sum += (static_cast<double>((bits >> (16 * i)) & 0xFFFF) + 0.5) * kScale;
    }
    static const double kSqrt3 = std::sqrt(3.0);
    return (sum - 2.0) * kSqrt3;
}

std::uint8_t quantize(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

double line_cross(const LineHint& line, const Point2& p) {
    return (line.p2.x - line.p1.x) * (p.y - line.p1.y) - (line.p2.y - line.p1.y) * (p.x - line.p1.x);
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

Point2 ActorSpec::position_at(double frame) const {
    if (waypoints.empty()) return {};
    if (frame <= static_cast<double>(waypoints.front().frame_index)) {
        return {waypoints.front().x, waypoints.front().y};
    }
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        const Waypoint& a = waypoints[i - 1];
        const Waypoint& b = waypoints[i];
        if (frame <= static_cast<double>(b.frame_index)) {
            const double t = (frame - static_cast<double>(a.frame_index)) /
                             static_cast<double>(b.frame_index - a.frame_index);
            return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
        }
    }
    return {waypoints.back().x, waypoints.back().y};
}

double SceneSpec::level_at(std::int64_t frame) const {
    if (frame_count <= 1 || background_ramp == 0.0) return background_level;
    return background_level +
           background_ramp * static_cast<double>(frame) / static_cast<double>(frame_count - 1);
}

void SceneSpec::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw ValidationError("scene." + field + ": " + why);
    };
    if (width < kMinFrameSide || height < kMinFrameSide) fail("width", "frames must be at least 16x16");
    if (frame_count < 1) fail("frame_count", "must be >= 1");
    if (!(noise_sigma >= 0.0)) fail("noise_sigma", "must be >= 0");
    if (line.p1.x == line.p2.x && line.p1.y == line.p2.y) fail("line", "endpoints coincide");
    if (line.enter_sign != 1 && line.enter_sign != -1) fail("line.enter_sign", "must be +1 or -1");
    for (std::size_t i = 0; i < actors.size(); ++i) {
        const ActorSpec& a = actors[i];
        const std::string prefix = "actors[" + std::to_string(i) + "].";
        if (a.spawn_frame >= a.despawn_frame) fail(prefix + "spawn_frame", "must precede despawn_frame");
        if (!(a.axis_x > 0.0 && a.axis_y > 0.0)) fail(prefix + "axes", "must be positive");
        if (a.waypoints.size() < 2) fail(prefix + "waypoints", "need at least two");
        if (a.waypoints.front().frame_index != a.spawn_frame ||
            a.waypoints.back().frame_index != a.despawn_frame) {
            fail(prefix + "waypoints", "must span [spawn_frame, despawn_frame]");
        }
        for (std::size_t k = 0; k < a.waypoints.size(); ++k) {
            const Waypoint& w = a.waypoints[k];
            if (k > 0 && w.frame_index <= a.waypoints[k - 1].frame_index) {
                fail(prefix + "waypoints", "frame indices must strictly increase");
            }
            if (w.x < 0.0 || w.y < 0.0 || w.x > width - 1 || w.y > height - 1) {
                fail(prefix + "waypoints", "path leaves the frame");
            }
        }
        const double lo = std::min(level_at(0), level_at(frame_count - 1));
        const double hi = std::max(level_at(0), level_at(frame_count - 1));
        if (a.intensity >= std::floor(lo + 0.5) && a.intensity <= std::floor(hi + 0.5)) {
            fail(prefix + "intensity", "must differ from the background level");
        }
    }
}

Frame render_frame(const SceneSpec& spec, std::int64_t frame_index) {
    const int w = spec.width;
    const int h = spec.height;
    Frame frame(w, h, 1, frame_index);
    const std::uint64_t base = static_cast<std::uint64_t>(frame_index) * static_cast<std::uint64_t>(w) *
                               static_cast<std::uint64_t>(h);

    // Clean intensities first, then one noise pass over every pixel.
    std::vector<double> clean(static_cast<std::size_t>(w) * h, spec.level_at(frame_index));
    for (const ActorSpec& a : spec.actors) {
        if (frame_index < a.spawn_frame || frame_index > a.despawn_frame) continue;
        const Point2 c = a.position_at(static_cast<double>(frame_index));
        const int x0 = std::max(0, static_cast<int>(std::floor(c.x - a.axis_x)));
        const int x1 = std::min(w - 1, static_cast<int>(std::ceil(c.x + a.axis_x)));
        const int y0 = std::max(0, static_cast<int>(std::floor(c.y - a.axis_y)));
        const int y1 = std::min(h - 1, static_cast<int>(std::ceil(c.y + a.axis_y)));
        for (int y = y0; y <= y1; ++y) {
            const double dy = (y - c.y) / a.axis_y;
            for (int x = x0; x <= x1; ++x) {
                const double dx = (x - c.x) / a.axis_x;
                if (dx * dx + dy * dy <= 1.0) clean[static_cast<std::size_t>(y) * w + x] = a.intensity;
            }
        }
    }
    for (std::size_t p = 0; p < clean.size(); ++p) {
        double v = clean[p];
        if (spec.noise_sigma > 0.0) v += spec.noise_sigma * unit_noise(splitmix64_at(spec.seed, base + p + 1));
        frame.pixels[p] = quantize(v);
    }
    return frame;
}

int crossing_count(const ActorSpec& actor, const LineHint& line) {
    int count = 0;
    int last = 0;
    for (const Waypoint& w : actor.waypoints) {
        const int s = sign_of(line_cross(line, {w.x, w.y}));
        if (s == 0) continue;
        if (last != 0 && s != last) ++count;
        last = s;
    }
    return count;
}

std::vector<GroundTruthEvent> ground_truth(const SceneSpec& spec) {
    std::vector<GroundTruthEvent> events;
    for (const ActorSpec& a : spec.actors) {
        int last_sign = 0;
        std::size_t last_index = 0;
        for (std::size_t i = 0; i < a.waypoints.size(); ++i) {
            const Waypoint& w = a.waypoints[i];
            const double c = line_cross(spec.line, {w.x, w.y});
            const int s = sign_of(c);
            if (s == 0) continue;
            if (last_sign != 0 && s != last_sign) {
                // The path leaves the last signed waypoint and first reaches the
                // line inside the following segment.
                const Waypoint& a0 = a.waypoints[last_index];
                const Waypoint& a1 = a.waypoints[last_index + 1];
                const double c0 = line_cross(spec.line, {a0.x, a0.y});
                const double c1 = line_cross(spec.line, {a1.x, a1.y});
                const double t = c0 / (c0 - c1);
                const double when = static_cast<double>(a0.frame_index) +
                                    t * static_cast<double>(a1.frame_index - a0.frame_index);
                const Direction dir =
                    last_sign == spec.line.enter_sign ? Direction::Enter : Direction::Exit;
                const auto frame = static_cast<std::int64_t>(std::ceil(when));
                if (frame < spec.frame_count) events.push_back({frame, dir});
            }
            last_sign = s;
            last_index = i;
        }
    }
    std::stable_sort(events.begin(), events.end(), [](const auto& x, const auto& y) {
        return x.frame_index < y.frame_index;
    });
    return events;
}

SceneStream::SceneStream(SceneSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    width_ = spec_.width;
    height_ = spec_.height;
    channels_ = 1;
}

std::optional<Frame> SceneStream::next() {
    if (pos_ >= spec_.frame_count) return std::nullopt;
    return deliver(render_frame(spec_, pos_++));
}

Scene generate_scene(const SceneSpec& spec) {
    Scene scene;
    scene.frames = std::make_unique<SceneStream>(spec);
    scene.truth = ground_truth(spec);
    return scene;
}

// ---------------------------------------------------------------------------
// Presets

namespace {

class PresetRng {
public:
    explicit PresetRng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    std::mt19937_64 engine_;
};

// Nobody appears before the subtractor's learning rate has settled: with
// rate 1/t a walker covering a pixel for ~8 frames would otherwise sink into
// the background set before passing.
constexpr std::int64_t kWarmupFrames = 150;
constexpr std::int64_t kTailFrames = 30;

struct Geometry {
    int w;
    int h;
    double axis_x;
    double axis_y;
    double top;
    double bottom;
    double speed;
};

Geometry geometry_for(const PresetOptions& o) {
    Geometry g{};
    g.w = o.width;
    g.h = o.height;
    g.axis_x = o.width / 32.0;
    g.axis_y = o.height / 15.0;
    g.top = 0.12 * o.height;
    g.bottom = 0.88 * o.height;
    g.speed = o.height / 60.0;
    return g;
}

ActorSpec walker(const Geometry& g, std::int64_t spawn, double x, bool entering, double speed,
                 std::uint8_t intensity) {
    ActorSpec a;
    const auto frames = static_cast<std::int64_t>(std::ceil((g.bottom - g.top) / speed));
    a.spawn_frame = spawn;
    a.despawn_frame = spawn + frames;
    a.axis_x = g.axis_x;
    a.axis_y = g.axis_y;
    a.intensity = intensity;
    const double y0 = entering ? g.top : g.bottom;
    const double y1 = entering ? g.bottom : g.top;
    a.waypoints = {{a.spawn_frame, x, y0}, {a.despawn_frame, x, y1}};
    return a;
}

SceneSpec base_spec(const Geometry& g, std::uint64_t seed) {
    SceneSpec s;
    s.width = g.w;
    s.height = g.h;
    s.background_level = 90.0;
    s.noise_sigma = 3.0;
    s.seed = seed;
    s.line = {{0.0, g.h / 2.0}, {static_cast<double>(g.w), g.h / 2.0}, -1};
    return s;
}

std::int64_t end_of(const std::vector<ActorSpec>& actors) {
    std::int64_t end = 0;
    for (const auto& a : actors) end = std::max(end, a.despawn_frame);
    return end;
}

}  // namespace

SceneSpec preset(std::string_view name, std::uint64_t seed, const PresetOptions& options) {
    if (options.width < kMinFrameSide || options.height < kMinFrameSide) {
        throw ValidationError("synth: preset frames must be at least 16x16");
    }
    const Geometry g = geometry_for(options);
    PresetRng rng(seed);
    SceneSpec s = base_spec(g, seed);

    if (name == "single_cross") {
        const double x = g.w * rng.uniform(0.4, 0.6);
        s.actors.push_back(walker(g, kWarmupFrames, x, true, g.speed * rng.uniform(0.9, 1.1), 200));
        s.frame_count = end_of(s.actors) + kTailFrames;
    } else if (name == "n_people") {
        if (options.people < 1) throw ValidationError("synth.people: must be >= 1");
        // Entrants use the left lane and leavers the right one, so people
        // heading in opposite directions never merge.
        std::int64_t spawn = kWarmupFrames;
        for (int i = 0; i < options.people; ++i) {
            const bool entering = i % 2 == 0;
            const double lane = entering ? 0.33 : 0.67;
            const double x = g.w * (lane + rng.uniform(-0.03, 0.03));
            const double speed = g.speed * rng.uniform(0.9, 1.1);
            const std::uint8_t intensity = i % 3 == 2 ? 30 : 200;
            s.actors.push_back(walker(g, spawn, x, entering, speed, intensity));
            spawn += rng.integer(30, 45);
        }
        s.frame_count = end_of(s.actors) + kTailFrames;
    } else if (name == "occlusion_pair") {
        // Two people in adjacent lanes, walking in opposite directions and
        // meeting on the line, so their silhouettes overlap around it.
        const double gap = g.w * 0.02;
        const double centre = g.w * rng.uniform(0.45, 0.55);
        const double speed = g.speed * rng.uniform(0.7, 0.8);
        ActorSpec in = walker(g, kWarmupFrames, centre - gap, true, speed, 200);
        ActorSpec out = walker(g, kWarmupFrames, centre + gap, false, speed, 200);
        s.actors = {in, out};
        s.frame_count = end_of(s.actors) + kTailFrames;
    } else if (name == "lighting_drift") {
        // Slow brightening with one person pacing on the outer side only.
        s.frame_count = 400;
        s.background_ramp = 40.0;
        ActorSpec a;
        a.spawn_frame = kWarmupFrames;
        a.despawn_frame = kWarmupFrames + 180;
        a.axis_x = g.axis_x;
        a.axis_y = g.axis_y;
        a.intensity = 30;
        const double y = g.h * rng.uniform(0.18, 0.25);
        a.waypoints = {{a.spawn_frame, g.w * 0.2, y},
                       {a.spawn_frame + 90, g.w * 0.8, y},
                       {a.despawn_frame, g.w * 0.2, y}};
        s.actors.push_back(a);
    } else {
        std::string names;
        for (auto n : kPresetNames) names += (names.empty() ? "" : ", ") + std::string(n);
        throw ValidationError("synth: unknown preset '" + std::string(name) + "', valid: " + names);
    }
    s.validate();
    return s;
}

ScenePaths write_scene(const SceneSpec& spec, const fs::path& output_dir) {
    spec.validate();
    ScenePaths paths;
    paths.frames_dir = output_dir / "frames";
    paths.truth_csv = output_dir / "truth.csv";
    std::error_code ec;
    fs::create_directories(paths.frames_dir, ec);
    if (ec) throw IoError("cannot create " + paths.frames_dir.string() + ": " + ec.message());

    for (std::int64_t f = 0; f < spec.frame_count; ++f) {
        char name[32];
        std::snprintf(name, sizeof name, "%06lld.pgm", static_cast<long long>(f));
        write_pgm(render_frame(spec, f), paths.frames_dir / name);
    }
    paths.frame_count = static_cast<std::size_t>(spec.frame_count);
    write_ground_truth_csv(ground_truth(spec), paths.truth_csv);

    nlohmann::ordered_json meta;
    meta["width"] = spec.width;
    meta["height"] = spec.height;
    meta["frame_count"] = spec.frame_count;
    meta["seed"] = spec.seed;
    meta["line"] = {{"x1", spec.line.p1.x}, {"y1", spec.line.p1.y},
                    {"x2", spec.line.p2.x}, {"y2", spec.line.p2.y},
                    {"enter_sign", spec.line.enter_sign}};
    std::ofstream out(output_dir / "scene.json", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + (output_dir / "scene.json").string());
    out << meta.dump(2) << "\n";
    return paths;
}

}  // namespace doorcount::synth
