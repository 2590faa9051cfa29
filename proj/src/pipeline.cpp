#include "doorcount/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doorcount/error.hpp"

namespace doorcount {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

CountingLine line_from(const PipelineConfig& cfg) {
    if (!cfg.line_p1 || !cfg.line_p2) throw ValidationError("counter.line: not configured");
    return CountingLine{*cfg.line_p1, *cfg.line_p2, cfg.enter_sign, cfg.hysteresis, cfg.debounce};
}

}  // namespace

PipelineConfig resolve_config(const PipelineConfig& cfg, int width, int height,
                              const std::optional<synth::LineHint>& scene_line) {
    PipelineConfig r = cfg;
    if (r.blob.min_blob_area == 0) r.blob.min_blob_area = default_min_blob_area(width, height);
    if (r.tracker.max_match_distance == 0.0) {
        r.tracker.max_match_distance = default_max_match_distance(width, height);
    }
    if (!r.line_p1 && scene_line) {
        r.line_p1 = scene_line->p1;
        r.line_p2 = scene_line->p2;
        r.enter_sign = scene_line->enter_sign;
    }
    if (!r.mog2.weight_prune) r.mog2.weight_prune = r.mog2.effective_weight_prune();
    if (!r.line_p1) throw ValidationError("counter.line: required (x1,y1,x2,y2)");
    r.blob.validate();
    r.tracker.validate();
    return r;
}

Pipeline::Pipeline(const PipelineConfig& cfg, int width, int height, int channels)
    : cfg_(cfg),
      model_(width, height, channels, cfg.mog2),
      tracker_(cfg.tracker),
      counter_(line_from(cfg)) {
    cfg_.blob.validate();
}

FrameResult Pipeline::process(const Frame& frame) {
    auto t0 = Clock::now();
    model_.apply(frame, mask_);
    auto t1 = Clock::now();
    clean_ = clean_mask(binarize(mask_, cfg_.blob.shadow_policy), cfg_.blob);
    auto t2 = Clock::now();
    blobs_ = extract_blobs(connected_components(clean_), cfg_.blob.min_blob_area);
    auto t3 = Clock::now();
    FrameResult result;
    const auto& tracks = tracker_.update(blobs_, frame.index);
    result.events = counter_.update(tracks, frame.index);
    auto t4 = Clock::now();

    times_.subtraction += std::chrono::duration<double>(t1 - t0).count();
    times_.morphology += std::chrono::duration<double>(t2 - t1).count();
    times_.labeling += std::chrono::duration<double>(t3 - t2).count();
    times_.tracking += std::chrono::duration<double>(t4 - t3).count();
    return result;
}

// ---------------------------------------------------------------------------

namespace {

/// Stops a wrapped stream after a fixed number of frames.
class LimitedStream final : public FrameStream {
public:
    LimitedStream(std::unique_ptr<FrameStream> inner, std::int64_t limit)
        : inner_(std::move(inner)), limit_(limit) {
        width_ = inner_->width();
        height_ = inner_->height();
        channels_ = inner_->channels();
    }
    std::optional<Frame> next() override {
        if (delivered_ >= limit_) return std::nullopt;
        auto f = inner_->next();
        if (!f) return std::nullopt;
        return deliver(std::move(*f));
    }
    std::string describe() const override { return inner_->describe(); }

private:
    std::unique_ptr<FrameStream> inner_;
    std::int64_t limit_;
};

}  // namespace

OpenedInput open_input(const PipelineConfig& cfg) {
    OpenedInput in;
    switch (cfg.input.kind) {
    case InputKind::PgmDir:
        in.stream = open_pgm_sequence(cfg.input.path, cfg.input.pattern);
        break;
    case InputKind::Y4m:
        in.stream = open_y4m(cfg.input.path);
        break;
    case InputKind::Synth: {
        synth::PresetOptions opts;
        opts.people = cfg.input.people;
        opts.width = cfg.input.width;
        opts.height = cfg.input.height;
        synth::SceneSpec spec = synth::preset(cfg.input.preset, cfg.input.seed, opts);
        if (cfg.input.frames > 0) spec.frame_count = cfg.input.frames;
        synth::Scene scene = synth::generate_scene(spec);
        in.stream = std::move(scene.frames);
        in.truth = std::move(scene.truth);
        in.scene_line = spec.line;
        break;
    }
    }
    if (cfg.input.frames > 0 && cfg.input.kind != InputKind::Synth) {
        in.stream = std::make_unique<LimitedStream>(std::move(in.stream), cfg.input.frames);
    }
    if (cfg.eval.ground_truth) in.truth = read_ground_truth_csv(*cfg.eval.ground_truth);
    return in;
}

std::string RunSummary::to_string() const {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "frames=%lld seconds=%.3f fps=%.1f enter=%lld exit=%lld occupancy=%lld",
                  static_cast<long long>(frames), seconds, fps, static_cast<long long>(enter_total),
                  static_cast<long long>(exit_total), static_cast<long long>(occupancy));
    std::string s = buf;
    if (metrics) {
        std::snprintf(buf, sizeof buf, " f1_enter=%.4f f1_exit=%.4f average_f1=%.4f",
                      metrics->enter.f1, metrics->exit.f1, metrics->average_f1);
        s += buf;
    }
    return s;
}

namespace {

struct RunSinks {
    std::ostream* events = nullptr;
    std::ostream* tracks = nullptr;
    std::optional<fs::path> mask_dir;
    int mask_every = 0;
};

CountResult run_frames(const PipelineConfig& resolved, FrameStream& stream, const RunSinks& sinks) {
    CountResult out;
    Pipeline pipeline(resolved, stream.width(), stream.height(), stream.channels());
    const auto start = Clock::now();
    while (auto frame = stream.next()) {
        FrameResult r = pipeline.process(*frame);
        for (const CrossingEvent& e : r.events) {
            if (sinks.events) write_event_row(*sinks.events, e);
            out.events.push_back(e);
        }
        if (sinks.tracks) {
            char buf[160];
            for (const Track& t : pipeline.tracker().active()) {
                std::snprintf(buf, sizeof buf, "%lld,%lld,%.3f,%.3f,%s\n",
                              static_cast<long long>(frame->index), static_cast<long long>(t.id),
                              t.position().x, t.position().y, to_string(t.state));
                *sinks.tracks << buf;
            }
        }
        if (sinks.mask_dir && sinks.mask_every > 0 && frame->index % sinks.mask_every == 0) {
            char name[32];
            std::snprintf(name, sizeof name, "%06lld.pgm", static_cast<long long>(frame->index));
            write_pgm(pipeline.last_clean_mask().to_mask_frame(), *sinks.mask_dir / name);
        }
        ++out.summary.frames;
    }
    out.summary.seconds = seconds_since(start);
    out.summary.fps = out.summary.seconds > 0 ? out.summary.frames / out.summary.seconds : 0.0;
    out.summary.enter_total = pipeline.counter().enter_total();
    out.summary.exit_total = pipeline.counter().exit_total();
    out.summary.occupancy = pipeline.counter().occupancy();
    out.summary.stages = pipeline.times();
    if (static_cast<std::int64_t>(out.events.size()) !=
        out.summary.enter_total + out.summary.exit_total) {
        throw InvariantError("event log and counter totals disagree");
    }
    return out;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

}  // namespace

CountResult count_stream(const PipelineConfig& cfg, FrameStream& stream,
                         const std::optional<synth::LineHint>& scene_line) {
    const PipelineConfig resolved = resolve_config(cfg, stream.width(), stream.height(), scene_line);
    return run_frames(resolved, stream, {});
}

RunSummary run_count(const PipelineConfig& cfg) {
    cfg.validate();
    OpenedInput input = open_input(cfg);
    const PipelineConfig resolved =
        resolve_config(cfg, input.stream->width(), input.stream->height(), input.scene_line);

    const fs::path dir = resolved.output.dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    {
        std::ofstream echo = open_out(dir / "effective_config.ini");
        write_config(echo, resolved);
    }

    std::ofstream events = open_out(dir / "events.csv");
    write_events_header(events);
    RunSinks sinks;
    sinks.events = &events;
    std::ofstream tracks;
    if (resolved.output.tracks_csv) {
        tracks = open_out(dir / "tracks.csv");
        tracks << "frame_index,id,x,y,state\n";
        sinks.tracks = &tracks;
    }
    if (resolved.output.dump_masks_every > 0) {
        sinks.mask_dir = dir / "masks";
        sinks.mask_every = resolved.output.dump_masks_every;
        fs::create_directories(*sinks.mask_dir, ec);
        if (ec) throw IoError("cannot create " + sinks.mask_dir->string());
    }

    CountResult result = run_frames(resolved, *input.stream, sinks);
    events.flush();
    if (!events) throw IoError("write failed for " + (dir / "events.csv").string());

    if (input.truth) {
        const DirectionalCounts counts =
            match_events(result.events, *input.truth, resolved.eval.tolerance_frames);
        result.summary.metrics = build_report(counts, resolved.eval.p0);
        std::ofstream report = open_out(dir / "report.json");
        report << render_report(*result.summary.metrics).dump(2) << "\n";
    }
    return result.summary;
}

synth::ScenePaths run_synth(const std::string& preset, std::uint64_t seed, const fs::path& output_dir,
                            const synth::PresetOptions& options) {
    const synth::SceneSpec spec = synth::preset(preset, seed, options);
    return synth::write_scene(spec, output_dir);
}

MetricsReport run_eval(const fs::path& predicted_csv, const fs::path& truth_csv,
                       std::int64_t tolerance, double p0, const std::optional<fs::path>& output_dir) {
    const auto predicted = read_events_csv(predicted_csv);
    const auto truth = read_ground_truth_csv(truth_csv);
    MetricsReport report = build_report(match_events(predicted, truth, tolerance), p0);
    if (output_dir) {
        std::error_code ec;
        fs::create_directories(*output_dir, ec);
        if (ec) throw IoError("cannot create output directory " + output_dir->string());
        std::ofstream out = open_out(*output_dir / "report.json");
        out << render_report(report).dump(2) << "\n";
    }
    return report;
}

nlohmann::ordered_json BenchReport::to_json() const {
    nlohmann::ordered_json j;
    j["frames"] = frames;
    j["width"] = width;
    j["height"] = height;
    j["mean_fps"] = mean_fps;
    j["min_fps"] = min_fps;
    auto runs_json = nlohmann::ordered_json::array();
    for (const BenchRun& r : runs) {
        runs_json.push_back({{"seconds", r.seconds},
                             {"fps", r.fps},
                             {"stage_ms",
                              {{"subtraction", 1e3 * r.stages.subtraction},
                               {"morphology", 1e3 * r.stages.morphology},
                               {"labeling", 1e3 * r.stages.labeling},
                               {"tracking", 1e3 * r.stages.tracking}}}});
    }
    j["runs"] = runs_json;
    return j;
}

BenchReport run_bench(const PipelineConfig& cfg, int repeat) {
    if (repeat < 1) throw ValidationError("bench: repeat must be >= 1");
    cfg.validate();
    OpenedInput input = open_input(cfg);
    std::vector<Frame> frames;
    while (auto f = input.stream->next()) frames.push_back(std::move(*f));
    if (frames.empty()) throw IoError("bench: input has no frames");

    BenchReport report;
    report.frames = static_cast<std::int64_t>(frames.size());
    report.width = frames.front().width;
    report.height = frames.front().height;
    const PipelineConfig resolved =
        resolve_config(cfg, report.width, report.height, input.scene_line);
    for (int i = 0; i < repeat; ++i) {
        MemoryFrameStream stream(frames);
        const CountResult r = run_frames(resolved, stream, {});
        report.runs.push_back({r.summary.seconds, r.summary.fps, r.summary.stages});
    }
    double sum = 0.0;
    report.min_fps = report.runs.front().fps;
    for (const BenchRun& r : report.runs) {
        sum += r.fps;
        report.min_fps = std::min(report.min_fps, r.fps);
    }
    report.mean_fps = sum / static_cast<double>(report.runs.size());
    return report;
}

}  // namespace doorcount
