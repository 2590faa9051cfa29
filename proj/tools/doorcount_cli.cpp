// doorcount: background subtraction + tracking + line-crossing people counter.
//
//   doorcount count --config run.ini --output-dir out/
//   doorcount synth --preset n_people --people 4 --seed 3 --output-dir scene/
//   doorcount eval  --predicted out/events.csv --ground-truth scene/truth.csv
//   doorcount bench --config run.ini --repeat 3
//
// Exit codes: 0 success, 1 validation error, 2 input/IO error, 3 internal error.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "doorcount/config.hpp"
#include "doorcount/error.hpp"
#include "doorcount/pipeline.hpp"

namespace {

using namespace doorcount;

enum ExitCode { kOk = 0, kValidation = 1, kIo = 2, kInternal = 3 };

struct CommonFlags {
    std::string config;
    std::string output_dir;
    std::optional<std::uint64_t> seed;
    std::string ground_truth;
    std::optional<std::int64_t> tolerance;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "INI config file")->check(CLI::ExistingFile);
    cmd->add_option("--output-dir", f.output_dir, "Directory for outputs");
    cmd->add_option("--seed", f.seed, "Seed for synthetic input");
    cmd->add_option("--ground-truth", f.ground_truth, "Ground-truth CSV (frame,direction)");
    cmd->add_option("--tolerance-frames", f.tolerance, "Event matching window in frames");
    cmd->add_option("--set", f.overrides, "Override a config key, e.g. --set mog2.history=300");
}

PipelineConfig build_config(const CommonFlags& f, const std::string& input) {
    PipelineConfig cfg;
    if (!f.config.empty()) apply_config_values(cfg, read_config_file(f.config));
    ConfigValues extra;
    for (const std::string& kv : f.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ValidationError("--set expects section.key=value, got '" + kv + "'");
        extra[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    apply_config_values(cfg, extra);
    if (!input.empty()) {
        const std::filesystem::path p = input;
        cfg.input.kind = p.extension() == ".y4m" ? InputKind::Y4m : InputKind::PgmDir;
        cfg.input.path = p;
    }
    if (!f.output_dir.empty()) cfg.output.dir = f.output_dir;
    if (f.seed) cfg.input.seed = *f.seed;
    if (!f.ground_truth.empty()) cfg.eval.ground_truth = f.ground_truth;
    if (f.tolerance) cfg.eval.tolerance_frames = *f.tolerance;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entry/exit people counter for fixed-camera doorway video"};
    app.require_subcommand(1);

    CommonFlags count_flags;
    std::string count_input;
    auto* count = app.add_subcommand("count", "Count line crossings in a video");
    add_common(count, count_flags);
    count->add_option("--input", count_input, "PGM/PPM directory or .y4m file (default: config)");

    std::string synth_preset = "single_cross";
    std::uint64_t synth_seed = 7;
    synth::PresetOptions synth_opts;
    std::string synth_out = "scene";
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic scene with ground truth");
    synth_cmd->add_option("--preset", synth_preset, "single_cross | n_people | occlusion_pair | lighting_drift");
    synth_cmd->add_option("--seed", synth_seed, "Scene seed");
    synth_cmd->add_option("--people", synth_opts.people, "Actor count for n_people");
    synth_cmd->add_option("--width", synth_opts.width, "Frame width");
    synth_cmd->add_option("--height", synth_opts.height, "Frame height");
    synth_cmd->add_option("--output-dir", synth_out, "Destination directory");

    std::string eval_predicted;
    std::string eval_truth;
    std::int64_t eval_tolerance = 15;
    double eval_p0 = 0.05;
    std::string eval_out;
    auto* eval_cmd = app.add_subcommand("eval", "Score an events CSV against ground truth");
    eval_cmd->add_option("--predicted", eval_predicted, "events.csv from a count run")->required();
    eval_cmd->add_option("--ground-truth", eval_truth, "Ground-truth CSV")->required();
    eval_cmd->add_option("--tolerance-frames", eval_tolerance, "Matching window in frames");
    eval_cmd->add_option("--p0", eval_p0, "Null error rate for the binomial test");
    eval_cmd->add_option("--output-dir", eval_out, "Write report.json here");

    CommonFlags bench_flags;
    std::string bench_input;
    int bench_repeat = 3;
    auto* bench = app.add_subcommand("bench", "Measure pipeline throughput");
    add_common(bench, bench_flags);
    bench->add_option("--input", bench_input, "PGM/PPM directory or .y4m file (default: config)");
    bench->add_option("--repeat", bench_repeat, "Number of timed passes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }

    try {
        if (*count) {
            const PipelineConfig cfg = build_config(count_flags, count_input);
            const RunSummary summary = run_count(cfg);
            std::cout << summary.to_string() << std::endl;
        } else if (*synth_cmd) {
            const synth::ScenePaths paths = run_synth(synth_preset, synth_seed, synth_out, synth_opts);
            std::cout << "frames=" << paths.frame_count << " dir=" << paths.frames_dir.string()
                      << " truth=" << paths.truth_csv.string() << std::endl;
        } else if (*eval_cmd) {
            std::optional<std::filesystem::path> out;
            if (!eval_out.empty()) out = eval_out;
            const MetricsReport report = run_eval(eval_predicted, eval_truth, eval_tolerance, eval_p0, out);
            std::cout << render_report(report).dump(2) << std::endl;
        } else if (*bench) {
            if (bench_repeat < 1) throw ValidationError("--repeat must be >= 1");
            PipelineConfig cfg = build_config(bench_flags, bench_input);
            const BenchReport report = run_bench(cfg, bench_repeat);
            std::cout << report.to_json().dump(2) << std::endl;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kValidation;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << std::endl;
        return kInternal;
    }
    return kOk;
}
