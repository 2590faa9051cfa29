#include "doorcount/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>

#include "doorcount/error.hpp"

namespace doorcount {

const char* to_string(InputKind k) {
    switch (k) {
    case InputKind::PgmDir: return "pgm";
    case InputKind::Y4m: return "y4m";
    case InputKind::Synth: return "synth";
    }
    return "?";
}

void PipelineConfig::validate() const {
    mog2.validate();
    if (blob.open_radius < 0) throw ValidationError("blob.open_radius: must be >= 0");
    if (blob.close_radius < 0) throw ValidationError("blob.close_radius: must be >= 0");
    if (blob.min_blob_area < 0) throw ValidationError("blob.min_blob_area: must be >= 1");
    if (tracker.max_match_distance < 0.0) {
        throw ValidationError("tracker.max_match_distance: must be > 0");
    }
    if (tracker.min_hits < 1) throw ValidationError("tracker.min_hits: must be >= 1");
    if (tracker.max_missed < 0) throw ValidationError("tracker.max_missed: must be >= 0");
    if (line_p1.has_value() != line_p2.has_value()) throw ValidationError("counter.line: incomplete");
    if (!line_p1 && input.kind != InputKind::Synth) {
        throw ValidationError("counter.line: required for file inputs (x1,y1,x2,y2)");
    }
    if (line_p1) {
        CountingLine{*line_p1, *line_p2, enter_sign, hysteresis, debounce}.validate();
    } else {
        CountingLine{{0, 0}, {1, 0}, enter_sign, hysteresis, debounce}.validate();
    }
    if (eval.tolerance_frames < 0) throw ValidationError("eval.tolerance_frames: must be >= 0");
    if (!(eval.p0 > 0.0 && eval.p0 < 1.0)) throw ValidationError("eval.p0: must be in (0, 1)");
    if (output.dump_masks_every < 0) throw ValidationError("output.dump_masks_every: must be >= 0");
    if (input.kind != InputKind::Synth && input.path.empty()) {
        throw ValidationError("input.path: required for pgm and y4m inputs");
    }
    if (input.frames < 0) throw ValidationError("input.frames: must be >= 0");
    if (input.kind == InputKind::Synth && input.people < 1) {
        throw ValidationError("input.people: must be >= 1");
    }
}

ConfigValues read_config_file(const std::filesystem::path& path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        if (!std::filesystem::exists(path)) throw IoError("cannot open config " + path.string());
        throw ValidationError("config " + path.string() + ": " + e.message() + " (line " +
                              std::to_string(e.line()) + ")");
    }
    ConfigValues values;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ValidationError("config: key '" + section + "' is outside any section");
        for (const auto& [key, leaf] : body) values[section + "." + key] = leaf.data();
    }
    return values;
}

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
    throw ValidationError(key + ": expected " + expected + ", got '" + value + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T v{};
    in >> v;
    if (!in || !(in >> std::ws).eof()) bad_value(key, value, "a number");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    bad_value(key, value, "a boolean");
}

std::pair<Point2, Point2> parse_line(const std::string& key, const std::string& value) {
    double c[4];
    char comma[3];
    std::istringstream in(value);
    in >> c[0] >> comma[0] >> c[1] >> comma[1] >> c[2] >> comma[2] >> c[3];
    if (!in || comma[0] != ',' || comma[1] != ',' || comma[2] != ',' || !(in >> std::ws).eof()) {
        bad_value(key, value, "x1,y1,x2,y2");
    }
    return {{c[0], c[1]}, {c[2], c[3]}};
}

using Setter = std::function<void(PipelineConfig&, const std::string& key, const std::string& value)>;

template <typename T, typename Field>
Setter number(Field field) {
    return [field](PipelineConfig& cfg, const std::string& k, const std::string& v) {
        field(cfg) = parse_number<T>(k, v);
    };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"input.source",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             if (v == "pgm") c.input.kind = InputKind::PgmDir;
             else if (v == "y4m") c.input.kind = InputKind::Y4m;
             else if (v == "synth") c.input.kind = InputKind::Synth;
             else bad_value(k, v, "pgm, y4m or synth");
         }},
        {"input.path", [](PipelineConfig& c, const std::string&, const std::string& v) { c.input.path = v; }},
        {"input.pattern", [](PipelineConfig& c, const std::string&, const std::string& v) { c.input.pattern = v; }},
        {"input.preset", [](PipelineConfig& c, const std::string&, const std::string& v) { c.input.preset = v; }},
        {"input.people", number<int>([](PipelineConfig& c) -> int& { return c.input.people; })},
        {"input.seed", number<std::uint64_t>([](PipelineConfig& c) -> std::uint64_t& { return c.input.seed; })},
        {"input.width", number<int>([](PipelineConfig& c) -> int& { return c.input.width; })},
        {"input.height", number<int>([](PipelineConfig& c) -> int& { return c.input.height; })},
        {"input.frames", number<std::int64_t>([](PipelineConfig& c) -> std::int64_t& { return c.input.frames; })},

        {"mog2.history", number<int>([](PipelineConfig& c) -> int& { return c.mog2.history; })},
        {"mog2.var_threshold", number<double>([](PipelineConfig& c) -> double& { return c.mog2.var_threshold; })},
        {"mog2.max_components", number<int>([](PipelineConfig& c) -> int& { return c.mog2.max_components; })},
        {"mog2.background_ratio", number<double>([](PipelineConfig& c) -> double& { return c.mog2.background_ratio; })},
        {"mog2.var_init", number<double>([](PipelineConfig& c) -> double& { return c.mog2.var_init; })},
        {"mog2.var_min", number<double>([](PipelineConfig& c) -> double& { return c.mog2.var_min; })},
        {"mog2.var_max", number<double>([](PipelineConfig& c) -> double& { return c.mog2.var_max; })},
        {"mog2.weight_prune",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             c.mog2.weight_prune = parse_number<double>(k, v);
         }},
        {"mog2.detect_shadows",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.mog2.detect_shadows = parse_bool(k, v); }},
        {"mog2.shadow_value",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             const int s = parse_number<int>(k, v);
             if (s < 0 || s > 255) bad_value(k, v, "a byte value");
             c.mog2.shadow_value = static_cast<std::uint8_t>(s);
         }},
        {"mog2.shadow_threshold", number<double>([](PipelineConfig& c) -> double& { return c.mog2.shadow_threshold; })},

        {"blob.open_radius", number<int>([](PipelineConfig& c) -> int& { return c.blob.open_radius; })},
        {"blob.close_radius", number<int>([](PipelineConfig& c) -> int& { return c.blob.close_radius; })},
        {"blob.min_blob_area", number<int>([](PipelineConfig& c) -> int& { return c.blob.min_blob_area; })},
        {"blob.shadow_policy",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             if (v == "background") c.blob.shadow_policy = ShadowPolicy::TreatAsBackground;
             else if (v == "foreground") c.blob.shadow_policy = ShadowPolicy::TreatAsForeground;
             else bad_value(k, v, "background or foreground");
         }},

        {"tracker.max_match_distance",
         number<double>([](PipelineConfig& c) -> double& { return c.tracker.max_match_distance; })},
        {"tracker.min_hits", number<int>([](PipelineConfig& c) -> int& { return c.tracker.min_hits; })},
        {"tracker.max_missed", number<int>([](PipelineConfig& c) -> int& { return c.tracker.max_missed; })},

        {"counter.line",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             auto [a, b] = parse_line(k, v);
             c.line_p1 = a;
             c.line_p2 = b;
         }},
        {"counter.enter_sign", number<int>([](PipelineConfig& c) -> int& { return c.enter_sign; })},
        {"counter.hysteresis", number<double>([](PipelineConfig& c) -> double& { return c.hysteresis; })},
        {"counter.debounce", number<int>([](PipelineConfig& c) -> int& { return c.debounce; })},

        {"eval.ground_truth",
         [](PipelineConfig& c, const std::string&, const std::string& v) {
             if (v.empty()) c.eval.ground_truth.reset();
             else c.eval.ground_truth = v;
         }},
        {"eval.tolerance_frames",
         number<std::int64_t>([](PipelineConfig& c) -> std::int64_t& { return c.eval.tolerance_frames; })},
        {"eval.p0", number<double>([](PipelineConfig& c) -> double& { return c.eval.p0; })},

        {"output.dir", [](PipelineConfig& c, const std::string&, const std::string& v) { c.output.dir = v; }},
        {"output.dump_masks_every",
         number<int>([](PipelineConfig& c) -> int& { return c.output.dump_masks_every; })},
        {"output.tracks_csv",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.output.tracks_csv = parse_bool(k, v); }},
    };
    return table;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void apply_config_values(PipelineConfig& cfg, const ConfigValues& values) {
    const auto& table = setters();
    for (const auto& [key, value] : values) {
        const auto it = table.find(key);
        if (it == table.end()) throw ValidationError(key + ": unknown config key");
        it->second(cfg, key, value);
    }
}

void write_config(std::ostream& out, const PipelineConfig& c) {
    out << "[input]\n"
        << "source=" << to_string(c.input.kind) << "\n";
    if (c.input.kind == InputKind::Synth) {
        out << "preset=" << c.input.preset << "\n"
            << "people=" << c.input.people << "\n"
            << "seed=" << c.input.seed << "\n"
            << "width=" << c.input.width << "\n"
            << "height=" << c.input.height << "\n";
    } else {
        out << "path=" << c.input.path.string() << "\n";
        if (c.input.kind == InputKind::PgmDir) out << "pattern=" << c.input.pattern << "\n";
    }
    out << "frames=" << c.input.frames << "\n";
    out << "\n[mog2]\n"
        << "history=" << c.mog2.history << "\n"
        << "var_threshold=" << fmt_double(c.mog2.var_threshold) << "\n"
        << "max_components=" << c.mog2.max_components << "\n"
        << "background_ratio=" << fmt_double(c.mog2.background_ratio) << "\n"
        << "var_init=" << fmt_double(c.mog2.var_init) << "\n"
        << "var_min=" << fmt_double(c.mog2.var_min) << "\n"
        << "var_max=" << fmt_double(c.mog2.var_max) << "\n"
        << "weight_prune=" << fmt_double(c.mog2.effective_weight_prune()) << "\n"
        << "detect_shadows=" << (c.mog2.detect_shadows ? "true" : "false") << "\n"
        << "shadow_value=" << static_cast<int>(c.mog2.shadow_value) << "\n"
        << "shadow_threshold=" << fmt_double(c.mog2.shadow_threshold) << "\n";
    out << "\n[blob]\n"
        << "open_radius=" << c.blob.open_radius << "\n"
        << "close_radius=" << c.blob.close_radius << "\n"
        << "min_blob_area=" << c.blob.min_blob_area << "\n"
        << "shadow_policy="
        << (c.blob.shadow_policy == ShadowPolicy::TreatAsForeground ? "foreground" : "background") << "\n";
    out << "\n[tracker]\n"
        << "max_match_distance=" << fmt_double(c.tracker.max_match_distance) << "\n"
        << "min_hits=" << c.tracker.min_hits << "\n"
        << "max_missed=" << c.tracker.max_missed << "\n";
    out << "\n[counter]\n";
    if (c.line_p1 && c.line_p2) {
        out << "line=" << fmt_double(c.line_p1->x) << "," << fmt_double(c.line_p1->y) << ","
            << fmt_double(c.line_p2->x) << "," << fmt_double(c.line_p2->y) << "\n";
    }
    out << "enter_sign=" << c.enter_sign << "\n"
        << "hysteresis=" << fmt_double(c.hysteresis) << "\n"
        << "debounce=" << c.debounce << "\n";
    out << "\n[eval]\n";
    if (c.eval.ground_truth) out << "ground_truth=" << c.eval.ground_truth->string() << "\n";
    out << "tolerance_frames=" << c.eval.tolerance_frames << "\n"
        << "p0=" << fmt_double(c.eval.p0) << "\n";
    out << "\n[output]\n"
        << "dir=" << c.output.dir.string() << "\n"
        << "dump_masks_every=" << c.output.dump_masks_every << "\n"
        << "tracks_csv=" << (c.output.tracks_csv ? "true" : "false") << "\n";
}

}  // namespace doorcount
