#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "doorcount/blob.hpp"
#include "doorcount/counter.hpp"
#include "doorcount/mog2.hpp"
#include "doorcount/tracker.hpp"

namespace doorcount {

enum class InputKind { PgmDir, Y4m, Synth };

struct InputConfig {
    InputKind kind = InputKind::Synth;
    std::filesystem::path path;
    std::string pattern = "*.pgm";
    std::string preset = "single_cross";
    int people = 10;
    std::uint64_t seed = 7;
    int width = 320;
    int height = 240;
    /// Stop after this many frames; for synthetic input it sets the scene
    /// length. 0 keeps the natural length.
    std::int64_t frames = 0;
};

struct EvalConfig {
    std::optional<std::filesystem::path> ground_truth;
    std::int64_t tolerance_frames = 15;
    double p0 = 0.05;
};

struct OutputConfig {
    std::filesystem::path dir = "out";
    int dump_masks_every = 0;  // 0 disables mask dumps
    bool tracks_csv = false;
};

/// Everything a run needs. Resolution-dependent defaults (min_blob_area,
/// max_match_distance) stay unset here and are filled once the input
/// geometry is known.
struct PipelineConfig {
    InputConfig input;
    Mog2Params mog2;
    MorphParams blob;
    TrackerParams tracker;
    std::optional<Point2> line_p1;
    std::optional<Point2> line_p2;
    int enter_sign = -1;
    double hysteresis = 8.0;
    int debounce = 15;
    EvalConfig eval;
    OutputConfig output;

    /// Checks everything that does not depend on the input geometry.
    void validate() const;
};

/// Flat key/value view: "section.key" -> value.
using ConfigValues = std::map<std::string, std::string>;

/// Parses an INI-style file into section.key pairs.
ConfigValues read_config_file(const std::filesystem::path& path);

/// Applies values on top of cfg. Unknown keys and unparsable values throw
/// ValidationError naming the key.
void apply_config_values(PipelineConfig& cfg, const ConfigValues& values);

/// Canonical INI rendering of the effective configuration.
void write_config(std::ostream& out, const PipelineConfig& cfg);

const char* to_string(InputKind k);

}  // namespace doorcount
