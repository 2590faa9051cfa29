#pragma once

#include <cstdint>
#include <vector>

namespace doorcount {

/// Decoded 8-bit raster. Samples are row-major and interleaved when
/// channels == 3.
struct Frame {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels;
    std::int64_t index = 0;

    Frame() = default;
    Frame(int w, int h, int c, std::int64_t idx = 0)
        : width(w), height(h), channels(c),
          pixels(static_cast<std::size_t>(w) * h * c, 0), index(idx) {}

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    std::uint8_t& at(int x, int y, int c = 0) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t at(int x, int y, int c = 0) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
};

/// Per-pixel classification labels produced by the subtractor.
struct MaskFrame {
    static constexpr std::uint8_t kBackground = 0;
    static constexpr std::uint8_t kForeground = 255;

    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> labels;

    MaskFrame() = default;
    MaskFrame(int w, int h) : width(w), height(h), labels(static_cast<std::size_t>(w) * h, 0) {}
};

}  // namespace doorcount
