#pragma once

#include <cstdint>
#include <vector>

#include "doorcount/frame.hpp"

namespace doorcount {

enum class ShadowPolicy { TreatAsBackground, TreatAsForeground };

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // 0 or 1

    BinaryMask() = default;
    BinaryMask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

    bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v = true) {
        bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
    }
    std::size_t count() const;

    /// true -> 255, for dumping through the PGM writer.
    MaskFrame to_mask_frame() const;
};

/// Keys of the [blob] config section. An unset min_blob_area resolves to
/// 0.5% of the frame area.
struct MorphParams {
    int open_radius = 1;
    int close_radius = 2;
    int min_blob_area = 0;
    ShadowPolicy shadow_policy = ShadowPolicy::TreatAsBackground;

    void validate() const;
};

int default_min_blob_area(int width, int height);

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct Blob {
    int area = 0;
    Point2 centroid;
    int min_x = 0;
    int min_y = 0;
    int max_x = 0;
    int max_y = 0;
};

struct LabelImage {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> labels;  // 0 = background, 1..count
    int count = 0;
};

/// 255 is foreground, 0 background; any other label is a shadow and follows
/// the policy.
BinaryMask binarize(const MaskFrame& mask, ShadowPolicy policy = ShadowPolicy::TreatAsBackground);

/// Binary erosion/dilation with a (2r+1)x(2r+1) square. Pixels outside the
/// frame are ignored, which keeps erosion and dilation adjoint at the border.
BinaryMask erode(const BinaryMask& mask, int radius);
BinaryMask dilate(const BinaryMask& mask, int radius);

/// Opening with open_radius, then closing with close_radius.
BinaryMask clean_mask(const BinaryMask& mask, const MorphParams& params);

/// 8-connected labeling. Labels are numbered in raster order of each
/// component's first pixel.
LabelImage connected_components(const BinaryMask& mask);

/// One blob per component with area >= min_blob_area, in label order.
std::vector<Blob> extract_blobs(const LabelImage& labels, int min_blob_area);

}  // namespace doorcount
