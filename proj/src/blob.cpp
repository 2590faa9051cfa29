#include "doorcount/blob.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "doorcount/error.hpp"

namespace doorcount {

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

MaskFrame BinaryMask::to_mask_frame() const {
    MaskFrame out(width, height);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        out.labels[i] = bits[i] ? MaskFrame::kForeground : MaskFrame::kBackground;
    }
    return out;
}

void MorphParams::validate() const {
    if (open_radius < 0) throw ValidationError("blob.open_radius: must be >= 0");
    if (close_radius < 0) throw ValidationError("blob.close_radius: must be >= 0");
    if (min_blob_area < 1) throw ValidationError("blob.min_blob_area: must be >= 1");
}

int default_min_blob_area(int width, int height) {
    const long area = static_cast<long>(width) * height;
    return static_cast<int>(std::max<long>(1, area / 200));
}

BinaryMask binarize(const MaskFrame& mask, ShadowPolicy policy) {
    BinaryMask out(mask.width, mask.height);
    const std::uint8_t shadow_bit = policy == ShadowPolicy::TreatAsForeground ? 1 : 0;
    for (std::size_t i = 0; i < mask.labels.size(); ++i) {
        const std::uint8_t v = mask.labels[i];
        out.bits[i] = v == MaskFrame::kForeground ? 1 : (v == MaskFrame::kBackground ? 0 : shadow_bit);
    }
    return out;
}

namespace {

// One separable pass of a binary min/max filter over a clipped 1-D window.
// Erosion keeps a pixel when every in-frame neighbour is set; dilation when
// any is. Prefix sums make each pass linear in the pixel count.
void filter_pass(const std::uint8_t* src, std::uint8_t* dst, int len, std::ptrdiff_t step,
                 int radius, bool erosion, std::vector<int>& prefix) {
    prefix.resize(static_cast<std::size_t>(len) + 1);
    prefix[0] = 0;
    for (int i = 0; i < len; ++i) prefix[i + 1] = prefix[i] + src[i * step];
    for (int i = 0; i < len; ++i) {
        const int lo = std::max(0, i - radius);
        const int hi = std::min(len - 1, i + radius);
        const int set = prefix[hi + 1] - prefix[lo];
        dst[i * step] = erosion ? (set == hi - lo + 1) : (set > 0);
    }
}

BinaryMask morph(const BinaryMask& mask, int radius, bool erosion) {
    if (radius <= 0) return mask;
    const int w = mask.width;
    const int h = mask.height;
    BinaryMask tmp(w, h);
    BinaryMask out(w, h);
    std::vector<int> prefix;
    for (int y = 0; y < h; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        filter_pass(mask.bits.data() + row, tmp.bits.data() + row, w, 1, radius, erosion, prefix);
    }
    // Vertical pass with running per-column sums so memory is walked row by row.
    std::vector<int> column_sum(static_cast<std::size_t>(w), 0);
    auto add_row = [&](int y, int sign) {
        const std::uint8_t* src = tmp.bits.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) column_sum[x] += sign * src[x];
    };
    for (int y = 0; y < std::min(radius, h); ++y) add_row(y, 1);
    for (int y = 0; y < h; ++y) {
        if (y + radius < h) add_row(y + radius, 1);
        if (y - radius - 1 >= 0) add_row(y - radius - 1, -1);
        const int window = std::min(h - 1, y + radius) - std::max(0, y - radius) + 1;
        std::uint8_t* dst = out.bits.data() + static_cast<std::size_t>(y) * w;
        if (erosion) {
            for (int x = 0; x < w; ++x) dst[x] = column_sum[x] == window;
        } else {
            for (int x = 0; x < w; ++x) dst[x] = column_sum[x] > 0;
        }
    }
    return out;
}

}  // namespace

BinaryMask erode(const BinaryMask& mask, int radius) { return morph(mask, radius, true); }

BinaryMask dilate(const BinaryMask& mask, int radius) { return morph(mask, radius, false); }

BinaryMask clean_mask(const BinaryMask& mask, const MorphParams& params) {
    BinaryMask opened = dilate(erode(mask, params.open_radius), params.open_radius);
    return erode(dilate(opened, params.close_radius), params.close_radius);
}

namespace {

class DisjointSet {
public:
    int make() {
        parent_.push_back(static_cast<int>(parent_.size()));
        return parent_.back();
    }
    int find(int a) {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
    }

private:
    std::vector<int> parent_;
};

}  // namespace

LabelImage connected_components(const BinaryMask& mask) {
    const int w = mask.width;
    const int h = mask.height;
    LabelImage out;
    out.width = w;
    out.height = h;
    out.labels.assign(static_cast<std::size_t>(w) * h, 0);

    // First pass: provisional labels (1-based) with equivalences.
    DisjointSet sets;
    sets.make();  // slot 0 is background
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (!mask.bits[i]) continue;
            int label = 0;
            auto visit = [&](int nx, int ny) {
                if (nx < 0 || nx >= w || ny < 0) return;
                const int other = out.labels[static_cast<std::size_t>(ny) * w + nx];
                if (other == 0) return;
                if (label == 0) {
                    label = other;
                } else if (other != label) {
                    sets.unite(label, other);
                }
            };
            visit(x - 1, y);
            visit(x - 1, y - 1);
            visit(x, y - 1);
            visit(x + 1, y - 1);
            out.labels[i] = label != 0 ? label : sets.make();
        }
    }

    // Second pass: resolve and renumber by first appearance in raster order.
    std::vector<std::int32_t> final_label;
    int count = 0;
    for (auto& l : out.labels) {
        if (l == 0) continue;
        const int root = sets.find(l);
        if (final_label.size() <= static_cast<std::size_t>(root)) final_label.resize(root + 1, 0);
        if (final_label[root] == 0) final_label[root] = ++count;
        l = final_label[root];
    }
    out.count = count;
    return out;
}

std::vector<Blob> extract_blobs(const LabelImage& labels, int min_blob_area) {
    struct Acc {
        long area = 0;
        double sx = 0.0;
        double sy = 0.0;
        int min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    };
    std::vector<Acc> acc(static_cast<std::size_t>(labels.count) + 1);
    for (int y = 0; y < labels.height; ++y) {
        for (int x = 0; x < labels.width; ++x) {
            const int l = labels.labels[static_cast<std::size_t>(y) * labels.width + x];
            if (l == 0) continue;
            Acc& a = acc[l];
            if (a.area == 0) {
                a.min_x = a.max_x = x;
                a.min_y = a.max_y = y;
            }
            ++a.area;
            a.sx += x;
            a.sy += y;
            a.min_x = std::min(a.min_x, x);
            a.max_x = std::max(a.max_x, x);
            a.min_y = std::min(a.min_y, y);
            a.max_y = std::max(a.max_y, y);
        }
    }
    std::vector<Blob> blobs;
    for (int l = 1; l <= labels.count; ++l) {
        const Acc& a = acc[l];
        if (a.area < min_blob_area) continue;
        Blob b;
        b.area = static_cast<int>(a.area);
        b.centroid = {a.sx / static_cast<double>(a.area), a.sy / static_cast<double>(a.area)};
        b.min_x = a.min_x;
        b.min_y = a.min_y;
        b.max_x = a.max_x;
        b.max_y = a.max_y;
        blobs.push_back(b);
    }
    return blobs;
}

}  // namespace doorcount
