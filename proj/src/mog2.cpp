#include "doorcount/mog2.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "doorcount/error.hpp"

namespace doorcount {

void Mog2Params::validate() const {
    auto fail = [](const char* field, const std::string& why) {
        throw ValidationError(std::string("mog2.") + field + ": " + why);
    };
    if (history < 1) fail("history", "must be >= 1");
    if (!(var_threshold > 0.0)) fail("var_threshold", "must be > 0");
    if (max_components < 1 || max_components > 255) fail("max_components", "must be in [1, 255]");
    if (!(background_ratio > 0.0 && background_ratio < 1.0)) {
        fail("background_ratio", "must be in (0, 1)");
    }
    if (!(var_min > 0.0)) fail("var_min", "must be > 0");
    if (!(var_min <= var_init)) fail("var_init", "must be >= var_min");
    if (!(var_init <= var_max)) fail("var_max", "must be >= var_init");
    const double prune = effective_weight_prune();
    if (!(prune >= 0.0 && prune < 1.0)) fail("weight_prune", "must be in [0, 1)");
    if (!(shadow_threshold > 0.0 && shadow_threshold < 1.0)) {
        fail("shadow_threshold", "must be in (0, 1)");
    }
    if (shadow_value == MaskFrame::kBackground || shadow_value == MaskFrame::kForeground) {
        fail("shadow_value", "must differ from 0 and 255");
    }
}

BackgroundModel::BackgroundModel(int width, int height, int channels, const Mog2Params& params)
    : width_(width), height_(height), channels_(channels), params_(params) {
    params_.validate();
    if (width < 1 || height < 1) throw ValidationError("mog2: frame dimensions must be positive");
    if (channels != 1 && channels != 3) throw ValidationError("mog2: channels must be 1 or 3");
    if (params_.detect_shadows && channels != 3) {
        throw ValidationError("mog2.detect_shadows: shadow detection needs 3-channel input");
    }
    prune_ = params_.effective_weight_prune();
    stride_ = 2 + channels;
    const std::size_t n = static_cast<std::size_t>(width) * height;
    counts_.assign(n, 0);
    data_.assign(n * params_.max_components * stride_, 0.0);
}

double BackgroundModel::next_learning_rate() const {
    const double t = static_cast<double>(frames_seen_ + 1);
    return std::max(1.0 / t, 1.0 / params_.history);
}

MaskFrame BackgroundModel::apply(const Frame& frame, std::optional<double> learning_rate) {
    MaskFrame mask;
    apply(frame, mask, learning_rate);
    return mask;
}

void BackgroundModel::apply(const Frame& frame, MaskFrame& mask, std::optional<double> learning_rate) {
    if (frame.width != width_ || frame.height != height_ || frame.channels != channels_) {
        throw ValidationError("mog2: frame is " + std::to_string(frame.width) + "x" +
                              std::to_string(frame.height) + "x" + std::to_string(frame.channels) +
                              ", model is " + std::to_string(width_) + "x" +
                              std::to_string(height_) + "x" + std::to_string(channels_));
    }
    if (learning_rate && !(*learning_rate >= 0.0 && *learning_rate <= 1.0)) {
        throw ValidationError("mog2: learning rate override must be in [0, 1]");
    }
    const double alpha = learning_rate ? *learning_rate : next_learning_rate();
    ++frames_seen_;

    if (mask.width != width_ || mask.height != height_) mask = MaskFrame(width_, height_);
    if (channels_ == 1) {
        update_rows<1>(frame, mask, alpha);
    } else {
        update_rows<3>(frame, mask, alpha);
    }
}

template <int C>
void BackgroundModel::update_rows(const Frame& frame, MaskFrame& mask, double alpha) {
    constexpr int kStride = 2 + C;
    const int max_k = params_.max_components;
    const double var_threshold = params_.var_threshold;
    const double ratio = params_.background_ratio;
    const double var_init = params_.var_init;
    const double var_min = params_.var_min;
    const double var_max = params_.var_max;
    const double prune = prune_;
    const bool learn = alpha > 0.0;
    const bool shadows = params_.detect_shadows && C == 3;
    const std::uint8_t shadow_label = params_.shadow_value;

    const std::uint8_t* px = frame.pixels.data();
    std::uint8_t* out = mask.labels.data();
    const std::size_t n_pixels = counts_.size();

    for (std::size_t p = 0; p < n_pixels; ++p, px += C) {
        double* g = data_.data() + p * max_k * kStride;
        int n = counts_[p];

        double x[C];
        for (int c = 0; c < C; ++c) x[c] = px[c];

        // Dominant component as it stood before this frame (shadow reference).
        double dom_mean[C] = {};
        double dom_var = 0.0;
        const bool have_dom = n > 0;
        if (shadows && have_dom) {
            for (int c = 0; c < C; ++c) dom_mean[c] = g[2 + c];
            dom_var = g[1];
        }

        // 1. First match in weight order; membership in the background prefix
        //    uses the cumulative weight of the components ahead of it.
        int matched = -1;
        bool in_background = false;
        double cumulative = 0.0;
        for (int k = 0; k < n; ++k) {
            const double* comp = g + k * kStride;
            double d2 = 0.0;
            for (int c = 0; c < C; ++c) {
                const double d = x[c] - comp[2 + c];
                d2 += d * d;
            }
            if (d2 <= var_threshold * comp[1]) {
                matched = k;
                in_background = cumulative <= ratio;
                break;
            }
            cumulative += comp[0];
        }

        std::uint8_t label =
            (matched >= 0 && in_background) ? MaskFrame::kBackground : MaskFrame::kForeground;

        if (learn) {
            // 2. Decay every weight, reward the match, drop non-positive weights.
            int kept = 0;
            int matched_after = -1;
            for (int k = 0; k < n; ++k) {
                double* comp = g + k * kStride;
                double w = comp[0] - alpha * (comp[0] + prune);
                if (k == matched) w += alpha;
                if (w <= 0.0) continue;
                if (k == matched) matched_after = kept;
                double* dst = g + kept * kStride;
                if (dst != comp) std::copy_n(comp, kStride, dst);
                dst[0] = w;
                ++kept;
            }
            n = kept;

            if (matched_after >= 0) {
                // 3. Pull the matched Gaussian toward the sample.
                double* comp = g + matched_after * kStride;
                const double rate = alpha / comp[0];
                double d2 = 0.0;
                for (int c = 0; c < C; ++c) {
                    const double d = x[c] - comp[2 + c];
                    d2 += d * d;
                    comp[2 + c] += rate * d;
                }
                const double var = comp[1] + rate * (d2 / C - comp[1]);
                comp[1] = std::clamp(var, var_min, var_max);
            } else {
                // 4. New component, evicting the lowest-weight one when full.
                if (n == max_k) --n;
                double* comp = g + n * kStride;
                comp[0] = alpha;
                comp[1] = var_init;
                for (int c = 0; c < C; ++c) comp[2 + c] = x[c];
                ++n;
            }

            // 5. Renormalize and restore descending order (stable).
            double total = 0.0;
            for (int k = 0; k < n; ++k) total += g[k * kStride];
            if (total > 0.0) {
                for (int k = 0; k < n; ++k) g[k * kStride] /= total;
            }
            for (int i = 1; i < n; ++i) {
                for (int j = i; j > 0 && g[(j - 1) * kStride] < g[j * kStride]; --j) {
                    std::swap_ranges(g + (j - 1) * kStride, g + j * kStride, g + j * kStride);
                }
            }
            counts_[p] = static_cast<std::uint8_t>(n);
        }

        // 7. Darkened-background test on foreground pixels.
        if (shadows && have_dom && label == MaskFrame::kForeground) {
            double dot = 0.0;
            double norm = 0.0;
            for (int c = 0; c < C; ++c) {
                dot += x[c] * dom_mean[c];
                norm += dom_mean[c] * dom_mean[c];
            }
            if (norm > 0.0) {
                const double b = dot / norm;
                if (b >= params_.shadow_threshold && b <= 1.0) {
                    double d2 = 0.0;
                    for (int c = 0; c < C; ++c) {
                        const double d = x[c] - b * dom_mean[c];
                        d2 += d * d;
                    }
                    if (d2 <= var_threshold * dom_var) label = shadow_label;
                }
            }
        }
        out[p] = label;
    }
}

Frame BackgroundModel::background_image() const {
    if (frames_seen_ == 0) throw ValidationError("mog2: background image requested before any frame");
    Frame img(width_, height_, channels_);
    const int max_k = params_.max_components;
    for (std::size_t p = 0; p < counts_.size(); ++p) {
        if (counts_[p] == 0) continue;
        const double* comp = data_.data() + p * max_k * stride_;
        for (int c = 0; c < channels_; ++c) {
            const double v = std::floor(comp[2 + c] + 0.5);
            img.pixels[p * channels_ + c] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
        }
    }
    return img;
}

int BackgroundModel::component_count(int x, int y) const { return counts_.at(slot(x, y)); }

GaussianComponent BackgroundModel::component(int x, int y, int k) const {
    const std::size_t p = slot(x, y);
    if (k < 0 || k >= counts_.at(p)) throw ValidationError("mog2: component index out of range");
    const double* comp = data_.data() + (p * params_.max_components + k) * stride_;
    GaussianComponent out;
    out.weight = comp[0];
    out.variance = comp[1];
    for (int c = 0; c < channels_; ++c) out.mean[c] = comp[2 + c];
    return out;
}

void BackgroundModel::set_components(int x, int y, std::span<const GaussianComponent> components) {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) {
        throw ValidationError("mog2: pixel out of range");
    }
    if (components.size() > static_cast<std::size_t>(params_.max_components)) {
        throw ValidationError("mog2: more components than max_components");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < components.size(); ++k) {
        const GaussianComponent& c = components[k];
        if (!(c.weight > 0.0)) throw ValidationError("mog2: component weight must be > 0");
        if (c.variance < params_.var_min || c.variance > params_.var_max) {
            throw ValidationError("mog2: component variance outside [var_min, var_max]");
        }
        if (k > 0 && components[k - 1].weight < c.weight) {
            throw ValidationError("mog2: components must be sorted by descending weight");
        }
        sum += c.weight;
    }
    if (!components.empty() && std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError("mog2: component weights must sum to 1");
    }
    const std::size_t p = slot(x, y);
    double* g = data_.data() + p * params_.max_components * stride_;
    for (std::size_t k = 0; k < components.size(); ++k) {
        double* dst = g + k * stride_;
        dst[0] = components[k].weight;
        dst[1] = components[k].variance;
        for (int c = 0; c < channels_; ++c) dst[2 + c] = components[k].mean[c];
    }
    counts_[p] = static_cast<std::uint8_t>(components.size());
}

}  // namespace doorcount
