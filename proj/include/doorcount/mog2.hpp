#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "doorcount/frame.hpp"

namespace doorcount {

/// Tuning of the adaptive Gaussian-mixture subtractor. Field names double as
/// the config-file keys of the [mog2] section.
struct Mog2Params {
    int history = 500;
    double var_threshold = 16.0;
    int max_components = 5;
    double background_ratio = 0.9;
    double var_init = 15.0;
    double var_min = 4.0;
    double var_max = 75.0;
    /// Complexity-reduction constant. Unset means 0.05 / max_components.
    std::optional<double> weight_prune;
    bool detect_shadows = false;
    std::uint8_t shadow_value = 127;
    double shadow_threshold = 0.5;

    double effective_weight_prune() const {
        return weight_prune.value_or(0.05 / max_components);
    }

    /// Throws ValidationError naming the first offending field.
    void validate() const;
};

struct GaussianComponent {
    double weight = 0.0;
    double variance = 0.0;
    std::array<double, 3> mean{};
};

/// Per-pixel mixture model plus the online update that classifies each new
/// frame against it.
///
/// Every pixel keeps up to max_components Gaussians sorted by descending
/// weight (ties keep insertion order). Weights sum to one after each update.
/// A frame pixel is background when it matches a component that lies in the
/// smallest weight-ordered prefix whose cumulative weight, as it stood before
/// this frame, exceeds background_ratio.
class BackgroundModel {
public:
    BackgroundModel(int width, int height, int channels, const Mog2Params& params);

    /// Classifies the frame and advances the model. With no override the
    /// learning rate is max(1/t, 1/history) where t counts frames including
    /// this one. An override of exactly 0 classifies without learning.
    MaskFrame apply(const Frame& frame, std::optional<double> learning_rate = std::nullopt);
    void apply(const Frame& frame, MaskFrame& mask, std::optional<double> learning_rate = std::nullopt);

    /// Rounded mean of each pixel's dominant component.
    Frame background_image() const;

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    const Mog2Params& params() const { return params_; }
    std::int64_t frames_seen() const { return frames_seen_; }

    /// Learning rate the next apply() would use without an override.
    double next_learning_rate() const;

    int component_count(int x, int y) const;
    GaussianComponent component(int x, int y, int k) const;

    /// Replaces one pixel's mixture. The components must already satisfy the
    /// model invariants (sorted, weights summing to one, variances in range).
    void set_components(int x, int y, std::span<const GaussianComponent> components);

private:
    template <int C>
    void update_rows(const Frame& frame, MaskFrame& mask, double alpha);

    std::size_t slot(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_;
    int height_;
    int channels_;
    Mog2Params params_;
    double prune_;
    int stride_;  // doubles per component: weight, variance, mean[channels]
    std::vector<std::uint8_t> counts_;
    std::vector<double> data_;
    std::int64_t frames_seen_ = 0;
};

}  // namespace doorcount
