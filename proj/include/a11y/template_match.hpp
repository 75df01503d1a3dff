#pragma once

#include <array>
#include <vector>

#include "a11y/raster.hpp"

namespace a11y {

/// Maximum zero-mean normalized cross-correlation of the template over every
/// placement fully inside the window, computed on luma. A zero-variance
/// template or window region contributes 0. Throws std::invalid_argument when
/// the template is larger than the window in either dimension.
double ncc(const Raster& templ, const Raster& window);
double ncc(const GrayImage& templ, const GrayImage& window);

/// Relative template scales around S = source_width / new_width.
inline constexpr std::array<double, 7> kScaleFactors = {0.91, 0.94, 0.97, 1.0, 1.03, 1.06, 1.09};
std::array<double, 7> template_scales(int source_width, int new_width);

struct ScaledTemplate {
    double scale = 1.0;
    GrayImage image;  // crop resized by 1/scale
};

/// Grayscale template pyramid for matching a crop taken on a source_width screen
/// against a new_width screen. Scales that collapse the crop below 1px are dropped.
std::vector<ScaledTemplate> make_scaled_templates(const Raster& crop, int source_width, int new_width);

/// Best NCC of any scaled template that fits in the window; -1 if none fits.
/// When max_template_area > 0 and the largest template exceeds it, templates
/// and window are downsampled by a common factor first.
double best_ncc(const std::vector<ScaledTemplate>& templates, const GrayImage& window, int max_template_area = 0);

}  // namespace a11y
