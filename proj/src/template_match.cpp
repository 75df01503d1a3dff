#include "a11y/template_match.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace a11y {

namespace {

// Per-pixel variance below this is treated as flat.
constexpr double kFlatVariance = 1e-3;

struct Integral {
    int w = 0;
    std::vector<double> sum, sq;  // (w+1) x (h+1)

    explicit Integral(const GrayImage& img) : w(img.width + 1) {
        const std::size_t n = static_cast<std::size_t>(img.width + 1) * (img.height + 1);
        sum.assign(n, 0.0);
        sq.assign(n, 0.0);
        for (int y = 0; y < img.height; ++y) {
            double row = 0.0, row_sq = 0.0;
            for (int x = 0; x < img.width; ++x) {
                const double v = img.at(x, y);
                row += v;
                row_sq += v * v;
                const std::size_t i = static_cast<std::size_t>(y + 1) * w + x + 1;
                sum[i] = sum[i - w] + row;
                sq[i] = sq[i - w] + row_sq;
            }
        }
    }

    double box(const std::vector<double>& t, int x, int y, int bw, int bh) const {
        const auto at = [&](int xx, int yy) { return t[static_cast<std::size_t>(yy) * w + xx]; };
        return at(x + bw, y + bh) - at(x, y + bh) - at(x + bw, y) + at(x, y);
    }
};

}  // namespace

double ncc(const GrayImage& templ, const GrayImage& window) {
    if (templ.width > window.width || templ.height > window.height)
        throw std::invalid_argument("ncc: template larger than window");
    if (templ.width <= 0 || templ.height <= 0) return 0.0;

    const std::size_t n = templ.px.size();
    double mean = 0.0;
    for (float v : templ.px) mean += v;
    mean /= static_cast<double>(n);
    std::vector<float> centered(n);
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        centered[i] = static_cast<float>(templ.px[i] - mean);
        norm_sq += static_cast<double>(centered[i]) * centered[i];
    }
    if (norm_sq <= kFlatVariance * static_cast<double>(n)) return 0.0;
    const double norm_t = std::sqrt(norm_sq);

    const Integral integral(window);
    const int tw = templ.width, th = templ.height;
    double best = -1.0;
    bool any = false;
    for (int oy = 0; oy + th <= window.height; ++oy) {
        for (int ox = 0; ox + tw <= window.width; ++ox) {
            const double s = integral.box(integral.sum, ox, oy, tw, th);
            const double s2 = integral.box(integral.sq, ox, oy, tw, th);
            const double var = s2 - s * s / static_cast<double>(n);
            double c = 0.0;
            if (var > kFlatVariance * static_cast<double>(n)) {
                double cross = 0.0;
                for (int y = 0; y < th; ++y) {
                    const float* t = &centered[static_cast<std::size_t>(y) * tw];
                    const float* w = &window.px[static_cast<std::size_t>(oy + y) * window.width + ox];
                    float a0 = 0.f, a1 = 0.f, a2 = 0.f, a3 = 0.f;
                    int x = 0;
                    for (; x + 4 <= tw; x += 4) {
                        a0 += t[x] * w[x];
                        a1 += t[x + 1] * w[x + 1];
                        a2 += t[x + 2] * w[x + 2];
                        a3 += t[x + 3] * w[x + 3];
                    }
                    for (; x < tw; ++x) a0 += t[x] * w[x];
                    cross += static_cast<double>(a0 + a1) + static_cast<double>(a2 + a3);
                }
                c = cross / (norm_t * std::sqrt(var));
            }
            if (!any || c > best) best = c;
            any = true;
        }
    }
    return std::clamp(best, -1.0, 1.0);
}

double ncc(const Raster& templ, const Raster& window) {
    if (templ.width() > window.width() || templ.height() > window.height())
        throw std::invalid_argument("ncc: template larger than window");
    return ncc(to_gray(templ), to_gray(window));
}

std::array<double, 7> template_scales(int source_width, int new_width) {
    const double s = static_cast<double>(source_width) / static_cast<double>(new_width);
    std::array<double, 7> out{};
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = kScaleFactors[i] * s;
    return out;
}

std::vector<ScaledTemplate> make_scaled_templates(const Raster& crop, int source_width, int new_width) {
    std::vector<ScaledTemplate> out;
    if (crop.empty() || source_width <= 0 || new_width <= 0) return out;
    const GrayImage gray = to_gray(crop);
    for (const double scale : template_scales(source_width, new_width)) {
        const int w = static_cast<int>(std::lround(crop.width() / scale));
        const int h = static_cast<int>(std::lround(crop.height() / scale));
        if (w < 1 || h < 1) continue;
        out.push_back(ScaledTemplate{scale, resize_bilinear(gray, w, h)});
    }
    return out;
}

double best_ncc(const std::vector<ScaledTemplate>& templates, const GrayImage& window, int max_template_area) {
    double largest = 0.0;
    for (const auto& t : templates)
        largest = std::max(largest, static_cast<double>(t.image.width) * t.image.height);
    if (max_template_area > 0 && largest > max_template_area) {
        const double f = std::sqrt(largest / max_template_area);
        const auto shrink = [f](const GrayImage& g) {
            return resize_bilinear(g, std::max(1, static_cast<int>(std::lround(g.width / f))),
                                   std::max(1, static_cast<int>(std::lround(g.height / f))));
        };
        std::vector<ScaledTemplate> small;
        small.reserve(templates.size());
        for (const auto& t : templates) small.push_back(ScaledTemplate{t.scale, shrink(t.image)});
        return best_ncc(small, shrink(window), 0);
    }
    double best = -1.0;
    for (const auto& t : templates) {
        if (t.image.width > window.width || t.image.height > window.height) continue;
        best = std::max(best, ncc(t.image, window));
    }
    return best;
}

}  // namespace a11y
