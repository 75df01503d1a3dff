#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "a11y/geometry.hpp"

namespace a11y {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// 8-bit RGB pixel raster, row-major, tightly packed.
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, Rgb fill = {});

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return width_ <= 0 || height_ <= 0; }

    Rgb at(int x, int y) const {
        const auto* p = &data_[(static_cast<std::size_t>(y) * width_ + x) * 3];
        return Rgb{p[0], p[1], p[2]};
    }
    void set(int x, int y, Rgb c) {
        auto* p = &data_[(static_cast<std::size_t>(y) * width_ + x) * 3];
        p[0] = c.r;
        p[1] = c.g;
        p[2] = c.b;
    }

    std::span<const std::uint8_t> bytes() const { return data_; }
    std::span<std::uint8_t> bytes() { return data_; }

    /// Copy of the region r ∩ bounds.
    Raster crop(const Rect& r) const;
    void fill_rect(const Rect& r, Rgb c);
    /// Copies src into this raster with its top-left at (x, y), clipped to bounds.
    void blit(const Raster& src, int x, int y);

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Single-channel float image (luma), used by template matching.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<float> px;

    float at(int x, int y) const { return px[static_cast<std::size_t>(y) * width + x]; }
};

GrayImage to_gray(const Raster& img);
GrayImage to_gray(const Raster& img, const Rect& region);

Raster resize_bilinear(const Raster& img, int width, int height);
GrayImage resize_bilinear(const GrayImage& img, int width, int height);

/// Mean over all channel values of the squared difference. Sizes must match.
double mean_squared_error(const Raster& a, const Raster& b);

}  // namespace a11y
