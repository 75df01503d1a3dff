#include "a11y/raster.hpp"

#include <cmath>
#include <stdexcept>

namespace a11y {

Raster::Raster(int width, int height, Rgb fill)
    : width_(std::max(width, 0)), height_(std::max(height, 0)),
      data_(static_cast<std::size_t>(width_) * height_ * 3) {
    for (std::size_t i = 0; i < data_.size(); i += 3) {
        data_[i] = fill.r;
        data_[i + 1] = fill.g;
        data_[i + 2] = fill.b;
    }
}

Raster Raster::crop(const Rect& r) const {
    const Rect c = clamp_to(r, width_, height_);
    Raster out(c.w, c.h);
    for (int y = 0; y < c.h; ++y) {
        const auto* src = &data_[(static_cast<std::size_t>(c.y + y) * width_ + c.x) * 3];
        std::copy(src, src + static_cast<std::size_t>(c.w) * 3,
                  out.data_.begin() + static_cast<std::ptrdiff_t>(y) * c.w * 3);
    }
    return out;
}

void Raster::fill_rect(const Rect& r, Rgb c) {
    const Rect k = clamp_to(r, width_, height_);
    for (int y = k.y; y < k.bottom(); ++y)
        for (int x = k.x; x < k.right(); ++x) set(x, y, c);
}

void Raster::blit(const Raster& src, int x, int y) {
    for (int sy = 0; sy < src.height(); ++sy) {
        const int dy = y + sy;
        if (dy < 0 || dy >= height_) continue;
        for (int sx = 0; sx < src.width(); ++sx) {
            const int dx = x + sx;
            if (dx < 0 || dx >= width_) continue;
            set(dx, dy, src.at(sx, sy));
        }
    }
}

namespace {

float luma(Rgb c) {
    return 0.299f * c.r + 0.587f * c.g + 0.114f * c.b;
}

// Source coordinate for destination index i under pixel-center alignment.
struct Tap {
    int i0;
    int i1;
    float t;
};

std::vector<Tap> make_taps(int src, int dst) {
    std::vector<Tap> taps(static_cast<std::size_t>(dst));
    const double ratio = static_cast<double>(src) / dst;
    for (int i = 0; i < dst; ++i) {
        double s = (i + 0.5) * ratio - 0.5;
        s = std::clamp(s, 0.0, static_cast<double>(src - 1));
        const int i0 = static_cast<int>(std::floor(s));
        const int i1 = std::min(i0 + 1, src - 1);
        taps[static_cast<std::size_t>(i)] = Tap{i0, i1, static_cast<float>(s - i0)};
    }
    return taps;
}

}  // namespace

GrayImage to_gray(const Raster& img) {
    return to_gray(img, Rect{0, 0, img.width(), img.height()});
}

GrayImage to_gray(const Raster& img, const Rect& region) {
    const Rect c = clamp_to(region, img.width(), img.height());
    GrayImage out{c.w, c.h, std::vector<float>(static_cast<std::size_t>(c.w) * c.h)};
    for (int y = 0; y < c.h; ++y)
        for (int x = 0; x < c.w; ++x)
            out.px[static_cast<std::size_t>(y) * c.w + x] = luma(img.at(c.x + x, c.y + y));
    return out;
}

Raster resize_bilinear(const Raster& img, int width, int height) {
    if (img.empty() || width <= 0 || height <= 0) return Raster(std::max(width, 0), std::max(height, 0));
    if (width == img.width() && height == img.height()) return img;
    const auto xs = make_taps(img.width(), width);
    const auto ys = make_taps(img.height(), height);
    Raster out(width, height);
    for (int y = 0; y < height; ++y) {
        const Tap ty = ys[static_cast<std::size_t>(y)];
        for (int x = 0; x < width; ++x) {
            const Tap tx = xs[static_cast<std::size_t>(x)];
            const Rgb a = img.at(tx.i0, ty.i0), b = img.at(tx.i1, ty.i0);
            const Rgb c = img.at(tx.i0, ty.i1), d = img.at(tx.i1, ty.i1);
            auto mix = [&](std::uint8_t pa, std::uint8_t pb, std::uint8_t pc, std::uint8_t pd) {
                const float top = pa + (pb - pa) * tx.t;
                const float bot = pc + (pd - pc) * tx.t;
                return static_cast<std::uint8_t>(std::lround(std::clamp(top + (bot - top) * ty.t, 0.0f, 255.0f)));
            };
            out.set(x, y, Rgb{mix(a.r, b.r, c.r, d.r), mix(a.g, b.g, c.g, d.g), mix(a.b, b.b, c.b, d.b)});
        }
    }
    return out;
}

GrayImage resize_bilinear(const GrayImage& img, int width, int height) {
    if (width == img.width && height == img.height) return img;
    GrayImage out{width, height, std::vector<float>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0))};
    if (img.width <= 0 || img.height <= 0 || width <= 0 || height <= 0) return out;
    const auto xs = make_taps(img.width, width);
    const auto ys = make_taps(img.height, height);
    for (int y = 0; y < height; ++y) {
        const Tap ty = ys[static_cast<std::size_t>(y)];
        for (int x = 0; x < width; ++x) {
            const Tap tx = xs[static_cast<std::size_t>(x)];
            const float top = img.at(tx.i0, ty.i0) + (img.at(tx.i1, ty.i0) - img.at(tx.i0, ty.i0)) * tx.t;
            const float bot = img.at(tx.i0, ty.i1) + (img.at(tx.i1, ty.i1) - img.at(tx.i0, ty.i1)) * tx.t;
            out.px[static_cast<std::size_t>(y) * width + x] = top + (bot - top) * ty.t;
        }
    }
    return out;
}

double mean_squared_error(const Raster& a, const Raster& b) {
    if (a.width() != b.width() || a.height() != b.height())
        throw std::invalid_argument("mean_squared_error: raster sizes differ");
    const auto pa = a.bytes();
    const auto pb = b.bytes();
    if (pa.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        const double d = static_cast<double>(pa[i]) - pb[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pa.size());
}

}  // namespace a11y
