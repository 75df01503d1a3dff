#pragma once

#include <algorithm>
#include <cstdint>

namespace a11y {

/// Axis-aligned rectangle in screenshot pixel coordinates.
struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    int right() const { return x + w; }
    int bottom() const { return y + h; }
    std::int64_t area() const { return static_cast<std::int64_t>(std::max(w, 0)) * std::max(h, 0); }
    bool empty() const { return w <= 0 || h <= 0; }
    double center_x() const { return x + w / 2.0; }
    double center_y() const { return y + h / 2.0; }

    bool contains_point(double px, double py) const {
        return px >= x && px <= right() && py >= y && py <= bottom();
    }

    friend bool operator==(const Rect&, const Rect&) = default;
};

Rect intersection(const Rect& a, const Rect& b);
double iou(const Rect& a, const Rect& b);

/// Clips r to [0, width) x [0, height). Rectangles entirely outside collapse
/// to a zero-size rectangle on the nearest edge.
Rect clamp_to(const Rect& r, int width, int height);

/// Grows r by fraction * (w, h) on every side, then clamps to the screen.
Rect expand(const Rect& r, double fraction, int width, int height);

/// Distance between centers, each normalized by its own screen width.
double normalized_center_distance(const Rect& a, int a_screen_width, const Rect& b, int b_screen_width);

}  // namespace a11y
