#include "a11y/geometry.hpp"

#include <cmath>

namespace a11y {

Rect intersection(const Rect& a, const Rect& b) {
    const int x0 = std::max(a.x, b.x);
    const int y0 = std::max(a.y, b.y);
    const int x1 = std::min(a.right(), b.right());
    const int y1 = std::min(a.bottom(), b.bottom());
    if (x1 <= x0 || y1 <= y0) return Rect{x0, y0, 0, 0};
    return Rect{x0, y0, x1 - x0, y1 - y0};
}

double iou(const Rect& a, const Rect& b) {
    const auto inter = intersection(a, b).area();
    const auto uni = a.area() + b.area() - inter;
    if (uni <= 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

Rect clamp_to(const Rect& r, int width, int height) {
    const int x0 = std::clamp(r.x, 0, width);
    const int y0 = std::clamp(r.y, 0, height);
    const int x1 = std::clamp(r.right(), x0, width);
    const int y1 = std::clamp(r.bottom(), y0, height);
    return Rect{x0, y0, x1 - x0, y1 - y0};
}

Rect expand(const Rect& r, double fraction, int width, int height) {
    const int dx = static_cast<int>(std::lround(r.w * fraction));
    const int dy = static_cast<int>(std::lround(r.h * fraction));
    return clamp_to(Rect{r.x - dx, r.y - dy, r.w + 2 * dx, r.h + 2 * dy}, width, height);
}

double normalized_center_distance(const Rect& a, int a_screen_width, const Rect& b, int b_screen_width) {
    const double aw = a_screen_width > 0 ? a_screen_width : 1.0;
    const double bw = b_screen_width > 0 ? b_screen_width : 1.0;
    const double dx = a.center_x() / aw - b.center_x() / bw;
    const double dy = a.center_y() / aw - b.center_y() / bw;
    return std::hypot(dx, dy);
}

}  // namespace a11y
