#include "a11y/element_groups.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <unordered_set>

namespace a11y {

namespace {

bool center_inside(const ElementDetection& d, const ElementDetection& box) {
    return d.detection_id != box.detection_id && box.bbox.contains_point(d.bbox.center_x(), d.bbox.center_y());
}

bool same_row(const ElementDetection& d, const ElementDetection& control) {
    return std::abs(d.bbox.center_y() - control.bbox.center_y()) <= control.bbox.h / 2.0;
}

double center_distance(const ElementDetection& a, const ElementDetection& b) {
    return std::hypot(a.bbox.center_x() - b.bbox.center_x(), a.bbox.center_y() - b.bbox.center_y());
}

std::string join_texts(const std::vector<const ElementDetection*>& texts) {
    std::string out;
    for (const auto* t : texts) {
        if (t->text.empty()) continue;
        if (!out.empty()) out.push_back(' ');
        out += t->text;
    }
    return out;
}

class Grouper {
public:
    explicit Grouper(std::span<const ElementDetection> detections) : all_(detections) {
        for (const auto& d : all_) sorted_.push_back(&d);
        std::sort(sorted_.begin(), sorted_.end(),
                  [](const ElementDetection* a, const ElementDetection* b) { return reading_order_less(*a, *b); });
    }

    std::vector<ElementGroupRecord> run() {
        for (const auto* d : of_kind(ElementKind::TabButton)) tab_button(*d);
        for (const auto* d : sorted_)
            if (d->kind == ElementKind::Toggle || d->kind == ElementKind::Checkbox) toggle(*d);
        for (const auto* d : of_kind(ElementKind::Slider)) slider(*d);
        for (const auto* d : of_kind(ElementKind::SegmentedControl)) segmented(*d);
        for (const auto* d : of_kind(ElementKind::TextField)) text_field(*d);

        auto containers = of_kind(ElementKind::Container);
        std::stable_sort(containers.begin(), containers.end(), [](const ElementDetection* a, const ElementDetection* b) {
            return a->bbox.area() < b->bbox.area();
        });
        for (const auto* d : containers) container(*d);
        return std::move(groups_);
    }

private:
    std::vector<const ElementDetection*> of_kind(ElementKind k) const {
        std::vector<const ElementDetection*> out;
        for (const auto* d : sorted_)
            if (d->kind == k) out.push_back(d);
        return out;
    }

    bool free(const ElementDetection& d) const { return !claimed_.contains(d.detection_id); }

    // Nearest unclaimed Text accepted by `pred`; distance ties resolve by reading order.
    template <typename Pred, typename Dist>
    const ElementDetection* nearest_text(Pred pred, Dist dist) const {
        const ElementDetection* best = nullptr;
        double best_d = std::numeric_limits<double>::infinity();
        for (const auto* t : sorted_) {
            if (t->kind != ElementKind::Text || !free(*t) || !pred(*t)) continue;
            const double d = dist(*t);
            if (d < best_d) {
                best = t;
                best_d = d;
            }
        }
        return best;
    }

    ElementGroupRecord& open(const ElementDetection& owner) {
        claimed_.insert(owner.detection_id);
        ElementGroupRecord g;
        g.kind = owner.kind;
        g.member_ids.push_back(owner.detection_id);
        groups_.push_back(std::move(g));
        return groups_.back();
    }

    void add(ElementGroupRecord& g, const ElementDetection& d) {
        claimed_.insert(d.detection_id);
        g.member_ids.push_back(d.detection_id);
    }

    void tab_button(const ElementDetection& tab) {
        if (!free(tab)) return;
        const ElementDetection* icon = nullptr;
        double best = std::numeric_limits<double>::infinity();
        for (const auto* d : sorted_) {
            if (d->kind != ElementKind::Icon || !free(*d) || !center_inside(*d, tab)) continue;
            const double dist = center_distance(*d, tab);
            if (dist < best) {
                icon = d;
                best = dist;
            }
        }
        if (!icon) return;
        const auto below_or_beside = [&](const ElementDetection& t) {
            if (center_inside(t, tab)) return true;
            const Rect& ib = icon->bbox;
            const bool below = t.bbox.center_y() > ib.center_y() &&
                               std::abs(t.bbox.center_x() - ib.center_x()) <= ib.w &&
                               t.bbox.y - ib.bottom() <= ib.h;
            const bool beside = same_row(t, *icon) &&
                                std::min(std::abs(t.bbox.x - ib.right()), std::abs(ib.x - t.bbox.right())) <= ib.w;
            return below || beside;
        };
        const auto* text = nearest_text(below_or_beside, [&](const ElementDetection& t) {
            return center_distance(t, *icon);
        });
        auto& g = open(tab);
        add(g, *icon);
        if (text) {
            add(g, *text);
            g.anchor_text_id = text->detection_id;
            g.label = text->text;
        }
        g.icon_only = !text;
    }

    void toggle(const ElementDetection& control) {
        if (!free(control)) return;
        const auto* text = nearest_text([&](const ElementDetection& t) { return same_row(t, control); },
                                        [&](const ElementDetection& t) { return center_distance(t, control); });
        auto& g = open(control);
        if (text) {
            add(g, *text);
            g.anchor_text_id = text->detection_id;
            g.label = text->text;
        }
    }

    void slider(const ElementDetection& s) {
        if (!free(s)) return;
        const double reach = 3.0 * std::max(s.bbox.h, 1);
        const auto* above = nearest_text(
            [&](const ElementDetection& t) {
                return t.bbox.center_y() < s.bbox.y && t.bbox.x < s.bbox.right() && t.bbox.right() > s.bbox.x &&
                       s.bbox.y - t.bbox.bottom() <= reach;
            },
            [&](const ElementDetection& t) { return static_cast<double>(s.bbox.y - t.bbox.bottom()); });
        std::vector<const ElementDetection*> row;
        for (const auto* t : sorted_)
            if (t->kind == ElementKind::Text && free(*t) && t != above && same_row(*t, s)) row.push_back(t);
        std::sort(row.begin(), row.end(), [&](const ElementDetection* a, const ElementDetection* b) {
            return std::make_tuple(center_distance(*a, s), a->detection_id) <
                   std::make_tuple(center_distance(*b, s), b->detection_id);
        });

        auto& g = open(s);
        if (above) add(g, *above);
        for (const auto* t : row) add(g, *t);
        const ElementDetection* anchor = above ? above : (row.empty() ? nullptr : row.front());
        if (anchor) {
            g.anchor_text_id = anchor->detection_id;
            g.label = anchor->text;
        }
    }

    void segmented(const ElementDetection& border) {
        if (!free(border)) return;
        const auto inside = contained_texts(border, all_);
        auto& g = open(border);
        for (const auto* t : inside)
            if (free(*t)) add(g, *t);
        if (!inside.empty()) g.anchor_text_id = inside.front()->detection_id;
        g.label = join_texts(inside);
    }

    void text_field(const ElementDetection& field) {
        if (!free(field)) return;
        auto& g = open(field);
        for (const auto* d : sorted_)
            if (free(*d) && center_inside(*d, field)) add(g, *d);
        const auto inside = contained_texts(field, all_);
        if (!inside.empty()) {
            g.anchor_text_id = inside.front()->detection_id;
            g.label = inside.front()->text;
        } else {
            g.label = field.text;
        }
    }

    void container(const ElementDetection& border) {
        if (!free(border)) return;
        auto& g = open(border);
        bool any = false, only_icons = true;
        for (const auto* d : sorted_) {
            if (!center_inside(*d, border)) continue;
            any = true;
            only_icons = only_icons && d->kind == ElementKind::Icon;
            if (free(*d)) add(g, *d);
        }
        const auto inside = contained_texts(border, all_);
        if (!inside.empty()) g.anchor_text_id = inside.front()->detection_id;
        g.label = join_texts(inside);
        g.icon_only = !any || only_icons;
    }

    std::span<const ElementDetection> all_;
    std::vector<const ElementDetection*> sorted_;
    std::unordered_set<std::string> claimed_;
    std::vector<ElementGroupRecord> groups_;
};

}  // namespace

bool ElementGroupRecord::has_member(std::string_view id) const {
    return std::find(member_ids.begin(), member_ids.end(), id) != member_ids.end();
}

bool reading_order_less(const ElementDetection& a, const ElementDetection& b) {
    return std::tie(a.bbox.y, a.bbox.x, a.detection_id) < std::tie(b.bbox.y, b.bbox.x, b.detection_id);
}

std::vector<const ElementDetection*> contained_texts(const ElementDetection& box,
                                                     std::span<const ElementDetection> detections) {
    std::vector<const ElementDetection*> out;
    for (const auto& d : detections)
        if (d.kind == ElementKind::Text && center_inside(d, box)) out.push_back(&d);
    std::sort(out.begin(), out.end(),
              [](const ElementDetection* a, const ElementDetection* b) { return reading_order_less(*a, *b); });
    return out;
}

std::vector<ElementGroupRecord> build_element_groups(std::span<const ElementDetection> detections) {
    return Grouper(detections).run();
}

}  // namespace a11y
