#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "a11y/capture_model.hpp"

namespace a11y {

/// A composite of detections matched as one unit. member_ids[0] is the
/// detection that defines the group (tab button, control, or border).
struct ElementGroupRecord {
    ElementKind kind = ElementKind::Container;
    std::vector<std::string> member_ids;
    std::optional<std::string> anchor_text_id;
    /// Descriptive text used for matching. Containers and segmented controls
    /// join every Text they contain in reading order; other kinds use the anchor.
    std::string label;
    /// Tab button without a label, or a container whose contents are all icons.
    bool icon_only = false;

    const std::string& owner_id() const { return member_ids.front(); }
    bool has_member(std::string_view id) const;

    friend bool operator==(const ElementGroupRecord&, const ElementGroupRecord&) = default;
};

/// Groups detections per the tab-button, toggle/checkbox, slider,
/// segmented-control, text-field and container rules. Each detection joins
/// at most one group. Controls claim their texts before containers do, and
/// smaller containers claim before the containers around them.
std::vector<ElementGroupRecord> build_element_groups(std::span<const ElementDetection> detections);

/// Texts whose center lies inside `box`, in reading order (top-to-bottom, then left-to-right).
std::vector<const ElementDetection*> contained_texts(const ElementDetection& box,
                                                     std::span<const ElementDetection> detections);

/// Reading-order comparison on bbox origin, then detection_id.
bool reading_order_less(const ElementDetection& a, const ElementDetection& b);

}  // namespace a11y
