#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "a11y/capture_model.hpp"
#include "a11y/element_groups.hpp"
#include "a11y/raster.hpp"
#include "a11y/template_match.hpp"

namespace a11y {

/// Everything saved about a template element so it can be found again on
/// another instance of the same screen, possibly in a later run.
struct TemplateRecord {
    std::string source_capture_id;
    ElementDetection template_element;
    std::vector<ElementDetection> all_detections;
    std::vector<ElementGroupRecord> groups;
    Raster crop;           // pixels under template_element.bbox
    int source_width = 0;  // screenshot width, for the scale ratio

    friend bool operator==(const TemplateRecord&, const TemplateRecord&) = default;
};

enum class MatchMethod { text, icon_template, position, grouped_text, none };
std::string_view to_string(MatchMethod m);

struct MatchResult {
    std::optional<std::string> matched_id;
    double score = 0.0;
    MatchMethod method = MatchMethod::none;
};

/// Heuristic subsets, from plain template matching up to the full dispatch.
enum class MatchStrategy { template_only, exact_text, fuzzy_text, full };
std::string_view to_string(MatchStrategy s);
std::optional<MatchStrategy> parse_match_strategy(std::string_view s);

struct MatchConfig {
    double text_threshold = 0.90;
    double icon_threshold = 0.80;
    double picture_threshold = 0.50;
    double position_threshold = 0.50;
    double search_padding = 0.25;  // per side, fraction of the candidate's size
    double group_margin = 0.05;
    int max_template_area = 4096;  // larger crops are compared downsampled; 0 disables
    MatchStrategy strategy = MatchStrategy::full;
};

class TemplateError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws TemplateError if target is not among capture.detections or has zero area.
TemplateRecord preprocess_template(const ScreenCapture& capture, const ElementDetection& target);
TemplateRecord preprocess_template(const ScreenCapture& capture, std::string_view detection_id);

/// A new screen prepared for repeated matching: groups and luma are computed once.
class MatchTarget {
public:
    explicit MatchTarget(const ScreenCapture& capture);

    const ScreenCapture& capture() const { return *capture_; }
    const std::vector<ElementGroupRecord>& groups() const { return groups_; }
    const GrayImage& gray() const { return gray_; }
    /// Group whose defining detection is `id`, if any.
    const ElementGroupRecord* group_owned_by(std::string_view id) const;
    /// Group listing `id` among its members, if any.
    const ElementGroupRecord* group_containing(std::string_view id) const;

private:
    const ScreenCapture* capture_;
    std::vector<ElementGroupRecord> groups_;
    GrayImage gray_;
};

/// Best NCC of the template crop over seven scales inside the candidate's
/// padded window, mapped to [0, 1] by (ncc + 1) / 2.
double icon_match(const TemplateRecord& templ, const ElementDetection& candidate, const ScreenCapture& new_capture,
                  const MatchConfig& config = {});

MatchResult find_best_match(const TemplateRecord& templ, const ScreenCapture& new_capture,
                            const MatchConfig& config = {});
MatchResult find_best_match(const TemplateRecord& templ, const MatchTarget& target, const MatchConfig& config = {});

}  // namespace a11y
