#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "a11y/geometry.hpp"
#include "a11y/raster.hpp"

namespace a11y {

enum class IssueCategory {
    ElementDescription,
    Contrast,
    HitRegion,
    ElementDetection,
    ClippedText,
    Traits,
    LargeText,
};

inline constexpr std::array kAllCategories = {
    IssueCategory::ElementDescription, IssueCategory::Contrast,  IssueCategory::HitRegion,
    IssueCategory::ElementDetection,   IssueCategory::ClippedText, IssueCategory::Traits,
    IssueCategory::LargeText,
};

enum class ElementKind {
    Text,
    Icon,
    Picture,
    TabButton,
    Toggle,
    Checkbox,
    SegmentedControl,
    TextField,
    Slider,
    Container,
    PageControl,
    Dialog,
};

inline constexpr std::array kAllElementKinds = {
    ElementKind::Text,      ElementKind::Icon,      ElementKind::Picture,          ElementKind::TabButton,
    ElementKind::Toggle,    ElementKind::Checkbox,  ElementKind::SegmentedControl, ElementKind::TextField,
    ElementKind::Slider,    ElementKind::Container, ElementKind::PageControl,      ElementKind::Dialog,
};

enum class SimilarityMode { embedding, pixel, structural };

std::string_view to_string(IssueCategory c);
std::string_view to_string(ElementKind k);
std::string_view to_string(SimilarityMode m);
std::optional<IssueCategory> parse_category(std::string_view s);
std::optional<ElementKind> parse_kind(std::string_view s);
std::optional<SimilarityMode> parse_similarity_mode(std::string_view s);

struct AccessibilityIssue {
    std::string issue_id;
    IssueCategory category = IssueCategory::ElementDescription;
    std::string check_name;  // open set; the audit tool defines the names
    std::string message;
    Rect bbox;

    friend bool operator==(const AccessibilityIssue&, const AccessibilityIssue&) = default;
};

struct ElementDetection {
    std::string detection_id;
    ElementKind kind = ElementKind::Text;
    Rect bbox;
    std::string text;  // empty when the detector recognized no text
    double confidence = 1.0;

    friend bool operator==(const ElementDetection&, const ElementDetection&) = default;
};

struct ScreenCapture {
    std::string capture_id;
    int ordinal = 0;
    Raster screenshot;
    std::vector<AccessibilityIssue> issues;
    std::vector<ElementDetection> detections;
    std::optional<std::vector<double>> embedding;
    double device_scale = 1.0;  // carried, never applied: all boxes are already in pixels

    const ElementDetection* find_detection(std::string_view id) const;

    friend bool operator==(const ScreenCapture&, const ScreenCapture&) = default;
};

struct CaptureBundle {
    std::string app_id;
    std::string run_id;
    std::vector<ScreenCapture> captures;  // sorted by ordinal
    std::optional<SimilarityMode> similarity_mode_hint;

    const ScreenCapture* find_capture(std::string_view id) const;
    const ScreenCapture& capture(std::string_view id) const;  // throws std::out_of_range

    friend bool operator==(const CaptureBundle&, const CaptureBundle&) = default;
};

/// Raised for malformed bundles; the message names the offending file and field.
class BundleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Loads and validates a bundle directory (manifest.json + per-capture assets).
/// Issue and detection boxes are clamped to the screenshot; captures are
/// returned in ordinal order.
CaptureBundle load_bundle(const std::filesystem::path& dir);

/// Writes a bundle in the layout load_bundle reads. Creates dir if needed.
void write_bundle(const CaptureBundle& bundle, const std::filesystem::path& dir);

inline constexpr double kAssociationIou = 0.3;

/// Links an audit issue to the detection it most plausibly describes:
/// best IoU if it reaches iou_threshold, else a detection containing the
/// issue's center. Ties: larger IoU, smaller area, then detection_id.
std::optional<std::string> associate_issue(const AccessibilityIssue& issue,
                                           std::span<const ElementDetection> detections,
                                           double iou_threshold = kAssociationIou);

}  // namespace a11y
