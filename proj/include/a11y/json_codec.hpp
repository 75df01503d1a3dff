#pragma once

#include <stdexcept>

#include <json.hpp>

#include "a11y/capture_model.hpp"
#include "a11y/element_groups.hpp"
#include "a11y/element_matching.hpp"
#include "a11y/report.hpp"
#include "a11y/screen_grouping.hpp"

namespace a11y {

using nlohmann::json;

class ReportFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void to_json(json& j, const Rect& r);
void from_json(const json& j, Rect& r);
void to_json(json& j, const ElementDetection& d);
void from_json(const json& j, ElementDetection& d);
void to_json(json& j, const ElementGroupRecord& g);
void from_json(const json& j, ElementGroupRecord& g);
void to_json(json& j, const Storyboard& s);
void from_json(const json& j, Storyboard& s);
void to_json(json& j, const UniqueIssue& u);
void from_json(const json& j, UniqueIssue& u);
void to_json(json& j, const IssueCounts& c);
void from_json(const json& j, IssueCounts& c);

/// Crop is stored as a base64-encoded PNG.
json template_to_json(const TemplateRecord& t);
TemplateRecord template_from_json(const json& j);

inline constexpr int kReportSchemaVersion = 1;

/// Self-contained report document. Active issues are nested
/// group -> category -> check_name; screenshot paths are relative to the
/// report directory.
json report_to_json(const Report& report);
/// Throws ReportFormatError on a malformed document.
Report report_from_json(const json& j);

std::string screenshot_relpath(const std::string& capture_id);

}  // namespace a11y
