#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "a11y/capture_model.hpp"
#include "a11y/element_matching.hpp"
#include "a11y/screen_grouping.hpp"

namespace a11y {

enum class IssueStatus { active, ignored, hidden_false_positive };
std::string_view to_string(IssueStatus s);
std::optional<IssueStatus> parse_issue_status(std::string_view s);

struct Occurrence {
    std::string capture_id;
    std::string issue_id;
    Rect bbox;  // highlight box on that capture

    friend bool operator==(const Occurrence&, const Occurrence&) = default;
};

/// Where a unique issue lives: a detection on some capture, or a raw box
/// when the audit box matched no detection.
struct IssueAnchor {
    int group_id = 0;
    std::string capture_id;
    std::optional<std::string> detection_id;
    Rect bbox;

    friend bool operator==(const IssueAnchor&, const IssueAnchor&) = default;
};

struct UniqueIssue {
    std::string unique_id;
    IssueCategory category = IssueCategory::ElementDescription;
    std::string check_name;
    std::string message;
    IssueAnchor anchor;
    std::vector<Occurrence> occurrences;
    IssueStatus status = IssueStatus::active;
    std::optional<std::string> ignored_by;

    friend bool operator==(const UniqueIssue&, const UniqueIssue&) = default;
};

struct IssueCounts {
    int total = 0;
    std::map<IssueCategory, int> by_category;
    std::map<IssueCategory, std::map<std::string, int>> by_check;

    friend bool operator==(const IssueCounts&, const IssueCounts&) = default;
};

struct CaptureRef {
    std::string capture_id;
    int ordinal = 0;
    int width = 0;
    int height = 0;

    friend bool operator==(const CaptureRef&, const CaptureRef&) = default;
};

struct Report {
    std::string app_id;
    std::string run_id;
    Storyboard storyboard;
    std::vector<CaptureRef> captures;
    std::vector<UniqueIssue> unique_issues;  // active issues, in group order
    std::vector<UniqueIssue> ignored_section;
    std::vector<UniqueIssue> hidden_section;
    IssueCounts app_counts;
    std::map<int, IssueCounts> group_counts;
    std::string generated_at;

    friend bool operator==(const Report&, const Report&) = default;
};

inline constexpr double kRawDedupeIou = 0.5;

struct DedupeConfig {
    MatchConfig match;
    double association_iou = kAssociationIou;
    double raw_dedupe_iou = kRawDedupeIou;
};

/// Collapses the issues of one screen group into unique issues. The
/// representative's issues seed the set; each other member's issue is matched
/// onto the representative (then onto any other capture already anchoring an
/// issue of the same check) and joins the unique issue anchored there.
std::vector<UniqueIssue> dedupe_group_issues(const ScreenGroup& group, const CaptureBundle& bundle,
                                             const DedupeConfig& config = {});

struct FalsePositiveSplit {
    std::vector<UniqueIssue> kept;
    std::vector<UniqueIssue> hidden;
};

/// Hides unique issues whose anchor has no detection on the anchor capture.
FalsePositiveSplit filter_false_positives(std::vector<UniqueIssue> issues, const CaptureBundle& bundle);

/// Recomputes app-level and per-group counts of the active issues.
Report summarize(Report report);

/// Current UTC time as ISO-8601 with a trailing Z.
std::string utc_timestamp();

/// Static remediation hint shown next to an issue.
std::string fix_info(IssueCategory category, std::string_view check_name);

}  // namespace a11y
