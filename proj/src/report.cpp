#include "a11y/report.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <map>
#include <memory>

namespace a11y {

namespace {

constexpr std::array<std::string_view, 3> kStatusNames = {"active", "ignored", "hidden_false_positive"};

// Per-group working state for de-duplication.
class GroupDeduper {
public:
    GroupDeduper(const ScreenGroup& group, const CaptureBundle& bundle, const DedupeConfig& config)
        : group_(group), bundle_(bundle), cfg_(config), rep_(bundle.capture(group.representative_id)) {}

    std::vector<UniqueIssue> run() {
        for (const auto& issue : rep_.issues) place(rep_, issue, /*is_rep=*/true);
        for (const auto& id : group_.member_ids) {
            if (id == rep_.capture_id) continue;
            const auto& cap = bundle_.capture(id);
            for (const auto& issue : cap.issues) place(cap, issue, /*is_rep=*/false);
        }
        for (std::size_t i = 0; i < out_.size(); ++i) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "g%d-%03zu", group_.group_id, i);
            out_[i].unique_id = buf;
        }
        return std::move(out_);
    }

private:
    void place(const ScreenCapture& cap, const AccessibilityIssue& issue, bool is_rep) {
        const Occurrence occ{cap.capture_id, issue.issue_id, issue.bbox};
        const auto det = associate_issue(issue, cap.detections, cfg_.association_iou);
        if (!det) {
            for (auto& u : out_) {
                if (!u.anchor.detection_id && u.check_name == issue.check_name &&
                    iou(u.anchor.bbox, issue.bbox) >= cfg_.raw_dedupe_iou) {
                    u.occurrences.push_back(occ);
                    return;
                }
            }
            create(cap, issue, std::nullopt, issue.bbox);
            return;
        }

        // Same element of the same capture already carries this check.
        if (auto* u = find_anchored(cap.capture_id, *det, issue.check_name)) {
            u->occurrences.push_back(occ);
            return;
        }
        if (!is_rep) {
            const TemplateRecord templ = preprocess_template(cap, *det);
            for (const auto& anchor_capture : anchor_captures(issue.check_name, cap.capture_id)) {
                const auto result = find_best_match(templ, target(anchor_capture), cfg_.match);
                if (!result.matched_id) continue;
                if (auto* u = find_anchored(anchor_capture, *result.matched_id, issue.check_name)) {
                    u->occurrences.push_back(occ);
                    return;
                }
            }
        }
        const auto* d = cap.find_detection(*det);
        create(cap, issue, det, d->bbox);
    }

    // Representative first, then other captures anchoring an issue of this check, in creation order.
    std::vector<std::string> anchor_captures(const std::string& check_name, const std::string& self) const {
        std::vector<std::string> out{rep_.capture_id};
        for (const auto& u : out_) {
            if (u.check_name != check_name || !u.anchor.detection_id) continue;
            const auto& c = u.anchor.capture_id;
            if (c == self || std::find(out.begin(), out.end(), c) != out.end()) continue;
            out.push_back(c);
        }
        return out;
    }

    UniqueIssue* find_anchored(const std::string& capture_id, const std::string& detection_id,
                               const std::string& check_name) {
        for (auto& u : out_)
            if (u.anchor.capture_id == capture_id && u.anchor.detection_id == detection_id &&
                u.check_name == check_name)
                return &u;
        return nullptr;
    }

    const MatchTarget& target(const std::string& capture_id) {
        auto it = targets_.find(capture_id);
        if (it == targets_.end())
            it = targets_.emplace(capture_id, std::make_unique<MatchTarget>(bundle_.capture(capture_id))).first;
        return *it->second;
    }

    void create(const ScreenCapture& cap, const AccessibilityIssue& issue, std::optional<std::string> det,
                const Rect& bbox) {
        UniqueIssue u;
        u.category = issue.category;
        u.check_name = issue.check_name;
        u.message = issue.message;
        u.anchor = IssueAnchor{group_.group_id, cap.capture_id, std::move(det), bbox};
        u.occurrences.push_back(Occurrence{cap.capture_id, issue.issue_id, issue.bbox});
        out_.push_back(std::move(u));
    }

    const ScreenGroup& group_;
    const CaptureBundle& bundle_;
    const DedupeConfig& cfg_;
    const ScreenCapture& rep_;
    std::vector<UniqueIssue> out_;
    std::map<std::string, std::unique_ptr<MatchTarget>> targets_;
};

void count(IssueCounts& c, const UniqueIssue& u) {
    ++c.total;
    ++c.by_category[u.category];
    ++c.by_check[u.category][u.check_name];
}

}  // namespace

std::string_view to_string(IssueStatus s) { return kStatusNames[static_cast<std::size_t>(s)]; }

std::optional<IssueStatus> parse_issue_status(std::string_view s) {
    for (std::size_t i = 0; i < kStatusNames.size(); ++i)
        if (kStatusNames[i] == s) return static_cast<IssueStatus>(i);
    return std::nullopt;
}

std::vector<UniqueIssue> dedupe_group_issues(const ScreenGroup& group, const CaptureBundle& bundle,
                                             const DedupeConfig& config) {
    return GroupDeduper(group, bundle, config).run();
}

FalsePositiveSplit filter_false_positives(std::vector<UniqueIssue> issues, const CaptureBundle& bundle) {
    FalsePositiveSplit split;
    for (auto& u : issues) {
        const auto* cap = bundle.find_capture(u.anchor.capture_id);
        const bool visible = u.anchor.detection_id && cap && cap->find_detection(*u.anchor.detection_id);
        if (visible) {
            split.kept.push_back(std::move(u));
        } else {
            u.status = IssueStatus::hidden_false_positive;
            split.hidden.push_back(std::move(u));
        }
    }
    return split;
}

Report summarize(Report report) {
    report.app_counts = IssueCounts{};
    report.group_counts.clear();
    for (const auto& g : report.storyboard.groups) report.group_counts[g.group_id] = IssueCounts{};
    for (const auto& u : report.unique_issues) {
        count(report.app_counts, u);
        count(report.group_counts[u.anchor.group_id], u);
    }
    return report;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fix_info(IssueCategory category, std::string_view check_name) {
    static const std::map<std::string, std::string, std::less<>> by_check = {
        {"Element has no description",
         "Set an accessibility label that names the element's purpose in a few words."},
        {"Hit area is too small", "Make the tappable area at least 44x44 points, padding around small glyphs."},
        {"Contrast failed", "Raise the contrast between text and background to at least 4.5:1."},
        {"Contrast nearly passed", "Darken or lighten the text slightly to reach a 4.5:1 contrast ratio."},
        {"Dynamic Type font sizes are unsupported", "Use text styles so text scales with the user's size setting."},
        {"Dynamic Type font sizes are partially unsupported",
         "Check that every label in the view adopts scalable text styles."},
        {"Text clipped", "Allow labels to wrap or grow instead of truncating at larger text sizes."},
        {"Element has incomplete traits", "Add the traits that describe the behavior, such as button or header."},
        {"Potentially inaccessible text", "Expose text rendered in images through an accessibility label."},
        {"Element is not reachable", "Make sure the element is exposed to assistive technologies."},
    };
    if (auto it = by_check.find(check_name); it != by_check.end()) return it->second;
    switch (category) {
        case IssueCategory::ElementDescription: return "Give the element a concise, descriptive accessibility label.";
        case IssueCategory::Contrast: return "Increase the color contrast between foreground and background.";
        case IssueCategory::HitRegion: return "Enlarge the element's touch target.";
        case IssueCategory::ElementDetection: return "Expose the element to assistive technologies.";
        case IssueCategory::ClippedText: return "Let the text wrap or resize so it is never cut off.";
        case IssueCategory::Traits: return "Set accessibility traits that match the element's behavior.";
        case IssueCategory::LargeText: return "Support Dynamic Type so text follows the user's size setting.";
    }
    return {};
}

}  // namespace a11y
