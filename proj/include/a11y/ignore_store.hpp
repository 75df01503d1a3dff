#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "a11y/capture_model.hpp"
#include "a11y/element_matching.hpp"
#include "a11y/report.hpp"
#include "a11y/screen_grouping.hpp"

namespace a11y {

enum class IgnoreScope { issue, check_name, category, screen };
std::string_view to_string(IgnoreScope s);
std::optional<IgnoreScope> parse_ignore_scope(std::string_view s);

/// A persisted triage decision. Issue scope carries the element fingerprint
/// and the screen it was taken on; screen scope carries the screen only.
struct IgnoreRecord {
    std::string ignore_id;  // assigned by the store
    std::string app_id;
    IgnoreScope scope = IgnoreScope::issue;
    std::optional<std::string> check_name;
    std::optional<IssueCategory> category;
    std::optional<TemplateRecord> fingerprint;
    std::optional<ScreenCapture> snapshot;  // screenshot, detections, embedding; no issues
    bool active = true;
    std::string created_at;

    friend bool operator==(const IgnoreRecord&, const IgnoreRecord&) = default;
};

class IgnoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownIgnoreError : public IgnoreError {
public:
    using IgnoreError::IgnoreError;
};

/// Throws IgnoreError when the scope's required fields are missing.
void validate_ignore(const IgnoreRecord& record);

/// Storage boundary for ignore decisions.
class IgnoreStore {
public:
    virtual ~IgnoreStore() = default;
    virtual std::string add_ignore(IgnoreRecord record) = 0;
    virtual void remove_ignore(const std::string& ignore_id) = 0;
    /// Active and removed records of one app, in creation order.
    virtual std::vector<IgnoreRecord> list_ignores(const std::string& app_id) const = 0;
};

class MemoryIgnoreStore final : public IgnoreStore {
public:
    std::string add_ignore(IgnoreRecord record) override;
    void remove_ignore(const std::string& ignore_id) override;
    std::vector<IgnoreRecord> list_ignores(const std::string& app_id) const override;

private:
    mutable std::mutex mu_;
    std::vector<IgnoreRecord> records_;
};

/// One JSON object per line. Removals append a tombstone line. Snapshot
/// screenshots live beside the file in `<file>.blobs/<sha256>.png`.
class FileIgnoreStore final : public IgnoreStore {
public:
    explicit FileIgnoreStore(std::filesystem::path file);

    std::string add_ignore(IgnoreRecord record) override;
    void remove_ignore(const std::string& ignore_id) override;
    std::vector<IgnoreRecord> list_ignores(const std::string& app_id) const override;

    const std::filesystem::path& path() const { return file_; }

private:
    std::vector<IgnoreRecord> load_all() const;
    void append_line(const std::string& line) const;

    std::filesystem::path file_;
    std::filesystem::path blobs_;
    mutable std::mutex mu_;
};

/// Builds an issue-scope record from an element on a capture.
IgnoreRecord make_issue_ignore(const std::string& app_id, const ScreenCapture& capture, std::string_view detection_id,
                               IssueCategory category, const std::string& check_name);
IgnoreRecord make_screen_ignore(const std::string& app_id, const ScreenCapture& capture);
ScreenCapture snapshot_of(const ScreenCapture& capture);

/// Moves matching active issues into the ignored section. Inactive records
/// are skipped; records that match nothing leave the report unchanged.
Report apply_ignores(Report report, std::span<const IgnoreRecord> records, const SimilarityScorer& scorer,
                     const CaptureBundle& bundle, const MatchConfig& match = {});
Report apply_ignores(Report report, const IgnoreStore& store, const SimilarityScorer& scorer,
                     const CaptureBundle& bundle, const MatchConfig& match = {});

}  // namespace a11y
