#pragma once

#include <filesystem>
#include <optional>
#include <span>

#include "a11y/capture_model.hpp"
#include "a11y/ignore_store.hpp"
#include "a11y/report.hpp"
#include "a11y/screen_grouping.hpp"

namespace a11y {

struct PipelineConfig {
    SimilarityMode similarity = SimilarityMode::pixel;
    std::optional<double> threshold;  // mode default when unset
    DedupeConfig dedupe;

    SimilarityScorer scorer() const { return SimilarityScorer(similarity, threshold); }
};

/// De-dup per group (in parallel), apply ignores, filter false positives,
/// summarize. generated_at is left empty for the caller to stamp.
Report assemble_report(const CaptureBundle& bundle, const Storyboard& storyboard,
                       std::span<const IgnoreRecord> ignores, const PipelineConfig& config);
Report assemble_report(const CaptureBundle& bundle, const Storyboard& storyboard, const IgnoreStore& store,
                       const PipelineConfig& config);

/// Grouping plus assembly in one call.
Report generate_report(const CaptureBundle& bundle, const IgnoreStore& store, const PipelineConfig& config);

/// Writes report.json, screens/<capture_id>.png and run.json (bundle location
/// and config, for regeneration) into dir.
void write_report_dir(const Report& report, const CaptureBundle& bundle, const std::filesystem::path& bundle_dir,
                      const PipelineConfig& config, const std::filesystem::path& dir);

struct ReportDir {
    Report report;
    std::filesystem::path bundle_dir;
    PipelineConfig config;
};

/// Throws ReportFormatError when report.json or run.json is missing or malformed.
ReportDir read_report_dir(const std::filesystem::path& dir);

}  // namespace a11y
