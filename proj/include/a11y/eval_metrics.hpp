#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "a11y/capture_model.hpp"
#include "a11y/element_matching.hpp"
#include "a11y/screen_grouping.hpp"

namespace a11y {

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Confusion {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;

    Confusion& operator+=(const Confusion& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        tn += o.tn;
        return *this;
    }
    friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct Metrics {
    Confusion counts;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
};

/// Standard ratios; any zero denominator yields 0.
Metrics metrics_from(const Confusion& c);

struct CorrespondenceJudgment {
    std::string template_ref;
    std::optional<std::string> predicted;
    std::optional<std::string> gold;
};

Confusion matching_confusion(std::span<const CorrespondenceJudgment> judgments);
Metrics matching_metrics(std::span<const CorrespondenceJudgment> judgments);

/// A grouping is a partition of capture ids.
using Grouping = std::vector<std::vector<std::string>>;

Grouping grouping_of(const Storyboard& storyboard);

/// Counts over all unordered capture pairs, positive meaning "same group".
/// Throws EvalError when the two groupings cover different capture sets or a
/// capture appears twice.
Confusion pairwise_confusion(const Grouping& predicted, const Grouping& gold);
Metrics pairwise_grouping_metrics(const Grouping& predicted, const Grouping& gold);
Metrics pairwise_grouping_metrics(const Storyboard& predicted, const Grouping& gold);

/// Expected target of a template element on another capture of the same screen.
struct GoldCorrespondence {
    std::string template_capture_id;
    std::string template_detection_id;
    std::string target_capture_id;
    std::optional<std::string> target_detection_id;
};

struct CorrespondenceRun {
    std::vector<CorrespondenceJudgment> judgments;
    double total_seconds = 0.0;  // matching time only, template preparation excluded
    double mean_seconds() const {
        return judgments.empty() ? 0.0 : total_seconds / static_cast<double>(judgments.size());
    }
};

/// Runs find_best_match for every gold pair of the bundle under the given config.
CorrespondenceRun run_correspondences(const CaptureBundle& bundle, std::span<const GoldCorrespondence> gold,
                                      const MatchConfig& config);

}  // namespace a11y
