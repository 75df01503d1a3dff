#pragma once

#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "a11y/capture_model.hpp"

namespace a11y {

inline constexpr double kDefaultEmbeddingThreshold = 0.2;
inline constexpr double kDefaultPixelThreshold = 30.0;
inline constexpr double kDefaultStructuralThreshold = 0.5;
inline constexpr int kPixelCompareWidth = 256;
inline constexpr int kStructuralSizeBucket = 8;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScreenGroup {
    int group_id = 0;
    std::vector<std::string> member_ids;
    std::string representative_id;  // first member; never replaced
    std::optional<std::vector<double>> mean_embedding;

    friend bool operator==(const ScreenGroup&, const ScreenGroup&) = default;
};

struct Storyboard {
    std::vector<ScreenGroup> groups;
    std::set<std::pair<int, int>> edges;

    const ScreenGroup* find_group(int group_id) const;
    const ScreenGroup* group_of(std::string_view capture_id) const;

    friend bool operator==(const Storyboard&, const Storyboard&) = default;
};

/// Same-screen scorer. score() is positive exactly when the capture is
/// predicted to be the same screen as the group.
class SimilarityScorer {
public:
    explicit SimilarityScorer(SimilarityMode mode, std::optional<double> threshold = std::nullopt);

    SimilarityMode mode() const { return mode_; }
    double threshold() const { return threshold_; }

    /// Throws ConfigError when the mode's inputs are missing from the bundle.
    void validate(const CaptureBundle& bundle) const;

    double score(const ScreenCapture& capture, const ScreenGroup& group, const CaptureBundle& bundle) const;
    /// Capture-to-capture form; embedding mode compares the two embeddings directly.
    double score(const ScreenCapture& a, const ScreenCapture& b) const;

private:
    SimilarityMode mode_;
    double threshold_;
};

double embedding_distance(std::span<const double> a, std::span<const double> b);
/// MSE after resizing both screenshots to a common kPixelCompareWidth-wide raster.
double pixel_distance(const Raster& a, const Raster& b);
/// 2|A ∩ B| / (|A| + |B|) over multisets of detection keys; 1 when both are empty.
double structural_overlap(std::span<const ElementDetection> a, std::span<const ElementDetection> b);
std::string structural_key(const ElementDetection& d);

/// Adds the capture to the best positively scoring group (lowest id on ties)
/// or to a new group, and returns the group id.
int assign_screen(Storyboard& storyboard, const ScreenCapture& capture, const SimilarityScorer& scorer,
                  const CaptureBundle& bundle);

/// Sequential grouping in capture order, recording a transition edge whenever
/// consecutive captures land in different groups.
Storyboard build_storyboard(const CaptureBundle& bundle, const SimilarityScorer& scorer);

}  // namespace a11y
