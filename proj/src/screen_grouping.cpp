#include "a11y/screen_grouping.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "a11y/text_match.hpp"

namespace a11y {

const ScreenGroup* Storyboard::find_group(int group_id) const {
    for (const auto& g : groups)
        if (g.group_id == group_id) return &g;
    return nullptr;
}

const ScreenGroup* Storyboard::group_of(std::string_view capture_id) const {
    for (const auto& g : groups)
        if (std::find(g.member_ids.begin(), g.member_ids.end(), capture_id) != g.member_ids.end()) return &g;
    return nullptr;
}

SimilarityScorer::SimilarityScorer(SimilarityMode mode, std::optional<double> threshold) : mode_(mode) {
    switch (mode) {
        case SimilarityMode::embedding: threshold_ = kDefaultEmbeddingThreshold; break;
        case SimilarityMode::pixel: threshold_ = kDefaultPixelThreshold; break;
        case SimilarityMode::structural: threshold_ = kDefaultStructuralThreshold; break;
    }
    if (threshold) threshold_ = *threshold;
    if (!(threshold_ > 0.0)) throw ConfigError("similarity threshold must be positive");
}

void SimilarityScorer::validate(const CaptureBundle& bundle) const {
    if (mode_ != SimilarityMode::embedding) return;
    for (const auto& c : bundle.captures)
        if (!c.embedding)
            throw ConfigError("embedding similarity requested but capture '" + c.capture_id + "' has no embedding");
}

double embedding_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ConfigError("embedding lengths differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

double pixel_distance(const Raster& a, const Raster& b) {
    const auto aspect = [](const Raster& r) { return r.width() > 0 ? static_cast<double>(r.height()) / r.width() : 1.0; };
    const int h = std::max(1, static_cast<int>(std::lround(kPixelCompareWidth * (aspect(a) + aspect(b)) / 2.0)));
    return mean_squared_error(resize_bilinear(a, kPixelCompareWidth, h), resize_bilinear(b, kPixelCompareWidth, h));
}

std::string structural_key(const ElementDetection& d) {
    std::string key(to_string(d.kind));
    const auto text = normalize_text(d.text);
    if (!text.empty()) return key + "|t:" + text;
    return key + "|s:" + std::to_string(d.bbox.w / kStructuralSizeBucket) + "x" +
           std::to_string(d.bbox.h / kStructuralSizeBucket);
}

double structural_overlap(std::span<const ElementDetection> a, std::span<const ElementDetection> b) {
    if (a.empty() && b.empty()) return 1.0;
    std::map<std::string, int> counts;
    for (const auto& d : a) ++counts[structural_key(d)];
    std::size_t common = 0;
    for (const auto& d : b) {
        auto it = counts.find(structural_key(d));
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++common;
        }
    }
    return 2.0 * static_cast<double>(common) / static_cast<double>(a.size() + b.size());
}

namespace {

const std::vector<double>& require_embedding(const ScreenCapture& c) {
    if (!c.embedding) throw ConfigError("capture '" + c.capture_id + "' has no embedding");
    return *c.embedding;
}

std::vector<double> group_mean(const ScreenGroup& group, const CaptureBundle& bundle) {
    if (group.mean_embedding) return *group.mean_embedding;
    std::vector<double> mean;
    for (const auto& id : group.member_ids) {
        const auto& e = require_embedding(bundle.capture(id));
        if (mean.empty()) mean.assign(e.size(), 0.0);
        for (std::size_t i = 0; i < e.size(); ++i) mean[i] += e[i];
    }
    for (auto& v : mean) v /= static_cast<double>(group.member_ids.size());
    return mean;
}

}  // namespace

double SimilarityScorer::score(const ScreenCapture& a, const ScreenCapture& b) const {
    switch (mode_) {
        case SimilarityMode::embedding:
            return threshold_ - embedding_distance(require_embedding(a), require_embedding(b));
        case SimilarityMode::pixel: return threshold_ - pixel_distance(a.screenshot, b.screenshot);
        case SimilarityMode::structural: return structural_overlap(a.detections, b.detections) - threshold_;
    }
    return -1.0;
}

double SimilarityScorer::score(const ScreenCapture& capture, const ScreenGroup& group,
                               const CaptureBundle& bundle) const {
    if (mode_ == SimilarityMode::embedding)
        return threshold_ - embedding_distance(require_embedding(capture), group_mean(group, bundle));
    return score(capture, bundle.capture(group.representative_id));
}

int assign_screen(Storyboard& storyboard, const ScreenCapture& capture, const SimilarityScorer& scorer,
                  const CaptureBundle& bundle) {
    ScreenGroup* best = nullptr;
    double best_score = 0.0;
    for (auto& g : storyboard.groups) {
        const double s = scorer.score(capture, g, bundle);
        if (s <= 0.0) continue;
        if (!best || s > best_score || (s == best_score && g.group_id < best->group_id)) {
            best = &g;
            best_score = s;
        }
    }

    if (!best) {
        ScreenGroup g;
        g.group_id = 0;
        for (const auto& existing : storyboard.groups) g.group_id = std::max(g.group_id, existing.group_id + 1);
        g.member_ids.push_back(capture.capture_id);
        g.representative_id = capture.capture_id;
        if (scorer.mode() == SimilarityMode::embedding) g.mean_embedding = require_embedding(capture);
        storyboard.groups.push_back(std::move(g));
        return storyboard.groups.back().group_id;
    }

    if (scorer.mode() == SimilarityMode::embedding && !best->mean_embedding)
        best->mean_embedding = group_mean(*best, bundle);
    best->member_ids.push_back(capture.capture_id);
    if (scorer.mode() == SimilarityMode::embedding) {
        const auto& e = require_embedding(capture);
        auto& mean = *best->mean_embedding;
        const double n = static_cast<double>(best->member_ids.size());
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += (e[i] - mean[i]) / n;
    }
    return best->group_id;
}

Storyboard build_storyboard(const CaptureBundle& bundle, const SimilarityScorer& scorer) {
    scorer.validate(bundle);
    Storyboard sb;
    std::optional<int> current;
    for (const auto& capture : bundle.captures) {
        const int g = assign_screen(sb, capture, scorer, bundle);
        if (current && *current != g) sb.edges.emplace(*current, g);
        current = g;
    }
    return sb;
}

}  // namespace a11y
