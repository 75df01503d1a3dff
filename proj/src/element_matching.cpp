#include "a11y/element_matching.hpp"

#include <algorithm>
#include <array>
#include <tuple>

#include "a11y/text_match.hpp"

namespace a11y {

namespace {

// Absorbs rounding in ratios such as 1 - 2/20 against a 0.90 bar.
constexpr double kScoreEpsilon = 1e-12;

constexpr std::array<std::string_view, 5> kMethodNames = {"text", "icon_template", "position", "grouped_text", "none"};
constexpr std::array<std::string_view, 4> kStrategyNames = {"template_only", "exact_text", "fuzzy_text", "full"};

const ElementGroupRecord* find_owned(const std::vector<ElementGroupRecord>& groups, std::string_view id) {
    for (const auto& g : groups)
        if (g.owner_id() == id) return &g;
    return nullptr;
}

const ElementGroupRecord* find_containing(const std::vector<ElementGroupRecord>& groups, std::string_view id) {
    for (const auto& g : groups)
        if (g.has_member(id)) return &g;
    return nullptr;
}

const ElementDetection* find_in(std::span<const ElementDetection> dets, std::string_view id) {
    for (const auto& d : dets)
        if (d.detection_id == id) return &d;
    return nullptr;
}

bool is_grouped_text_kind(ElementKind k) {
    return k == ElementKind::Toggle || k == ElementKind::Checkbox || k == ElementKind::SegmentedControl ||
           k == ElementKind::TextField || k == ElementKind::Slider;
}

// Descriptive text of a detection on its own screen: its group's label, or
// for ungrouped containers the joined texts inside it, else its own text.
std::string descriptive_label(const ElementDetection& d, const std::vector<ElementGroupRecord>& groups,
                              std::span<const ElementDetection> all) {
    if (const auto* g = find_owned(groups, d.detection_id)) {
        if (!g->label.empty() || d.kind == ElementKind::Container) return g->label;
    }
    if (d.kind == ElementKind::Container) {
        std::string out;
        for (const auto* t : contained_texts(d, all)) {
            if (t->text.empty()) continue;
            if (!out.empty()) out.push_back(' ');
            out += t->text;
        }
        return out;
    }
    return d.text;
}

GrayImage sub_image(const GrayImage& img, const Rect& r) {
    const Rect c = clamp_to(r, img.width, img.height);
    GrayImage out{c.w, c.h, std::vector<float>(static_cast<std::size_t>(c.w) * c.h)};
    for (int y = 0; y < c.h; ++y) {
        const auto* src = &img.px[static_cast<std::size_t>(c.y + y) * img.width + c.x];
        std::copy(src, src + c.w, out.px.begin() + static_cast<std::ptrdiff_t>(y) * c.w);
    }
    return out;
}

double to_unit(double ncc_value) { return (ncc_value + 1.0) / 2.0; }

struct Scored {
    const ElementDetection* det;
    double score;
    MatchMethod method;
    double distance;
};

bool ranks_before(const Scored& a, const Scored& b) {
    return std::make_tuple(-a.score, a.distance, std::string_view(a.det->detection_id)) <
           std::make_tuple(-b.score, b.distance, std::string_view(b.det->detection_id));
}

class Matcher {
public:
    Matcher(const TemplateRecord& templ, const MatchTarget& target, const MatchConfig& config)
        : t_(templ), target_(target), cfg_(config), new_width_(target.capture().screenshot.width()) {}

    MatchResult run() {
        const auto& tel = t_.template_element;
        std::vector<const ElementDetection*> candidates;
        for (const auto& d : target_.capture().detections)
            if (d.kind == tel.kind) candidates.push_back(&d);

        std::vector<Scored> passing;
        for (const auto* c : candidates) {
            auto [score, method] = score_candidate(*c, candidates.size());
            if (score + kScoreEpsilon < threshold(method, c->kind)) continue;
            passing.push_back(Scored{c, score, method,
                                     normalized_center_distance(tel.bbox, t_.source_width, c->bbox, new_width_)});
        }
        if (passing.empty()) return MatchResult{};
        std::sort(passing.begin(), passing.end(), ranks_before);

        const Scored* chosen = &passing.front();
        if (cfg_.strategy == MatchStrategy::full) {
            if (const auto* group = matched_group()) {
                const auto member = std::find_if(passing.begin(), passing.end(),
                                                 [&](const Scored& s) { return group->has_member(s.det->detection_id); });
                if (member != passing.end() && chosen->score - member->score <= cfg_.group_margin) chosen = &*member;
            }
        }
        return MatchResult{chosen->det->detection_id, chosen->score, chosen->method};
    }

private:
    double threshold(MatchMethod m, ElementKind kind) const {
        switch (m) {
            case MatchMethod::text:
            case MatchMethod::grouped_text: return cfg_.text_threshold;
            case MatchMethod::position: return cfg_.position_threshold;
            case MatchMethod::icon_template:
                return kind == ElementKind::Picture ? cfg_.picture_threshold : cfg_.icon_threshold;
            case MatchMethod::none: break;
        }
        return 1.0;
    }

    const std::string& template_text() {
        if (!template_text_) template_text_ = normalize_text(t_.template_element.text);
        return *template_text_;
    }

    const std::vector<ScaledTemplate>& scaled() {
        if (!scaled_) scaled_ = make_scaled_templates(t_.crop, t_.source_width, new_width_);
        return *scaled_;
    }

    double icon_score(const ElementDetection& c) {
        if (t_.crop.empty()) return 0.0;
        const auto& img = target_.capture().screenshot;
        const Rect window = expand(c.bbox, cfg_.search_padding, img.width(), img.height());
        if (window.empty()) return 0.0;
        return to_unit(best_ncc(scaled(), sub_image(target_.gray(), window), cfg_.max_template_area));
    }

    std::pair<double, MatchMethod> grouped(const ElementDetection& c, const std::string& template_label) {
        const auto label = descriptive_label(c, target_.groups(), target_.capture().detections);
        return {indel_ratio(template_label, normalize_text(label)), MatchMethod::grouped_text};
    }

    std::pair<double, MatchMethod> score_candidate(const ElementDetection& c, std::size_t candidate_count) {
        const auto& tel = t_.template_element;
        const auto icon = [&] { return std::pair{icon_score(c), MatchMethod::icon_template}; };

        if (cfg_.strategy != MatchStrategy::full) {
            if (tel.kind != ElementKind::Text || cfg_.strategy == MatchStrategy::template_only) return icon();
            const auto cand = normalize_text(c.text);
            if (cfg_.strategy == MatchStrategy::exact_text)
                return {cand == template_text() ? 1.0 : 0.0, MatchMethod::text};
            return {indel_ratio(template_text(), cand), MatchMethod::text};
        }

        switch (tel.kind) {
            case ElementKind::Text:
                return {indel_ratio(template_text(), normalize_text(c.text)), MatchMethod::text};
            case ElementKind::Icon:
            case ElementKind::Picture: return icon();
            case ElementKind::PageControl:
            case ElementKind::Dialog: {
                if (candidate_count == 1) return {1.0, MatchMethod::position};
                const double d = normalized_center_distance(tel.bbox, t_.source_width, c.bbox, new_width_);
                return {1.0 - d, MatchMethod::position};
            }
            case ElementKind::TabButton: {
                const auto* g = find_owned(t_.groups, tel.detection_id);
                if (!g || g->icon_only) return icon();
                return grouped(c, template_label());
            }
            case ElementKind::Container: {
                const auto* g = find_owned(t_.groups, tel.detection_id);
                if ((g && g->icon_only) || template_label().empty()) return icon();
                return grouped(c, template_label());
            }
            default: break;
        }
        // Toggle, Checkbox, SegmentedControl, TextField, Slider.
        if (is_grouped_text_kind(tel.kind) && !template_label().empty()) return grouped(c, template_label());
        return icon();
    }

    const std::string& template_label() {
        if (!template_label_)
            template_label_ = normalize_text(descriptive_label(t_.template_element, t_.groups, t_.all_detections));
        return *template_label_;
    }

    // The new-screen group corresponding to the template's own group, judged by label.
    const ElementGroupRecord* matched_group() {
        const auto* tg = find_containing(t_.groups, t_.template_element.detection_id);
        if (!tg) return nullptr;
        const auto tlabel = normalize_text(tg->label);
        if (tlabel.empty()) return nullptr;
        const auto* towner = find_in(t_.all_detections, tg->owner_id());
        if (!towner) return nullptr;

        const ElementGroupRecord* best = nullptr;
        std::tuple<double, double, std::string_view> best_key{};
        for (const auto& g : target_.groups()) {
            if (g.kind != tg->kind) continue;
            const double sim = indel_ratio(tlabel, normalize_text(g.label));
            if (sim + kScoreEpsilon < cfg_.text_threshold) continue;
            const auto* owner = target_.capture().find_detection(g.owner_id());
            const double dist = normalized_center_distance(towner->bbox, t_.source_width, owner->bbox, new_width_);
            const std::tuple<double, double, std::string_view> key{-sim, dist, g.owner_id()};
            if (!best || key < best_key) {
                best = &g;
                best_key = key;
            }
        }
        return best;
    }

    const TemplateRecord& t_;
    const MatchTarget& target_;
    const MatchConfig& cfg_;
    int new_width_;
    std::optional<std::vector<ScaledTemplate>> scaled_;
    std::optional<std::string> template_text_;
    std::optional<std::string> template_label_;
};

}  // namespace

std::string_view to_string(MatchMethod m) { return kMethodNames[static_cast<std::size_t>(m)]; }
std::string_view to_string(MatchStrategy s) { return kStrategyNames[static_cast<std::size_t>(s)]; }

std::optional<MatchStrategy> parse_match_strategy(std::string_view s) {
    for (std::size_t i = 0; i < kStrategyNames.size(); ++i)
        if (kStrategyNames[i] == s) return static_cast<MatchStrategy>(i);
    return std::nullopt;
}

TemplateRecord preprocess_template(const ScreenCapture& capture, const ElementDetection& target) {
    return preprocess_template(capture, std::string_view(target.detection_id));
}

TemplateRecord preprocess_template(const ScreenCapture& capture, std::string_view detection_id) {
    const auto* target = capture.find_detection(detection_id);
    if (!target)
        throw TemplateError("detection '" + std::string(detection_id) + "' is not on capture '" +
                            capture.capture_id + "'");
    if (target->bbox.empty())
        throw TemplateError("detection '" + target->detection_id + "' has a zero-area bounding box");
    TemplateRecord rec;
    rec.source_capture_id = capture.capture_id;
    rec.template_element = *target;
    rec.all_detections = capture.detections;
    rec.groups = build_element_groups(capture.detections);
    rec.crop = capture.screenshot.crop(target->bbox);
    rec.source_width = capture.screenshot.width();
    return rec;
}

MatchTarget::MatchTarget(const ScreenCapture& capture)
    : capture_(&capture), groups_(build_element_groups(capture.detections)), gray_(to_gray(capture.screenshot)) {}

const ElementGroupRecord* MatchTarget::group_owned_by(std::string_view id) const { return find_owned(groups_, id); }

const ElementGroupRecord* MatchTarget::group_containing(std::string_view id) const {
    return find_containing(groups_, id);
}

double icon_match(const TemplateRecord& templ, const ElementDetection& candidate, const ScreenCapture& new_capture,
                  const MatchConfig& config) {
    if (templ.crop.empty()) return 0.0;
    const auto& img = new_capture.screenshot;
    const Rect window = expand(candidate.bbox, config.search_padding, img.width(), img.height());
    if (window.empty()) return 0.0;
    const auto scaled = make_scaled_templates(templ.crop, templ.source_width, img.width());
    return to_unit(best_ncc(scaled, to_gray(img, window), config.max_template_area));
}

MatchResult find_best_match(const TemplateRecord& templ, const ScreenCapture& new_capture, const MatchConfig& config) {
    return find_best_match(templ, MatchTarget(new_capture), config);
}

MatchResult find_best_match(const TemplateRecord& templ, const MatchTarget& target, const MatchConfig& config) {
    return Matcher(templ, target, config).run();
}

}  // namespace a11y
