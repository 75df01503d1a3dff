#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "a11y/capture_model.hpp"
#include "a11y/eval_metrics.hpp"

namespace a11y {

/// Ways two captures of one screen can differ.
enum class Variation {
    none,
    same_data_change,
    scrolled,
    expanded_collapsed,
    keyboard,
    dialog_overlay,
    modal_over_different_content,
};

inline constexpr std::array kAllVariations = {
    Variation::none,     Variation::same_data_change, Variation::scrolled,
    Variation::expanded_collapsed, Variation::keyboard, Variation::dialog_overlay,
    Variation::modal_over_different_content,
};

std::string_view to_string(Variation v);
std::optional<Variation> parse_variation(std::string_view s);

/// Relative weights; `none` always has weight 1.
struct VariationWeights {
    double same_data_change = 0.0;
    double scrolled = 0.0;
    double expanded_collapsed = 0.0;
    double keyboard = 0.0;
    double dialog_overlay = 0.0;
    double modal_over_different_content = 0.0;
};

struct SynthSpec {
    std::uint64_t seed = 1;
    int app_count = 20;
    int screens_per_app = 30;  // captures per app
    VariationWeights weights;
    double planted_issue_rate = 0.25;           // per plantable element and screen
    double planted_false_positive_rate = 0.0;   // per capture
};

class SynthError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

void validate_spec(const SynthSpec& spec);

struct PlantedIssue {
    std::string issue_id;
    std::string capture_id;
    /// Copies of one planted issue on the same element of the same screen share
    /// this key; every false positive has its own.
    std::string instance;
    bool false_positive = false;
};

struct CaptureInfo {
    std::string capture_id;
    int screen = 0;  // gold group index
    Variation variation = Variation::none;
    int scroll_dy = 0;
    std::vector<std::string> element_uids;  // parallel to the capture's detections
};

struct GoldApp {
    std::string app_id;
    Grouping grouping;
    std::vector<GoldCorrespondence> correspondences;  // representative -> every other member
    std::vector<PlantedIssue> planted;
    std::vector<CaptureInfo> captures;
};

struct SynthApp {
    CaptureBundle bundle;
    GoldApp gold;
};

/// How one capture deviates from its screen's canonical state.
struct ScreenVariant {
    Variation variation = Variation::none;
    int scroll_dy = 0;
    int data_version = 0;
    int modal_background = 0;  // screen drawn behind the modal dialog
    int modal_background_dy = 0;
};

struct RenderedCapture {
    ScreenCapture capture;
    CaptureInfo info;
    std::vector<PlantedIssue> planted;
};

/// The screens of one synthetic app. Construction and rendering are pure
/// functions of (spec, app_index); the random stream only feeds the
/// per-capture extras (false positives and embedding noise).
class SynthAppModel {
public:
    SynthAppModel(const SynthSpec& spec, int app_index);
    ~SynthAppModel();
    SynthAppModel(SynthAppModel&&) noexcept;
    SynthAppModel& operator=(SynthAppModel&&) noexcept;

    const std::string& app_id() const;
    int screen_count() const;  // regular screens
    int modal_screen() const;  // index of the modal dialog screen
    int content_scroll_limit(int screen) const;

    RenderedCapture render(int screen, const ScreenVariant& variant, const std::string& capture_id, int ordinal,
                           std::mt19937_64& rng) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

SynthApp generate_app(const SynthSpec& spec, int app_index);

/// Writes <out>/<app_id>/ bundles and <out>/gold.json.
void write_corpus(const SynthSpec& spec, const std::filesystem::path& out);

nlohmann::json gold_to_json(const GoldApp& gold);
GoldApp gold_from_json(const nlohmann::json& j);

/// Uniform draws with a fixed mapping so output does not depend on the
/// standard library's distribution implementations.
double uniform01(std::mt19937_64& rng);
int uniform_int(std::mt19937_64& rng, int lo, int hi);

}  // namespace a11y
