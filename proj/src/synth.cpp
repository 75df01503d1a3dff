#include "a11y/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "a11y/text_match.hpp"

namespace a11y {

using nlohmann::json;

namespace {

constexpr int kWidth = 360;
constexpr int kHeight = 640;
constexpr int kNavH = 56;
constexpr int kTabTop = 572;
constexpr int kKeyboardTop = 420;
constexpr int kMargin = 16;
constexpr int kRowGap = 12;
constexpr int kGlyphAdvance = 12;
constexpr int kTextH = 14;
constexpr int kEmbeddingDims = 16;
constexpr double kEmbeddingNoise = 0.02;
// Texts of one app stay at least this far apart so text heuristics can tell them apart.
constexpr double kMaxTextSimilarity = 0.8;

constexpr std::array<std::string_view, 7> kVariationNames = {
    "none", "same_data_change", "scrolled", "expanded_collapsed", "keyboard", "dialog_overlay",
    "modal_over_different_content"};

struct Check {
    IssueCategory category;
    const char* name;
    const char* message;
};

constexpr Check kChecks[] = {
    {IssueCategory::ElementDescription, "Element has no description", "This element has no accessibility label."},
    {IssueCategory::ElementDescription, "Element description is not informative",
     "The accessibility label does not describe the element."},
    {IssueCategory::Contrast, "Contrast failed", "Text contrast is below 4.5:1."},
    {IssueCategory::Contrast, "Contrast nearly passed", "Text contrast is slightly below 4.5:1."},
    {IssueCategory::HitRegion, "Hit area is too small", "The touch target is smaller than 44x44 points."},
    {IssueCategory::ElementDetection, "Element is not reachable", "Assistive technologies cannot reach this element."},
    {IssueCategory::ClippedText, "Text clipped", "Text is truncated at larger text sizes."},
    {IssueCategory::Traits, "Element has incomplete traits", "The element is missing a button trait."},
    {IssueCategory::LargeText, "Dynamic Type font sizes are unsupported", "Text does not scale with Dynamic Type."},
    {IssueCategory::LargeText, "Dynamic Type font sizes are partially unsupported",
     "Some text does not scale with Dynamic Type."},
};
constexpr int kCheckCount = static_cast<int>(std::size(kChecks));

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

int text_width(std::string_view s) { return s.empty() ? 0 : static_cast<int>(s.size()) * kGlyphAdvance - 2; }

std::uint64_t glyph_bits(unsigned char c) {
    std::uint64_t bits = splitmix(0x5eed0000ULL + c) & ((1ULL << 35) - 1);
    bits |= 1ULL << 17;
    return bits;
}

Rgb dark_color(std::uint64_t h) {
    return Rgb{static_cast<std::uint8_t>(20 + h % 90), static_cast<std::uint8_t>(20 + (h >> 8) % 90),
               static_cast<std::uint8_t>(40 + (h >> 16) % 110)};
}

struct Canvas {
    Raster& img;
    Rect clip;

    void fill(const Rect& r, Rgb c) {
        const Rect k = intersection(r, clip);
        if (!k.empty()) img.fill_rect(k, c);
    }
    void frame(const Rect& r, int t, Rgb c) {
        fill(Rect{r.x, r.y, r.w, t}, c);
        fill(Rect{r.x, r.bottom() - t, r.w, t}, c);
        fill(Rect{r.x, r.y, t, r.h}, c);
        fill(Rect{r.right() - t, r.y, t, r.h}, c);
    }
    void text(int x, int y, std::string_view s, Rgb c) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == ' ') continue;
            const auto bits = glyph_bits(static_cast<unsigned char>(s[i]));
            const int gx = x + static_cast<int>(i) * kGlyphAdvance;
            for (int row = 0; row < 7; ++row)
                for (int col = 0; col < 5; ++col)
                    if (bits >> (row * 5 + col) & 1ULL) fill(Rect{gx + col * 2, y + row * 2, 2, 2}, c);
        }
    }
};

enum class Layer { nav, content, tab_bar, overlay };

struct Elem {
    std::string uid;
    ElementKind kind = ElementKind::Text;
    Rect box;  // content coordinates for the content layer, screen coordinates otherwise
    Layer layer = Layer::content;
    std::string text;  // Text kind only
    std::uint64_t pattern = 0;
    Rgb color{};
    bool flag = false;  // toggle on, checkbox checked, active tab
    bool data_varying = false;
    bool plantable = true;
};

struct IssuePlan {
    std::string uid;
    int check = 0;
};

struct Screen {
    bool modal = false;
    bool tab_bar = true;
    int active_tab = 0;
    std::vector<Elem> nav;
    std::vector<Elem> content;
    int content_h = 0;
    int expand_y = -1;  // content y below which rows shift when expanded
    int expansion_h = 0;
    std::vector<Elem> expansion;
    std::vector<Elem> dialog;  // non-modal dialog, or the modal screen's only layer
    Rect dialog_box;
    std::vector<IssuePlan> issues;
    std::vector<double> centroid;
    Rgb background{250, 250, 252};
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double u() { return uniform01(gen_); }
    int i(int lo, int hi) { return uniform_int(gen_, lo, hi); }
    bool chance(double p) { return u() < p; }
    std::uint64_t bits() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

// Pronounceable labels that stay textually distinct within one app.
class NameGen {
public:
    explicit NameGen(Rng& rng) : rng_(rng) {}

    std::string word(int max_chars) {
        static constexpr std::array<const char*, 24> syl = {"ka", "lo", "mi", "ren", "tas", "vo", "zi", "pel",
                                                           "dor", "nu", "sha", "ble", "tri", "qua", "fen", "gor",
                                                           "hil", "jun", "mar", "sol", "wex", "by", "cu", "ost"};
        std::string w;
        const int n = rng_.i(2, 3);
        for (int k = 0; k < n; ++k) w += syl[static_cast<std::size_t>(rng_.i(0, static_cast<int>(syl.size()) - 1))];
        if (static_cast<int>(w.size()) > max_chars) w.resize(static_cast<std::size_t>(max_chars));
        return w;
    }

    std::string fresh(int min_words, int max_words, int max_chars) {
        for (int attempt = 0;; ++attempt) {
            std::string s;
            const int n = rng_.i(min_words, max_words);
            for (int k = 0; k < n; ++k) {
                if (!s.empty()) s += ' ';
                s += word(max_chars);
            }
            if (static_cast<int>(s.size()) > max_chars) s.resize(static_cast<std::size_t>(max_chars));
            while (!s.empty() && s.back() == ' ') s.pop_back();
            if (s.size() < 3) continue;
            s[0] = static_cast<char>(s[0] - 'a' + 'A');
            if (attempt < 200 && !distinct(s)) continue;
            used_.push_back(normalize_text(s));
            return s;
        }
    }

    // Short value text; its content depends on the data version.
    static std::string value(std::uint64_t pattern, int version) {
        static constexpr std::array<const char*, 6> units = {"min", "km", "kg", "pts", "h", "mb"};
        const auto h = splitmix(pattern + static_cast<std::uint64_t>(version) * 7919ULL);
        return std::to_string(h % 90 + 10) + " " + units[(pattern >> 7) % units.size()];
    }

private:
    bool distinct(const std::string& s) const {
        const auto n = normalize_text(s);
        for (const auto& u : used_)
            if (indel_ratio(n, u) >= kMaxTextSimilarity) return false;
        return true;
    }

    Rng& rng_;
    std::vector<std::string> used_;
};

Elem make(std::string uid, ElementKind kind, Rect box, Layer layer, std::uint64_t pattern) {
    Elem e;
    e.uid = std::move(uid);
    e.kind = kind;
    e.box = box;
    e.layer = layer;
    e.pattern = pattern;
    e.color = dark_color(pattern);
    return e;
}

Elem make_text(std::string uid, int x, int y, std::string text, Layer layer, Rgb color) {
    Elem e = make(std::move(uid), ElementKind::Text, Rect{x, y, text_width(text), kTextH}, layer, 0);
    e.text = std::move(text);
    e.color = color;
    return e;
}

constexpr Rgb kBodyText{40, 40, 48};
constexpr Rgb kLinkText{0, 90, 200};

void draw(Canvas& cv, const Elem& e, const Rect& b, int data_version) {
    switch (e.kind) {
        case ElementKind::Text: {
            const std::string s = e.data_varying ? NameGen::value(e.pattern, data_version) : e.text;
            cv.text(b.x, b.y, s, e.color);
            break;
        }
        case ElementKind::Icon: {
            // 8x8 cell pattern scaled to the icon size.
            const int cell = std::max(1, b.w / 8);
            const auto bits = splitmix(e.pattern);
            for (int r = 0; r < 8; ++r)
                for (int c = 0; c < 8; ++c)
                    if (bits >> (r * 8 + c) & 1ULL) cv.fill(Rect{b.x + c * cell, b.y + r * cell, cell, cell}, e.color);
            break;
        }
        case ElementKind::Picture: {
            const auto seed = e.pattern + (e.data_varying ? static_cast<std::uint64_t>(data_version) * 104729ULL : 0);
            const int bw = b.w / 4, bh = b.h / 3;
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 4; ++c) {
                    const auto h = splitmix(seed * 31 + static_cast<std::uint64_t>(r * 4 + c));
                    cv.fill(Rect{b.x + c * bw, b.y + r * bh, c == 3 ? b.w - 3 * bw : bw, r == 2 ? b.h - 2 * bh : bh},
                            Rgb{static_cast<std::uint8_t>(h), static_cast<std::uint8_t>(h >> 8),
                                static_cast<std::uint8_t>(h >> 16)});
                }
            const auto h = splitmix(seed);
            for (int k = 0; k < b.w; k += 2)
                cv.fill(Rect{b.x + k, b.y + static_cast<int>((k * (h % 5 + 1)) % std::max(1, b.h)), 2, 2},
                        Rgb{255, 255, 255});
            break;
        }
        case ElementKind::TabButton: cv.fill(b, e.flag ? Rgb{222, 234, 252} : Rgb{244, 244, 246}); break;
        case ElementKind::Toggle:
            cv.fill(b, e.flag ? Rgb{52, 199, 89} : Rgb{205, 205, 210});
            cv.fill(Rect{e.flag ? b.right() - 22 : b.x + 2, b.y + 2, 20, b.h - 4}, Rgb{255, 255, 255});
            break;
        case ElementKind::Checkbox:
            cv.fill(b, Rgb{255, 255, 255});
            cv.frame(b, 2, Rgb{70, 70, 80});
            if (e.flag) cv.fill(Rect{b.x + 5, b.y + 5, b.w - 10, b.h - 10}, Rgb{0, 122, 255});
            break;
        case ElementKind::SegmentedControl:
            cv.fill(b, Rgb{255, 255, 255});
            cv.fill(Rect{b.x, b.y, b.w / 3, b.h}, Rgb{214, 230, 252});
            cv.frame(b, 1, Rgb{0, 122, 255});
            cv.fill(Rect{b.x + b.w / 3, b.y, 1, b.h}, Rgb{0, 122, 255});
            cv.fill(Rect{b.x + 2 * b.w / 3, b.y, 1, b.h}, Rgb{0, 122, 255});
            break;
        case ElementKind::TextField:
            cv.fill(b, Rgb{255, 255, 255});
            cv.frame(b, 1, Rgb{180, 180, 188});
            break;
        case ElementKind::Slider: {
            const int knob = b.x + static_cast<int>(e.pattern % static_cast<std::uint64_t>(b.w - 16));
            cv.fill(Rect{b.x, b.y + b.h / 2 - 2, b.w, 4}, Rgb{205, 205, 210});
            cv.fill(Rect{b.x, b.y + b.h / 2 - 2, knob - b.x, 4}, Rgb{0, 122, 255});
            cv.fill(Rect{knob, b.y + 2, 16, 16}, Rgb{120, 120, 130});
            break;
        }
        case ElementKind::Container:
            cv.fill(b, Rgb{236, 239, 244});
            cv.frame(b, 1, Rgb{200, 204, 212});
            break;
        case ElementKind::PageControl:
            for (int k = 0; k < 5; ++k)
                cv.fill(Rect{b.x + 3 + k * 12, b.y + 2, 6, 6},
                        k == static_cast<int>(e.pattern % 5) ? Rgb{60, 60, 70} : Rgb{190, 190, 196});
            break;
        case ElementKind::Dialog:
            cv.fill(b, Rgb{255, 255, 255});
            cv.frame(b, 2, Rgb{120, 120, 130});
            break;
    }
}

// A row's elements, laid out from content y.
struct RowBuilder {
    Rng& rng;
    NameGen& names;
    std::string prefix;
    int icon_size;
    int card_h;
    std::vector<Elem>& out;
    int index = 0;

    std::string uid(const char* what) const { return prefix + "/r" + std::to_string(index) + "/" + what; }
    std::uint64_t pat() { return rng.bits(); }

    int card(int y, bool with_value) {
        out.push_back(make(uid("card"), ElementKind::Container, Rect{kMargin, y, 328, card_h}, Layer::content, pat()));
        const int ty = y + card_h / 2 - kTextH - 2;
        out.push_back(make_text(uid("label"), kMargin + 12, ty, names.fresh(1, 2, 13), Layer::content, kBodyText));
        out.push_back(make_text(uid("subtitle"), kMargin + 12, ty + kTextH + 4, names.fresh(1, 2, 13), Layer::content,
                                Rgb{120, 120, 130}));
        if (with_value) {
            auto v = make_text(uid("value"), 0, ty, "", Layer::content, Rgb{110, 110, 120});
            v.pattern = pat();
            v.data_varying = true;
            v.text = NameGen::value(v.pattern, 0);
            v.box = Rect{296 - text_width(v.text), ty, text_width(v.text), kTextH};
            v.plantable = false;
            out.push_back(std::move(v));
        }
        out.push_back(make(uid("icon"), ElementKind::Icon,
                           Rect{344 - 12 - icon_size, y + (card_h - icon_size) / 2, icon_size, icon_size},
                           Layer::content, pat()));
        return card_h;
    }

    int toggle(int y) {
        out.push_back(make_text(uid("label"), kMargin, y + 5, names.fresh(1, 2, 18), Layer::content, kBodyText));
        auto t = make(uid("toggle"), ElementKind::Toggle, Rect{300, y, 44, 24}, Layer::content, pat());
        t.flag = rng.chance(0.5);
        out.push_back(std::move(t));
        out.push_back(
            make_text(uid("hint"), kMargin, y + 28, names.fresh(2, 2, 22), Layer::content, Rgb{120, 120, 130}));
        return 28 + kTextH;
    }

    int checkbox(int y) {
        auto c = make(uid("check"), ElementKind::Checkbox, Rect{kMargin, y, 20, 20}, Layer::content, pat());
        c.flag = rng.chance(0.5);
        out.push_back(std::move(c));
        out.push_back(make_text(uid("label"), kMargin + 28, y + 3, names.fresh(1, 2, 20), Layer::content, kBodyText));
        out.push_back(
            make_text(uid("hint"), kMargin + 28, y + 24, names.fresh(2, 2, 22), Layer::content, Rgb{120, 120, 130}));
        return 24 + kTextH;
    }

    int slider(int y) {
        out.push_back(make_text(uid("label"), kMargin, y, names.fresh(1, 2, 18), Layer::content, kBodyText));
        out.push_back(make(uid("slider"), ElementKind::Slider, Rect{kMargin, y + 22, 280, 20}, Layer::content, pat()));
        return 42;
    }

    int segmented(int y) {
        out.push_back(
            make(uid("segmented"), ElementKind::SegmentedControl, Rect{kMargin, y, 328, 32}, Layer::content, pat()));
        for (int k = 0; k < 3; ++k) {
            const auto s = names.fresh(1, 1, 8);
            const int cx = kMargin + k * 328 / 3 + 328 / 6;
            out.push_back(make_text(uid(("seg" + std::to_string(k)).c_str()), cx - text_width(s) / 2, y + 9, s,
                                    Layer::content, kLinkText));
        }
        return 32;
    }

    int text_field(int y) {
        out.push_back(make_text(uid("caption"), kMargin, y, names.fresh(1, 2, 20), Layer::content, kBodyText));
        out.push_back(
            make(uid("field"), ElementKind::TextField, Rect{kMargin, y + 20, 328, 40}, Layer::content, pat()));
        out.push_back(make_text(uid("placeholder"), kMargin + 12, y + 33, names.fresh(1, 2, 22), Layer::content,
                                Rgb{150, 150, 160}));
        return 60;
    }

    int picture(int y) {
        auto p = make(uid("picture"), ElementKind::Picture, Rect{kMargin, y, 96, 72}, Layer::content, pat());
        p.data_varying = rng.chance(0.5);
        p.plantable = false;
        out.push_back(std::move(p));
        out.push_back(make_text(uid("caption"), kMargin + 108, y + 18, names.fresh(1, 2, 16), Layer::content, kBodyText));
        out.push_back(make_text(uid("credit"), kMargin + 108, y + 40, names.fresh(1, 2, 16), Layer::content,
                                Rgb{120, 120, 130}));
        return 72;
    }

    int icon_row(int y) {
        const int n = rng.i(3, 5);
        for (int k = 0; k < n; ++k)
            out.push_back(make(uid(("icon" + std::to_string(k)).c_str()), ElementKind::Icon,
                               Rect{kMargin + k * 72, y, icon_size, icon_size}, Layer::content, pat()));
        return icon_size;
    }

    int page_control(int y) {
        auto p = make(uid("pages"), ElementKind::PageControl, Rect{150, y, 60, 10}, Layer::content, pat());
        p.plantable = false;
        out.push_back(std::move(p));
        return 10;
    }

    int header(int y) {
        out.push_back(make_text(uid("header"), kMargin, y, names.fresh(1, 2, 20), Layer::content, Rgb{90, 90, 100}));
        return kTextH;
    }
};

std::vector<double> random_centroid(Rng& rng) {
    std::vector<double> c(kEmbeddingDims);
    for (auto& v : c) v = rng.u() * 2.0 - 1.0;
    return c;
}

// "s3/r5/toggle" -> "s3/r5"
std::string row_of(const std::string& uid) {
    const auto first = uid.find('/');
    return uid.substr(0, first == std::string::npos ? first : uid.find('/', first + 1));
}

struct Visible {
    const Elem* elem;
    Rect box;
};

}  // namespace

std::string_view to_string(Variation v) { return kVariationNames[static_cast<std::size_t>(v)]; }

std::optional<Variation> parse_variation(std::string_view s) {
    for (std::size_t i = 0; i < kVariationNames.size(); ++i)
        if (kVariationNames[i] == s) return static_cast<Variation>(i);
    return std::nullopt;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    if (hi <= lo) return lo;
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(rng() % span);
}

void validate_spec(const SynthSpec& spec) {
    const auto& w = spec.weights;
    for (double v : {w.same_data_change, w.scrolled, w.expanded_collapsed, w.keyboard, w.dialog_overlay,
                     w.modal_over_different_content})
        if (!(v >= 0.0) || !std::isfinite(v)) throw SynthError("variation weights must be non-negative");
    for (double r : {spec.planted_issue_rate, spec.planted_false_positive_rate})
        if (!(r >= 0.0 && r <= 1.0)) throw SynthError("planted rates must lie in [0, 1]");
    if (spec.app_count < 0) throw SynthError("app_count must be non-negative");
    if (spec.screens_per_app < 1) throw SynthError("screens_per_app must be at least 1");
}

struct SynthAppModel::Impl {
    SynthSpec spec;
    std::string app_id;
    std::vector<Screen> screens;  // regular screens, then the modal screen last
    std::vector<Elem> tab_bar;
    Rgb nav_color;

    static int distinct_screens(int captures) { return std::clamp(captures / 4, 1, 8); }

    Impl(const SynthSpec& s, int app_index) : spec(s) {
        validate_spec(spec);
        char buf[32];
        std::snprintf(buf, sizeof buf, "app%03d", app_index);
        app_id = buf;

        Rng rng(splitmix(spec.seed * 0x100000001b3ULL + static_cast<std::uint64_t>(app_index)));
        NameGen names(rng);
        const auto nh = rng.bits();
        nav_color = Rgb{static_cast<std::uint8_t>(30 + nh % 120), static_cast<std::uint8_t>(40 + (nh >> 8) % 120),
                        static_cast<std::uint8_t>(90 + (nh >> 16) % 120)};

        for (int t = 0; t < 4; ++t) {
            const std::string p = "tab" + std::to_string(t);
            tab_bar.push_back(make(p + "/button", ElementKind::TabButton, Rect{t * 90, kTabTop, 90, kHeight - kTabTop},
                                   Layer::tab_bar, rng.bits()));
            tab_bar.push_back(
                make(p + "/icon", ElementKind::Icon, Rect{t * 90 + 33, kTabTop + 8, 24, 24}, Layer::tab_bar, rng.bits()));
            const auto label = names.fresh(1, 1, 7);
            tab_bar.push_back(make_text(p + "/label", t * 90 + 45 - text_width(label) / 2, kTabTop + 40, label,
                                        Layer::tab_bar, kBodyText));
        }
        const auto back_pattern = rng.bits();

        const int n = distinct_screens(spec.screens_per_app);
        for (int i = 0; i < n; ++i) screens.push_back(build_screen(i, rng, names, back_pattern));
        screens.push_back(build_modal(n, rng, names));

        for (auto& sc : screens) plan_issues(sc, rng);
    }

    Screen build_screen(int index, Rng& rng, NameGen& names, std::uint64_t back_pattern) {
        Screen sc;
        const std::string prefix = "s" + std::to_string(index);
        sc.tab_bar = rng.chance(0.6);
        sc.active_tab = index % 4;
        sc.centroid = random_centroid(rng);

        const auto title = names.fresh(1, 2, 16);
        sc.nav.push_back(
            make_text(prefix + "/title", kWidth / 2 - text_width(title) / 2, 21, title, Layer::nav, Rgb{255, 255, 255}));
        auto back = make("nav/back", ElementKind::Icon, Rect{12, 16, 24, 24}, Layer::nav, back_pattern);
        back.color = Rgb{255, 255, 255};
        sc.nav.push_back(std::move(back));

        const int viewport = (sc.tab_bar ? kTabTop : kHeight) - kNavH;
        const int target = static_cast<int>(viewport * (1.15 + 0.45 * rng.u()));
        static constexpr std::array<int, 5> icon_sizes = {16, 20, 32, 36, 40};
        const int icon_size = icon_sizes[static_cast<std::size_t>(rng.i(0, 4))];
        RowBuilder rows{rng, names, prefix, icon_size, 44 + 4 * rng.i(0, 11), sc.content};

        int y = 8;
        bool has_pages = false;
        y += rows.card(y, false) + kRowGap;
        sc.expand_y = y;
        {
            // Detail lines revealed under the first card when expanded.
            const int ey = y;
            sc.expansion.push_back(
                make_text(prefix + "/detail0", kMargin + 12, ey, names.fresh(2, 3, 24), Layer::content, kBodyText));
            sc.expansion.push_back(make_text(prefix + "/detail1", kMargin + 12, ey + kTextH + 8, names.fresh(2, 3, 24),
                                             Layer::content, Rgb{110, 110, 120}));
            sc.expansion_h = 2 * kTextH + 8 + kRowGap;
        }
        static constexpr std::array<double, 10> weights = {3.0, 2.0, 1.2, 1.0, 0.6, 1.0, 0.8, 0.4, 0.2, 1.5};
        double total = 0.0;
        for (double w : weights) total += w;
        while (y < target) {
            ++rows.index;
            double r = rng.u() * total;
            std::size_t kind = 0;
            while (kind + 1 < weights.size() && r >= weights[kind]) r -= weights[kind++];
            if (kind == 8 && has_pages) kind = 0;
            int h = 0;
            switch (kind) {
                case 0: h = rows.card(y, rng.chance(0.35)); break;
                case 1: h = rows.toggle(y); break;
                case 2: h = rows.checkbox(y); break;
                case 3: h = rows.slider(y); break;
                case 4: h = rows.segmented(y); break;
                case 5: h = rows.text_field(y); break;
                case 6: h = rows.picture(y); break;
                case 7: h = rows.icon_row(y); break;
                case 8:
                    h = rows.page_control(y);
                    has_pages = true;
                    break;
                default: h = rows.header(y); break;
            }
            y += h + kRowGap;
        }
        sc.content_h = y;

        // Non-modal dialog shown over this screen.
        sc.dialog_box = Rect{24, 236, 312, 124};
        sc.dialog.push_back(make(prefix + "/dialog", ElementKind::Dialog, sc.dialog_box, Layer::overlay, rng.bits()));
        sc.dialog.push_back(
            make_text(prefix + "/dialog/title", 40, 252, names.fresh(1, 2, 16), Layer::overlay, kBodyText));
        sc.dialog.push_back(
            make(prefix + "/dialog/button", ElementKind::Container, Rect{204, 316, 116, 32}, Layer::overlay, rng.bits()));
        const auto ok = names.fresh(1, 1, 8);
        sc.dialog.push_back(
            make_text(prefix + "/dialog/ok", 262 - text_width(ok) / 2, 325, ok, Layer::overlay, kLinkText));
        return sc;
    }

    Screen build_modal(int index, Rng& rng, NameGen& names) {
        Screen sc;
        sc.modal = true;
        sc.tab_bar = false;
        sc.centroid = random_centroid(rng);
        const std::string p = "s" + std::to_string(index);
        sc.dialog_box = Rect{40, 196, 280, 232};
        sc.dialog.push_back(make(p + "/modal", ElementKind::Dialog, sc.dialog_box, Layer::overlay, rng.bits()));
        sc.dialog.push_back(make_text(p + "/modal/title", 56, 212, names.fresh(1, 2, 12), Layer::overlay, kBodyText));
        sc.dialog.push_back(make(p + "/modal/icon", ElementKind::Icon, Rect{284, 208, 24, 24}, Layer::overlay, rng.bits()));
        sc.dialog.push_back(
            make_text(p + "/modal/line0", 56, 248, names.fresh(2, 2, 20), Layer::overlay, Rgb{90, 90, 100}));
        sc.dialog.push_back(
            make_text(p + "/modal/line1", 56, 270, names.fresh(2, 2, 20), Layer::overlay, Rgb{90, 90, 100}));
        for (int k = 0; k < 2; ++k) {
            const int x = 56 + k * 132;
            sc.dialog.push_back(make(p + "/modal/button" + std::to_string(k), ElementKind::Container,
                                     Rect{x, 380, 116, 32}, Layer::overlay, rng.bits()));
            const auto s = names.fresh(1, 1, 8);
            sc.dialog.push_back(make_text(p + "/modal/button" + std::to_string(k) + "/label",
                                          x + 58 - text_width(s) / 2, 389, s, Layer::overlay, kLinkText));
        }
        return sc;
    }

    void plan_issues(Screen& sc, Rng& rng) {
        const auto consider = [&](const Elem& e) {
            if (!e.plantable || e.data_varying) return;
            if (rng.chance(spec.planted_issue_rate)) sc.issues.push_back(IssuePlan{e.uid, rng.i(0, kCheckCount - 1)});
        };
        if (sc.modal) {
            for (const auto& e : sc.dialog) consider(e);
            return;
        }
        for (const auto& e : sc.nav) consider(e);
        for (const auto& e : sc.content) consider(e);
        for (const auto& e : sc.expansion) consider(e);
        if (sc.tab_bar)
            for (const auto& e : tab_bar) consider(e);
        for (const auto& e : sc.dialog) consider(e);
    }

    int scroll_limit(const Screen& sc) const {
        if (sc.modal) return 0;
        return std::max(0, sc.content_h - ((sc.tab_bar ? kTabTop : kHeight) - kNavH));
    }

    // Draws a regular screen and returns the detectable elements.
    std::vector<Visible> draw_screen(Raster& img, int screen, const ScreenVariant& v) const {
        const Screen& sc = screens.at(static_cast<std::size_t>(screen));
        const bool keyboard = v.variation == Variation::keyboard;
        const bool expanded = v.variation == Variation::expanded_collapsed;
        const bool dialog = v.variation == Variation::dialog_overlay;
        const int dy = v.variation == Variation::scrolled ? v.scroll_dy : 0;
        const int data = v.variation == Variation::same_data_change ? v.data_version : 0;

        img = Raster(kWidth, kHeight, sc.background);
        const int vp_bottom = sc.tab_bar ? kTabTop : kHeight;
        const Rect viewport{0, kNavH, kWidth, vp_bottom - kNavH};
        Canvas content{img, viewport};
        std::vector<Visible> vis;

        // A dialog hides every content row it touches, so no control is
        // left visible without its label.
        std::vector<std::pair<const Elem*, Rect>> placed;
        const auto place = [&](const Elem& e, int shift) {
            Rect b = e.box;
            b.y += kNavH - dy + shift;
            draw(content, e, b, data);
            placed.emplace_back(&e, b);
        };
        for (const auto& e : sc.content) place(e, expanded && e.box.y >= sc.expand_y ? sc.expansion_h : 0);
        if (expanded)
            for (const auto& e : sc.expansion) place(e, 0);

        std::set<std::string> occluded_rows;
        if (dialog)
            for (const auto& [e, b] : placed)
                if (!intersection(b, sc.dialog_box).empty()) occluded_rows.insert(row_of(e->uid));
        for (const auto& [e, b] : placed) {
            if (intersection(b, viewport) != b) continue;
            if (keyboard && b.bottom() > kKeyboardTop) continue;
            if (occluded_rows.count(row_of(e->uid))) continue;
            vis.push_back(Visible{e, b});
        }

        Canvas full{img, Rect{0, 0, kWidth, kHeight}};
        full.fill(Rect{0, 0, kWidth, kNavH}, nav_color);
        for (const auto& e : sc.nav) {
            draw(full, e, e.box, 0);
            vis.push_back(Visible{&e, e.box});
        }
        if (sc.tab_bar && !keyboard) {
            for (auto e : tab_bar) {
                if (e.kind == ElementKind::TabButton) e.flag = e.box.x / 90 == sc.active_tab;
                draw(full, e, e.box, 0);
            }
            for (const auto& e : tab_bar) vis.push_back(Visible{&e, e.box});
        }
        if (keyboard) {
            full.fill(Rect{0, kKeyboardTop, kWidth, kHeight - kKeyboardTop}, Rgb{208, 211, 217});
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 10; ++c)
                    full.fill(Rect{4 + c * 35, kKeyboardTop + 10 + r * 58, 31, 46}, Rgb{255, 255, 255});
        }
        if (dialog)
            for (const auto& e : sc.dialog) {
                draw(full, e, e.box, 0);
                vis.push_back(Visible{&e, e.box});
            }
        return vis;
    }

    std::vector<Visible> draw_modal(Raster& img, const ScreenVariant& v) const {
        const Screen& modal = screens.back();
        ScreenVariant bg;
        bg.variation = v.modal_background_dy > 0 ? Variation::scrolled : Variation::none;
        bg.scroll_dy = v.modal_background_dy;
        const int behind = std::clamp(v.modal_background, 0, static_cast<int>(screens.size()) - 2);
        draw_screen(img, behind, bg);
        auto bytes = img.bytes();
        for (auto& b : bytes) b = static_cast<std::uint8_t>(b * 45 / 100);
        Canvas full{img, Rect{0, 0, kWidth, kHeight}};
        std::vector<Visible> vis;
        for (const auto& e : modal.dialog) {
            draw(full, e, e.box, 0);
            vis.push_back(Visible{&e, e.box});
        }
        return vis;
    }
};

SynthAppModel::SynthAppModel(const SynthSpec& spec, int app_index) : impl_(std::make_unique<Impl>(spec, app_index)) {}
SynthAppModel::~SynthAppModel() = default;
SynthAppModel::SynthAppModel(SynthAppModel&&) noexcept = default;
SynthAppModel& SynthAppModel::operator=(SynthAppModel&&) noexcept = default;

const std::string& SynthAppModel::app_id() const { return impl_->app_id; }
int SynthAppModel::screen_count() const { return static_cast<int>(impl_->screens.size()) - 1; }
int SynthAppModel::modal_screen() const { return static_cast<int>(impl_->screens.size()) - 1; }
int SynthAppModel::content_scroll_limit(int screen) const {
    return impl_->scroll_limit(impl_->screens.at(static_cast<std::size_t>(screen)));
}

RenderedCapture SynthAppModel::render(int screen, const ScreenVariant& variant, const std::string& capture_id,
                                      int ordinal, std::mt19937_64& rng) const {
    const auto& impl = *impl_;
    const Screen& sc = impl.screens.at(static_cast<std::size_t>(screen));
    RenderedCapture out;
    auto& cap = out.capture;
    cap.capture_id = capture_id;
    cap.ordinal = ordinal;
    out.info.capture_id = capture_id;
    out.info.screen = screen;
    out.info.variation = variant.variation;
    out.info.scroll_dy = variant.variation == Variation::scrolled ? variant.scroll_dy : 0;

    auto vis = sc.modal ? impl.draw_modal(cap.screenshot, variant) : impl.draw_screen(cap.screenshot, screen, variant);
    std::stable_sort(vis.begin(), vis.end(), [](const Visible& a, const Visible& b) {
        if (a.box.y != b.box.y) return a.box.y < b.box.y;
        if (a.box.x != b.box.x) return a.box.x < b.box.x;
        return a.elem->uid < b.elem->uid;
    });
    const int data = variant.variation == Variation::same_data_change ? variant.data_version : 0;
    std::map<std::string, Rect> box_of;
    for (std::size_t k = 0; k < vis.size(); ++k) {
        const auto& e = *vis[k].elem;
        char id[16];
        std::snprintf(id, sizeof id, "-d%03zu", k + 1);
        ElementDetection d;
        d.detection_id = capture_id + id;
        d.kind = e.kind;
        d.bbox = vis[k].box;
        if (e.kind == ElementKind::Text) {
            d.text = e.data_varying ? NameGen::value(e.pattern, data) : e.text;
            d.bbox.w = text_width(d.text);
        }
        cap.detections.push_back(std::move(d));
        out.info.element_uids.push_back(e.uid);
        box_of[e.uid] = cap.detections.back().bbox;
    }

    int next_issue = 0;
    const auto issue_id = [&] {
        char id[16];
        std::snprintf(id, sizeof id, "-i%03d", ++next_issue);
        return capture_id + id;
    };
    for (const auto& plan : sc.issues) {
        auto it = box_of.find(plan.uid);
        if (it == box_of.end()) continue;
        const auto& check = kChecks[plan.check];
        AccessibilityIssue issue{issue_id(), check.category, check.name, check.message, it->second};
        out.planted.push_back(PlantedIssue{issue.issue_id, capture_id,
                                           "s" + std::to_string(screen) + "|" + plan.uid + "|" + check.name, false});
        cap.issues.push_back(std::move(issue));
    }

    if (uniform01(rng) < impl.spec.planted_false_positive_rate) {
        for (int attempt = 0; attempt < 400; ++attempt) {
            const int w = uniform_int(rng, 8, 16), h = uniform_int(rng, 8, 16);
            const Rect r{uniform_int(rng, 0, kWidth - w), uniform_int(rng, 0, kHeight - h), w, h};
            const Rect grown{r.x - 2, r.y - 2, r.w + 4, r.h + 4};
            const bool clear = std::none_of(cap.detections.begin(), cap.detections.end(), [&](const ElementDetection& d) {
                return !intersection(grown, d.bbox).empty();
            });
            if (!clear) continue;
            const auto& check = kChecks[uniform_int(rng, 0, kCheckCount - 1)];
            AccessibilityIssue issue{issue_id(), check.category, check.name, check.message, r};
            out.planted.push_back(PlantedIssue{issue.issue_id, capture_id, "fp|" + issue.issue_id, true});
            cap.issues.push_back(std::move(issue));
            break;
        }
    }

    std::vector<double> emb = sc.centroid;
    for (auto& v : emb) v += (uniform01(rng) * 2.0 - 1.0) * kEmbeddingNoise;
    cap.embedding = std::move(emb);
    return out;
}

SynthApp generate_app(const SynthSpec& spec, int app_index) {
    const SynthAppModel model(spec, app_index);
    std::mt19937_64 rng(splitmix(spec.seed ^ (0xa11ce5ULL + static_cast<std::uint64_t>(app_index) * 0x9e37ULL)));

    const int n = spec.screens_per_app;
    const int screens = model.screen_count();
    std::vector<int> order;
    for (int s = 0; s < std::min(screens, n); ++s) order.push_back(s);
    while (static_cast<int>(order.size()) < n) order.push_back(uniform_int(rng, 0, screens - 1));
    for (int i = n - 1; i > 0; --i) std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(uniform_int(rng, 0, i))]);

    const auto& w = spec.weights;
    const std::array<double, 7> weights = {1.0, w.same_data_change, w.scrolled, w.expanded_collapsed, w.keyboard,
                                           w.dialog_overlay, w.modal_over_different_content};
    double total = 0.0;
    for (double x : weights) total += x;

    SynthApp app;
    app.bundle.app_id = model.app_id();
    app.bundle.run_id = "run-1";
    app.gold.app_id = model.app_id();
    std::set<int> seen;
    std::map<int, std::vector<std::string>> members;
    std::vector<int> group_order;
    int data_version = 0;

    for (int k = 0; k < n; ++k) {
        int screen = order[static_cast<std::size_t>(k)];
        ScreenVariant v;
        if (seen.count(screen)) {
            double r = uniform01(rng) * total;
            std::size_t idx = 0;
            while (idx + 1 < weights.size() && r >= weights[idx]) r -= weights[idx++];
            v.variation = kAllVariations[idx];
        }
        seen.insert(screen);
        switch (v.variation) {
            case Variation::scrolled: {
                const int limit = std::min(200, model.content_scroll_limit(screen));
                if (limit < 24)
                    v.variation = Variation::none;
                else
                    v.scroll_dy = uniform_int(rng, 24, limit);
                break;
            }
            case Variation::same_data_change: v.data_version = ++data_version; break;
            case Variation::modal_over_different_content:
                v.modal_background = uniform_int(rng, 0, screens - 1);
                v.modal_background_dy = uniform_int(rng, 0, std::min(200, model.content_scroll_limit(v.modal_background)));
                screen = model.modal_screen();
                break;
            default: break;
        }

        char id[16];
        std::snprintf(id, sizeof id, "c%03d", k);
        auto rendered = model.render(screen, v, id, k, rng);
        if (!members.count(screen)) group_order.push_back(screen);
        members[screen].push_back(id);
        for (auto& p : rendered.planted) app.gold.planted.push_back(std::move(p));
        app.gold.captures.push_back(std::move(rendered.info));
        app.bundle.captures.push_back(std::move(rendered.capture));
    }

    std::map<std::string, const CaptureInfo*> info_of;
    for (const auto& ci : app.gold.captures) info_of[ci.capture_id] = &ci;
    for (int g : group_order) {
        const auto& ids = members[g];
        app.gold.grouping.push_back(ids);
        const auto& rep = *info_of[ids.front()];
        const auto& rep_cap = app.bundle.capture(rep.capture_id);
        for (std::size_t m = 1; m < ids.size(); ++m) {
            const auto& mem = *info_of[ids[m]];
            const auto& mem_cap = app.bundle.capture(mem.capture_id);
            for (std::size_t d = 0; d < rep.element_uids.size(); ++d) {
                GoldCorrespondence gc{rep.capture_id, rep_cap.detections[d].detection_id, mem.capture_id, std::nullopt};
                for (std::size_t e = 0; e < mem.element_uids.size(); ++e)
                    if (mem.element_uids[e] == rep.element_uids[d]) gc.target_detection_id = mem_cap.detections[e].detection_id;
                app.gold.correspondences.push_back(std::move(gc));
            }
        }
    }
    return app;
}

json gold_to_json(const GoldApp& gold) {
    json corr = json::array();
    for (const auto& c : gold.correspondences)
        corr.push_back(json{{"template_capture_id", c.template_capture_id},
                            {"template_detection_id", c.template_detection_id},
                            {"target_capture_id", c.target_capture_id},
                            {"target_detection_id", c.target_detection_id ? json(*c.target_detection_id) : json(nullptr)}});
    json planted = json::array();
    for (const auto& p : gold.planted)
        planted.push_back(json{{"issue_id", p.issue_id},
                               {"capture_id", p.capture_id},
                               {"instance", p.instance},
                               {"false_positive", p.false_positive}});
    json captures = json::array();
    for (const auto& c : gold.captures)
        captures.push_back(json{{"capture_id", c.capture_id},
                                {"screen", c.screen},
                                {"variation", to_string(c.variation)},
                                {"scroll_dy", c.scroll_dy},
                                {"element_uids", c.element_uids}});
    return json{{"app_id", gold.app_id},
                {"grouping", gold.grouping},
                {"correspondences", std::move(corr)},
                {"planted", std::move(planted)},
                {"captures", std::move(captures)}};
}

GoldApp gold_from_json(const json& j) {
    GoldApp g;
    g.app_id = j.at("app_id").get<std::string>();
    g.grouping = j.at("grouping").get<Grouping>();
    for (const auto& c : j.value("correspondences", json::array())) {
        GoldCorrespondence gc{c.at("template_capture_id").get<std::string>(),
                              c.at("template_detection_id").get<std::string>(),
                              c.at("target_capture_id").get<std::string>(), std::nullopt};
        if (!c.at("target_detection_id").is_null()) gc.target_detection_id = c["target_detection_id"].get<std::string>();
        g.correspondences.push_back(std::move(gc));
    }
    for (const auto& p : j.value("planted", json::array()))
        g.planted.push_back(PlantedIssue{p.at("issue_id").get<std::string>(), p.at("capture_id").get<std::string>(),
                                         p.at("instance").get<std::string>(), p.at("false_positive").get<bool>()});
    for (const auto& c : j.value("captures", json::array())) {
        CaptureInfo ci;
        ci.capture_id = c.at("capture_id").get<std::string>();
        ci.screen = c.at("screen").get<int>();
        const auto v = parse_variation(c.at("variation").get<std::string>());
        if (!v) throw SynthError("unknown variation in gold file");
        ci.variation = *v;
        ci.scroll_dy = c.value("scroll_dy", 0);
        ci.element_uids = c.at("element_uids").get<std::vector<std::string>>();
        g.captures.push_back(std::move(ci));
    }
    return g;
}

void write_corpus(const SynthSpec& spec, const std::filesystem::path& out) {
    validate_spec(spec);
    std::filesystem::create_directories(out);
    json apps = json::array();
    for (int i = 0; i < spec.app_count; ++i) {
        const auto app = generate_app(spec, i);
        write_bundle(app.bundle, out / app.bundle.app_id);
        apps.push_back(gold_to_json(app.gold));
    }
    const auto& w = spec.weights;
    json doc{{"spec",
              {{"seed", spec.seed},
               {"app_count", spec.app_count},
               {"screens_per_app", spec.screens_per_app},
               {"weights",
                {{"same_data_change", w.same_data_change},
                 {"scrolled", w.scrolled},
                 {"expanded_collapsed", w.expanded_collapsed},
                 {"keyboard", w.keyboard},
                 {"dialog_overlay", w.dialog_overlay},
                 {"modal_over_different_content", w.modal_over_different_content}}},
               {"planted_issue_rate", spec.planted_issue_rate},
               {"planted_false_positive_rate", spec.planted_false_positive_rate}}},
             {"apps", std::move(apps)}};
    std::ofstream f(out / "gold.json");
    f << doc.dump(1) << '\n';
    if (!f) throw std::runtime_error("cannot write " + (out / "gold.json").string());
}

}  // namespace a11y
