#include "a11y/capture_model.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <tuple>

#include <json.hpp>

#include "a11y/png_io.hpp"

namespace a11y {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::array<std::string_view, 7> kCategoryNames = {
    "ElementDescription", "Contrast", "HitRegion", "ElementDetection", "ClippedText", "Traits", "LargeText",
};

constexpr std::array<std::string_view, 12> kKindNames = {
    "Text",   "Icon",     "Picture",          "TabButton", "Toggle",      "Checkbox",
    "SegmentedControl", "TextField", "Slider", "Container", "PageControl", "Dialog",
};

constexpr std::array<std::string_view, 3> kModeNames = {"embedding", "pixel", "structural"};

template <typename E, std::size_t N>
std::optional<E> parse_enum(const std::array<std::string_view, N>& names, std::string_view s) {
    for (std::size_t i = 0; i < N; ++i)
        if (names[i] == s) return static_cast<E>(i);
    return std::nullopt;
}

std::string ordinal_stem(int ordinal) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03d", ordinal);
    return buf;
}

// Schema helpers: every failure names the file and the JSON path.
struct Ctx {
    std::string file;
    std::string path;

    [[noreturn]] void fail(const std::string& what) const {
        throw BundleError(file + ": " + (path.empty() ? std::string("<root>") : path) + ": " + what);
    }
    Ctx at(const std::string& key) const { return Ctx{file, path.empty() ? key : path + "." + key}; }
    Ctx at(std::size_t index) const { return Ctx{file, path + "[" + std::to_string(index) + "]"}; }
};

const json& field(const json& obj, const Ctx& ctx, const char* key) {
    if (!obj.is_object()) ctx.fail("expected object");
    auto it = obj.find(key);
    if (it == obj.end()) ctx.at(key).fail("missing field");
    return *it;
}

std::string get_string(const json& obj, const Ctx& ctx, const char* key) {
    const auto& v = field(obj, ctx, key);
    if (!v.is_string()) ctx.at(key).fail("expected string");
    return v.get<std::string>();
}

int get_int(const json& v, const Ctx& ctx) {
    if (!v.is_number_integer()) ctx.fail("expected integer");
    return v.get<int>();
}

double get_number(const json& v, const Ctx& ctx) {
    if (!v.is_number()) ctx.fail("expected number");
    return v.get<double>();
}

Rect parse_bbox(const json& v, const Ctx& ctx) {
    if (!v.is_object()) ctx.fail("expected {x,y,w,h}");
    Rect r{get_int(field(v, ctx, "x"), ctx.at("x")), get_int(field(v, ctx, "y"), ctx.at("y")),
           get_int(field(v, ctx, "w"), ctx.at("w")), get_int(field(v, ctx, "h"), ctx.at("h"))};
    if (r.w < 0) ctx.at("w").fail("negative width");
    if (r.h < 0) ctx.at("h").fail("negative height");
    return r;
}

json read_json(const fs::path& p) {
    std::ifstream f(p);
    if (!f) throw BundleError(p.string() + ": cannot open file");
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw BundleError(p.string() + ": invalid JSON: " + e.what());
    }
}

void write_json(const json& j, const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw BundleError(p.string() + ": cannot open for writing");
    f << j.dump(2) << '\n';
}

json bbox_json(const Rect& r) {
    return json{{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}};
}

std::vector<AccessibilityIssue> parse_issues(const json& arr, const Ctx& ctx, const std::string& capture_id) {
    if (!arr.is_array()) ctx.fail("expected array of issues");
    std::vector<AccessibilityIssue> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& v = arr[i];
        const Ctx c = ctx.at(i);
        AccessibilityIssue issue;
        issue.issue_id = v.is_object() && v.contains("issue_id") ? get_string(v, c, "issue_id")
                                                                  : capture_id + "/i" + std::to_string(i);
        const auto cat = get_string(v, c, "category");
        auto parsed = parse_category(cat);
        if (!parsed) c.at("category").fail("unknown category '" + cat + "'");
        issue.category = *parsed;
        issue.check_name = get_string(v, c, "check_name");
        issue.message = v.contains("message") ? get_string(v, c, "message") : std::string{};
        issue.bbox = parse_bbox(field(v, c, "bbox"), c.at("bbox"));
        out.push_back(std::move(issue));
    }
    return out;
}

std::vector<ElementDetection> parse_detections(const json& arr, const Ctx& ctx, const std::string& capture_id) {
    if (!arr.is_array()) ctx.fail("expected array of detections");
    std::vector<ElementDetection> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& v = arr[i];
        const Ctx c = ctx.at(i);
        ElementDetection d;
        d.detection_id = v.is_object() && v.contains("detection_id") ? get_string(v, c, "detection_id")
                                                                      : capture_id + "/d" + std::to_string(i);
        const auto kind = get_string(v, c, "kind");
        auto parsed = parse_kind(kind);
        if (!parsed) c.at("kind").fail("unknown element kind '" + kind + "'");
        d.kind = *parsed;
        d.bbox = parse_bbox(field(v, c, "bbox"), c.at("bbox"));
        if (v.contains("text") && !v["text"].is_null()) d.text = get_string(v, c, "text");
        if (v.contains("confidence")) {
            d.confidence = get_number(v["confidence"], c.at("confidence"));
            if (d.confidence < 0.0 || d.confidence > 1.0) c.at("confidence").fail("must lie in [0,1]");
        }
        out.push_back(std::move(d));
    }
    return out;
}

}  // namespace

std::string_view to_string(IssueCategory c) { return kCategoryNames[static_cast<std::size_t>(c)]; }
std::string_view to_string(ElementKind k) { return kKindNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(SimilarityMode m) { return kModeNames[static_cast<std::size_t>(m)]; }
std::optional<IssueCategory> parse_category(std::string_view s) { return parse_enum<IssueCategory>(kCategoryNames, s); }
std::optional<ElementKind> parse_kind(std::string_view s) { return parse_enum<ElementKind>(kKindNames, s); }
std::optional<SimilarityMode> parse_similarity_mode(std::string_view s) {
    return parse_enum<SimilarityMode>(kModeNames, s);
}

const ElementDetection* ScreenCapture::find_detection(std::string_view id) const {
    for (const auto& d : detections)
        if (d.detection_id == id) return &d;
    return nullptr;
}

const ScreenCapture* CaptureBundle::find_capture(std::string_view id) const {
    for (const auto& c : captures)
        if (c.capture_id == id) return &c;
    return nullptr;
}

const ScreenCapture& CaptureBundle::capture(std::string_view id) const {
    if (const auto* c = find_capture(id)) return *c;
    throw std::out_of_range("unknown capture '" + std::string(id) + "'");
}

CaptureBundle load_bundle(const fs::path& dir) {
    const fs::path manifest_path = dir / "manifest.json";
    if (!fs::is_regular_file(manifest_path)) throw BundleError(manifest_path.string() + ": missing manifest");
    const json manifest = read_json(manifest_path);
    const Ctx mctx{manifest_path.string(), ""};

    CaptureBundle bundle;
    bundle.app_id = get_string(manifest, mctx, "app_id");
    bundle.run_id = get_string(manifest, mctx, "run_id");
    if (manifest.contains("similarity_mode_hint") && !manifest["similarity_mode_hint"].is_null()) {
        const auto hint = get_string(manifest, mctx, "similarity_mode_hint");
        bundle.similarity_mode_hint = parse_similarity_mode(hint);
        if (!bundle.similarity_mode_hint) mctx.at("similarity_mode_hint").fail("unknown mode '" + hint + "'");
    }

    const auto& list = field(manifest, mctx, "captures");
    if (!list.is_array() || list.empty()) mctx.at("captures").fail("expected non-empty array");

    std::set<int> ordinals;
    std::set<std::string> capture_ids, issue_ids, detection_ids;
    std::optional<std::size_t> embedding_len;

    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto& entry = list[i];
        const Ctx c = mctx.at("captures").at(i);
        ScreenCapture cap;
        cap.ordinal = get_int(field(entry, c, "ordinal"), c.at("ordinal"));
        if (!ordinals.insert(cap.ordinal).second) c.at("ordinal").fail("duplicate ordinal");
        const std::string stem = ordinal_stem(cap.ordinal);
        cap.capture_id = entry.contains("capture_id") ? get_string(entry, c, "capture_id") : stem;
        if (!capture_ids.insert(cap.capture_id).second) c.at("capture_id").fail("duplicate capture_id");
        if (entry.contains("device_scale")) {
            cap.device_scale = get_number(entry["device_scale"], c.at("device_scale"));
            if (!(cap.device_scale > 0.0)) c.at("device_scale").fail("must be positive");
        }

        auto file_of = [&](const char* key, const std::string& fallback) {
            return dir / (entry.contains(key) ? get_string(entry, c, key) : fallback);
        };

        const fs::path png = file_of("screenshot", stem + ".png");
        if (!fs::is_regular_file(png)) throw BundleError(png.string() + ": screenshot file missing");
        try {
            cap.screenshot = read_png(png);
        } catch (const ImageIoError& e) {
            throw BundleError(png.string() + ": unreadable raster: " + e.what());
        }

        const fs::path issues_path = file_of("issues", stem + ".issues.json");
        cap.issues = parse_issues(read_json(issues_path), Ctx{issues_path.string(), ""}, cap.capture_id);
        const fs::path det_path = file_of("detections", stem + ".detections.json");
        cap.detections = parse_detections(read_json(det_path), Ctx{det_path.string(), ""}, cap.capture_id);

        const fs::path emb_path = file_of("embedding", stem + ".embedding.json");
        if (entry.contains("embedding") || fs::is_regular_file(emb_path)) {
            const json emb = read_json(emb_path);
            const Ctx ec{emb_path.string(), ""};
            if (!emb.is_array() || emb.empty()) ec.fail("expected non-empty array of numbers");
            std::vector<double> values;
            for (std::size_t k = 0; k < emb.size(); ++k) values.push_back(get_number(emb[k], ec.at(k)));
            if (embedding_len && *embedding_len != values.size())
                ec.fail("embedding length " + std::to_string(values.size()) + " differs from " +
                        std::to_string(*embedding_len));
            embedding_len = values.size();
            cap.embedding = std::move(values);
        }

        const int w = cap.screenshot.width(), h = cap.screenshot.height();
        for (auto& issue : cap.issues) {
            if (!issue_ids.insert(issue.issue_id).second)
                throw BundleError(issues_path.string() + ": duplicate issue_id '" + issue.issue_id + "'");
            issue.bbox = clamp_to(issue.bbox, w, h);
        }
        for (auto& d : cap.detections) {
            if (!detection_ids.insert(d.detection_id).second)
                throw BundleError(det_path.string() + ": duplicate detection_id '" + d.detection_id + "'");
            d.bbox = clamp_to(d.bbox, w, h);
        }
        bundle.captures.push_back(std::move(cap));
    }

    std::sort(bundle.captures.begin(), bundle.captures.end(),
              [](const ScreenCapture& a, const ScreenCapture& b) { return a.ordinal < b.ordinal; });
    return bundle;
}

void write_bundle(const CaptureBundle& bundle, const fs::path& dir) {
    fs::create_directories(dir);
    json manifest{{"app_id", bundle.app_id}, {"run_id", bundle.run_id}};
    if (bundle.similarity_mode_hint) manifest["similarity_mode_hint"] = to_string(*bundle.similarity_mode_hint);
    json list = json::array();
    for (const auto& cap : bundle.captures) {
        const std::string stem = ordinal_stem(cap.ordinal);
        json entry{{"capture_id", cap.capture_id},
                   {"ordinal", cap.ordinal},
                   {"device_scale", cap.device_scale},
                   {"screenshot", stem + ".png"},
                   {"issues", stem + ".issues.json"},
                   {"detections", stem + ".detections.json"}};
        write_png(cap.screenshot, dir / (stem + ".png"));

        json issues = json::array();
        for (const auto& i : cap.issues)
            issues.push_back({{"issue_id", i.issue_id},
                              {"category", to_string(i.category)},
                              {"check_name", i.check_name},
                              {"message", i.message},
                              {"bbox", bbox_json(i.bbox)}});
        write_json(issues, dir / (stem + ".issues.json"));

        json dets = json::array();
        for (const auto& d : cap.detections) {
            json dj{{"detection_id", d.detection_id},
                    {"kind", to_string(d.kind)},
                    {"bbox", bbox_json(d.bbox)},
                    {"confidence", d.confidence}};
            dj["text"] = d.text.empty() ? json(nullptr) : json(d.text);
            dets.push_back(std::move(dj));
        }
        write_json(dets, dir / (stem + ".detections.json"));

        if (cap.embedding) {
            entry["embedding"] = stem + ".embedding.json";
            write_json(json(*cap.embedding), dir / (stem + ".embedding.json"));
        }
        list.push_back(std::move(entry));
    }
    manifest["captures"] = std::move(list);
    write_json(manifest, dir / "manifest.json");
}

std::optional<std::string> associate_issue(const AccessibilityIssue& issue,
                                           std::span<const ElementDetection> detections,
                                           double iou_threshold) {
    // Candidates compare by (IoU desc, area asc, id asc).
    auto better = [](double iou_a, const ElementDetection& a, double iou_b, const ElementDetection& b) {
        return std::make_tuple(-iou_a, a.bbox.area(), std::string_view(a.detection_id)) <
               std::make_tuple(-iou_b, b.bbox.area(), std::string_view(b.detection_id));
    };

    const ElementDetection* best = nullptr;
    double best_iou = 0.0;
    for (const auto& d : detections) {
        const double v = iou(issue.bbox, d.bbox);
        if (v < iou_threshold || v <= 0.0) continue;
        if (!best || better(v, d, best_iou, *best)) {
            best = &d;
            best_iou = v;
        }
    }
    if (best) return best->detection_id;

    const double cx = issue.bbox.center_x(), cy = issue.bbox.center_y();
    for (const auto& d : detections) {
        if (d.bbox.empty() || !d.bbox.contains_point(cx, cy)) continue;
        const double v = iou(issue.bbox, d.bbox);
        if (!best || better(v, d, best_iou, *best)) {
            best = &d;
            best_iou = v;
        }
    }
    if (best) return best->detection_id;
    return std::nullopt;
}

}  // namespace a11y
