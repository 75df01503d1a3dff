#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "a11y/capture_model.hpp"
#include "a11y/raster.hpp"

namespace a11y::testing {

inline ElementDetection det(std::string id, ElementKind kind, Rect box, std::string text = {}) {
    ElementDetection d;
    d.detection_id = std::move(id);
    d.kind = kind;
    d.bbox = box;
    d.text = std::move(text);
    return d;
}

inline AccessibilityIssue issue(std::string id, Rect box, std::string check = "Element has no description",
                                IssueCategory cat = IssueCategory::ElementDescription) {
    AccessibilityIssue i;
    i.issue_id = std::move(id);
    i.category = cat;
    i.check_name = std::move(check);
    i.message = "m";
    i.bbox = box;
    return i;
}

/// Deterministic noise texture, so template matching has structure to lock on to.
inline Raster noise(int w, int h, unsigned seed) {
    Raster r(w, h);
    std::mt19937 rng(seed);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const auto v = static_cast<std::uint8_t>(rng() & 0xff);
            r.set(x, y, Rgb{v, static_cast<std::uint8_t>(255 - v), static_cast<std::uint8_t>(v / 2)});
        }
    return r;
}

inline ScreenCapture capture(std::string id, int ordinal, Raster shot = Raster(120, 200, Rgb{240, 240, 240})) {
    ScreenCapture c;
    c.capture_id = std::move(id);
    c.ordinal = ordinal;
    c.screenshot = std::move(shot);
    return c;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("a11y-test-" + std::to_string(::getpid()) + "-" + tag + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace a11y::testing
