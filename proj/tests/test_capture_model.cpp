#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <random>

#include <json.hpp>

#include "a11y/capture_model.hpp"
#include "a11y/png_io.hpp"
#include "fixtures.hpp"

using namespace a11y;
using namespace a11y::testing;
namespace fs = std::filesystem;

namespace {

CaptureBundle three_captures() {
    CaptureBundle b;
    b.app_id = "demo";
    b.run_id = "r1";
    for (int i = 0; i < 3; ++i) {
        auto c = capture("cap" + std::to_string(i), i, noise(40, 60, static_cast<unsigned>(i)));
        c.detections.push_back(det("d" + std::to_string(i), ElementKind::Text, Rect{2, 2, 20, 10}, "Hello"));
        c.detections.push_back(det("e" + std::to_string(i), ElementKind::Icon, Rect{5, 30, 10, 10}));
        c.issues.push_back(issue("i" + std::to_string(i), Rect{2, 2, 20, 10}));
        c.embedding = std::vector<double>{0.1 * i, 0.5, -0.25};
        b.captures.push_back(std::move(c));
    }
    return b;
}

nlohmann::json read(const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

void write(const fs::path& p, const nlohmann::json& j) {
    std::ofstream out(p);
    out << j.dump();
}

std::string load_error(const fs::path& dir) {
    try {
        load_bundle(dir);
    } catch (const BundleError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(LoadBundle, WellFormedDirectory) {
    TempDir dir("bundle");
    write_bundle(three_captures(), dir.path());
    const auto b = load_bundle(dir.path());
    ASSERT_EQ(b.captures.size(), 3u);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(b.captures[static_cast<std::size_t>(i)].ordinal, i);
    EXPECT_EQ(b.app_id, "demo");
}

TEST(LoadBundle, WriteThenLoadIsIdentity) {
    TempDir dir("roundtrip");
    auto original = three_captures();
    original.similarity_mode_hint = SimilarityMode::structural;
    original.captures[1].device_scale = 2.0;
    write_bundle(original, dir.path());
    EXPECT_EQ(load_bundle(dir.path()), original);
}

TEST(LoadBundle, CapturesAreSortedByOrdinal) {
    TempDir dir("order");
    write_bundle(three_captures(), dir.path());
    auto m = read(dir.path() / "manifest.json");
    std::reverse(m["captures"].begin(), m["captures"].end());
    write(dir.path() / "manifest.json", m);
    const auto b = load_bundle(dir.path());
    EXPECT_EQ(b.captures.front().capture_id, "cap0");
    EXPECT_EQ(b.captures.back().capture_id, "cap2");
}

TEST(LoadBundle, MissingScreenshotNamesTheFile) {
    TempDir dir("missing");
    write_bundle(three_captures(), dir.path());
    fs::remove(dir.path() / "001.png");
    const auto err = load_error(dir.path());
    EXPECT_NE(err.find("001.png"), std::string::npos) << err;
}

TEST(LoadBundle, IssueBoxIsClampedToScreenshot) {
    TempDir dir("clamp");
    write_bundle(three_captures(), dir.path());
    auto issues = read(dir.path() / "000.issues.json");
    issues[0]["bbox"] = {{"x", 30}, {"y", 4}, {"w", 15}, {"h", 6}};  // 5px past the 40px width
    write(dir.path() / "000.issues.json", issues);
    const auto b = load_bundle(dir.path());
    const auto& box = b.captures[0].issues[0].bbox;
    EXPECT_EQ(box.right(), 40);
    EXPECT_EQ(box, (Rect{30, 4, 10, 6}));
}

TEST(LoadBundle, MalformedInputsAreRejected) {
    struct Case {
        const char* name;
        std::function<void(const fs::path&)> mutate;
        const char* expect;
    };
    const std::vector<Case> cases = {
        {"no manifest", [](const fs::path& d) { fs::remove(d / "manifest.json"); }, "manifest"},
        {"bad json", [](const fs::path& d) { std::ofstream(d / "000.issues.json") << "[{"; }, "000.issues.json"},
        {"unknown category",
         [](const fs::path& d) {
             auto j = read(d / "000.issues.json");
             j[0]["category"] = "Weird";
             write(d / "000.issues.json", j);
         },
         "Weird"},
        {"unknown kind",
         [](const fs::path& d) {
             auto j = read(d / "000.detections.json");
             j[0]["kind"] = "Blob";
             write(d / "000.detections.json", j);
         },
         "Blob"},
        {"negative width",
         [](const fs::path& d) {
             auto j = read(d / "000.detections.json");
             j[0]["bbox"]["w"] = -3;
             write(d / "000.detections.json", j);
         },
         "negative"},
        {"duplicate ordinal",
         [](const fs::path& d) {
             auto m = read(d / "manifest.json");
             m["captures"][1]["ordinal"] = 0;
             write(d / "manifest.json", m);
         },
         "ordinal"},
        {"duplicate detection id",
         [](const fs::path& d) {
             auto j = read(d / "001.detections.json");
             j[0]["detection_id"] = "d0";
             write(d / "001.detections.json", j);
         },
         "d0"},
        {"embedding length mismatch",
         [](const fs::path& d) { write(d / "002.embedding.json", nlohmann::json::array({1.0, 2.0})); },
         "embedding length"},
        {"confidence out of range",
         [](const fs::path& d) {
             auto j = read(d / "000.detections.json");
             j[0]["confidence"] = 1.5;
             write(d / "000.detections.json", j);
         },
         "confidence"},
        {"empty capture list",
         [](const fs::path& d) {
             auto m = read(d / "manifest.json");
             m["captures"] = nlohmann::json::array();
             write(d / "manifest.json", m);
         },
         "captures"},
    };
    for (const auto& c : cases) {
        TempDir dir("bad");
        write_bundle(three_captures(), dir.path());
        c.mutate(dir.path());
        const auto err = load_error(dir.path());
        EXPECT_NE(err.find(c.expect), std::string::npos) << c.name << ": '" << err << "'";
    }
}

TEST(AssociateIssue, IdenticalBoxPicksThatDetection) {
    const std::vector<ElementDetection> d = {det("a", ElementKind::Text, Rect{0, 0, 10, 10}),
                                             det("b", ElementKind::Text, Rect{20, 0, 10, 10})};
    EXPECT_EQ(associate_issue(issue("i", Rect{20, 0, 10, 10}), d), "b");
}

TEST(AssociateIssue, NothingNearbyGivesNone) {
    const std::vector<ElementDetection> d = {det("a", ElementKind::Text, Rect{0, 0, 10, 10})};
    EXPECT_EQ(associate_issue(issue("i", Rect{50, 50, 4, 4}), d), std::nullopt);
    EXPECT_EQ(associate_issue(issue("i", Rect{0, 0, 10, 10}), {}), std::nullopt);
}

TEST(AssociateIssue, ContainmentRuleBelowIouThreshold) {
    // Detection 20x20 at the origin, issue 10x10 at (5,5): IoU = 100/400 = 0.25.
    const std::vector<ElementDetection> d = {det("A", ElementKind::Container, Rect{0, 0, 20, 20})};
    const auto i = issue("i", Rect{5, 5, 10, 10});
    EXPECT_DOUBLE_EQ(iou(i.bbox, d[0].bbox), 0.25);
    EXPECT_EQ(associate_issue(i, d), "A");
}

TEST(AssociateIssue, TiesPreferSmallerAreaThenId) {
    // Issue centre lies in both; neither reaches the IoU threshold.
    const std::vector<ElementDetection> d = {det("big", ElementKind::Container, Rect{0, 0, 100, 100}),
                                             det("small", ElementKind::Container, Rect{0, 0, 60, 60})};
    EXPECT_EQ(associate_issue(issue("i", Rect{20, 20, 4, 4}), d), "small");
    const std::vector<ElementDetection> same = {det("z", ElementKind::Text, Rect{0, 0, 10, 10}),
                                                det("y", ElementKind::Text, Rect{0, 0, 10, 10})};
    EXPECT_EQ(associate_issue(issue("i", Rect{0, 0, 10, 10}), same), "y");
}

TEST(AssociateIssue, PermutationInvariant) {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> pos(0, 80), size(2, 40);
    for (int round = 0; round < 200; ++round) {
        std::vector<ElementDetection> d;
        for (int k = 0; k < 6; ++k)
            d.push_back(det("d" + std::to_string(k), ElementKind::Text, Rect{pos(rng), pos(rng), size(rng), size(rng)}));
        const auto i = issue("i", Rect{pos(rng), pos(rng), size(rng), size(rng)});
        const auto expected = associate_issue(i, d);
        for (int p = 0; p < 5; ++p) {
            std::shuffle(d.begin(), d.end(), rng);
            EXPECT_EQ(associate_issue(i, d), expected);
        }
    }
}

TEST(Enums, ParseInvertsToString) {
    for (auto c : kAllCategories) EXPECT_EQ(parse_category(to_string(c)), c);
    for (auto k : kAllElementKinds) EXPECT_EQ(parse_kind(to_string(k)), k);
    for (auto m : {SimilarityMode::embedding, SimilarityMode::pixel, SimilarityMode::structural})
        EXPECT_EQ(parse_similarity_mode(to_string(m)), m);
    EXPECT_EQ(parse_kind("nope"), std::nullopt);
}
