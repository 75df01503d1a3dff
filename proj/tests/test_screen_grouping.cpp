#include <gtest/gtest.h>

#include <random>
#include <set>

#include "a11y/eval_metrics.hpp"
#include "a11y/screen_grouping.hpp"
#include "a11y/synth.hpp"
#include "fixtures.hpp"

using namespace a11y;
using namespace a11y::testing;

namespace {

CaptureBundle embedded(const std::vector<std::pair<std::string, std::vector<double>>>& points) {
    CaptureBundle b;
    b.app_id = "app";
    b.run_id = "r";
    int k = 0;
    for (const auto& [id, e] : points) {
        auto c = capture(id, k++);
        c.embedding = e;
        b.captures.push_back(std::move(c));
    }
    return b;
}

const SimilarityScorer kEmbedding(SimilarityMode::embedding);

using Edges = std::set<std::pair<int, int>>;

}  // namespace

TEST(Storyboard, RepeatedScreenIsOneGroupWithoutEdges) {
    const auto b = embedded({{"A", {0, 0}}, {"A2", {0.05, 0}}});
    const auto sb = build_storyboard(b, kEmbedding);
    ASSERT_EQ(sb.groups.size(), 1u);
    EXPECT_EQ(sb.groups[0].member_ids, (std::vector<std::string>{"A", "A2"}));
    EXPECT_TRUE(sb.edges.empty());
}

TEST(Storyboard, ReturnToEarlierScreenAddsBackEdge) {
    const auto b = embedded({{"A", {0, 0}}, {"B", {1, 0}}, {"A3", {0, 0.05}}});
    const auto sb = build_storyboard(b, kEmbedding);
    ASSERT_EQ(sb.groups.size(), 2u);
    EXPECT_EQ(sb.groups[0].member_ids, (std::vector<std::string>{"A", "A3"}));
    EXPECT_EQ(sb.edges, (Edges{{0, 1}, {1, 0}}));
}

TEST(Storyboard, DistinctScreensFormAChain) {
    const auto b = embedded({{"A", {0, 0}}, {"B", {1, 0}}, {"C", {0, 1}}});
    const auto sb = build_storyboard(b, kEmbedding);
    ASSERT_EQ(sb.groups.size(), 3u);
    EXPECT_EQ(sb.edges, (Edges{{0, 1}, {1, 2}}));
}

TEST(Storyboard, RepresentativeIsFirstMemberAndMeanIsUpdated) {
    const auto b = embedded({{"A", {0, 0}}, {"A2", {0.1, 0}}, {"A3", {0.2, 0}}});
    const auto sb = build_storyboard(b, kEmbedding);
    ASSERT_EQ(sb.groups.size(), 1u);
    EXPECT_EQ(sb.groups[0].representative_id, "A");
    ASSERT_TRUE(sb.groups[0].mean_embedding);
    EXPECT_NEAR((*sb.groups[0].mean_embedding)[0], 0.1, 1e-12);
}

TEST(Storyboard, MissingEmbeddingIsAConfigError) {
    auto b = embedded({{"A", {0, 0}}, {"B", {1, 0}}});
    b.captures[1].embedding.reset();
    EXPECT_THROW(kEmbedding.validate(b), ConfigError);
    EXPECT_THROW(build_storyboard(b, kEmbedding), ConfigError);
    EXPECT_NO_THROW(SimilarityScorer(SimilarityMode::structural).validate(b));
}

TEST(Storyboard, PartitionEdgeBoundAndDeterminism) {
    SynthSpec spec;
    spec.app_count = 3;
    spec.weights = {0.5, 1.0, 0.5, 0.5, 0.5, 0.3};
    for (int a = 0; a < spec.app_count; ++a) {
        const auto app = generate_app(spec, a);
        for (auto mode : {SimilarityMode::embedding, SimilarityMode::structural, SimilarityMode::pixel}) {
            const SimilarityScorer scorer(mode);
            const auto sb = build_storyboard(app.bundle, scorer);
            std::multiset<std::string> members;
            for (const auto& g : sb.groups) members.insert(g.member_ids.begin(), g.member_ids.end());
            std::multiset<std::string> all;
            for (const auto& c : app.bundle.captures) all.insert(c.capture_id);
            EXPECT_EQ(members, all);
            EXPECT_LE(sb.edges.size(), app.bundle.captures.size() - 1);
            for (const auto& [from, to] : sb.edges) EXPECT_NE(from, to);
            EXPECT_EQ(build_storyboard(app.bundle, scorer), sb);
        }
    }
}

TEST(Storyboard, IdenticalScreenshotsShareAPixelGroup) {
    CaptureBundle b;
    b.app_id = "app";
    b.run_id = "r";
    const auto x = noise(64, 96, 1), y = noise(64, 96, 2);
    int k = 0;
    for (const auto* img : {&x, &y, &x, &y, &x}) b.captures.push_back(capture("c" + std::to_string(k), k, *img)), ++k;
    const auto sb = build_storyboard(b, SimilarityScorer(SimilarityMode::pixel));
    ASSERT_EQ(sb.groups.size(), 2u);
    EXPECT_EQ(sb.groups[0].member_ids, (std::vector<std::string>{"c0", "c2", "c4"}));
}

TEST(StructuralOverlap, SymmetricBoundedAndExact) {
    const std::vector<ElementDetection> a = {det("1", ElementKind::Text, Rect{0, 0, 40, 12}, "Hello"),
                                             det("2", ElementKind::Icon, Rect{0, 20, 24, 24}),
                                             det("3", ElementKind::Icon, Rect{30, 20, 24, 24})};
    const std::vector<ElementDetection> b = {det("4", ElementKind::Text, Rect{50, 50, 30, 12}, "hello!"),
                                             det("5", ElementKind::Icon, Rect{0, 90, 25, 26})};
    // Shared keys: the text (same normalized content) and one 24x24-bucket icon.
    EXPECT_DOUBLE_EQ(structural_overlap(a, b), 2.0 * 2 / 5);
    EXPECT_DOUBLE_EQ(structural_overlap(b, a), structural_overlap(a, b));
    EXPECT_DOUBLE_EQ(structural_overlap(a, a), 1.0);
    EXPECT_DOUBLE_EQ(structural_overlap({}, {}), 1.0);
    EXPECT_DOUBLE_EQ(structural_overlap(a, {}), 0.0);
}

TEST(ScoreSymmetry, CaptureToCaptureScoresAreSymmetric) {
    SynthSpec spec;
    spec.app_count = 1;
    spec.screens_per_app = 8;
    spec.weights.scrolled = 1.0;
    const auto app = generate_app(spec, 2);
    for (auto mode : {SimilarityMode::embedding, SimilarityMode::structural, SimilarityMode::pixel}) {
        const SimilarityScorer s(mode);
        for (const auto& a : app.bundle.captures)
            for (const auto& b : app.bundle.captures) EXPECT_NEAR(s.score(a, b), s.score(b, a), 1e-9);
    }
}

TEST(EmbeddingDistance, LengthMismatchThrows) {
    const std::vector<double> a{1, 2}, b{1};
    EXPECT_THROW(embedding_distance(a, b), ConfigError);
    EXPECT_DOUBLE_EQ(embedding_distance(std::vector<double>{0, 3}, std::vector<double>{4, 0}), 5.0);
}
