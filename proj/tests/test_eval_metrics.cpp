#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "a11y/eval_metrics.hpp"

using namespace a11y;

namespace {

// Enumerates every unordered pair, independent of the library's label counting.
Confusion pairs_oracle(const Grouping& pred, const Grouping& gold) {
    std::map<std::string, int> p, g;
    for (std::size_t i = 0; i < pred.size(); ++i)
        for (const auto& id : pred[i]) p[id] = static_cast<int>(i);
    for (std::size_t i = 0; i < gold.size(); ++i)
        for (const auto& id : gold[i]) g[id] = static_cast<int>(i);
    std::vector<std::string> ids;
    for (const auto& [id, _] : g) ids.push_back(id);
    Confusion c;
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            const bool ps = p[ids[i]] == p[ids[j]], gs = g[ids[i]] == g[ids[j]];
            if (ps && gs) ++c.tp;
            else if (ps) ++c.fp;
            else if (gs) ++c.fn;
            else ++c.tn;
        }
    return c;
}

Grouping random_grouping(const std::vector<std::string>& ids, std::mt19937& rng, int k) {
    Grouping g(static_cast<std::size_t>(k));
    std::uniform_int_distribution<int> pick(0, k - 1);
    for (const auto& id : ids) g[static_cast<std::size_t>(pick(rng))].push_back(id);
    std::erase_if(g, [](const auto& v) { return v.empty(); });
    return g;
}

}  // namespace

TEST(MatchingMetrics, AllCorrect) {
    const std::vector<CorrespondenceJudgment> j = {{"a", "x", "x"}, {"b", "y", "y"}};
    const auto m = matching_metrics(j);
    EXPECT_DOUBLE_EQ(m.precision, 1.0);
    EXPECT_DOUBLE_EQ(m.recall, 1.0);
    EXPECT_DOUBLE_EQ(m.f1, 1.0);
}

TEST(MatchingMetrics, TwoOfThreeExample) {
    const auto m = metrics_from(Confusion{2, 1, 1, 0});
    EXPECT_DOUBLE_EQ(m.precision, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(m.recall, 2.0 / 3.0);
    EXPECT_NEAR(m.f1, 2.0 / 3.0, 1e-12);
}

TEST(MatchingMetrics, JudgmentClasses) {
    const std::vector<CorrespondenceJudgment> j = {
        {"tp", "x", "x"}, {"wrong", "x", "y"}, {"spurious", "x", std::nullopt}, {"miss", std::nullopt, "y"},
        {"tn", std::nullopt, std::nullopt}};
    EXPECT_EQ(matching_confusion(j), (Confusion{1, 2, 1, 1}));
}

TEST(MatchingMetrics, EmptyInputIsAllZero) {
    const auto m = matching_metrics({});
    EXPECT_EQ(m.precision, 0.0);
    EXPECT_EQ(m.recall, 0.0);
    EXPECT_EQ(m.f1, 0.0);
    EXPECT_EQ(m.accuracy, 0.0);
}

TEST(PairwiseGrouping, IdenticalIsPerfect) {
    const Grouping g = {{"a", "b"}, {"c"}, {"d", "e", "f"}};
    const auto m = pairwise_grouping_metrics(g, g);
    EXPECT_DOUBLE_EQ(m.accuracy, 1.0);
    EXPECT_DOUBLE_EQ(m.f1, 1.0);
}

TEST(PairwiseGrouping, SplitPairExample) {
    const auto m = pairwise_grouping_metrics(Grouping{{"A"}, {"B"}, {"C"}}, Grouping{{"A", "B"}, {"C"}});
    EXPECT_EQ(m.counts, (Confusion{0, 0, 1, 2}));
    EXPECT_EQ(m.recall, 0.0);
    EXPECT_DOUBLE_EQ(m.accuracy, 2.0 / 3.0);
}

TEST(PairwiseGrouping, AllInOneVersusSingletons) {
    const auto m = pairwise_grouping_metrics(Grouping{{"A", "B", "C"}}, Grouping{{"A"}, {"B"}, {"C"}});
    EXPECT_EQ(m.precision, 0.0);
    EXPECT_EQ(m.accuracy, 0.0);
}

TEST(PairwiseGrouping, MismatchedCaptureSetsThrow) {
    EXPECT_THROW(pairwise_confusion(Grouping{{"A"}}, Grouping{{"B"}}), EvalError);
    EXPECT_THROW(pairwise_confusion(Grouping{{"A", "A"}}, Grouping{{"A"}}), EvalError);
    EXPECT_THROW(pairwise_confusion(Grouping{{"A"}, {"B"}}, Grouping{{"A"}}), EvalError);
}

TEST(PairwiseGrouping, MatchesPairEnumerationAndIsPermutationInvariant) {
    std::mt19937 rng(23);
    std::vector<std::string> ids;
    for (int i = 0; i < 14; ++i) ids.push_back("c" + std::to_string(i));
    for (int round = 0; round < 200; ++round) {
        auto pred = random_grouping(ids, rng, 1 + round % 6);
        auto gold = random_grouping(ids, rng, 1 + (round / 6) % 6);
        const auto c = pairwise_confusion(pred, gold);
        ASSERT_EQ(c, pairs_oracle(pred, gold));
        EXPECT_EQ(c.tp + c.fp + c.fn + c.tn, 14 * 13 / 2);
        std::shuffle(pred.begin(), pred.end(), rng);
        for (auto& g : gold) std::shuffle(g.begin(), g.end(), rng);
        EXPECT_EQ(pairwise_confusion(pred, gold), c);
    }
}

TEST(Metrics, F1IsHarmonicMean) {
    for (std::int64_t tp = 0; tp < 8; ++tp)
        for (std::int64_t fp = 0; fp < 8; ++fp)
            for (std::int64_t fn = 0; fn < 8; ++fn) {
                const auto m = metrics_from(Confusion{tp, fp, fn, 1});
                if (m.precision > 0 && m.recall > 0)
                    EXPECT_NEAR(m.f1, 2 * m.precision * m.recall / (m.precision + m.recall), 1e-9);
                else
                    EXPECT_EQ(m.f1, 0.0);
            }
}
