#include "a11y/eval_metrics.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <unordered_map>

namespace a11y {

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

std::unordered_map<std::string, std::size_t> label_of(const Grouping& g, const char* which) {
    std::unordered_map<std::string, std::size_t> out;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (const auto& id : g[i])
            if (!out.emplace(id, i).second)
                throw EvalError(std::string(which) + " grouping lists capture '" + id + "' twice");
    return out;
}

}  // namespace

Metrics metrics_from(const Confusion& c) {
    Metrics m;
    m.counts = c;
    const auto tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn),
               tn = static_cast<double>(c.tn);
    m.precision = ratio(tp, tp + fp);
    m.recall = ratio(tp, tp + fn);
    m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    m.accuracy = ratio(tp + tn, tp + tn + fp + fn);
    return m;
}

Confusion matching_confusion(std::span<const CorrespondenceJudgment> judgments) {
    Confusion c;
    for (const auto& j : judgments) {
        if (j.predicted && j.gold && *j.predicted == *j.gold)
            ++c.tp;
        else if (!j.predicted && !j.gold)
            ++c.tn;
        else if (j.predicted)
            ++c.fp;
        else
            ++c.fn;
    }
    return c;
}

Metrics matching_metrics(std::span<const CorrespondenceJudgment> judgments) {
    return metrics_from(matching_confusion(judgments));
}

Grouping grouping_of(const Storyboard& storyboard) {
    Grouping g;
    for (const auto& group : storyboard.groups) g.push_back(group.member_ids);
    return g;
}

Confusion pairwise_confusion(const Grouping& predicted, const Grouping& gold) {
    const auto pl = label_of(predicted, "predicted");
    const auto gl = label_of(gold, "gold");
    if (pl.size() != gl.size()) throw EvalError("predicted and gold groupings cover different captures");
    std::vector<std::pair<std::size_t, std::size_t>> labels;
    labels.reserve(pl.size());
    for (const auto& [id, p] : pl) {
        auto it = gl.find(id);
        if (it == gl.end()) throw EvalError("capture '" + id + "' missing from gold grouping");
        labels.emplace_back(p, it->second);
    }
    Confusion c;
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t j = i + 1; j < labels.size(); ++j) {
            const bool same_pred = labels[i].first == labels[j].first;
            const bool same_gold = labels[i].second == labels[j].second;
            if (same_pred && same_gold)
                ++c.tp;
            else if (same_pred)
                ++c.fp;
            else if (same_gold)
                ++c.fn;
            else
                ++c.tn;
        }
    return c;
}

Metrics pairwise_grouping_metrics(const Grouping& predicted, const Grouping& gold) {
    return metrics_from(pairwise_confusion(predicted, gold));
}

Metrics pairwise_grouping_metrics(const Storyboard& predicted, const Grouping& gold) {
    return pairwise_grouping_metrics(grouping_of(predicted), gold);
}

CorrespondenceRun run_correspondences(const CaptureBundle& bundle, std::span<const GoldCorrespondence> gold,
                                      const MatchConfig& config) {
    using Clock = std::chrono::steady_clock;
    CorrespondenceRun run;
    std::map<std::string, std::unique_ptr<MatchTarget>> targets;
    std::map<std::pair<std::string, std::string>, TemplateRecord> templates;
    for (const auto& g : gold) {
        const auto key = std::pair{g.template_capture_id, g.template_detection_id};
        auto t = templates.find(key);
        if (t == templates.end())
            t = templates.emplace(key, preprocess_template(bundle.capture(g.template_capture_id),
                                                           g.template_detection_id)).first;
        auto& target = targets[g.target_capture_id];
        if (!target) target = std::make_unique<MatchTarget>(bundle.capture(g.target_capture_id));

        const auto start = Clock::now();
        const auto m = find_best_match(t->second, *target, config);
        run.total_seconds += std::chrono::duration<double>(Clock::now() - start).count();

        run.judgments.push_back(CorrespondenceJudgment{
            g.template_capture_id + "/" + g.template_detection_id + "->" + g.target_capture_id, m.matched_id,
            g.target_detection_id});
    }
    return run;
}

}  // namespace a11y
