// Runs the acceptance criteria on the synthetic corpus and prints one
// PASS/FAIL line per criterion. Exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "a11y/commands.hpp"
#include "a11y/eval_metrics.hpp"
#include "a11y/ignore_store.hpp"
#include "a11y/pipeline.hpp"
#include "a11y/synth.hpp"

using namespace a11y;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 7;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path scratch_dir(const std::string& name) {
    auto p = fs::temp_directory_path() / ("a11y-acceptance-" + std::to_string(::getpid()) + "-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

SynthSpec variation_spec() {
    SynthSpec s;
    s.seed = kSeed;
    s.weights.scrolled = 1.0;
    s.weights.keyboard = 1.0;
    s.weights.dialog_overlay = 1.0;
    return s;
}

SynthSpec all_variations_spec() {
    SynthSpec s;
    s.seed = kSeed;
    s.weights = {0.5, 1.0, 0.5, 0.5, 0.5, 0.3};
    return s;
}

Outcome criterion1() {
    SynthSpec spec;
    spec.seed = kSeed;
    const auto t0 = std::chrono::steady_clock::now();
    Confusion c;
    for (int a = 0; a < spec.app_count; ++a) {
        const auto app = generate_app(spec, a);
        const auto sb = build_storyboard(app.bundle, SimilarityScorer(SimilarityMode::pixel));
        c += pairwise_confusion(grouping_of(sb), app.gold.grouping);
    }
    const double secs = seconds_since(t0);
    const auto m = metrics_from(c);
    const bool pass = m.precision == 1.0 && m.recall == 1.0 && m.f1 == 1.0 && secs < 60.0;
    return {pass, fmt("pixel grouping P=%.4f R=%.4f F1=%.4f in %.1f s", m.precision, m.recall, m.f1, secs)};
}

Outcome criterion2() {
    const auto spec = variation_spec();
    Confusion c;
    for (int a = 0; a < spec.app_count; ++a) {
        const auto app = generate_app(spec, a);
        const auto sb = build_storyboard(app.bundle, SimilarityScorer(SimilarityMode::structural));
        c += pairwise_confusion(grouping_of(sb), app.gold.grouping);
    }
    const auto m = metrics_from(c);
    return {m.f1 >= 0.90, fmt("structural grouping P=%.4f R=%.4f F1=%.4f (need >= 0.90)", m.precision, m.recall, m.f1)};
}

struct MatchingResult {
    std::size_t n = 0;
    Metrics full, template_only;
    double full_mean = 0, template_mean = 0;
};

const MatchingResult& matching_result() {
    static const MatchingResult r = [] {
        auto spec = all_variations_spec();
        spec.app_count = 2;
        MatchingResult out;
        Confusion full, tmpl;
        double full_t = 0, tmpl_t = 0;
        for (int a = 0; a < spec.app_count; ++a) {
            const auto app = generate_app(spec, a);
            MatchConfig fc;
            MatchConfig tc;
            tc.strategy = MatchStrategy::template_only;
            const auto fr = run_correspondences(app.bundle, app.gold.correspondences, fc);
            const auto tr = run_correspondences(app.bundle, app.gold.correspondences, tc);
            full += matching_confusion(fr.judgments);
            tmpl += matching_confusion(tr.judgments);
            full_t += fr.total_seconds;
            tmpl_t += tr.total_seconds;
            out.n += fr.judgments.size();
        }
        out.full = metrics_from(full);
        out.template_only = metrics_from(tmpl);
        out.full_mean = full_t / static_cast<double>(out.n);
        out.template_mean = tmpl_t / static_cast<double>(out.n);
        return out;
    }();
    return r;
}

Outcome criterion3() {
    const auto& r = matching_result();
    const bool pass = r.n >= 1000 && r.full.f1 >= 0.95 && r.full.f1 > r.template_only.f1;
    return {pass, std::to_string(r.n) + " correspondences, " +
                      fmt("full F1=%.4f, template-only F1=%.4f", r.full.f1, r.template_only.f1)};
}

Outcome criterion4() {
    const auto& r = matching_result();
    const bool pass = r.n > 0 && r.full_mean <= 0.5 * r.template_mean;
    return {pass, fmt("mean per template: full %.3f ms, template-only %.3f ms (ratio %.1fx, need >= 2x)",
                      1000 * r.full_mean, 1000 * r.template_mean, r.template_mean / r.full_mean)};
}

struct CorpusRun {
    int apps = 0;
    int conservation_failures = 0;
    int instances = 0;
    int instance_failures = 0;
    std::string first_failure;
    std::set<std::string> planted_fp, hidden;
};

std::vector<const UniqueIssue*> all_issues(const Report& r) {
    std::vector<const UniqueIssue*> v;
    for (const auto* sec : {&r.unique_issues, &r.ignored_section, &r.hidden_section})
        for (const auto& u : *sec) v.push_back(&u);
    return v;
}

const CorpusRun& corpus_run() {
    static const CorpusRun r = [] {
        auto spec = all_variations_spec();
        spec.planted_false_positive_rate = 0.3;
        PipelineConfig config;
        config.similarity = SimilarityMode::embedding;
        MemoryIgnoreStore store;
        CorpusRun out;
        for (int a = 0; a < spec.app_count; ++a) {
            const auto app = generate_app(spec, a);
            const auto report = generate_report(app.bundle, store, config);
            ++out.apps;

            std::map<std::string, int> seen;
            for (const auto* u : all_issues(report))
                for (const auto& o : u->occurrences) ++seen[o.issue_id];
            std::size_t input = 0;
            bool ok = true;
            for (const auto& cap : app.bundle.captures)
                for (const auto& is : cap.issues) {
                    ++input;
                    if (seen[is.issue_id] != 1) ok = false;
                }
            if (seen.size() != input) ok = false;
            if (!ok) ++out.conservation_failures;

            std::map<std::string, std::set<std::string>> instances;
            for (const auto& p : app.gold.planted) {
                instances[p.instance].insert(p.issue_id);
                if (p.false_positive) out.planted_fp.insert(app.gold.app_id + "/" + p.issue_id);
            }
            for (const auto& u : report.hidden_section)
                for (const auto& o : u.occurrences) out.hidden.insert(app.gold.app_id + "/" + o.issue_id);

            for (const auto& [key, ids] : instances) {
                ++out.instances;
                std::vector<const UniqueIssue*> hits;
                for (const auto* u : all_issues(report))
                    for (const auto& o : u->occurrences)
                        if (ids.count(o.issue_id)) {
                            hits.push_back(u);
                            break;
                        }
                bool good = hits.size() == 1;
                if (good) {
                    std::set<std::string> got;
                    for (const auto& o : hits[0]->occurrences) got.insert(o.issue_id);
                    good = got == ids;
                }
                if (!good) {
                    ++out.instance_failures;
                    if (out.first_failure.empty())
                        out.first_failure = app.gold.app_id + " " + key + " (k=" + std::to_string(ids.size()) +
                                            ", unique issues=" + std::to_string(hits.size()) + ")";
                }
            }
        }
        return out;
    }();
    return r;
}

Outcome criterion5() {
    const auto& r = corpus_run();
    const bool pass = r.instance_failures == 0 && r.conservation_failures == 0 && r.instances > 0;
    std::string d = std::to_string(r.instances) + " planted instances, " + std::to_string(r.instance_failures) +
                    " not collapsed to exactly one unique issue; conservation held on " +
                    std::to_string(r.apps - r.conservation_failures) + "/" + std::to_string(r.apps) + " runs";
    if (!r.first_failure.empty()) d += "; first failure " + r.first_failure;
    return {pass, d};
}

Outcome criterion6() {
    const auto& r = corpus_run();
    std::size_t tp = 0;
    for (const auto& id : r.hidden) tp += r.planted_fp.count(id);
    const double p = r.hidden.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(r.hidden.size());
    const double rec = r.planted_fp.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(r.planted_fp.size());
    const bool pass = !r.planted_fp.empty() && r.hidden == r.planted_fp;
    return {pass, std::to_string(r.planted_fp.size()) + " planted false positives, " +
                      std::to_string(r.hidden.size()) + " hidden; " + fmt("precision=%.4f recall=%.4f", p, rec)};
}

Outcome criterion7() {
    SynthSpec spec;
    spec.seed = kSeed;
    const SynthAppModel model(spec, 0);
    std::mt19937_64 rng(kSeed);

    // Pick a scrollable screen and a planted issue that stays on screen after scrolling.
    int screen = -1, dy = 0;
    RenderedCapture before, after;
    std::string instance;
    for (int s = 0; s < model.screen_count() && screen < 0; ++s) {
        const int limit = std::min(120, model.content_scroll_limit(s));
        if (limit < 40) continue;
        auto b = model.render(s, {}, "c900", 900, rng);
        ScreenVariant v;
        v.variation = Variation::scrolled;
        v.scroll_dy = limit;
        auto a = model.render(s, v, "c901", 901, rng);
        std::set<std::string> later;
        for (const auto& p : a.planted)
            if (!p.false_positive) later.insert(p.instance);
        for (const auto& p : b.planted)
            if (!p.false_positive && later.count(p.instance)) {
                screen = s;
                dy = limit;
                instance = p.instance;
                before = std::move(b);
                after = std::move(a);
                break;
            }
    }
    if (screen < 0) return {false, "no scrollable screen with a persistent planted issue"};

    auto bundle_with = [&](const std::string& run_id, const RenderedCapture& target) {
        CaptureBundle b;
        b.app_id = model.app_id();
        b.run_id = run_id;
        int ordinal = 0;
        for (int s = 0; s < model.screen_count(); ++s) {
            if (s == screen) {
                auto c = target.capture;
                c.ordinal = ordinal++;
                b.captures.push_back(std::move(c));
                continue;
            }
            char id[16];
            std::snprintf(id, sizeof id, "c%03d", s);
            auto r = model.render(s, {}, id, ordinal++, rng);
            b.captures.push_back(std::move(r.capture));
        }
        return b;
    };
    auto issue_of = [&](const RenderedCapture& rc) {
        for (const auto& p : rc.planted)
            if (p.instance == instance) return p.issue_id;
        return std::string();
    };
    auto find = [](const std::vector<UniqueIssue>& sec, const std::string& issue_id) -> const UniqueIssue* {
        for (const auto& u : sec)
            for (const auto& o : u.occurrences)
                if (o.issue_id == issue_id) return &u;
        return nullptr;
    };

    PipelineConfig config;
    config.similarity = SimilarityMode::embedding;
    const auto dir = scratch_dir("ignore");
    FileIgnoreStore store(dir / "ignores.jsonl");

    const auto run_n = bundle_with("run-n", before);
    const auto report_n = generate_report(run_n, store, config);
    const auto* target = find(report_n.unique_issues, issue_of(before));
    if (!target || !target->anchor.detection_id) return {false, "run N issue not active or not anchored"};
    const auto& anchor_cap = run_n.capture(target->anchor.capture_id);
    const auto ignore_id = store.add_ignore(make_issue_ignore(model.app_id(), anchor_cap, *target->anchor.detection_id,
                                                              target->category, target->check_name));

    const auto run_next = bundle_with("run-n1", after);
    const auto issue_next = issue_of(after);
    const auto ignored = generate_report(run_next, store, config);
    const auto* moved = find(ignored.ignored_section, issue_next);
    const bool ignored_ok = moved && moved->ignored_by == ignore_id && ignored.ignored_section.size() == 1 &&
                            !find(ignored.unique_issues, issue_next);

    store.remove_ignore(ignore_id);
    const auto restored = generate_report(run_next, store, config);
    const bool restored_ok = find(restored.unique_issues, issue_next) && restored.ignored_section.empty();
    fs::remove_all(dir);

    std::string d = "screen " + std::to_string(screen) + " scrolled by " + std::to_string(dy) + " px: ";
    d += ignored_ok ? "ignored on run N+1" : "NOT ignored on run N+1";
    d += restored_ok ? ", restored after removal" : ", NOT restored after removal";
    return {ignored_ok && restored_ok, d};
}

Outcome criterion8() {
    std::vector<std::string> failed;
    auto check = [&](bool ok, const std::string& name) {
        if (!ok) failed.push_back(name);
    };

    // Two correct, one prediction where gold has none (FP), one miss (FN).
    const auto mc = matching_confusion(std::vector<CorrespondenceJudgment>{{"t1", "a", "a"}, {"t2", "b", "b"},
                                                                          {"t3", "x", std::nullopt},
                                                                          {"t4", std::nullopt, "d"}});
    const auto m2 = metrics_from(mc);
    check(mc == Confusion{2, 1, 1, 0}, "matching example counts");
    const auto wrong = matching_confusion(std::vector<CorrespondenceJudgment>{{"t1", "x", "c"}});
    check(wrong == Confusion{0, 1, 0, 0}, "wrong target counts as FP");
    check(matching_metrics(std::vector<CorrespondenceJudgment>{}).f1 == 0, "empty matching input");
    check(m2.precision == 2.0 / 3.0 && m2.recall == 2.0 / 3.0 && std::abs(m2.f1 - 2.0 / 3.0) < 1e-12,
          "matching example ratios");

    const Grouping gold = {{"A", "B"}, {"C"}};
    const auto g1 = pairwise_grouping_metrics(Grouping{{"A"}, {"B"}, {"C"}}, gold);
    check(g1.counts == Confusion{0, 0, 1, 2}, "singletons vs {AB}{C}");
    check(g1.precision == 0 && g1.recall == 0 && g1.f1 == 0 && std::abs(g1.accuracy - 2.0 / 3.0) < 1e-12,
          "singletons ratios");

    const auto g2 = pairwise_grouping_metrics(Grouping{{"A", "B", "C"}}, Grouping{{"A"}, {"B"}, {"C"}});
    check(g2.counts == Confusion{0, 3, 0, 0} && g2.precision == 0 && g2.accuracy == 0, "all-in-one vs singletons");

    const auto g3 = pairwise_grouping_metrics(Grouping{}, Grouping{});
    check(g3.precision == 0 && g3.recall == 0 && g3.f1 == 0 && g3.accuracy == 0, "empty grouping");

    const auto g4 = pairwise_grouping_metrics(Grouping{{"A", "B"}, {"C", "D"}}, Grouping{{"A", "B", "C"}, {"D"}});
    check(g4.counts == Confusion{1, 1, 2, 2}, "mixed grouping counts");

    // F1 is the harmonic mean of P and R on a spread of confusions.
    for (std::int64_t tp = 0; tp < 6; ++tp)
        for (std::int64_t fp = 0; fp < 6; ++fp)
            for (std::int64_t fn = 0; fn < 6; ++fn) {
                const auto m = metrics_from(Confusion{tp, fp, fn, 3});
                const double h = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0;
                if (std::abs(m.f1 - h) > 1e-9) {
                    failed.push_back("harmonic mean");
                    tp = fp = fn = 6;
                }
            }

    std::string d = failed.empty() ? "all hand-computed examples reproduced" : "failed:";
    for (const auto& f : failed) d += " " + f;
    return {failed.empty(), d};
}

std::string strip_timestamp(const fs::path& report) {
    std::ifstream in(report);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string s = ss.str();
    const std::string key = "\"generated_at\": \"";
    const auto pos = s.find(key);
    if (pos != std::string::npos) {
        const auto end = s.find('"', pos + key.size());
        s.erase(pos + key.size(), end - pos - key.size());
    }
    return s;
}

Outcome criterion9() {
    auto spec = all_variations_spec();
    spec.planted_false_positive_rate = 0.3;
    const auto app = generate_app(spec, 3);
    const auto dir = scratch_dir("determinism");
    write_bundle(app.bundle, dir / "bundle");
    std::ostringstream out, err;
    bool ok = true;
    std::string d;
    for (auto mode : {SimilarityMode::embedding, SimilarityMode::structural}) {
        GenerateOptions o;
        o.bundle_dir = dir / "bundle";
        o.config.similarity = mode;
        o.out_dir = dir / "one";
        const int a = cmd_generate(o, out, err);
        o.out_dir = dir / "two";
        const int b = cmd_generate(o, out, err);
        const auto r1 = strip_timestamp(dir / "one" / "report.json");
        const auto r2 = strip_timestamp(dir / "two" / "report.json");
        const bool same = a == 0 && b == 0 && !r1.empty() && r1 == r2;
        ok = ok && same;
        d += std::string(to_string(mode)) + (same ? ": identical (" + std::to_string(r1.size()) + " bytes) " : ": DIFFER ");
        fs::remove_all(dir / "one");
        fs::remove_all(dir / "two");
    }
    fs::remove_all(dir);
    if (!err.str().empty()) d += "stderr: " + err.str();
    return {ok, d};
}

}  // namespace

int main() {
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
        {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9},
    };
    int failures = 0;
    for (const auto& [n, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("criterion %d: %s  %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
