#include "a11y/commands.hpp"

#include <cstdio>
#include <fstream>
#include <map>

#include "a11y/eval_metrics.hpp"
#include "a11y/json_codec.hpp"

namespace a11y {

namespace {

json read_json(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error(p.string() + ": " + e.what());
    }
}

std::vector<json> apps_of(const json& doc) {
    if (doc.contains("apps")) return doc["apps"].get<std::vector<json>>();
    return {doc};
}

std::string key_of(const std::string& tc, const std::string& td, const std::string& target) {
    return tc + "/" + td + "->" + target;
}

void print_counts(const Report& r, std::ostream& out) {
    out << r.app_id << " " << r.run_id << ": " << r.storyboard.groups.size() << " screen groups, "
        << r.app_counts.total << " active issues, " << r.ignored_section.size() << " ignored, "
        << r.hidden_section.size() << " hidden\n";
    for (const auto& [cat, n] : r.app_counts.by_category) {
        out << "  " << to_string(cat) << ": " << n << "\n";
        for (const auto& [check, m] : r.app_counts.by_check.at(cat)) out << "    " << check << ": " << m << "\n";
    }
}

json metrics_json(const Metrics& m) {
    return json{{"precision", m.precision}, {"recall", m.recall},   {"f1", m.f1},
                {"accuracy", m.accuracy},   {"tp", m.counts.tp},    {"fp", m.counts.fp},
                {"fn", m.counts.fn},        {"tn", m.counts.tn}};
}

void print_metrics_row(std::ostream& out, const char* name, const Metrics& m) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-12s %9.4f %9.4f %9.4f %9.4f %8lld %8lld %8lld %8lld\n", name, m.precision,
                  m.recall, m.f1, m.accuracy, static_cast<long long>(m.counts.tp), static_cast<long long>(m.counts.fp),
                  static_cast<long long>(m.counts.fn), static_cast<long long>(m.counts.tn));
    out << buf;
}

}  // namespace

int cmd_generate(const GenerateOptions& options, std::ostream& out, std::ostream& err) {
    try {
        const auto bundle = load_bundle(options.bundle_dir);
        const auto scorer = options.config.scorer();
        scorer.validate(bundle);
        std::unique_ptr<IgnoreStore> store;
        if (options.ignore_file)
            store = std::make_unique<FileIgnoreStore>(*options.ignore_file);
        else
            store = std::make_unique<MemoryIgnoreStore>();
        auto report = generate_report(bundle, *store, options.config);
        report.generated_at = utc_timestamp();
        write_report_dir(report, bundle, options.bundle_dir, options.config, options.out_dir);
        print_counts(report, out);
        out << "report written to " << (options.out_dir / "report.json").string() << "\n";
        return 0;
    } catch (const BundleError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_eval(const std::filesystem::path& pred, const std::filesystem::path& gold, bool as_json, std::ostream& out,
             std::ostream& err) {
    try {
        const auto pred_apps = apps_of(read_json(pred));
        const auto gold_apps = apps_of(read_json(gold));
        std::map<std::string, const json*> pred_by_app;
        for (const auto& a : pred_apps) pred_by_app[a.at("app_id").get<std::string>()] = &a;

        Confusion grouping, matching;
        bool any_grouping = false, any_matching = false;
        for (const auto& gj : gold_apps) {
            const auto g = gold_from_json(gj);
            auto it = pred_by_app.find(g.app_id);
            if (it == pred_by_app.end()) throw EvalError("no predictions for app '" + g.app_id + "'");
            const json& p = *it->second;
            if (p.contains("grouping")) {
                grouping += pairwise_confusion(p["grouping"].get<Grouping>(), g.grouping);
                any_grouping = true;
            }
            if (p.contains("correspondences")) {
                std::map<std::string, std::optional<std::string>> predicted;
                for (const auto& c : p["correspondences"]) {
                    std::optional<std::string> d;
                    if (!c.at("predicted_detection_id").is_null()) d = c["predicted_detection_id"].get<std::string>();
                    predicted[key_of(c.at("template_capture_id").get<std::string>(),
                                     c.at("template_detection_id").get<std::string>(),
                                     c.at("target_capture_id").get<std::string>())] = d;
                }
                std::vector<CorrespondenceJudgment> judgments;
                for (const auto& gc : g.correspondences) {
                    const auto k = key_of(gc.template_capture_id, gc.template_detection_id, gc.target_capture_id);
                    auto pit = predicted.find(k);
                    if (pit == predicted.end()) throw EvalError("no prediction for correspondence " + k);
                    judgments.push_back(CorrespondenceJudgment{k, pit->second, gc.target_detection_id});
                }
                matching += matching_confusion(judgments);
                any_matching = true;
            }
        }

        if (as_json) {
            json doc = json::object();
            if (any_grouping) doc["grouping"] = metrics_json(metrics_from(grouping));
            if (any_matching) doc["matching"] = metrics_json(metrics_from(matching));
            out << doc.dump(2) << "\n";
        } else {
            out << "metric       precision    recall        f1  accuracy       tp       fp       fn       tn\n";
            if (any_grouping) print_metrics_row(out, "grouping", metrics_from(grouping));
            if (any_matching) print_metrics_row(out, "matching", metrics_from(matching));
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_synth(const SynthSpec& spec, const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err) {
    try {
        write_corpus(spec, out_dir);
        out << "wrote " << spec.app_count << " apps x " << spec.screens_per_app << " captures to "
            << out_dir.string() << "\n";
        return 0;
    } catch (const SynthError& e) {
        err << "invalid synth spec: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_predict(const std::filesystem::path& corpus_dir, const PipelineConfig& config,
                const std::filesystem::path& out_file, std::ostream& out, std::ostream& err) {
    try {
        const auto gold_doc = read_json(corpus_dir / "gold.json");
        json apps = json::array();
        for (const auto& gj : apps_of(gold_doc)) {
            const auto gold = gold_from_json(gj);
            const auto bundle = load_bundle(corpus_dir / gold.app_id);
            const auto storyboard = build_storyboard(bundle, config.scorer());
            const auto run = run_correspondences(bundle, gold.correspondences, config.dedupe.match);
            json corr = json::array();
            for (std::size_t i = 0; i < gold.correspondences.size(); ++i) {
                const auto& gc = gold.correspondences[i];
                const auto& p = run.judgments[i].predicted;
                corr.push_back(json{{"template_capture_id", gc.template_capture_id},
                                    {"template_detection_id", gc.template_detection_id},
                                    {"target_capture_id", gc.target_capture_id},
                                    {"predicted_detection_id", p ? json(*p) : json(nullptr)}});
            }
            apps.push_back(json{{"app_id", gold.app_id},
                                {"grouping", grouping_of(storyboard)},
                                {"correspondences", std::move(corr)},
                                {"mean_match_seconds", run.mean_seconds()}});
            out << gold.app_id << ": " << storyboard.groups.size() << " groups, " << gold.correspondences.size()
                << " correspondences\n";
        }
        std::ofstream f(out_file);
        f << json{{"apps", std::move(apps)}}.dump(1) << "\n";
        if (!f) throw std::runtime_error("cannot write " + out_file.string());
        return 0;
    } catch (const BundleError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace a11y
