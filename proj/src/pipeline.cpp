#include "a11y/pipeline.hpp"

#include <fstream>
#include <future>
#include <sstream>

#include "a11y/json_codec.hpp"
#include "a11y/png_io.hpp"

namespace a11y {

namespace {

json config_to_json(const PipelineConfig& c) {
    const auto& m = c.dedupe.match;
    json j{{"similarity", to_string(c.similarity)},
           {"text_threshold", m.text_threshold},
           {"icon_threshold", m.icon_threshold},
           {"picture_threshold", m.picture_threshold},
           {"position_threshold", m.position_threshold},
           {"search_padding", m.search_padding},
           {"group_margin", m.group_margin},
           {"max_template_area", m.max_template_area},
           {"strategy", to_string(m.strategy)},
           {"association_iou", c.dedupe.association_iou},
           {"raw_dedupe_iou", c.dedupe.raw_dedupe_iou}};
    if (c.threshold) j["threshold"] = *c.threshold;
    return j;
}

PipelineConfig config_from_json(const json& j) {
    PipelineConfig c;
    auto mode = parse_similarity_mode(j.at("similarity").get<std::string>());
    if (!mode) throw ReportFormatError("unknown similarity mode in run.json");
    c.similarity = *mode;
    if (j.contains("threshold")) c.threshold = j["threshold"].get<double>();
    auto& m = c.dedupe.match;
    m.text_threshold = j.value("text_threshold", m.text_threshold);
    m.icon_threshold = j.value("icon_threshold", m.icon_threshold);
    m.picture_threshold = j.value("picture_threshold", m.picture_threshold);
    m.position_threshold = j.value("position_threshold", m.position_threshold);
    m.search_padding = j.value("search_padding", m.search_padding);
    m.group_margin = j.value("group_margin", m.group_margin);
    m.max_template_area = j.value("max_template_area", m.max_template_area);
    if (j.contains("strategy")) {
        auto s = parse_match_strategy(j["strategy"].get<std::string>());
        if (!s) throw ReportFormatError("unknown match strategy in run.json");
        m.strategy = *s;
    }
    c.dedupe.association_iou = j.value("association_iou", c.dedupe.association_iou);
    c.dedupe.raw_dedupe_iou = j.value("raw_dedupe_iou", c.dedupe.raw_dedupe_iou);
    return c;
}

json read_json_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw ReportFormatError("cannot read " + p.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ReportFormatError(p.string() + ": " + e.what());
    }
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + p.string());
}

}  // namespace

Report assemble_report(const CaptureBundle& bundle, const Storyboard& storyboard,
                       std::span<const IgnoreRecord> ignores, const PipelineConfig& config) {
    Report report;
    report.app_id = bundle.app_id;
    report.run_id = bundle.run_id;
    report.storyboard = storyboard;
    for (const auto& c : bundle.captures)
        report.captures.push_back(CaptureRef{c.capture_id, c.ordinal, c.screenshot.width(), c.screenshot.height()});

    std::vector<std::future<std::vector<UniqueIssue>>> jobs;
    for (const auto& g : storyboard.groups)
        jobs.push_back(std::async(std::launch::async, [&bundle, &g, &config] {
            return dedupe_group_issues(g, bundle, config.dedupe);
        }));
    for (auto& j : jobs)
        for (auto& u : j.get()) report.unique_issues.push_back(std::move(u));

    report = apply_ignores(std::move(report), ignores, config.scorer(), bundle, config.dedupe.match);

    auto split = filter_false_positives(std::move(report.unique_issues), bundle);
    report.unique_issues = std::move(split.kept);
    report.hidden_section = std::move(split.hidden);
    return summarize(std::move(report));
}

Report assemble_report(const CaptureBundle& bundle, const Storyboard& storyboard, const IgnoreStore& store,
                       const PipelineConfig& config) {
    const auto records = store.list_ignores(bundle.app_id);
    return assemble_report(bundle, storyboard, records, config);
}

Report generate_report(const CaptureBundle& bundle, const IgnoreStore& store, const PipelineConfig& config) {
    const auto storyboard = build_storyboard(bundle, config.scorer());
    return assemble_report(bundle, storyboard, store, config);
}

void write_report_dir(const Report& report, const CaptureBundle& bundle, const std::filesystem::path& bundle_dir,
                      const PipelineConfig& config, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "screens");
    for (const auto& c : bundle.captures) write_png(c.screenshot, dir / screenshot_relpath(c.capture_id));
    write_text(dir / "report.json", report_to_json(report).dump(2) + "\n");
    json run{{"bundle_dir", std::filesystem::absolute(bundle_dir).lexically_normal().string()},
             {"config", config_to_json(config)}};
    write_text(dir / "run.json", run.dump(2) + "\n");
}

ReportDir read_report_dir(const std::filesystem::path& dir) {
    ReportDir out;
    out.report = report_from_json(read_json_file(dir / "report.json"));
    const auto run = read_json_file(dir / "run.json");
    try {
        out.bundle_dir = run.at("bundle_dir").get<std::string>();
        out.config = config_from_json(run.at("config"));
    } catch (const json::exception& e) {
        throw ReportFormatError("run.json: " + std::string(e.what()));
    }
    return out;
}

}  // namespace a11y
