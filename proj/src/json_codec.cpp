#include "a11y/json_codec.hpp"

#include "a11y/png_io.hpp"

namespace a11y {

namespace {

template <typename E, typename Parse>
E parse_or_throw(const json& j, Parse parse, const char* what) {
    const auto s = j.get<std::string>();
    auto v = parse(s);
    if (!v) throw ReportFormatError(std::string("unknown ") + what + " '" + s + "'");
    return *v;
}

}  // namespace

void to_json(json& j, const Rect& r) { j = json{{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}}; }

void from_json(const json& j, Rect& r) {
    r = Rect{j.at("x").get<int>(), j.at("y").get<int>(), j.at("w").get<int>(), j.at("h").get<int>()};
}

void to_json(json& j, const ElementDetection& d) {
    j = json{{"detection_id", d.detection_id},
             {"kind", to_string(d.kind)},
             {"bbox", d.bbox},
             {"confidence", d.confidence},
             {"text", d.text.empty() ? json(nullptr) : json(d.text)}};
}

void from_json(const json& j, ElementDetection& d) {
    d.detection_id = j.at("detection_id").get<std::string>();
    d.kind = parse_or_throw<ElementKind>(j.at("kind"), parse_kind, "element kind");
    d.bbox = j.at("bbox").get<Rect>();
    d.confidence = j.value("confidence", 1.0);
    d.text = j.contains("text") && !j["text"].is_null() ? j["text"].get<std::string>() : std::string{};
}

void to_json(json& j, const ElementGroupRecord& g) {
    j = json{{"kind", to_string(g.kind)},
             {"member_ids", g.member_ids},
             {"anchor_text_id", g.anchor_text_id ? json(*g.anchor_text_id) : json(nullptr)},
             {"label", g.label},
             {"icon_only", g.icon_only}};
}

void from_json(const json& j, ElementGroupRecord& g) {
    g.kind = parse_or_throw<ElementKind>(j.at("kind"), parse_kind, "element kind");
    g.member_ids = j.at("member_ids").get<std::vector<std::string>>();
    if (g.member_ids.empty()) throw ReportFormatError("element group without members");
    g.anchor_text_id.reset();
    if (j.contains("anchor_text_id") && !j["anchor_text_id"].is_null())
        g.anchor_text_id = j["anchor_text_id"].get<std::string>();
    g.label = j.value("label", std::string{});
    g.icon_only = j.value("icon_only", false);
}

void to_json(json& j, const Storyboard& s) {
    json groups = json::array();
    for (const auto& g : s.groups) {
        json gj{{"group_id", g.group_id}, {"member_ids", g.member_ids}, {"representative_id", g.representative_id}};
        if (g.mean_embedding) gj["mean_embedding"] = *g.mean_embedding;
        groups.push_back(std::move(gj));
    }
    json edges = json::array();
    for (const auto& [from, to] : s.edges) edges.push_back(json::array({from, to}));
    j = json{{"groups", std::move(groups)}, {"edges", std::move(edges)}};
}

void from_json(const json& j, Storyboard& s) {
    s = Storyboard{};
    for (const auto& gj : j.at("groups")) {
        ScreenGroup g;
        g.group_id = gj.at("group_id").get<int>();
        g.member_ids = gj.at("member_ids").get<std::vector<std::string>>();
        g.representative_id = gj.at("representative_id").get<std::string>();
        if (gj.contains("mean_embedding")) g.mean_embedding = gj["mean_embedding"].get<std::vector<double>>();
        s.groups.push_back(std::move(g));
    }
    for (const auto& e : j.at("edges")) s.edges.emplace(e.at(0).get<int>(), e.at(1).get<int>());
}

void to_json(json& j, const UniqueIssue& u) {
    json occ = json::array();
    for (const auto& o : u.occurrences)
        occ.push_back(json{{"capture_id", o.capture_id}, {"issue_id", o.issue_id}, {"bbox", o.bbox}});
    j = json{{"unique_id", u.unique_id},
             {"category", to_string(u.category)},
             {"check_name", u.check_name},
             {"message", u.message},
             {"status", to_string(u.status)},
             {"group_id", u.anchor.group_id},
             {"anchor",
              json{{"capture_id", u.anchor.capture_id},
                   {"detection_id", u.anchor.detection_id ? json(*u.anchor.detection_id) : json(nullptr)},
                   {"bbox", u.anchor.bbox}}},
             {"occurrences", std::move(occ)}};
    if (u.ignored_by) j["ignored_by"] = *u.ignored_by;
}

void from_json(const json& j, UniqueIssue& u) {
    u = UniqueIssue{};
    u.unique_id = j.at("unique_id").get<std::string>();
    u.category = parse_or_throw<IssueCategory>(j.at("category"), parse_category, "category");
    u.check_name = j.at("check_name").get<std::string>();
    u.message = j.value("message", std::string{});
    u.status = parse_or_throw<IssueStatus>(j.at("status"), parse_issue_status, "status");
    u.anchor.group_id = j.at("group_id").get<int>();
    const auto& a = j.at("anchor");
    u.anchor.capture_id = a.at("capture_id").get<std::string>();
    if (!a.at("detection_id").is_null()) u.anchor.detection_id = a["detection_id"].get<std::string>();
    u.anchor.bbox = a.at("bbox").get<Rect>();
    for (const auto& o : j.at("occurrences"))
        u.occurrences.push_back(Occurrence{o.at("capture_id").get<std::string>(), o.at("issue_id").get<std::string>(),
                                           o.at("bbox").get<Rect>()});
    if (u.occurrences.empty()) throw ReportFormatError("unique issue '" + u.unique_id + "' has no occurrences");
    if (j.contains("ignored_by")) u.ignored_by = j["ignored_by"].get<std::string>();
}

void to_json(json& j, const IssueCounts& c) {
    json cats = json::object(), checks = json::object();
    for (const auto cat : kAllCategories) {
        const auto name = std::string(to_string(cat));
        auto it = c.by_category.find(cat);
        cats[name] = it == c.by_category.end() ? 0 : it->second;
        json per = json::object();
        if (auto ct = c.by_check.find(cat); ct != c.by_check.end())
            for (const auto& [check, n] : ct->second) per[check] = n;
        checks[name] = std::move(per);
    }
    j = json{{"total", c.total}, {"categories", std::move(cats)}, {"checks", std::move(checks)}};
}

void from_json(const json& j, IssueCounts& c) {
    c = IssueCounts{};
    c.total = j.at("total").get<int>();
    for (const auto& [name, n] : j.at("categories").items()) {
        const auto cat = parse_or_throw<IssueCategory>(json(name), parse_category, "category");
        if (n.get<int>() != 0) c.by_category[cat] = n.get<int>();
    }
    for (const auto& [name, per] : j.at("checks").items()) {
        const auto cat = parse_or_throw<IssueCategory>(json(name), parse_category, "category");
        for (const auto& [check, n] : per.items()) c.by_check[cat][check] = n.get<int>();
    }
}

json template_to_json(const TemplateRecord& t) {
    return json{{"source_capture_id", t.source_capture_id},
                {"template_element", t.template_element},
                {"all_detections", t.all_detections},
                {"groups", t.groups},
                {"crop_png_base64", base64_encode(encode_png(t.crop))},
                {"source_width", t.source_width}};
}

TemplateRecord template_from_json(const json& j) {
    TemplateRecord t;
    t.source_capture_id = j.at("source_capture_id").get<std::string>();
    t.template_element = j.at("template_element").get<ElementDetection>();
    t.all_detections = j.at("all_detections").get<std::vector<ElementDetection>>();
    t.groups = j.at("groups").get<std::vector<ElementGroupRecord>>();
    t.crop = decode_png(base64_decode(j.at("crop_png_base64").get<std::string>()));
    t.source_width = j.at("source_width").get<int>();
    return t;
}

std::string screenshot_relpath(const std::string& capture_id) { return "screens/" + capture_id + ".png"; }

json report_to_json(const Report& report) {
    json captures = json::object();
    for (const auto& c : report.captures)
        captures[c.capture_id] = json{{"ordinal", c.ordinal},
                                      {"width", c.width},
                                      {"height", c.height},
                                      {"screenshot", screenshot_relpath(c.capture_id)}};

    json groups = json::array();
    for (const auto& g : report.storyboard.groups) {
        json issues = json::object();
        for (const auto& u : report.unique_issues) {
            if (u.anchor.group_id != g.group_id) continue;
            issues[std::string(to_string(u.category))][u.check_name].push_back(u);
        }
        auto counts = report.group_counts.find(g.group_id);
        groups.push_back(json{{"group_id", g.group_id},
                              {"representative_id", g.representative_id},
                              {"summary", counts == report.group_counts.end() ? json(IssueCounts{}) : json(counts->second)},
                              {"issues", std::move(issues)}});
    }

    json fixes = json::object();
    auto add_fix = [&](const UniqueIssue& u) { fixes[u.check_name] = fix_info(u.category, u.check_name); };
    for (const auto& u : report.unique_issues) add_fix(u);
    for (const auto& u : report.ignored_section) add_fix(u);
    for (const auto& u : report.hidden_section) add_fix(u);

    return json{{"schema_version", kReportSchemaVersion},
                {"app_id", report.app_id},
                {"run_id", report.run_id},
                {"generated_at", report.generated_at},
                {"storyboard", report.storyboard},
                {"captures", std::move(captures)},
                {"summary", report.app_counts},
                {"groups", std::move(groups)},
                {"ignored_section", report.ignored_section},
                {"hidden_section", report.hidden_section},
                {"fix_info", std::move(fixes)}};
}

Report report_from_json(const json& j) {
    try {
        if (j.at("schema_version").get<int>() != kReportSchemaVersion)
            throw ReportFormatError("unsupported report schema version");
        Report r;
        r.app_id = j.at("app_id").get<std::string>();
        r.run_id = j.at("run_id").get<std::string>();
        r.generated_at = j.value("generated_at", std::string{});
        r.storyboard = j.at("storyboard").get<Storyboard>();
        for (const auto& [id, c] : j.at("captures").items())
            r.captures.push_back(
                CaptureRef{id, c.at("ordinal").get<int>(), c.at("width").get<int>(), c.at("height").get<int>()});
        std::sort(r.captures.begin(), r.captures.end(),
                  [](const CaptureRef& a, const CaptureRef& b) { return a.ordinal < b.ordinal; });
        r.app_counts = j.at("summary").get<IssueCounts>();
        for (const auto& g : j.at("groups")) {
            const int gid = g.at("group_id").get<int>();
            r.group_counts[gid] = g.at("summary").get<IssueCounts>();
            std::vector<UniqueIssue> issues;
            for (const auto& [cat, per] : g.at("issues").items())
                for (const auto& [check, list] : per.items())
                    for (const auto& u : list) issues.push_back(u.get<UniqueIssue>());
            std::sort(issues.begin(), issues.end(),
                      [](const UniqueIssue& a, const UniqueIssue& b) { return a.unique_id < b.unique_id; });
            for (auto& u : issues) r.unique_issues.push_back(std::move(u));
        }
        r.ignored_section = j.at("ignored_section").get<std::vector<UniqueIssue>>();
        r.hidden_section = j.at("hidden_section").get<std::vector<UniqueIssue>>();
        return r;
    } catch (const json::exception& e) {
        throw ReportFormatError(std::string("malformed report: ") + e.what());
    }
}

}  // namespace a11y
