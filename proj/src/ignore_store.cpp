#include "a11y/ignore_store.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <set>

#include "a11y/json_codec.hpp"
#include "a11y/png_io.hpp"

namespace a11y {

namespace {

constexpr std::array<std::string_view, 4> kScopeNames = {"issue", "check_name", "category", "screen"};

std::string next_id(std::size_t count) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "ign-%06zu", count + 1);
    return buf;
}

json snapshot_to_json(const ScreenCapture& c, const std::string& blob_hash) {
    json j{{"capture_id", c.capture_id},
           {"ordinal", c.ordinal},
           {"screenshot_sha256", blob_hash},
           {"detections", c.detections},
           {"device_scale", c.device_scale}};
    if (c.embedding) j["embedding"] = *c.embedding;
    return j;
}

ScreenCapture snapshot_from_json(const json& j, const std::filesystem::path& blobs) {
    ScreenCapture c;
    c.capture_id = j.at("capture_id").get<std::string>();
    c.ordinal = j.value("ordinal", 0);
    c.detections = j.at("detections").get<std::vector<ElementDetection>>();
    c.device_scale = j.value("device_scale", 1.0);
    if (j.contains("embedding")) c.embedding = j["embedding"].get<std::vector<double>>();
    const auto blob = blobs / (j.at("screenshot_sha256").get<std::string>() + ".png");
    c.screenshot = read_png(blob);
    return c;
}

bool issue_matches_scope(const IgnoreRecord& r, const UniqueIssue& u) {
    if (r.scope == IgnoreScope::category) return r.category && u.category == *r.category;
    if (r.scope == IgnoreScope::check_name)
        return r.check_name && u.check_name == *r.check_name && (!r.category || u.category == *r.category);
    return false;
}

// Moves the active issues selected by `pick` into the ignored section.
template <typename Pred>
void move_ignored(Report& report, const IgnoreRecord& record, Pred pick) {
    std::vector<UniqueIssue> keep;
    for (auto& u : report.unique_issues) {
        if (pick(u)) {
            u.status = IssueStatus::ignored;
            u.ignored_by = record.ignore_id;
            report.ignored_section.push_back(std::move(u));
        } else {
            keep.push_back(std::move(u));
        }
    }
    report.unique_issues = std::move(keep);
}

// Score of the snapshot against a group, or nullopt when the scorer cannot
// compare them (for example a snapshot saved without an embedding).
std::optional<double> try_score(const SimilarityScorer& scorer, const ScreenCapture& snapshot, const ScreenGroup& g,
                                const CaptureBundle& bundle, bool against_rep) {
    try {
        if (against_rep) return scorer.score(snapshot, bundle.capture(g.representative_id));
        return scorer.score(snapshot, g, bundle);
    } catch (const ConfigError&) {
        return std::nullopt;
    } catch (const std::out_of_range&) {
        return std::nullopt;
    }
}

void apply_screen(Report& report, const IgnoreRecord& r, const SimilarityScorer& scorer, const CaptureBundle& bundle) {
    std::set<int> hit;
    for (const auto& g : report.storyboard.groups) {
        auto s = try_score(scorer, *r.snapshot, g, bundle, true);
        if (s && *s > 0.0) hit.insert(g.group_id);
    }
    move_ignored(report, r, [&](const UniqueIssue& u) { return hit.count(u.anchor.group_id) > 0; });
}

void apply_issue(Report& report, const IgnoreRecord& r, const SimilarityScorer& scorer, const CaptureBundle& bundle,
                 const MatchConfig& match) {
    const ScreenGroup* best = nullptr;
    double best_score = 0.0;
    for (const auto& g : report.storyboard.groups) {
        auto s = try_score(scorer, *r.snapshot, g, bundle, false);
        if (!s || *s <= 0.0) continue;
        if (!best || *s > best_score) {
            best = &g;
            best_score = *s;
        }
    }
    if (!best) return;

    // The representative first, then captures that anchor a same-check issue
    // of the group (elements missing from the representative are anchored there).
    std::vector<std::string> captures{best->representative_id};
    for (const auto& u : report.unique_issues)
        if (u.anchor.group_id == best->group_id && u.check_name == *r.check_name &&
            std::find(captures.begin(), captures.end(), u.anchor.capture_id) == captures.end())
            captures.push_back(u.anchor.capture_id);

    for (const auto& cid : captures) {
        const auto* cap = bundle.find_capture(cid);
        if (!cap) continue;
        const auto m = find_best_match(*r.fingerprint, *cap, match);
        if (!m.matched_id) continue;
        bool moved = false;
        move_ignored(report, r, [&](const UniqueIssue& u) {
            const bool hit = u.anchor.group_id == best->group_id && u.anchor.capture_id == cid &&
                             u.anchor.detection_id == m.matched_id && u.check_name == *r.check_name &&
                             (!r.category || u.category == *r.category);
            moved = moved || hit;
            return hit;
        });
        if (moved) return;
    }
}

}  // namespace

std::string_view to_string(IgnoreScope s) { return kScopeNames[static_cast<std::size_t>(s)]; }

std::optional<IgnoreScope> parse_ignore_scope(std::string_view s) {
    for (std::size_t i = 0; i < kScopeNames.size(); ++i)
        if (kScopeNames[i] == s) return static_cast<IgnoreScope>(i);
    return std::nullopt;
}

void validate_ignore(const IgnoreRecord& r) {
    if (r.app_id.empty()) throw IgnoreError("ignore record needs an app_id");
    switch (r.scope) {
        case IgnoreScope::issue:
            if (!r.fingerprint || !r.snapshot || !r.check_name)
                throw IgnoreError("issue ignore needs fingerprint, snapshot and check_name");
            break;
        case IgnoreScope::check_name:
            if (!r.check_name) throw IgnoreError("check_name ignore needs check_name");
            break;
        case IgnoreScope::category:
            if (!r.category) throw IgnoreError("category ignore needs category");
            break;
        case IgnoreScope::screen:
            if (!r.snapshot) throw IgnoreError("screen ignore needs a snapshot");
            break;
    }
}

std::string MemoryIgnoreStore::add_ignore(IgnoreRecord record) {
    validate_ignore(record);
    std::lock_guard lock(mu_);
    record.ignore_id = next_id(records_.size());
    record.active = true;
    if (record.created_at.empty()) record.created_at = utc_timestamp();
    records_.push_back(std::move(record));
    return records_.back().ignore_id;
}

void MemoryIgnoreStore::remove_ignore(const std::string& ignore_id) {
    std::lock_guard lock(mu_);
    for (auto& r : records_)
        if (r.ignore_id == ignore_id && r.active) {
            r.active = false;
            return;
        }
    throw UnknownIgnoreError("unknown ignore '" + ignore_id + "'");
}

std::vector<IgnoreRecord> MemoryIgnoreStore::list_ignores(const std::string& app_id) const {
    std::lock_guard lock(mu_);
    std::vector<IgnoreRecord> out;
    for (const auto& r : records_)
        if (r.app_id == app_id) out.push_back(r);
    return out;
}

FileIgnoreStore::FileIgnoreStore(std::filesystem::path file) : file_(std::move(file)) {
    blobs_ = file_;
    blobs_ += ".blobs";
}

std::vector<IgnoreRecord> FileIgnoreStore::load_all() const {
    std::vector<IgnoreRecord> out;
    std::ifstream in(file_);
    if (!in) return out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const auto j = json::parse(line);
            if (j.contains("removed")) {
                const auto id = j["removed"].get<std::string>();
                for (auto& r : out)
                    if (r.ignore_id == id) r.active = false;
                continue;
            }
            IgnoreRecord r;
            r.ignore_id = j.at("ignore_id").get<std::string>();
            r.app_id = j.at("app_id").get<std::string>();
            const auto scope = parse_ignore_scope(j.at("scope").get<std::string>());
            if (!scope) throw IgnoreError("unknown scope");
            r.scope = *scope;
            if (j.contains("check_name")) r.check_name = j["check_name"].get<std::string>();
            if (j.contains("category")) {
                auto c = parse_category(j["category"].get<std::string>());
                if (!c) throw IgnoreError("unknown category");
                r.category = *c;
            }
            if (j.contains("fingerprint")) r.fingerprint = template_from_json(j["fingerprint"]);
            if (j.contains("snapshot")) r.snapshot = snapshot_from_json(j["snapshot"], blobs_);
            r.created_at = j.value("created_at", std::string{});
            r.active = true;
            out.push_back(std::move(r));
        } catch (const IgnoreError& e) {
            throw IgnoreError(file_.string() + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const std::exception& e) {
            throw IgnoreError(file_.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

void FileIgnoreStore::append_line(const std::string& line) const {
    if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
    std::ofstream out(file_, std::ios::app);
    out << line << '\n';
    out.flush();
    if (!out) throw IgnoreError("cannot write " + file_.string());
}

std::string FileIgnoreStore::add_ignore(IgnoreRecord record) {
    validate_ignore(record);
    std::lock_guard lock(mu_);
    record.ignore_id = next_id(load_all().size());
    if (record.created_at.empty()) record.created_at = utc_timestamp();

    json j{{"ignore_id", record.ignore_id},
           {"app_id", record.app_id},
           {"scope", to_string(record.scope)},
           {"created_at", record.created_at}};
    if (record.check_name) j["check_name"] = *record.check_name;
    if (record.category) j["category"] = to_string(*record.category);
    if (record.fingerprint) j["fingerprint"] = template_to_json(*record.fingerprint);
    if (record.snapshot) {
        const auto png = encode_png(record.snapshot->screenshot);
        const auto hash = sha256_hex(png);
        std::filesystem::create_directories(blobs_);
        const auto blob = blobs_ / (hash + ".png");
        if (!std::filesystem::exists(blob)) {
            std::ofstream out(blob, std::ios::binary);
            out.write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
            if (!out) throw IgnoreError("cannot write " + blob.string());
        }
        j["snapshot"] = snapshot_to_json(*record.snapshot, hash);
    }
    append_line(j.dump());
    return record.ignore_id;
}

void FileIgnoreStore::remove_ignore(const std::string& ignore_id) {
    std::lock_guard lock(mu_);
    const auto all = load_all();
    const bool known = std::any_of(all.begin(), all.end(),
                                   [&](const IgnoreRecord& r) { return r.ignore_id == ignore_id && r.active; });
    if (!known) throw UnknownIgnoreError("unknown ignore '" + ignore_id + "'");
    append_line(json{{"removed", ignore_id}, {"at", utc_timestamp()}}.dump());
}

std::vector<IgnoreRecord> FileIgnoreStore::list_ignores(const std::string& app_id) const {
    std::lock_guard lock(mu_);
    auto all = load_all();
    std::vector<IgnoreRecord> out;
    for (auto& r : all)
        if (r.app_id == app_id) out.push_back(std::move(r));
    return out;
}

ScreenCapture snapshot_of(const ScreenCapture& capture) {
    ScreenCapture s = capture;
    s.issues.clear();
    return s;
}

IgnoreRecord make_issue_ignore(const std::string& app_id, const ScreenCapture& capture, std::string_view detection_id,
                               IssueCategory category, const std::string& check_name) {
    IgnoreRecord r;
    r.app_id = app_id;
    r.scope = IgnoreScope::issue;
    r.check_name = check_name;
    r.category = category;
    r.fingerprint = preprocess_template(capture, detection_id);
    r.snapshot = snapshot_of(capture);
    return r;
}

IgnoreRecord make_screen_ignore(const std::string& app_id, const ScreenCapture& capture) {
    IgnoreRecord r;
    r.app_id = app_id;
    r.scope = IgnoreScope::screen;
    r.snapshot = snapshot_of(capture);
    return r;
}

Report apply_ignores(Report report, std::span<const IgnoreRecord> records, const SimilarityScorer& scorer,
                     const CaptureBundle& bundle, const MatchConfig& match) {
    for (const auto& r : records) {
        if (!r.active || r.app_id != report.app_id) continue;
        switch (r.scope) {
            case IgnoreScope::category:
            case IgnoreScope::check_name:
                move_ignored(report, r, [&](const UniqueIssue& u) { return issue_matches_scope(r, u); });
                break;
            case IgnoreScope::screen:
                if (r.snapshot) apply_screen(report, r, scorer, bundle);
                break;
            case IgnoreScope::issue:
                if (r.snapshot && r.fingerprint && r.check_name) apply_issue(report, r, scorer, bundle, match);
                break;
        }
    }
    return report;
}

Report apply_ignores(Report report, const IgnoreStore& store, const SimilarityScorer& scorer,
                     const CaptureBundle& bundle, const MatchConfig& match) {
    const auto records = store.list_ignores(report.app_id);
    return apply_ignores(std::move(report), records, scorer, bundle, match);
}

}  // namespace a11y
