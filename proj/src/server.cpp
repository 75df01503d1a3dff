#include "a11y/server.hpp"

#include <fstream>
#include <mutex>

#include <httplib.h>

#include "a11y/ignore_store.hpp"
#include "a11y/json_codec.hpp"
#include "a11y/pipeline.hpp"

namespace a11y {

namespace {

constexpr const char* kJson = "application/json";

constexpr const char* kPlaceholderPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>Accessibility report</title></head>
<body>
<h1>Accessibility report server</h1>
<p>No UI assets are installed. The report is available at <a href="/api/report">/api/report</a>.</p>
</body></html>
)";

class BadRequest : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

json ignore_summary(const IgnoreRecord& r) {
    json j{{"ignore_id", r.ignore_id},
           {"app_id", r.app_id},
           {"scope", to_string(r.scope)},
           {"active", r.active},
           {"created_at", r.created_at}};
    if (r.check_name) j["check_name"] = *r.check_name;
    if (r.category) j["category"] = to_string(*r.category);
    if (r.snapshot) j["capture_id"] = r.snapshot->capture_id;
    if (r.fingerprint) j["detection_id"] = r.fingerprint->template_element.detection_id;
    return j;
}

void write_atomically(const std::filesystem::path& p, const std::string& text) {
    auto tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        out << text;
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, p);
}

}  // namespace

struct ReportServer::Impl {
    ServerOptions opt;
    httplib::Server http;
    CaptureBundle bundle;
    PipelineConfig config;
    FileIgnoreStore store;

    mutable std::mutex state_mu;  // guards report and body
    Report report;
    std::shared_ptr<const std::string> body;

    std::mutex write_mu;  // serializes ignore mutations, bug filing and regeneration

    explicit Impl(ServerOptions o) : opt(std::move(o)), store(opt.ignore_file) {
        if (opt.bugs_file.empty()) opt.bugs_file = opt.report_dir / "bugs.jsonl";
        auto dir = read_report_dir(opt.report_dir);
        bundle = load_bundle(dir.bundle_dir);
        config = dir.config;
        publish(std::move(dir.report));
        routes();
    }

    void publish(Report r) {
        auto text = std::make_shared<const std::string>(report_to_json(r).dump(2) + "\n");
        std::lock_guard lock(state_mu);
        report = std::move(r);
        body = std::move(text);
    }

    std::shared_ptr<const std::string> current_body() const {
        std::lock_guard lock(state_mu);
        return body;
    }

    Report current_report() const {
        std::lock_guard lock(state_mu);
        return report;
    }

    json regenerate(bool full) {
        std::lock_guard writer(write_mu);
        const auto old = current_report();
        const auto storyboard = full ? build_storyboard(bundle, config.scorer()) : old.storyboard;
        auto fresh = assemble_report(bundle, storyboard, store, config);
        fresh.generated_at = utc_timestamp();
        auto doc = report_to_json(fresh);
        write_atomically(opt.report_dir / "report.json", doc.dump(2) + "\n");
        publish(std::move(fresh));
        return doc;
    }

    IgnoreRecord record_from_request(const json& b) {
        const auto scope = parse_ignore_scope(b.value("scope", std::string{}));
        if (!scope) throw BadRequest("scope must be one of issue, check_name, category, screen");
        const auto category = [&]() -> std::optional<IssueCategory> {
            if (!b.contains("category")) return std::nullopt;
            auto c = parse_category(b["category"].get<std::string>());
            if (!c) throw BadRequest("unknown category");
            return c;
        };
        const auto capture = [&](const std::string& id) -> const ScreenCapture& {
            const auto* c = bundle.find_capture(id);
            if (!c) throw BadRequest("unknown capture '" + id + "'");
            return *c;
        };

        IgnoreRecord r;
        switch (*scope) {
            case IgnoreScope::category: {
                r.app_id = bundle.app_id;
                r.scope = *scope;
                r.category = category();
                if (!r.category) throw BadRequest("category scope needs a category");
                return r;
            }
            case IgnoreScope::check_name: {
                r.app_id = bundle.app_id;
                r.scope = *scope;
                if (!b.contains("check_name")) throw BadRequest("check_name scope needs a check_name");
                r.check_name = b["check_name"].get<std::string>();
                r.category = category();
                return r;
            }
            case IgnoreScope::screen: {
                std::string cid;
                if (b.contains("group_id")) {
                    const auto rep = current_report();
                    const auto* g = rep.storyboard.find_group(b["group_id"].get<int>());
                    if (!g) throw BadRequest("unknown group");
                    cid = g->representative_id;
                } else {
                    cid = b.value("capture_id", std::string{});
                }
                return make_screen_ignore(bundle.app_id, capture(cid));
            }
            case IgnoreScope::issue: {
                std::string cid, did, check;
                std::optional<IssueCategory> cat;
                if (b.contains("unique_id")) {
                    const auto rep = current_report();
                    const auto id = b["unique_id"].get<std::string>();
                    const UniqueIssue* found = nullptr;
                    for (const auto* section : {&rep.unique_issues, &rep.ignored_section, &rep.hidden_section})
                        for (const auto& u : *section)
                            if (u.unique_id == id) found = &u;
                    if (!found) throw BadRequest("unknown issue '" + id + "'");
                    if (!found->anchor.detection_id) throw BadRequest("issue has no anchored element");
                    cid = found->anchor.capture_id;
                    did = *found->anchor.detection_id;
                    check = found->check_name;
                    cat = found->category;
                } else {
                    cid = b.value("capture_id", std::string{});
                    did = b.value("detection_id", std::string{});
                    check = b.value("check_name", std::string{});
                    cat = category();
                    if (did.empty() || check.empty() || !cat)
                        throw BadRequest("issue scope needs unique_id or capture_id, detection_id, check_name, category");
                }
                const auto& c = capture(cid);
                if (!c.find_detection(did)) throw BadRequest("unknown detection '" + did + "'");
                return make_issue_ignore(bundle.app_id, c, did, *cat, check);
            }
        }
        throw BadRequest("unsupported scope");
    }

    void routes() {
        http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            std::string what = "internal error";
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                what = e.what();
            } catch (...) {
            }
            res.status = 500;
            res.set_content(json{{"error", what}}.dump(), kJson);
        });

        http.Get("/api/report", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(*current_body(), kJson);
        });

        http.Get(R"(/api/screens/([^/]+)\.png)", [this](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            if (!bundle.find_capture(id)) {
                res.status = 404;
                res.set_content(json{{"error", "unknown capture"}}.dump(), kJson);
                return;
            }
            std::ifstream in(opt.report_dir / screenshot_relpath(id), std::ios::binary);
            if (!in) {
                res.status = 404;
                res.set_content(json{{"error", "screenshot missing"}}.dump(), kJson);
                return;
            }
            std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            res.set_content(std::move(data), "image/png");
        });

        http.Get("/api/ignores", [this](const httplib::Request&, httplib::Response& res) {
            json list = json::array();
            for (const auto& r : store.list_ignores(bundle.app_id)) list.push_back(ignore_summary(r));
            res.set_content(list.dump(), kJson);
        });

        http.Post("/api/ignores", [this](const httplib::Request& req, httplib::Response& res) {
            try {
                const auto body = json::parse(req.body);
                if (!body.is_object()) throw BadRequest("body must be a JSON object");
                auto record = record_from_request(body);
                std::lock_guard writer(write_mu);
                const auto id = store.add_ignore(std::move(record));
                res.status = 201;
                res.set_content(json{{"ignore_id", id}}.dump(), kJson);
            } catch (const json::exception& e) {
                res.status = 400;
                res.set_content(json{{"error", e.what()}}.dump(), kJson);
            } catch (const BadRequest& e) {
                res.status = 400;
                res.set_content(json{{"error", e.what()}}.dump(), kJson);
            } catch (const IgnoreError& e) {
                res.status = 400;
                res.set_content(json{{"error", e.what()}}.dump(), kJson);
            }
        });

        http.Delete(R"(/api/ignores/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            try {
                std::lock_guard writer(write_mu);
                store.remove_ignore(req.matches[1]);
                res.status = 200;
                res.set_content(json{{"removed", std::string(req.matches[1])}}.dump(), kJson);
            } catch (const UnknownIgnoreError& e) {
                res.status = 404;
                res.set_content(json{{"error", e.what()}}.dump(), kJson);
            }
        });

        http.Post("/api/regenerate", [this](const httplib::Request& req, httplib::Response& res) {
            bool full = false;
            if (!req.body.empty()) {
                const auto body = json::parse(req.body, nullptr, false);
                if (body.is_discarded() || !body.is_object()) {
                    res.status = 400;
                    res.set_content(json{{"error", "body must be a JSON object"}}.dump(), kJson);
                    return;
                }
                full = body.value("full", false);
            }
            regenerate(full);
            res.set_content(*current_body(), kJson);
        });

        http.Post("/api/bugs", [this](const httplib::Request& req, httplib::Response& res) {
            const auto body = json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.is_object()) {
                res.status = 400;
                res.set_content(json{{"error", "body must be a JSON object"}}.dump(), kJson);
                return;
            }
            std::lock_guard writer(write_mu);
            std::size_t count = 0;
            {
                std::ifstream in(opt.bugs_file);
                std::string line;
                while (std::getline(in, line))
                    if (!line.empty()) ++count;
            }
            const auto id = "bug-" + std::to_string(count + 1);
            json record{{"bug_id", id}, {"filed_at", utc_timestamp()}, {"app_id", bundle.app_id}, {"details", body}};
            std::ofstream out(opt.bugs_file, std::ios::app);
            out << record.dump() << "\n";
            if (!out) throw std::runtime_error("cannot write " + opt.bugs_file.string());
            res.status = 201;
            res.set_content(json{{"bug_id", id}}.dump(), kJson);
        });

        if (!opt.static_dir.empty() && std::filesystem::is_directory(opt.static_dir)) {
            http.set_mount_point("/", opt.static_dir.string());
        } else {
            http.Get("/", [](const httplib::Request&, httplib::Response& res) {
                res.set_content(kPlaceholderPage, "text/html");
            });
        }
    }
};

ReportServer::ReportServer(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}
ReportServer::~ReportServer() { stop(); }

int ReportServer::bind() {
    if (impl_->opt.port == 0) return impl_->http.bind_to_any_port(impl_->opt.host);
    return impl_->http.bind_to_port(impl_->opt.host, impl_->opt.port) ? impl_->opt.port : -1;
}

bool ReportServer::listen() { return impl_->http.listen_after_bind(); }
void ReportServer::stop() {
    if (impl_) impl_->http.stop();
}
void ReportServer::wait_until_ready() const { impl_->http.wait_until_ready(); }

nlohmann::json ReportServer::regenerate(bool full) { return impl_->regenerate(full); }
std::shared_ptr<const std::string> ReportServer::report_body() const { return impl_->current_body(); }

int cmd_serve(const ServerOptions& options, std::ostream& out, std::ostream& err) {
    try {
        ReportServer server(options);
        const int port = server.bind();
        if (port < 0) {
            err << "error: cannot bind " << options.host << ":" << options.port << "\n";
            return 1;
        }
        out << "serving " << options.report_dir.string() << " on http://" << options.host << ":" << port << "\n";
        out.flush();
        return server.listen() ? 0 : 1;
    } catch (const ReportFormatError& e) {
        err << "corrupt report: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace a11y
