#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "a11y/commands.hpp"
#include "a11y/server.hpp"
#include "fixtures.hpp"

using namespace a11y;
using namespace a11y::testing;
using nlohmann::json;

namespace {

class ServerTest : public ::testing::Test {
protected:
    void SetUp() override {
        SynthSpec spec;
        spec.app_count = 1;
        spec.screens_per_app = 10;
        spec.weights.scrolled = 1.0;
        spec.planted_issue_rate = 0.4;
        spec.planted_false_positive_rate = 0.3;
        const auto app = generate_app(spec, 0);
        write_bundle(app.bundle, dir_.path() / "bundle");
        GenerateOptions o;
        o.bundle_dir = dir_.path() / "bundle";
        o.out_dir = dir_.path() / "report";
        o.config.similarity = SimilarityMode::embedding;
        std::ostringstream out, err;
        ASSERT_EQ(cmd_generate(o, out, err), 0) << err.str();

        ServerOptions so;
        so.report_dir = o.out_dir;
        so.ignore_file = dir_.path() / "ignores.jsonl";
        so.port = 0;
        server_ = std::make_unique<ReportServer>(so);
        port_ = server_->bind();
        ASSERT_GT(port_, 0);
        thread_ = std::thread([this] { server_->listen(); });
        server_->wait_until_ready();
        client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    }

    void TearDown() override {
        if (server_) server_->stop();
        if (thread_.joinable()) thread_.join();
    }

    json get_json(const std::string& path) {
        auto res = client_->Get(path);
        EXPECT_TRUE(res);
        EXPECT_EQ(res->status, 200);
        return json::parse(res->body);
    }

    httplib::Result post(const std::string& path, const json& body) {
        return client_->Post(path, body.dump(), "application/json");
    }

    static int ignored_count(const json& report) { return static_cast<int>(report.at("ignored_section").size()); }

    TempDir dir_{"server"};
    std::unique_ptr<ReportServer> server_;
    std::unique_ptr<httplib::Client> client_;
    std::thread thread_;
    int port_ = -1;
};

std::string first_active_category(const json& report) {
    for (const auto& [cat, n] : report.at("summary").at("categories").items())
        if (n.get<int>() > 0) return cat;
    return {};
}

}  // namespace

TEST_F(ServerTest, ReportAndScreens) {
    const auto report = get_json("/api/report");
    EXPECT_EQ(report.at("schema_version"), 1);
    const auto& captures = report.at("captures");
    ASSERT_FALSE(captures.empty());
    const auto id = captures.begin().key();
    auto png = client_->Get("/api/screens/" + id + ".png");
    ASSERT_TRUE(png);
    EXPECT_EQ(png->status, 200);
    EXPECT_EQ(png->get_header_value("Content-Type"), "image/png");
    auto missing = client_->Get("/api/screens/nope.png");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);
}

TEST_F(ServerTest, CategoryIgnoreThenRegenerateThenUnignore) {
    const auto before = get_json("/api/report");
    const auto cat = first_active_category(before);
    ASSERT_FALSE(cat.empty());
    const int n = before.at("summary").at("categories").at(cat).get<int>();

    auto created = post("/api/ignores", json{{"scope", "category"}, {"category", cat}});
    ASSERT_TRUE(created);
    ASSERT_EQ(created->status, 201) << created->body;
    const auto id = json::parse(created->body).at("ignore_id").get<std::string>();

    auto regen = post("/api/regenerate", json::object());
    ASSERT_TRUE(regen);
    ASSERT_EQ(regen->status, 200);
    const auto after = get_json("/api/report");
    EXPECT_EQ(ignored_count(after), n);
    EXPECT_EQ(after.at("summary").at("categories").at(cat), 0);

    const auto listed = get_json("/api/ignores");
    ASSERT_EQ(listed.size(), 1u);
    EXPECT_EQ(listed[0].at("ignore_id"), id);

    auto del = client_->Delete("/api/ignores/" + id);
    ASSERT_TRUE(del);
    EXPECT_EQ(del->status, 200);
    ASSERT_EQ(post("/api/regenerate", json{{"full", true}})->status, 200);
    const auto restored = get_json("/api/report");
    EXPECT_EQ(ignored_count(restored), 0);
    EXPECT_EQ(restored.at("summary"), before.at("summary"));
}

TEST_F(ServerTest, IssueIgnoreByUniqueId) {
    const auto report = get_json("/api/report");
    std::string uid;
    for (const auto& g : report.at("groups"))
        for (const auto& [cat, checks] : g.at("issues").items())
            for (const auto& [check, list] : checks.items())
                for (const auto& u : list)
                    if (uid.empty() && !u.at("anchor").at("detection_id").is_null()) uid = u.at("unique_id");
    ASSERT_FALSE(uid.empty());
    auto created = post("/api/ignores", json{{"scope", "issue"}, {"unique_id", uid}});
    ASSERT_TRUE(created);
    ASSERT_EQ(created->status, 201) << created->body;
    ASSERT_EQ(post("/api/regenerate", json::object())->status, 200);
    const auto after = get_json("/api/report");
    ASSERT_EQ(ignored_count(after), 1);
    EXPECT_EQ(after.at("ignored_section")[0].at("unique_id"), uid);
}

TEST_F(ServerTest, BadRequestsAndUnknownIds) {
    auto del = client_->Delete("/api/ignores/ign-424242");
    ASSERT_TRUE(del);
    EXPECT_EQ(del->status, 404);
    EXPECT_EQ(post("/api/ignores", json{{"scope", "galaxy"}})->status, 400);
    EXPECT_EQ(post("/api/ignores", json{{"scope", "category"}, {"category", "Nope"}})->status, 400);
    EXPECT_EQ(post("/api/ignores", json{{"scope", "issue"}, {"unique_id", "nope"}})->status, 400);
    EXPECT_EQ(post("/api/ignores", json{{"scope", "screen"}, {"capture_id", "nope"}})->status, 400);
    auto junk = client_->Post("/api/ignores", "{oops", "application/json");
    ASSERT_TRUE(junk);
    EXPECT_EQ(junk->status, 400);
}

TEST_F(ServerTest, BugReportsAreAppended) {
    auto a = post("/api/bugs", json{{"text", "false alarm"}, {"unique_id", "g0-001"}});
    ASSERT_TRUE(a);
    EXPECT_EQ(a->status, 201);
    auto b = post("/api/bugs", json{{"text", "another"}});
    ASSERT_EQ(b->status, 201);
    EXPECT_NE(json::parse(a->body).at("bug_id"), json::parse(b->body).at("bug_id"));
    std::ifstream in(dir_.path() / "report" / "bugs.jsonl");
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    EXPECT_EQ(lines, 2);
}

TEST_F(ServerTest, ConcurrentReadersSeeWholeReports) {
    const auto cat = first_active_category(get_json("/api/report"));
    ASSERT_EQ(post("/api/ignores", json{{"scope", "category"}, {"category", cat}})->status, 201);
    std::atomic<bool> bad{false};
    std::thread reader([&] {
        httplib::Client c("127.0.0.1", port_);
        for (int i = 0; i < 20; ++i) {
            auto res = c.Get("/api/report");
            if (!res || res->status != 200 || !json::accept(res->body)) bad = true;
        }
    });
    for (int i = 0; i < 3; ++i) EXPECT_EQ(post("/api/regenerate", json::object())->status, 200);
    reader.join();
    EXPECT_FALSE(bad);
}

TEST(ServerStartup, CorruptReportIsRejected) {
    TempDir dir("corrupt-report");
    std::ofstream(dir.path() / "report.json") << "{";
    ServerOptions so;
    so.report_dir = dir.path();
    so.ignore_file = dir.path() / "ign.jsonl";
    std::ostringstream out, err;
    EXPECT_NE(cmd_serve(so, out, err), 0);
    EXPECT_FALSE(err.str().empty());
}
