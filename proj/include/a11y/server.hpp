#pragma once

#include <filesystem>
#include <memory>
#include <ostream>
#include <string>

#include <json.hpp>

namespace a11y {

struct ServerOptions {
    std::filesystem::path report_dir;
    std::filesystem::path ignore_file;
    std::filesystem::path bugs_file;   // defaults to <report_dir>/bugs.jsonl
    std::filesystem::path static_dir;  // UI assets served at /, optional
    std::string host = "127.0.0.1";
    int port = 8080;
};

/// Hosts one generated report and accepts ignore mutations. Loads the report
/// directory and its bundle on construction (throws ReportFormatError or
/// BundleError).
class ReportServer {
public:
    explicit ReportServer(ServerOptions options);
    ~ReportServer();

    /// Binds to options.port, or any free port when it is 0. Returns the port, -1 on failure.
    int bind();
    /// Serves until stop(); call after bind().
    bool listen();
    void stop();
    void wait_until_ready() const;

    /// Re-runs de-dup onward on the stored bundle (grouping too when full)
    /// with the current ignores, persists and swaps the served report.
    nlohmann::json regenerate(bool full);
    std::shared_ptr<const std::string> report_body() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

int cmd_serve(const ServerOptions& options, std::ostream& out, std::ostream& err);

}  // namespace a11y
