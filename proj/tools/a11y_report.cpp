#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "a11y/commands.hpp"
#include "a11y/server.hpp"

namespace {

struct PipelineFlags {
    std::string similarity = "pixel";
    double threshold = 0.0;
    std::string strategy = "full";
    a11y::PipelineConfig config;

    void add_to(CLI::App* cmd) {
        auto& m = config.dedupe.match;
        cmd->add_option("--similarity", similarity, "Screen similarity: embedding, pixel or structural")
            ->check(CLI::IsMember({"embedding", "pixel", "structural"}))
            ->capture_default_str();
        cmd->add_option("--threshold", threshold, "Similarity threshold (mode default when omitted)");
        cmd->add_option("--text-threshold", m.text_threshold)->capture_default_str();
        cmd->add_option("--icon-threshold", m.icon_threshold)->capture_default_str();
        cmd->add_option("--picture-threshold", m.picture_threshold)->capture_default_str();
        cmd->add_option("--position-threshold", m.position_threshold)->capture_default_str();
        cmd->add_option("--search-padding", m.search_padding, "Per-side window padding")->capture_default_str();
        cmd->add_option("--group-margin", m.group_margin)->capture_default_str();
        cmd->add_option("--max-template-area", m.max_template_area)->capture_default_str();
        cmd->add_option("--strategy", strategy, "Matching heuristics: template_only, exact_text, fuzzy_text, full")
            ->check(CLI::IsMember({"template_only", "exact_text", "fuzzy_text", "full"}))
            ->capture_default_str();
        cmd->add_option("--association-iou", config.dedupe.association_iou)->capture_default_str();
        cmd->add_option("--raw-dedupe-iou", config.dedupe.raw_dedupe_iou)->capture_default_str();
        cmd->set_config("--config", "", "Key-value config file with any of the options above");
    }

    a11y::PipelineConfig resolve(const CLI::App* cmd) {
        config.similarity = *a11y::parse_similarity_mode(similarity);
        if (cmd->count("--threshold")) config.threshold = threshold;
        config.dedupe.match.strategy = *a11y::parse_match_strategy(strategy);
        return config;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Accessibility report generator"};
    app.require_subcommand(1);
    int status = 0;

    a11y::GenerateOptions gen;
    std::string gen_ignores;
    PipelineFlags gen_flags;
    auto* generate = app.add_subcommand("generate", "Build a report from a capture bundle");
    generate->add_option("--bundle", gen.bundle_dir, "Bundle directory")->required();
    generate->add_option("--out", gen.out_dir, "Report output directory")->required();
    generate->add_option("--ignores", gen_ignores, "Ignore store file");
    gen_flags.add_to(generate);
    generate->callback([&] {
        if (!gen_ignores.empty()) gen.ignore_file = gen_ignores;
        gen.config = gen_flags.resolve(generate);
        status = a11y::cmd_generate(gen, std::cout, std::cerr);
    });

    a11y::ServerOptions serve_opt;
    auto* serve = app.add_subcommand("serve", "Serve a generated report and accept ignore decisions");
    serve->add_option("--report", serve_opt.report_dir, "Report directory")->required();
    serve->add_option("--ignores", serve_opt.ignore_file, "Ignore store file")->required();
    serve->add_option("--port", serve_opt.port, "Port (0 picks a free one)")->capture_default_str();
    serve->add_option("--host", serve_opt.host)->capture_default_str();
    serve->add_option("--static", serve_opt.static_dir, "UI asset directory served at /");
    serve->add_option("--bugs", serve_opt.bugs_file, "Bug stub file (default <report>/bugs.jsonl)");
    serve->callback([&] { status = a11y::cmd_serve(serve_opt, std::cout, std::cerr); });

    std::string pred, gold;
    bool as_json = false;
    auto* eval = app.add_subcommand("eval", "Score predictions against gold labels");
    eval->add_option("--pred", pred, "Predictions file")->required();
    eval->add_option("--gold", gold, "Gold file")->required();
    eval->add_flag("--json", as_json, "Machine-readable output");
    eval->callback([&] { status = a11y::cmd_eval(pred, gold, as_json, std::cout, std::cerr); });

    a11y::SynthSpec spec;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
    synth->add_option("--seed", spec.seed)->capture_default_str();
    synth->add_option("--apps", spec.app_count)->capture_default_str();
    synth->add_option("--captures", spec.screens_per_app, "Captures per app")->capture_default_str();
    synth->add_option("--data-change", spec.weights.same_data_change, "Variation weight")->capture_default_str();
    synth->add_option("--scrolled", spec.weights.scrolled, "Variation weight")->capture_default_str();
    synth->add_option("--expanded", spec.weights.expanded_collapsed, "Variation weight")->capture_default_str();
    synth->add_option("--keyboard", spec.weights.keyboard, "Variation weight")->capture_default_str();
    synth->add_option("--dialog", spec.weights.dialog_overlay, "Variation weight")->capture_default_str();
    synth->add_option("--modal", spec.weights.modal_over_different_content, "Variation weight")->capture_default_str();
    synth->add_option("--issue-rate", spec.planted_issue_rate)->capture_default_str();
    synth->add_option("--fp-rate", spec.planted_false_positive_rate)->capture_default_str();
    synth->add_option("--out", synth_out, "Output directory")->required();
    synth->callback([&] { status = a11y::cmd_synth(spec, synth_out, std::cout, std::cerr); });

    std::string corpus, pred_out;
    PipelineFlags pred_flags;
    auto* predict = app.add_subcommand("predict", "Group and match a synthetic corpus for evaluation");
    predict->add_option("--corpus", corpus, "Corpus directory with gold.json")->required();
    predict->add_option("--out", pred_out, "Predictions file")->required();
    pred_flags.add_to(predict);
    predict->callback([&] {
        status = a11y::cmd_predict(corpus, pred_flags.resolve(predict), pred_out, std::cout, std::cerr);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    return status;
}
