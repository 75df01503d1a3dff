#pragma once

#include <filesystem>
#include <optional>
#include <ostream>

#include "a11y/pipeline.hpp"
#include "a11y/synth.hpp"

namespace a11y {

struct GenerateOptions {
    std::filesystem::path bundle_dir;
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> ignore_file;
    PipelineConfig config;
};

/// Exit codes: 0 ok, 2 bad input or configuration, 1 anything else.
int cmd_generate(const GenerateOptions& options, std::ostream& out, std::ostream& err);

/// Reads a predictions file and a gold file (a corpus gold.json or a single
/// app), prints pairwise grouping and correspondence metrics.
int cmd_eval(const std::filesystem::path& pred, const std::filesystem::path& gold, bool as_json, std::ostream& out,
             std::ostream& err);

int cmd_synth(const SynthSpec& spec, const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);

/// Groups every bundle of a synthetic corpus and matches its gold template
/// pairs, writing a predictions file that cmd_eval reads.
int cmd_predict(const std::filesystem::path& corpus_dir, const PipelineConfig& config,
                const std::filesystem::path& out_file, std::ostream& out, std::ostream& err);

}  // namespace a11y
