#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "eval/eval.hpp"
#include "io/config.hpp"

namespace jigclu {

// Command layer behind the C API and CLI. Every command writes its artifacts
// (reports, dumps, checkpoints, metrics) under cfg.io.out_dir and nowhere
// else; each artifact embeds the config hash.

/// Pretrains on the configured dataset; optionally resumes from a checkpoint.
/// Returns the final checkpoint path.
std::string cmd_pretrain(const ExperimentConfig& cfg,
                         const std::optional<std::string>& resume_from = {});

EvalReport cmd_linear_eval(const ExperimentConfig& cfg, const std::string& checkpoint);
EvalReport cmd_finetune(const ExperimentConfig& cfg, const std::string& checkpoint);
EvalReport cmd_semi(const ExperimentConfig& cfg, const std::string& checkpoint);

/// Builds one montage batch from the configured dataset with the given seed
/// and dumps montage_<j>.png plus labels.json into out_dir.
void cmd_inspect_batch(const ExperimentConfig& cfg, uint64_t batch_seed);

/// Times the three input formats over fixed steps in forked children and
/// reports sec/step plus peak RSS; writes bench.json.
nlohmann::json cmd_bench_input_format(const ExperimentConfig& cfg, int steps);

/// Sweeps m, overlap ratio, augmentation position and branch toggles; each
/// cell pretrains with the config's epoch budget and scores a linear probe.
/// Writes ablate.json and ablate.csv.
nlohmann::json cmd_ablate(const ExperimentConfig& cfg);

} // namespace jigclu
