#pragma once

#include <functional>
#include <string>

#include "io/config.hpp"
#include "io/dataset.hpp"
#include "model/network.hpp"
#include "train/checkpoint.hpp"
#include "train/sgd.hpp"

namespace jigclu {

struct StepMetrics {
    int64_t step = 0;
    int epoch = 0;
    double lr = 0;
    double total = 0;
    double clustering = 0;
    double location = 0;
    double retrieval_acc = 0;
    double location_acc = 0;
};

/// One optimizer update on one built batch. Throws NumericError (with the
/// offending batch seed) if the loss goes non-finite.
StepMetrics train_step(JigsawNetwork<float>& net, const BuiltBatch& batch,
                       const LossConfig& loss_cfg, SgdOptimizer<float>& opt, double lr,
                       double momentum, double weight_decay);

/// Builds a fresh network from the config (seeded initialization).
JigsawNetwork<float> build_network(const ExperimentConfig& cfg);

/// Snapshot of parameters, BN statistics and momentum buffers.
Checkpoint make_checkpoint(JigsawNetwork<float>& net, SgdOptimizer<float>& opt,
                           const ExperimentConfig& cfg, int64_t step, int next_epoch);

/// Restores network (+ optimizer when given) state from a checkpoint.
void restore_network(const Checkpoint& ckpt, JigsawNetwork<float>& net,
                     SgdOptimizer<float>* opt = nullptr);

/// SHA-256 of all parameter bytes in manifest order (frozen-backbone checks).
std::string params_sha256(JigsawNetwork<float>& net);

struct TrainResult {
    std::string final_checkpoint;
    int64_t steps = 0;
    double last_loss = 0;
};

/// Full pretraining loop: per-epoch reshuffle seeded by (seed, epoch),
/// multi-worker batch construction over bounded queues, per-step cosine
/// schedule, JSON-lines metrics, periodic checkpoints, deterministic resume
/// from an epoch-boundary checkpoint. max_steps > 0 stops early (diagnostic
/// runs only; the schedule still spans the configured epochs).
TrainResult train_loop(const ExperimentConfig& cfg, const Dataset& data,
                       JigsawNetwork<float>& net, const std::string& out_dir,
                       const Checkpoint* resume = nullptr,
                       const std::function<void(const StepMetrics&)>& observer = {},
                       int64_t max_steps = 0);

} // namespace jigclu
