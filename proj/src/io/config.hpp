#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "loss/losses.hpp"
#include "pipeline/augment.hpp"
#include "pipeline/batch.hpp"

namespace jigclu {

/// Full experiment configuration. Loaded from a single JSON file with
/// CLI `--set key.path=value` overrides; unknown keys are rejected so sweep
/// scripts fail loudly on typos. The SHA-256 of the canonical serialization
/// is embedded in every artifact the toolkit writes.
struct ExperimentConfig {
    struct DatasetSection {
        std::string name = "cifar10";
        std::string path = "data/cifar-10-batches-bin";
        std::string format = "cifar10"; // cifar10 | cifar100 | image_folder | synthetic
    } dataset;

    struct TaskSection {
        int m = 2;
        double overlap_ratio = 0.3;
        int side = 32; // L; folder/synthetic datasets are resized to this
        std::string input_format = "montage";
        std::string aug_position = "after_split";
    } task;

    LossConfig loss;

    struct ModelSection {
        std::string backbone = "resnet14";
        int embed_dim = 128;
        std::array<float, 3> input_mean = {0.5f, 0.5f, 0.5f};
        std::array<float, 3> input_std = {0.25f, 0.25f, 0.25f};
    } model;

    struct OptimSection {
        double lr0 = 0.03;
        double momentum = 0.9;
        double weight_decay = 1e-4;
        int epochs = 100;
        int batch_size = 128;
        uint64_t seed = 1;
    } optim;

    struct IoSection {
        std::string out_dir = "out";
        int log_interval = 10;        // steps between metric records
        int checkpoint_interval = 10; // epochs between checkpoints
        int num_workers = 1;
        int queue_capacity = 4;
    } io;

    AugOps aug;

    struct EvalSection {
        int epochs = 40;
        double lr = 1.0;            // linear-probe learning rate
        double finetune_lr = 0.02;
        double label_fraction = 0.1;
        bool nested = true; // smaller fractions are prefixes of larger ones
        int batch_size = 128;
        uint64_t seed = 1;
    } eval;

    /// Parse + validate. Throws ConfigError with a key-anchored message.
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load_file(const std::string& path);

    nlohmann::json to_json() const;
    std::string hash() const; // sha256 of the canonical serialization

    void validate() const;

    GridSpec grid() const;
    AugPolicy aug_policy() const;
    InputFormat input_format() const { return input_format_from_string(task.input_format); }
};

/// Applies one `key.path=value` override to a JSON tree. The value is parsed
/// as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

} // namespace jigclu
