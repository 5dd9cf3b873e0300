#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "io/config.hpp"
#include "io/dataset.hpp"
#include "model/network.hpp"

namespace jigclu {

struct EvalReport {
    std::string mode; // linear | finetune | semi
    double top1 = 0.0;
    double top5 = -1.0; // only reported when classes >= 10
    std::vector<double> per_class;
    double label_fraction = 1.0;
    std::string config_hash;
    uint64_t seed = 0;

    nlohmann::json to_json() const;
    std::string summary_line() const;
};

/// Generic mean softmax cross-entropy (no histogram constraint, unlike the
/// location branch targets).
double softmax_ce(const Tensor<float>& logits, const std::vector<int>& labels,
                  Tensor<float>* dlogits = nullptr);

/// Frozen-backbone global-average-pooled features for a set of dataset
/// indices; deterministic in inference mode.
Tensor<float> extract_features(JigsawNetwork<float>& net, const Dataset& data,
                               const std::vector<size_t>& indices, int batch_size = 256);

/// Probe training on precomputed features: SGD momentum 0.9, cosine schedule,
/// no weight decay. Exposed separately so tests can inject features directly.
EvalReport train_probe_on_features(const Tensor<float>& train_feats,
                                   const std::vector<int>& train_labels,
                                   const Tensor<float>& test_feats,
                                   const std::vector<int>& test_labels, int classes,
                                   const ExperimentConfig& cfg);

/// Linear evaluation: features are extracted once through the frozen backbone
/// (normalization statistics included), then a linear classifier is trained
/// with SGD (cosine schedule, no weight decay) and scored on the test split.
EvalReport linear_eval(JigsawNetwork<float>& net, const Dataset& train,
                       const Dataset& test, const ExperimentConfig& cfg);

/// Joint fine-tuning of backbone + fresh classifier on (a subset of) the
/// train split, scored on the test split. `subset` empty means all indices.
EvalReport finetune(JigsawNetwork<float>& net, const Dataset& train, const Dataset& test,
                    const ExperimentConfig& cfg, const std::vector<size_t>& subset = {});

/// Class-balanced labelled subset: exactly floor(fraction * per-class count)
/// indices per class, seeded. Nested mode makes smaller fractions prefixes of
/// larger ones.
std::vector<size_t> semi_split(const Dataset& data, double fraction, uint64_t seed,
                               bool nested = true);

} // namespace jigclu
