#include "eval/eval.hpp"

#include <algorithm>
#include <cmath>

#include "train/schedule.hpp"
#include "train/sgd.hpp"

namespace jigclu {

nlohmann::json EvalReport::to_json() const {
    nlohmann::json j;
    j["mode"] = mode;
    j["top1"] = top1;
    if (top5 >= 0) j["top5"] = top5;
    j["per_class"] = per_class;
    j["label_fraction"] = label_fraction;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    return j;
}

std::string EvalReport::summary_line() const {
    char buf[256];
    if (top5 >= 0)
        std::snprintf(buf, sizeof(buf), "%-8s top1=%.4f top5=%.4f classes=%zu frac=%.2f",
                      mode.c_str(), top1, top5, per_class.size(), label_fraction);
    else
        std::snprintf(buf, sizeof(buf), "%-8s top1=%.4f classes=%zu frac=%.2f",
                      mode.c_str(), top1, per_class.size(), label_fraction);
    return buf;
}

double softmax_ce(const Tensor<float>& logits, const std::vector<int>& labels,
                  Tensor<float>* dlogits) {
    const int n = logits.dim(0), classes = logits.dim(1);
    require(int(labels.size()) == n, "softmax_ce: label count mismatch");
    double loss = 0;
    for (int i = 0; i < n; ++i) {
        const float* row = logits.ptr() + size_t(i) * size_t(classes);
        double mx = row[0];
        for (int c = 1; c < classes; ++c) mx = std::max(mx, double(row[c]));
        double denom = 0;
        for (int c = 0; c < classes; ++c) denom += std::exp(double(row[c]) - mx);
        const double lse = mx + std::log(denom);
        loss += (lse - double(row[labels[size_t(i)]])) / n;
        if (dlogits) {
            float* g = dlogits->ptr() + size_t(i) * size_t(classes);
            for (int c = 0; c < classes; ++c) {
                double p = std::exp(double(row[c]) - lse);
                g[c] += float((p - (c == labels[size_t(i)] ? 1.0 : 0.0)) / n);
            }
        }
    }
    return loss;
}

Tensor<float> extract_features(JigsawNetwork<float>& net, const Dataset& data,
                               const std::vector<size_t>& indices, int batch_size) {
    const int feat_dim = net.backbone().spec().channels;
    Tensor<float> out({int(indices.size()), feat_dim});
    for (size_t base = 0; base < indices.size(); base += size_t(batch_size)) {
        const size_t count = std::min(size_t(batch_size), indices.size() - base);
        std::vector<size_t> chunk(indices.begin() + long(base),
                                  indices.begin() + long(base + count));
        auto x = images_to_tensor<float>(data.images(chunk));
        auto f = net.features(x);
        std::copy(f.data.begin(), f.data.end(),
                  out.data.begin() + long(base * size_t(feat_dim)));
    }
    return out;
}

namespace {

std::vector<size_t> all_indices(const Dataset& d) {
    std::vector<size_t> idx(d.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return idx;
}

void score(const Tensor<float>& logits, const std::vector<int>& labels, int classes,
           EvalReport& report) {
    const int n = logits.dim(0);
    std::vector<int> correct(size_t(classes), 0), total(size_t(classes), 0);
    int top1 = 0, top5 = 0;
    for (int i = 0; i < n; ++i) {
        const float* row = logits.ptr() + size_t(i) * size_t(classes);
        const int label = labels[size_t(i)];
        int best = 0, better_than_label = 0;
        for (int c = 0; c < classes; ++c) {
            if (row[c] > row[best]) best = c;
            if (row[c] > row[label]) ++better_than_label;
        }
        total[size_t(label)]++;
        if (best == label) {
            ++top1;
            correct[size_t(label)]++;
        }
        if (better_than_label < 5) ++top5;
    }
    report.top1 = double(top1) / n;
    if (classes >= 10) report.top5 = double(top5) / n;
    report.per_class.resize(size_t(classes));
    for (int c = 0; c < classes; ++c)
        report.per_class[size_t(c)] =
            total[size_t(c)] ? double(correct[size_t(c)]) / total[size_t(c)] : 0.0;
}

} // namespace

EvalReport train_probe_on_features(const Tensor<float>& train_feats,
                                   const std::vector<int>& train_labels,
                                   const Tensor<float>& test_feats,
                                   const std::vector<int>& test_labels, int classes,
                                   const ExperimentConfig& cfg) {
    const int feat_dim = train_feats.dim(1);
    Linear<float> probe(feat_dim, classes);
    {
        auto rng = RngStream::derive(cfg.eval.seed, {kTagEval, 0});
        probe.init(rng);
    }
    std::vector<ParamRef<float>> params;
    probe.collect_params("probe", params);
    SgdOptimizer<float> opt;

    const int n = train_feats.dim(0);
    const int bs = std::min(cfg.eval.batch_size, n);
    const int64_t steps_per_epoch = n / bs;
    const int64_t total_steps = steps_per_epoch * cfg.eval.epochs;
    int64_t step = 0;
    for (int epoch = 0; epoch < cfg.eval.epochs; ++epoch) {
        auto rng = RngStream::derive(cfg.eval.seed, {kTagEval, 100, uint64_t(epoch)});
        std::vector<size_t> order(static_cast<size_t>(n), {});
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.uniform_int(i)]);
        for (int64_t b = 0; b < steps_per_epoch; ++b) {
            Tensor<float> x({bs, feat_dim});
            std::vector<int> y(static_cast<size_t>(bs), {});
            for (int i = 0; i < bs; ++i) {
                const size_t src = order[size_t(b * bs + i)];
                std::copy(train_feats.ptr() + src * size_t(feat_dim),
                          train_feats.ptr() + (src + 1) * size_t(feat_dim),
                          x.ptr() + size_t(i) * size_t(feat_dim));
                y[size_t(i)] = train_labels[src];
            }
            for (auto& p : params) p.grad->zero_();
            auto logits = probe.forward(x, true);
            Tensor<float> dlogits(logits.shape);
            softmax_ce(logits, y, &dlogits);
            probe.backward(dlogits);
            opt.step(params, cosine_lr(step, total_steps, cfg.eval.lr), 0.9, 0.0);
            ++step;
        }
    }

    auto logits = probe.forward(test_feats, false);
    EvalReport report;
    report.mode = "linear";
    report.config_hash = cfg.hash();
    report.seed = cfg.eval.seed;
    score(logits, test_labels, classes, report);
    return report;
}

EvalReport linear_eval(JigsawNetwork<float>& net, const Dataset& train,
                       const Dataset& test, const ExperimentConfig& cfg) {
    auto feats = extract_features(net, train, all_indices(train), cfg.eval.batch_size);
    std::vector<int> labels(train.size());
    for (size_t i = 0; i < train.size(); ++i) labels[i] = train.label(i);

    auto test_feats = extract_features(net, test, all_indices(test), cfg.eval.batch_size);
    std::vector<int> test_labels(test.size());
    for (size_t i = 0; i < test.size(); ++i) test_labels[i] = test.label(i);

    return train_probe_on_features(feats, labels, test_feats, test_labels,
                                   train.num_classes(), cfg);
}

EvalReport finetune(JigsawNetwork<float>& net, const Dataset& train, const Dataset& test,
                    const ExperimentConfig& cfg, const std::vector<size_t>& subset) {
    const int classes = train.num_classes();
    const int feat_dim = net.backbone().spec().channels;
    std::vector<size_t> indices = subset.empty() ? all_indices(train) : subset;
    require_data(indices.size() >= size_t(cfg.eval.batch_size),
                 "finetune: subset smaller than one batch");

    Linear<float> classifier(feat_dim, classes);
    {
        auto rng = RngStream::derive(cfg.eval.seed, {kTagEval, 1});
        classifier.init(rng);
    }
    std::vector<ParamRef<float>> params = net.params();
    classifier.collect_params("classifier", params);
    SgdOptimizer<float> opt;

    const int bs = cfg.eval.batch_size;
    const int64_t steps_per_epoch = int64_t(indices.size()) / bs;
    const int64_t total_steps = steps_per_epoch * cfg.eval.epochs;
    int64_t step = 0;
    for (int epoch = 0; epoch < cfg.eval.epochs; ++epoch) {
        auto rng = RngStream::derive(cfg.eval.seed, {kTagEval, 200, uint64_t(epoch)});
        auto order = indices;
        for (size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.uniform_int(i)]);
        for (int64_t b = 0; b < steps_per_epoch; ++b) {
            std::vector<size_t> chunk(order.begin() + b * bs, order.begin() + (b + 1) * bs);
            auto x = images_to_tensor<float>(train.images(chunk));
            std::vector<int> y(static_cast<size_t>(bs), {});
            for (int i = 0; i < bs; ++i) y[size_t(i)] = train.label(chunk[size_t(i)]);

            for (auto& p : params) p.grad->zero_();
            auto feats = net.pooled_forward(x, true);
            auto logits = classifier.forward(feats, true);
            Tensor<float> dlogits(logits.shape);
            softmax_ce(logits, y, &dlogits);
            net.pooled_backward(classifier.backward(dlogits));
            opt.step(params, cosine_lr(step, total_steps, cfg.eval.finetune_lr), 0.9,
                     cfg.optim.weight_decay);
            ++step;
        }
    }

    auto test_idx = all_indices(test);
    auto test_feats = extract_features(net, test, test_idx, cfg.eval.batch_size);
    std::vector<int> test_labels(test.size());
    for (size_t i = 0; i < test.size(); ++i) test_labels[i] = test.label(i);
    auto logits = classifier.forward(test_feats, false);

    EvalReport report;
    report.mode = subset.empty() ? "finetune" : "semi";
    report.label_fraction =
        subset.empty() ? 1.0 : double(subset.size()) / double(train.size());
    report.config_hash = cfg.hash();
    report.seed = cfg.eval.seed;
    score(logits, test_labels, classes, report);
    return report;
}

std::vector<size_t> semi_split(const Dataset& data, double fraction, uint64_t seed,
                               bool nested) {
    require_config(fraction > 0.0 && fraction <= 1.0,
                   "semi_split: fraction must be in (0,1]");
    const int classes = data.num_classes();
    std::vector<std::vector<size_t>> per_class(static_cast<size_t>(classes));
    for (size_t i = 0; i < data.size(); ++i)
        per_class[size_t(data.label(i))].push_back(i);

    std::vector<size_t> out;
    for (int c = 0; c < classes; ++c) {
        auto& bucket = per_class[size_t(c)];
        if (bucket.empty()) continue;
        const size_t take = size_t(std::floor(fraction * double(bucket.size())));
        require_data(take >= 1, "semi_split: fraction " + std::to_string(fraction) +
                                    " selects zero samples for class " + std::to_string(c));
        // nested mode shuffles once per class, so fractions are prefixes of
        // the same order; non-nested derives a fraction-specific stream
        auto rng = nested
                       ? RngStream::derive(seed, {kTagEval, 7, uint64_t(c)})
                       : RngStream::derive(seed, {kTagEval, 7, uint64_t(c),
                                                  uint64_t(fraction * 1e6)});
        for (size_t i = bucket.size(); i > 1; --i)
            std::swap(bucket[i - 1], bucket[rng.uniform_int(i)]);
        out.insert(out.end(), bucket.begin(), bucket.begin() + long(take));
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace jigclu
