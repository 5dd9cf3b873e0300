#include "train/trainer.hpp"

#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "core/sha256.hpp"
#include "train/queue.hpp"
#include "train/schedule.hpp"

namespace jigclu {

namespace fs = std::filesystem;

JigsawNetwork<float> build_network(const ExperimentConfig& cfg) {
    JigsawNetwork<float> net(make_backbone<float>(cfg.model.backbone), cfg.task.m,
                             cfg.model.embed_dim);
    net.set_input_stats(cfg.model.input_mean, cfg.model.input_std);
    auto rng = RngStream::derive(cfg.optim.seed, {kTagInit});
    net.init(rng);
    return net;
}

StepMetrics train_step(JigsawNetwork<float>& net, const BuiltBatch& batch,
                       const LossConfig& loss_cfg, SgdOptimizer<float>& opt, double lr,
                       double momentum, double weight_decay) {
    const int m = batch.m;
    const int vectors_side = batch.format == InputFormat::montage ? m : 1;

    Tensor<float> input = images_to_tensor<float>(batch.images);
    net.zero_grads();
    auto out = net.forward(input, vectors_side, true);

    auto clusters = ClusterTargets::from_batch(batch.cluster_ids, m);
    auto locations = LocationTargets::from_batch(batch.location_ids, m, batch.n);

    Tensor<float> dz(out.embeddings.shape), dlogits(out.loc_logits.shape);
    LossBreakdown loss;
    try {
        loss = total_loss(out.embeddings, out.loc_logits, clusters, locations, loss_cfg,
                          &dz, &dlogits);
    } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " (batch seed " +
                           std::to_string(batch.batch_seed) + ")");
    }
    if (!std::isfinite(loss.total))
        throw NumericError("train: non-finite loss at batch seed " +
                           std::to_string(batch.batch_seed));

    net.backward(dz, dlogits);
    auto params = net.params();
    opt.step(params, lr, momentum, weight_decay);

    StepMetrics metrics;
    metrics.lr = lr;
    metrics.total = loss.total;
    metrics.clustering = loss.clustering;
    metrics.location = loss.location;
    metrics.retrieval_acc =
        loss_cfg.clustering_enabled ? retrieval_accuracy(out.embeddings, clusters) : 0.0;
    metrics.location_acc = location_accuracy(out.loc_logits, locations);
    return metrics;
}

Checkpoint make_checkpoint(JigsawNetwork<float>& net, SgdOptimizer<float>& opt,
                           const ExperimentConfig& cfg, int64_t step, int next_epoch) {
    Checkpoint c;
    c.step = step;
    c.epoch = next_epoch;
    c.config_hash = cfg.hash();
    c.global_seed = cfg.optim.seed;
    for (auto& p : net.params()) c.tensors.emplace_back(p.name, *p.value);
    for (auto& b : net.buffers()) c.tensors.emplace_back(b.name, *b.value);
    for (auto& p : net.params())
        c.tensors.emplace_back("optim.momentum." + p.name,
                               opt.buffer(p.name, p.value->shape));
    return c;
}

void restore_network(const Checkpoint& ckpt, JigsawNetwork<float>& net,
                     SgdOptimizer<float>* opt) {
    for (auto& p : net.params()) {
        const Tensor<float>* t = ckpt.find(p.name);
        require_data(t != nullptr, "checkpoint: missing tensor " + p.name);
        require_data(t->shape == p.value->shape,
                     "checkpoint: shape mismatch for " + p.name);
        p.value->data = t->data;
    }
    for (auto& b : net.buffers()) {
        const Tensor<float>* t = ckpt.find(b.name);
        require_data(t != nullptr, "checkpoint: missing buffer " + b.name);
        b.value->data = t->data;
    }
    if (opt) {
        for (auto& p : net.params()) {
            const Tensor<float>* t = ckpt.find("optim.momentum." + p.name);
            require_data(t != nullptr, "checkpoint: missing momentum for " + p.name);
            opt->buffer(p.name, p.value->shape).data = t->data;
        }
    }
}

std::string params_sha256(JigsawNetwork<float>& net) {
    Sha256 h;
    for (auto& p : net.params())
        h.update(p.value->ptr(), size_t(p.value->numel()) * sizeof(float));
    return h.hex_digest();
}

namespace {

std::vector<size_t> epoch_order(size_t n, uint64_t seed, int epoch) {
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    auto rng = RngStream::derive(seed, {kTagShuffle, uint64_t(epoch)});
    for (size_t i = n; i > 1; --i)
        std::swap(order[i - 1], order[rng.uniform_int(i)]);
    return order;
}

void write_metrics_line(std::ofstream& f, const StepMetrics& m) {
    nlohmann::json j = {{"step", m.step},
                        {"epoch", m.epoch},
                        {"lr", m.lr},
                        {"total", m.total},
                        {"clu", m.clustering},
                        {"loc", m.location},
                        {"retrieval_acc", m.retrieval_acc},
                        {"loc_acc", m.location_acc}};
    f << j.dump() << "\n";
    f.flush();
}

} // namespace

TrainResult train_loop(const ExperimentConfig& cfg, const Dataset& data,
                       JigsawNetwork<float>& net, const std::string& out_dir,
                       const Checkpoint* resume,
                       const std::function<void(const StepMetrics&)>& observer,
                       int64_t max_steps) {
    const int n = cfg.optim.batch_size;
    require_data(data.size() >= size_t(n),
                 "train: dataset smaller than one batch (" + std::to_string(data.size()) +
                     " < " + std::to_string(n) + ")");
    const int64_t steps_per_epoch = int64_t(data.size()) / n;
    const int64_t total_steps = int64_t(cfg.optim.epochs) * steps_per_epoch;
    const GridSpec grid = cfg.grid();
    const AugPolicy policy = cfg.aug_policy();
    const InputFormat format = cfg.input_format();
    const int workers = cfg.io.num_workers;

    fs::create_directories(out_dir);
    SgdOptimizer<float> opt;
    int start_epoch = 0;
    int64_t step = 0;
    if (resume) {
        require_config(resume->config_hash == cfg.hash(),
                       "resume: checkpoint config hash does not match this config");
        restore_network(*resume, net, &opt);
        start_epoch = resume->epoch;
        step = resume->step;
    }

    const std::string metrics_path = (fs::path(out_dir) / "metrics.jsonl").string();
    std::ofstream metrics(metrics_path, resume ? std::ios::app : std::ios::trunc);
    require_data(metrics.good(), "train: cannot open " + metrics_path);

    TrainResult result;
    bool stopped_early = false;
    for (int epoch = start_epoch; epoch < cfg.optim.epochs && !stopped_early; ++epoch) {
        auto order = epoch_order(data.size(), cfg.optim.seed, epoch);

        // Workers build batches over bounded queues; batch b is owned by
        // worker b % W and consumed in batch order, so the schedule never
        // affects the data stream.
        std::vector<std::unique_ptr<BoundedQueue<BuiltBatch>>> queues;
        std::vector<std::thread> threads;
        for (int w = 0; w < workers; ++w)
            queues.push_back(
                std::make_unique<BoundedQueue<BuiltBatch>>(size_t(cfg.io.queue_capacity)));
        for (int w = 0; w < workers; ++w) {
            threads.emplace_back([&, w] {
                auto stream = RngStream::derive(cfg.optim.seed,
                                                {kTagWorker, uint64_t(epoch), uint64_t(w)});
                for (int64_t b = w; b < steps_per_epoch; b += workers) {
                    std::vector<size_t> idx(order.begin() + b * n,
                                            order.begin() + (b + 1) * n);
                    BuiltBatch batch =
                        build_batch(data.images(idx), grid, policy, format, stream);
                    batch.batch_seed = (uint64_t(epoch) << 32) | uint64_t(b);
                    batch.source_indices.assign(idx.begin(), idx.end());
                    queues[size_t(w)]->push(std::move(batch));
                }
            });
        }

        try {
            for (int64_t b = 0; b < steps_per_epoch; ++b) {
                auto batch = queues[size_t(b % workers)]->pop();
                require(batch.has_value(), "train: batch queue closed unexpectedly");
                const double lr = cosine_lr(step, total_steps, cfg.optim.lr0);
                StepMetrics m = train_step(net, *batch, cfg.loss, opt, lr,
                                           cfg.optim.momentum, cfg.optim.weight_decay);
                ++step;
                m.step = step;
                m.epoch = epoch;
                result.last_loss = m.total;
                if (step % cfg.io.log_interval == 0 || b + 1 == steps_per_epoch)
                    write_metrics_line(metrics, m);
                if (observer) observer(m);
                if (max_steps > 0 && step >= max_steps) {
                    stopped_early = true;
                    break;
                }
            }
        } catch (...) {
            for (auto& q : queues) q->close();
            for (auto& t : threads) t.join();
            throw;
        }
        for (auto& q : queues) q->close();
        for (auto& t : threads) t.join();

        const bool last = epoch + 1 == cfg.optim.epochs;
        if (!stopped_early && ((epoch + 1) % cfg.io.checkpoint_interval == 0 || last)) {
            auto ckpt = make_checkpoint(net, opt, cfg, step, epoch + 1);
            ckpt.save((fs::path(out_dir) / ("checkpoint_epoch" + std::to_string(epoch + 1) +
                                            ".jckpt"))
                          .string());
        }
    }

    auto final_ckpt = make_checkpoint(net, opt, cfg, step, cfg.optim.epochs);
    result.final_checkpoint = (fs::path(out_dir) / "checkpoint_final.jckpt").string();
    final_ckpt.save(result.final_checkpoint);
    result.steps = step;
    return result;
}

} // namespace jigclu
