#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "io/dataset.hpp"
#include "train/queue.hpp"
#include "train/schedule.hpp"
#include "train/trainer.hpp"

using namespace jigclu;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_config(uint64_t seed = 1) {
    auto cfg = ExperimentConfig::from_json(nlohmann::json::object());
    cfg.dataset.format = "synthetic";
    cfg.model.backbone = "toy_c8_s4";
    cfg.optim.batch_size = 8;
    cfg.optim.epochs = 2;
    cfg.optim.seed = seed;
    cfg.io.checkpoint_interval = 1;
    cfg.io.log_interval = 1;
    return cfg;
}

Dataset tiny_data() { return Dataset::synthetic(32, 32, 4, 99); }

std::string read_file(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir(const std::string& name) {
        path = fs::temp_directory_path() / name;
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("schedule: cosine endpoints and midpoint") {
    CHECK(cosine_lr(0, 1000, 0.03) == doctest::Approx(0.03).epsilon(1e-12));
    CHECK(cosine_lr(1000, 1000, 0.03) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cosine_lr(500, 1000, 0.03) == doctest::Approx(0.015).epsilon(1e-12));
    for (int64_t s = 1; s <= 1000; ++s)
        CHECK(cosine_lr(s, 1000, 0.03) < cosine_lr(s - 1, 1000, 0.03));
    CHECK_THROWS_AS(cosine_lr(5, 4, 0.03), Error);
}

TEST_CASE("sgd: zero gradients shrink params by exactly (1 - lr*wd)") {
    Tensor<float> p({4});
    Tensor<float> g({4});
    for (int i = 0; i < 4; ++i) p.data[size_t(i)] = 1.0f + i;
    auto before = p.data;
    SgdOptimizer<float> opt;
    std::vector<ParamRef<float>> params = {{"p", &p, &g}};
    const double lr = 0.1, wd = 1e-2;
    opt.step(params, lr, 0.9, wd);
    for (int i = 0; i < 4; ++i)
        CHECK(p.data[size_t(i)] ==
              doctest::Approx(before[size_t(i)] * (1.0 - lr * wd)).epsilon(1e-7));
}

TEST_CASE("sgd: lr = 0 leaves params bit-identical") {
    Tensor<float> p({4});
    Tensor<float> g({4});
    for (int i = 0; i < 4; ++i) {
        p.data[size_t(i)] = 0.5f * (i + 1);
        g.data[size_t(i)] = 1.0f;
    }
    auto before = p.data;
    SgdOptimizer<float> opt;
    std::vector<ParamRef<float>> params = {{"p", &p, &g}};
    opt.step(params, 0.0, 0.9, 1e-4);
    CHECK(p.data == before);
}

TEST_CASE("sgd: momentum accumulates the classic way") {
    Tensor<float> p({1}), g({1});
    p.data[0] = 0.0f;
    g.data[0] = 1.0f;
    SgdOptimizer<float> opt;
    std::vector<ParamRef<float>> params = {{"p", &p, &g}};
    opt.step(params, 1.0, 0.5, 0.0); // v=1, p=-1
    CHECK(p.data[0] == doctest::Approx(-1.0f));
    opt.step(params, 1.0, 0.5, 0.0); // v=1.5, p=-2.5
    CHECK(p.data[0] == doctest::Approx(-2.5f));
}

TEST_CASE("train_step: fixed seed twice gives identical parameter hashes") {
    auto cfg = tiny_config();
    auto data = tiny_data();
    auto grid = cfg.grid();
    auto policy = cfg.aug_policy();
    std::vector<size_t> idx = {0, 1, 2, 3, 4, 5, 6, 7};

    auto run_two_steps = [&] {
        auto net = build_network(cfg);
        SgdOptimizer<float> opt;
        auto rng = RngStream::derive(7, {kTagWorker, 0, 0});
        for (int s = 0; s < 2; ++s) {
            auto batch = build_batch(data.images(idx), grid, policy,
                                     InputFormat::montage, rng);
            train_step(net, batch, cfg.loss, opt, 0.01, 0.9, 1e-4);
        }
        return params_sha256(net);
    };
    auto h1 = run_two_steps();
    auto h2 = run_two_steps();
    CHECK(h1 == h2);
    CHECK(h1.size() == 64);
}

TEST_CASE("train_step: non-finite loss raises NumericError naming the batch seed") {
    auto cfg = tiny_config();
    auto data = tiny_data();
    auto net = build_network(cfg);
    // poison one weight
    for (auto& p : net.params()) {
        if (p.name == "loc.weight") p.value->data[0] = std::nanf("");
    }
    SgdOptimizer<float> opt;
    auto rng = RngStream::derive(7, {kTagWorker, 0, 0});
    auto batch = build_batch(data.images({0, 1, 2, 3, 4, 5, 6, 7}), cfg.grid(),
                             cfg.aug_policy(), InputFormat::montage, rng);
    batch.batch_seed = 12345;
    CHECK_THROWS_WITH_AS(
        train_step(net, batch, cfg.loss, opt, 0.01, 0.9, 1e-4),
        doctest::Contains("12345"), NumericError);
}

TEST_CASE("train_loop: zero epochs returns the initial parameters") {
    TempDir dir("jigclu_zero_epochs");
    auto cfg = tiny_config();
    cfg.optim.epochs = 0;
    auto data = tiny_data();
    auto net = build_network(cfg);
    auto before = params_sha256(net);
    auto result = train_loop(cfg, data, net, dir.path.string());
    CHECK(params_sha256(net) == before);
    CHECK(result.steps == 0);
    auto ckpt = Checkpoint::load(result.final_checkpoint);
    auto net2 = build_network(cfg);
    restore_network(ckpt, net2);
    CHECK(params_sha256(net2) == before);
}

TEST_CASE("train_loop: determinism of metrics log and checkpoint hash") {
    auto cfg = tiny_config();
    auto data = tiny_data();

    auto run = [&](const std::string& name) {
        TempDir dir(name);
        auto net = build_network(cfg);
        auto result = train_loop(cfg, data, net, dir.path.string());
        return std::make_pair(Checkpoint::load(result.final_checkpoint).content_hash(),
                              read_file(dir.path / "metrics.jsonl"));
    };
    auto [hash1, log1] = run("jigclu_det_a");
    auto [hash2, log2] = run("jigclu_det_b");
    CHECK(hash1 == hash2);
    CHECK(log1 == log2);
    CHECK_FALSE(log1.empty());

    // a different seed must change the trajectory
    auto cfg2 = tiny_config(2);
    TempDir dir("jigclu_det_c");
    auto net = build_network(cfg2);
    auto result = train_loop(cfg2, data, net, dir.path.string());
    CHECK(Checkpoint::load(result.final_checkpoint).content_hash() != hash1);
}

TEST_CASE("train_loop: resume at an epoch boundary matches the uninterrupted run") {
    auto cfg = tiny_config();
    auto data = tiny_data();

    TempDir full_dir("jigclu_resume_full");
    auto full_net = build_network(cfg);
    auto full = train_loop(cfg, data, full_net, full_dir.path.string());
    auto full_hash = Checkpoint::load(full.final_checkpoint).content_hash();
    auto full_log = read_file(full_dir.path / "metrics.jsonl");

    // the uninterrupted run wrote checkpoint_epoch1; resume from it
    auto mid = Checkpoint::load((full_dir.path / "checkpoint_epoch1.jckpt").string());
    CHECK(mid.epoch == 1);
    TempDir resume_dir("jigclu_resume_rest");
    auto resumed_net = build_network(cfg);
    auto resumed = train_loop(cfg, data, resumed_net, resume_dir.path.string(), &mid);
    CHECK(Checkpoint::load(resumed.final_checkpoint).content_hash() == full_hash);

    // the resumed metrics must equal the epoch-1 suffix of the full log
    auto resumed_log = read_file(resume_dir.path / "metrics.jsonl");
    CHECK(full_log.size() > resumed_log.size());
    CHECK(full_log.substr(full_log.size() - resumed_log.size()) == resumed_log);

    // resuming under a different config is rejected
    auto other = cfg;
    other.optim.lr0 = 0.5;
    auto net3 = build_network(other);
    TempDir bad_dir("jigclu_resume_bad");
    CHECK_THROWS_AS(train_loop(other, data, net3, bad_dir.path.string(), &mid),
                    ConfigError);
}

TEST_CASE("train_loop: fixed worker count keeps multi-worker runs deterministic") {
    auto cfg = tiny_config();
    cfg.io.num_workers = 2;
    cfg.io.queue_capacity = 2;
    auto data = tiny_data();
    auto run = [&](const std::string& name) {
        TempDir dir(name);
        auto net = build_network(cfg);
        auto result = train_loop(cfg, data, net, dir.path.string());
        return Checkpoint::load(result.final_checkpoint).content_hash();
    };
    CHECK(run("jigclu_w2_a") == run("jigclu_w2_b"));
}

TEST_CASE("checkpoint: save -> load -> save is byte-identical") {
    TempDir dir("jigclu_ckpt_rt");
    auto cfg = tiny_config();
    auto net = build_network(cfg);
    SgdOptimizer<float> opt;
    auto ckpt = make_checkpoint(net, opt, cfg, 17, 3);
    auto p1 = (dir.path / "a.jckpt").string();
    auto p2 = (dir.path / "b.jckpt").string();
    ckpt.save(p1);
    auto loaded = Checkpoint::load(p1);
    loaded.save(p2);
    CHECK(read_file(p1) == read_file(p2));
    CHECK(loaded.step == 17);
    CHECK(loaded.epoch == 3);
    CHECK(loaded.config_hash == cfg.hash());
}

TEST_CASE("checkpoint: corrupted files are rejected") {
    TempDir dir("jigclu_ckpt_bad");
    auto cfg = tiny_config();
    auto net = build_network(cfg);
    SgdOptimizer<float> opt;
    auto ckpt = make_checkpoint(net, opt, cfg, 1, 1);
    auto path = (dir.path / "c.jckpt").string();
    ckpt.save(path);

    // truncate into the blob
    auto size = fs::file_size(path);
    fs::resize_file(path, size - 64);
    CHECK_THROWS_AS(Checkpoint::load(path), DataError);

    // bad magic
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.write("NOTJIGCL", 8);
    }
    CHECK_THROWS_AS(Checkpoint::load(path), DataError);
}

TEST_CASE("bounded queue: order, backpressure, close semantics") {
    BoundedQueue<int> q(2);
    std::thread producer([&] {
        for (int i = 0; i < 10; ++i) q.push(i); // blocks when 2 in flight
        q.close();
    });
    for (int i = 0; i < 10; ++i) {
        auto v = q.pop();
        REQUIRE(v.has_value());
        CHECK(*v == i);
    }
    CHECK_FALSE(q.pop().has_value()); // closed and drained
    producer.join();
}
