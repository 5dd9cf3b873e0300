#include "runner.hpp"

#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "core/png.hpp"
#include "train/trainer.hpp"

namespace jigclu {

namespace fs = std::filesystem;

namespace {

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream f(path);
    require_data(f.good(), "cannot open for write: " + path);
    f << j.dump(2) << "\n";
    require_data(f.good(), "write failed: " + path);
}

void write_config_copy(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.io.out_dir);
    nlohmann::json j = cfg.to_json();
    j["config_hash"] = cfg.hash();
    write_json_file((fs::path(cfg.io.out_dir) / "config.json").string(), j);
}

Dataset load_train(const ExperimentConfig& cfg) {
    return load_dataset(cfg.dataset.format, cfg.dataset.path, cfg.task.side, Split::train);
}

Dataset load_test(const ExperimentConfig& cfg) {
    return load_dataset(cfg.dataset.format, cfg.dataset.path, cfg.task.side, Split::test);
}

JigsawNetwork<float> network_from_checkpoint(const ExperimentConfig& cfg,
                                             const std::string& path) {
    auto ckpt = Checkpoint::load(path);
    auto net = build_network(cfg);
    restore_network(ckpt, net);
    return net;
}

void write_report(const ExperimentConfig& cfg, const EvalReport& report,
                  const std::string& filename) {
    write_json_file((fs::path(cfg.io.out_dir) / filename).string(), report.to_json());
    std::printf("%s\n", report.summary_line().c_str());
}

} // namespace

std::string cmd_pretrain(const ExperimentConfig& cfg,
                         const std::optional<std::string>& resume_from) {
    write_config_copy(cfg);
    auto data = load_train(cfg);
    auto net = build_network(cfg);
    std::optional<Checkpoint> resume;
    if (resume_from) resume = Checkpoint::load(*resume_from);
    auto result = train_loop(cfg, data, net, cfg.io.out_dir,
                             resume ? &*resume : nullptr);
    std::printf("pretrain: %lld steps, final loss %.4f, checkpoint %s\n",
                (long long)result.steps, result.last_loss,
                result.final_checkpoint.c_str());
    return result.final_checkpoint;
}

EvalReport cmd_linear_eval(const ExperimentConfig& cfg, const std::string& checkpoint) {
    write_config_copy(cfg);
    auto net = network_from_checkpoint(cfg, checkpoint);
    auto train = load_train(cfg);
    auto test = load_test(cfg);
    auto report = linear_eval(net, train, test, cfg);
    write_report(cfg, report, "report_linear.json");
    return report;
}

EvalReport cmd_finetune(const ExperimentConfig& cfg, const std::string& checkpoint) {
    write_config_copy(cfg);
    auto net = network_from_checkpoint(cfg, checkpoint);
    auto train = load_train(cfg);
    auto test = load_test(cfg);
    auto report = finetune(net, train, test, cfg);
    write_report(cfg, report, "report_finetune.json");
    return report;
}

EvalReport cmd_semi(const ExperimentConfig& cfg, const std::string& checkpoint) {
    write_config_copy(cfg);
    auto net = network_from_checkpoint(cfg, checkpoint);
    auto train = load_train(cfg);
    auto test = load_test(cfg);
    auto subset = semi_split(train, cfg.eval.label_fraction, cfg.eval.seed, cfg.eval.nested);
    auto report = finetune(net, train, test, cfg, subset);
    write_report(cfg, report, "report_semi.json");
    return report;
}

void cmd_inspect_batch(const ExperimentConfig& cfg, uint64_t batch_seed) {
    write_config_copy(cfg);
    auto data = load_train(cfg);
    const int n = cfg.optim.batch_size;
    require_data(data.size() >= size_t(n), "inspect-batch: dataset smaller than a batch");

    // seeded selection of the n source images, then the standard pipeline
    auto pick = RngStream::derive(batch_seed, {kTagShuffle, 0});
    std::vector<size_t> order(data.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[pick.uniform_int(i)]);
    order.resize(size_t(n));

    auto stream = RngStream::derive(batch_seed, {kTagWorker, 0, 0});
    auto batch = build_batch(data.images(order), cfg.grid(), cfg.aug_policy(),
                             InputFormat::montage, stream);
    batch.batch_seed = batch_seed;

    for (int j = 0; j < n; ++j)
        write_png((fs::path(cfg.io.out_dir) / ("montage_" + std::to_string(j) + ".png"))
                      .string(),
                  batch.images[size_t(j)]);

    nlohmann::json sidecar;
    sidecar["batch_seed"] = batch_seed;
    sidecar["grid"] = {{"m", batch.grid.m},
                       {"image_side", batch.grid.image_side},
                       {"overlap", batch.grid.overlap},
                       {"patch_side", batch.grid.patch_side},
                       {"slot_side", batch.grid.slot_side},
                       {"starts", batch.grid.starts}};
    sidecar["permutation"] = batch.permutation;
    sidecar["cluster_ids"] = batch.cluster_ids;
    sidecar["location_ids"] = batch.location_ids;
    sidecar["source_indices"] = batch.source_indices;
    sidecar["config_hash"] = cfg.hash();
    write_json_file((fs::path(cfg.io.out_dir) / "labels.json").string(), sidecar);
    std::printf("inspect-batch: wrote %d montages + labels.json to %s\n", n,
                cfg.io.out_dir.c_str());
}

namespace {

// One bench cell, run inside a forked child so peak RSS is per-mode.
nlohmann::json bench_mode(const ExperimentConfig& base, InputFormat format, int steps) {
    ExperimentConfig cfg = base;
    cfg.task.input_format = to_string(format);
    auto data = load_train(cfg);
    auto net = build_network(cfg);
    SgdOptimizer<float> opt;
    auto grid = cfg.grid();
    auto policy = cfg.aug_policy();
    auto stream = RngStream::derive(cfg.optim.seed, {kTagWorker, 0, 0});
    std::vector<size_t> idx(static_cast<size_t>(cfg.optim.batch_size), {});

    auto run_step = [&](int64_t b) {
        for (size_t i = 0; i < idx.size(); ++i)
            idx[i] = (size_t(b) * idx.size() + i) % data.size();
        auto batch = build_batch(data.images(idx), grid, policy, format, stream);
        train_step(net, batch, cfg.loss, opt, 0.01, cfg.optim.momentum,
                   cfg.optim.weight_decay);
    };

    run_step(0); // warmup (allocations, caches)
    auto t0 = std::chrono::steady_clock::now();
    for (int b = 1; b <= steps; ++b) run_step(b);
    auto t1 = std::chrono::steady_clock::now();
    const double sec = std::chrono::duration<double>(t1 - t0).count() / steps;

    return {{"format", to_string(format)}, {"sec_per_step", sec}};
}

} // namespace

nlohmann::json cmd_bench_input_format(const ExperimentConfig& cfg, int steps) {
    write_config_copy(cfg);
    require_config(steps >= 1, "bench: steps must be >= 1");

    nlohmann::json rows = nlohmann::json::array();
    for (InputFormat format :
         {InputFormat::small_patch, InputFormat::montage, InputFormat::scaled_up}) {
        int pipe_fd[2];
        require(pipe(pipe_fd) == 0, "bench: pipe failed");
        pid_t pid = fork();
        require(pid >= 0, "bench: fork failed");
        if (pid == 0) {
            close(pipe_fd[0]);
            int code = 0;
            try {
                auto row = bench_mode(cfg, format, steps);
                auto text = row.dump();
                ssize_t n = write(pipe_fd[1], text.data(), text.size());
                if (n != ssize_t(text.size())) code = 1;
            } catch (...) {
                code = 1;
            }
            close(pipe_fd[1]);
            _exit(code);
        }
        close(pipe_fd[1]);
        std::string text;
        char buf[4096];
        ssize_t got;
        while ((got = read(pipe_fd[0], buf, sizeof(buf))) > 0) text.append(buf, size_t(got));
        close(pipe_fd[0]);
        int status = 0;
        struct rusage usage {};
        require(wait4(pid, &status, 0, &usage) == pid, "bench: wait failed");
        require(WIFEXITED(status) && WEXITSTATUS(status) == 0,
                "bench: child failed for format " + to_string(format));
        auto row = nlohmann::json::parse(text);
        row["peak_rss_kb"] = usage.ru_maxrss;
        rows.push_back(row);
    }

    nlohmann::json out;
    out["steps"] = steps;
    out["config_hash"] = cfg.hash();
    out["rows"] = rows;
    double montage = 0, small = 0, scaled = 0;
    for (const auto& r : rows) {
        const double s = r.at("sec_per_step").get<double>();
        const std::string f = r.at("format").get<std::string>();
        if (f == "montage") montage = s;
        if (f == "small_patch") small = s;
        if (f == "scaled_up") scaled = s;
    }
    out["scaled_up_over_montage"] = scaled / montage;
    out["montage_over_small_patch"] = montage / small;
    write_json_file((fs::path(cfg.io.out_dir) / "bench.json").string(), out);

    std::printf("%-12s %12s %12s\n", "format", "sec/step", "peak RSS MB");
    for (const auto& r : rows)
        std::printf("%-12s %12.4f %12.1f\n", r.at("format").get<std::string>().c_str(),
                    r.at("sec_per_step").get<double>(),
                    r.at("peak_rss_kb").get<double>() / 1024.0);
    std::printf("scaled_up / montage    = %.2fx\n",
                out["scaled_up_over_montage"].get<double>());
    std::printf("montage / small_patch  = %.2fx\n",
                out["montage_over_small_patch"].get<double>());
    return out;
}

nlohmann::json cmd_ablate(const ExperimentConfig& cfg) {
    write_config_copy(cfg);

    struct Cell {
        std::string group, label;
        ExperimentConfig config;
    };
    std::vector<Cell> cells;

    for (int m : {2, 3, 4}) {
        ExperimentConfig c = cfg;
        c.task.m = m;
        c.task.side = ((cfg.task.side + m - 1) / m) * m; // smallest multiple >= side
        cells.push_back({"m", "m=" + std::to_string(m), c});
    }
    for (double ratio : {0.0, 0.15, 0.3, 0.45}) {
        ExperimentConfig c = cfg;
        c.task.overlap_ratio = ratio;
        char label[32];
        std::snprintf(label, sizeof(label), "ratio=%.2f", ratio);
        cells.push_back({"overlap", label, c});
    }
    for (const char* pos : {"before_split", "split_during_aug", "after_split"}) {
        ExperimentConfig c = cfg;
        c.task.aug_position = pos;
        cells.push_back({"aug_position", pos, c});
    }
    {
        ExperimentConfig c = cfg;
        c.loss.clustering_enabled = true;
        c.loss.location_enabled = false;
        cells.push_back({"branches", "clustering_only", c});
        c.loss.clustering_enabled = false;
        c.loss.location_enabled = true;
        cells.push_back({"branches", "location_only", c});
        c.loss.clustering_enabled = true;
        cells.push_back({"branches", "both", c});
    }

    nlohmann::json rows = nlohmann::json::array();
    std::printf("%-14s %-18s %8s %10s\n", "group", "cell", "top1", "loss");
    for (auto& cell : cells) {
        cell.config.io.out_dir =
            (fs::path(cfg.io.out_dir) / ("ablate_" + cell.group + "_" + cell.label))
                .string();
        cell.config.validate();
        auto train = load_train(cell.config);
        auto test = load_test(cell.config);
        auto net = build_network(cell.config);
        auto result = train_loop(cell.config, train, net, cell.config.io.out_dir);
        auto report = linear_eval(net, train, test, cell.config);
        rows.push_back({{"group", cell.group},
                        {"cell", cell.label},
                        {"top1", report.top1},
                        {"final_loss", result.last_loss},
                        {"config_hash", cell.config.hash()}});
        std::printf("%-14s %-18s %8.4f %10.4f\n", cell.group.c_str(), cell.label.c_str(),
                    report.top1, result.last_loss);
    }

    nlohmann::json out;
    out["config_hash"] = cfg.hash();
    out["rows"] = rows;
    write_json_file((fs::path(cfg.io.out_dir) / "ablate.json").string(), out);

    std::ofstream csv((fs::path(cfg.io.out_dir) / "ablate.csv").string());
    csv << "group,cell,top1,final_loss\n";
    for (const auto& r : rows)
        csv << r.at("group").get<std::string>() << "," << r.at("cell").get<std::string>()
            << "," << r.at("top1").get<double>() << "," << r.at("final_loss").get<double>()
            << "\n";
    return out;
}

} // namespace jigclu
