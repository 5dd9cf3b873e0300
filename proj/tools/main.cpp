// Command-line front end. Talks to the toolkit exclusively through the
// public C API in jigclu.h; exit code == jigclu_status.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jigclu.h"

namespace {

struct ContextGuard {
    jigclu_context* ctx = nullptr;
    ~ContextGuard() { jigclu_context_close(ctx); }
};

int open_context(const std::string& config, const std::vector<std::string>& sets,
                 ContextGuard& guard) {
    std::vector<const char*> overrides;
    overrides.reserve(sets.size());
    for (const auto& s : sets) overrides.push_back(s.c_str());
    char err[512] = {0};
    auto status = jigclu_context_open(config.empty() ? nullptr : config.c_str(),
                                      overrides.data(), overrides.size(), &guard.ctx,
                                      err, sizeof(err));
    if (status != JIGCLU_OK) std::fprintf(stderr, "error: %s\n", err);
    return int(status);
}

int report_failure(jigclu_context* ctx, jigclu_status status) {
    if (status != JIGCLU_OK) std::fprintf(stderr, "error: %s\n", jigclu_error(ctx));
    return int(status);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"jigsaw-clustering self-supervised pretraining toolkit"};
    app.require_subcommand(1);

    std::string config;
    std::vector<std::string> sets;
    app.add_option("-c,--config", config, "JSON config file");
    app.add_option("--set", sets, "override config entries as key.path=value")
        ->take_all();

    std::string checkpoint;
    std::string resume;
    uint64_t batch_seed = 0;
    int bench_steps = 10;

    auto* pretrain = app.add_subcommand("pretrain", "train on the jigsaw pretext task");
    pretrain->add_option("--resume", resume, "checkpoint to resume from");

    auto* linear = app.add_subcommand("linear-eval", "linear probe on a frozen backbone");
    linear->add_option("checkpoint", checkpoint, "pretraining checkpoint")->required();

    auto* ft = app.add_subcommand("finetune", "fine-tune backbone + fresh classifier");
    ft->add_option("checkpoint", checkpoint, "pretraining checkpoint")->required();

    auto* semi = app.add_subcommand("semi", "class-balanced semi-supervised fine-tuning");
    semi->add_option("checkpoint", checkpoint, "pretraining checkpoint")->required();

    auto* inspect = app.add_subcommand("inspect-batch", "dump one built batch as PNGs + JSON");
    inspect->add_option("--seed", batch_seed, "batch seed")->default_val(7);

    auto* bench = app.add_subcommand("bench-input-format",
                                     "time montage vs small_patch vs scaled_up");
    bench->add_option("--steps", bench_steps, "timed steps per format")->default_val(10);

    app.add_subcommand("ablate", "sweep m / overlap / aug position / branches");

    CLI11_PARSE(app, argc, argv);

    ContextGuard guard;
    if (int rc = open_context(config, sets, guard); rc != 0) return rc;

    if (pretrain->parsed()) {
        char final_path[1024] = {0};
        auto status = jigclu_pretrain(guard.ctx, resume.empty() ? nullptr : resume.c_str(),
                                      final_path, sizeof(final_path));
        return report_failure(guard.ctx, status);
    }
    if (linear->parsed())
        return report_failure(guard.ctx,
                              jigclu_linear_eval(guard.ctx, checkpoint.c_str(), nullptr, 0));
    if (ft->parsed())
        return report_failure(guard.ctx,
                              jigclu_finetune(guard.ctx, checkpoint.c_str(), nullptr, 0));
    if (semi->parsed())
        return report_failure(guard.ctx,
                              jigclu_semi(guard.ctx, checkpoint.c_str(), nullptr, 0));
    if (inspect->parsed())
        return report_failure(guard.ctx, jigclu_inspect_batch(guard.ctx, batch_seed));
    if (bench->parsed())
        return report_failure(
            guard.ctx, jigclu_bench_input_format(guard.ctx, bench_steps, nullptr, 0));
    return report_failure(guard.ctx, jigclu_ablate(guard.ctx));
}
