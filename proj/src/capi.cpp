#include "jigclu.h"

#include <cstring>
#include <fstream>
#include <string>

#include "runner.hpp"

using namespace jigclu;

struct jigclu_context {
    ExperimentConfig cfg;
    std::string last_error;
    std::string config_hash;
};

namespace {

void copy_out(const std::string& s, char* dst, size_t cap) {
    if (!dst || cap == 0) return;
    const size_t n = std::min(s.size(), cap - 1);
    std::memcpy(dst, s.data(), n);
    dst[n] = '\0';
}

jigclu_status status_of(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return JIGCLU_CONFIG_ERROR;
    if (dynamic_cast<const DataError*>(&e)) return JIGCLU_DATA_ERROR;
    if (dynamic_cast<const NumericError*>(&e)) return JIGCLU_NUMERIC_ERROR;
    return JIGCLU_ERROR;
}

template <class Fn>
jigclu_status guarded(jigclu_context* ctx, Fn&& fn) {
    if (!ctx) return JIGCLU_ERROR;
    try {
        fn();
        ctx->last_error.clear();
        return JIGCLU_OK;
    } catch (const std::exception& e) {
        ctx->last_error = e.what();
        const auto* as_err = dynamic_cast<const Error*>(&e);
        return as_err ? status_of(e) : JIGCLU_ERROR;
    } catch (...) {
        ctx->last_error = "unknown error";
        return JIGCLU_ERROR;
    }
}

} // namespace

extern "C" {

const char* jigclu_version(void) { return "0.1.0"; }

jigclu_status jigclu_context_open(const char* config_path, const char* const* overrides,
                                  size_t n_overrides, jigclu_context** out_ctx,
                                  char* err, size_t err_len) {
    if (!out_ctx) return JIGCLU_ERROR;
    *out_ctx = nullptr;
    try {
        nlohmann::json j;
        if (config_path && *config_path) {
            std::ifstream f(config_path);
            require_config(f.good(), std::string("config: cannot open ") + config_path);
            try {
                f >> j;
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(std::string("config: parse error in ") + config_path +
                                  ": " + e.what());
            }
        } else {
            j = nlohmann::json::object();
        }
        for (size_t i = 0; i < n_overrides; ++i)
            apply_override(j, overrides[i]);
        auto ctx = new jigclu_context{ExperimentConfig::from_json(j), "", ""};
        ctx->config_hash = ctx->cfg.hash();
        *out_ctx = ctx;
        return JIGCLU_OK;
    } catch (const std::exception& e) {
        copy_out(e.what(), err, err_len);
        const auto* as_err = dynamic_cast<const Error*>(&e);
        return as_err ? status_of(e) : JIGCLU_ERROR;
    }
}

void jigclu_context_close(jigclu_context* ctx) { delete ctx; }

const char* jigclu_error(const jigclu_context* ctx) {
    return ctx ? ctx->last_error.c_str() : "null context";
}

const char* jigclu_config_hash(jigclu_context* ctx) {
    return ctx ? ctx->config_hash.c_str() : "";
}

jigclu_status jigclu_pretrain(jigclu_context* ctx, const char* resume_checkpoint,
                              char* final_checkpoint, size_t cap) {
    return guarded(ctx, [&] {
        std::optional<std::string> resume;
        if (resume_checkpoint && *resume_checkpoint) resume = resume_checkpoint;
        auto path = cmd_pretrain(ctx->cfg, resume);
        copy_out(path, final_checkpoint, cap);
    });
}

jigclu_status jigclu_linear_eval(jigclu_context* ctx, const char* checkpoint,
                                 char* report_json, size_t cap) {
    return guarded(ctx, [&] {
        require_config(checkpoint && *checkpoint, "linear-eval: checkpoint path required");
        auto report = cmd_linear_eval(ctx->cfg, checkpoint);
        copy_out(report.to_json().dump(), report_json, cap);
    });
}

jigclu_status jigclu_finetune(jigclu_context* ctx, const char* checkpoint,
                              char* report_json, size_t cap) {
    return guarded(ctx, [&] {
        require_config(checkpoint && *checkpoint, "finetune: checkpoint path required");
        auto report = cmd_finetune(ctx->cfg, checkpoint);
        copy_out(report.to_json().dump(), report_json, cap);
    });
}

jigclu_status jigclu_semi(jigclu_context* ctx, const char* checkpoint, char* report_json,
                          size_t cap) {
    return guarded(ctx, [&] {
        require_config(checkpoint && *checkpoint, "semi: checkpoint path required");
        auto report = cmd_semi(ctx->cfg, checkpoint);
        copy_out(report.to_json().dump(), report_json, cap);
    });
}

jigclu_status jigclu_inspect_batch(jigclu_context* ctx, uint64_t batch_seed) {
    return guarded(ctx, [&] { cmd_inspect_batch(ctx->cfg, batch_seed); });
}

jigclu_status jigclu_bench_input_format(jigclu_context* ctx, int steps, char* report_json,
                                        size_t cap) {
    return guarded(ctx, [&] {
        auto out = cmd_bench_input_format(ctx->cfg, steps);
        copy_out(out.dump(), report_json, cap);
    });
}

jigclu_status jigclu_ablate(jigclu_context* ctx) {
    return guarded(ctx, [&] { cmd_ablate(ctx->cfg); });
}

} // extern "C"
