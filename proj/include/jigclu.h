/* Public C interface of the jigsaw-clustering pretraining toolkit.
 *
 * Usage: create a context from a JSON config file (plus optional
 * "key.path=value" overrides), run commands against it, read errors from
 * jigclu_error(), destroy it. Status codes double as process exit codes:
 * 0 ok, 2 config error, 3 data error, 4 numerical abort, 1 anything else.
 * All artifacts are written under the configured output directory, which the
 * JIGCLU_OUT_DIR environment variable overrides.
 */
#ifndef JIGCLU_H
#define JIGCLU_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define JIGCLU_API __declspec(dllexport)
#else
#define JIGCLU_API __attribute__((visibility("default")))
#endif

typedef enum jigclu_status {
    JIGCLU_OK = 0,
    JIGCLU_ERROR = 1,
    JIGCLU_CONFIG_ERROR = 2,
    JIGCLU_DATA_ERROR = 3,
    JIGCLU_NUMERIC_ERROR = 4
} jigclu_status;

typedef struct jigclu_context jigclu_context;

JIGCLU_API const char* jigclu_version(void);

/* Creates a context from a config file. `overrides` is an array of
 * `key.path=value` strings applied on top of the file (pass NULL/0 for none).
 * On failure returns the status and, when err/err_len are given, a message. */
JIGCLU_API jigclu_status jigclu_context_open(const char* config_path,
                                             const char* const* overrides,
                                             size_t n_overrides,
                                             jigclu_context** out_ctx,
                                             char* err, size_t err_len);

JIGCLU_API void jigclu_context_close(jigclu_context* ctx);

/* Message for the most recent failed call on this context. */
JIGCLU_API const char* jigclu_error(const jigclu_context* ctx);

/* SHA-256 hash of the canonical config serialization (hex, NUL-terminated). */
JIGCLU_API const char* jigclu_config_hash(jigclu_context* ctx);

/* Pretrains on the configured dataset. resume_checkpoint may be NULL.
 * On success, when final_checkpoint/cap are given, the final checkpoint path
 * is copied out. */
JIGCLU_API jigclu_status jigclu_pretrain(jigclu_context* ctx,
                                         const char* resume_checkpoint,
                                         char* final_checkpoint, size_t cap);

/* Evaluation protocols; each writes a JSON report into the output directory
 * and, when report_json/cap are given, copies the report out. */
JIGCLU_API jigclu_status jigclu_linear_eval(jigclu_context* ctx, const char* checkpoint,
                                            char* report_json, size_t cap);
JIGCLU_API jigclu_status jigclu_finetune(jigclu_context* ctx, const char* checkpoint,
                                         char* report_json, size_t cap);
JIGCLU_API jigclu_status jigclu_semi(jigclu_context* ctx, const char* checkpoint,
                                     char* report_json, size_t cap);

/* Dumps one built batch: montage_<j>.png per montage plus labels.json. */
JIGCLU_API jigclu_status jigclu_inspect_batch(jigclu_context* ctx, uint64_t batch_seed);

/* Times the three input formats over `steps` steps; writes bench.json. */
JIGCLU_API jigclu_status jigclu_bench_input_format(jigclu_context* ctx, int steps,
                                                   char* report_json, size_t cap);

/* Runs the ablation sweep (m, overlap, augmentation position, branches). */
JIGCLU_API jigclu_status jigclu_ablate(jigclu_context* ctx);

#ifdef __cplusplus
}
#endif

#endif /* JIGCLU_H */
