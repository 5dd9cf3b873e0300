#include "io/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "core/sha256.hpp"

namespace jigclu {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        require_config(known.count(it.key()) == 1,
                       "config: unknown key '" + where + it.key() + "'");
}

template <class T>
void get_to(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        j.at(key).get_to(out);
    } catch (const json::exception& e) {
        throw ConfigError("config: bad value for '" + where + key + "': " + e.what());
    }
}

void get_to(const json& j, const char* key, std::array<float, 3>& out,
            const std::string& where) {
    if (!j.contains(key)) return;
    std::vector<float> v;
    try {
        j.at(key).get_to(v);
    } catch (const json::exception& e) {
        throw ConfigError("config: bad value for '" + where + key + "': " + e.what());
    }
    require_config(v.size() == 3, "config: '" + where + key + "' needs 3 entries");
    for (int i = 0; i < 3; ++i) out[size_t(i)] = v[size_t(i)];
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    require_config(j.is_object(), "config: root must be a JSON object");
    reject_unknown(j, {"dataset", "task", "loss", "model", "optim", "io", "aug", "eval"},
                   "");
    ExperimentConfig c;

    if (j.contains("dataset")) {
        const auto& d = j.at("dataset");
        reject_unknown(d, {"name", "path", "format"}, "dataset.");
        get_to(d, "name", c.dataset.name, "dataset.");
        get_to(d, "path", c.dataset.path, "dataset.");
        get_to(d, "format", c.dataset.format, "dataset.");
    }
    if (j.contains("task")) {
        const auto& t = j.at("task");
        reject_unknown(t, {"m", "overlap_ratio", "side", "input_format", "aug_position"},
                       "task.");
        get_to(t, "m", c.task.m, "task.");
        get_to(t, "overlap_ratio", c.task.overlap_ratio, "task.");
        get_to(t, "side", c.task.side, "task.");
        get_to(t, "input_format", c.task.input_format, "task.");
        get_to(t, "aug_position", c.task.aug_position, "task.");
    }
    if (j.contains("loss")) {
        const auto& l = j.at("loss");
        reject_unknown(l, {"tau", "alpha", "beta", "clustering_enabled", "location_enabled"},
                       "loss.");
        get_to(l, "tau", c.loss.tau, "loss.");
        get_to(l, "alpha", c.loss.alpha, "loss.");
        get_to(l, "beta", c.loss.beta, "loss.");
        get_to(l, "clustering_enabled", c.loss.clustering_enabled, "loss.");
        get_to(l, "location_enabled", c.loss.location_enabled, "loss.");
    }
    if (j.contains("model")) {
        const auto& m = j.at("model");
        reject_unknown(m, {"backbone", "embed_dim", "input_mean", "input_std"}, "model.");
        get_to(m, "backbone", c.model.backbone, "model.");
        get_to(m, "embed_dim", c.model.embed_dim, "model.");
        get_to(m, "input_mean", c.model.input_mean, "model.");
        get_to(m, "input_std", c.model.input_std, "model.");
    }
    if (j.contains("optim")) {
        const auto& o = j.at("optim");
        reject_unknown(o, {"lr0", "momentum", "weight_decay", "epochs", "batch_size", "seed"},
                       "optim.");
        get_to(o, "lr0", c.optim.lr0, "optim.");
        get_to(o, "momentum", c.optim.momentum, "optim.");
        get_to(o, "weight_decay", c.optim.weight_decay, "optim.");
        get_to(o, "epochs", c.optim.epochs, "optim.");
        get_to(o, "batch_size", c.optim.batch_size, "optim.");
        get_to(o, "seed", c.optim.seed, "optim.");
    }
    if (j.contains("io")) {
        const auto& i = j.at("io");
        reject_unknown(
            i, {"out_dir", "log_interval", "checkpoint_interval", "num_workers", "queue_capacity"},
            "io.");
        get_to(i, "out_dir", c.io.out_dir, "io.");
        get_to(i, "log_interval", c.io.log_interval, "io.");
        get_to(i, "checkpoint_interval", c.io.checkpoint_interval, "io.");
        get_to(i, "num_workers", c.io.num_workers, "io.");
        get_to(i, "queue_capacity", c.io.queue_capacity, "io.");
    }
    if (j.contains("aug")) {
        const auto& a = j.at("aug");
        reject_unknown(a,
                       {"crop_enabled", "crop_scale_lo", "crop_scale_hi", "crop_aspect_lo",
                        "crop_aspect_hi", "flip_prob", "jitter_prob", "jitter_brightness",
                        "jitter_contrast", "jitter_saturation", "jitter_hue",
                        "grayscale_prob", "blur_prob", "blur_sigma_lo", "blur_sigma_hi"},
                       "aug.");
        get_to(a, "crop_enabled", c.aug.crop_enabled, "aug.");
        get_to(a, "crop_scale_lo", c.aug.crop_scale_lo, "aug.");
        get_to(a, "crop_scale_hi", c.aug.crop_scale_hi, "aug.");
        get_to(a, "crop_aspect_lo", c.aug.crop_aspect_lo, "aug.");
        get_to(a, "crop_aspect_hi", c.aug.crop_aspect_hi, "aug.");
        get_to(a, "flip_prob", c.aug.flip_prob, "aug.");
        get_to(a, "jitter_prob", c.aug.jitter_prob, "aug.");
        get_to(a, "jitter_brightness", c.aug.jitter_brightness, "aug.");
        get_to(a, "jitter_contrast", c.aug.jitter_contrast, "aug.");
        get_to(a, "jitter_saturation", c.aug.jitter_saturation, "aug.");
        get_to(a, "jitter_hue", c.aug.jitter_hue, "aug.");
        get_to(a, "grayscale_prob", c.aug.grayscale_prob, "aug.");
        get_to(a, "blur_prob", c.aug.blur_prob, "aug.");
        get_to(a, "blur_sigma_lo", c.aug.blur_sigma_lo, "aug.");
        get_to(a, "blur_sigma_hi", c.aug.blur_sigma_hi, "aug.");
    }
    if (j.contains("eval")) {
        const auto& e = j.at("eval");
        reject_unknown(e,
                       {"epochs", "lr", "finetune_lr", "label_fraction", "nested",
                        "batch_size", "seed"},
                       "eval.");
        get_to(e, "epochs", c.eval.epochs, "eval.");
        get_to(e, "lr", c.eval.lr, "eval.");
        get_to(e, "finetune_lr", c.eval.finetune_lr, "eval.");
        get_to(e, "label_fraction", c.eval.label_fraction, "eval.");
        get_to(e, "nested", c.eval.nested, "eval.");
        get_to(e, "batch_size", c.eval.batch_size, "eval.");
        get_to(e, "seed", c.eval.seed, "eval.");
    }

    // environment override for the output directory
    if (const char* env = std::getenv("JIGCLU_OUT_DIR"); env && *env) c.io.out_dir = env;

    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
    std::ifstream f(path);
    require_config(f.good(), "config: cannot open " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config: parse error in " + path + ": " + e.what());
    }
    return from_json(j);
}

void ExperimentConfig::validate() const {
    const std::set<std::string> formats = {"cifar10", "cifar100", "image_folder", "synthetic"};
    require_config(formats.count(dataset.format) == 1,
                   "config: dataset.format must be one of cifar10|cifar100|image_folder|synthetic");
    require_config(task.m >= 2, "config: task.m must be >= 2");
    require_config(task.overlap_ratio >= 0.0 && task.overlap_ratio < 1.0,
                   "config: task.overlap_ratio must be in [0,1)");
    require_config(task.side >= 4 * task.m, "config: task.side too small for task.m");
    require_config(task.side % task.m == 0,
                   "config: task.side must be divisible by task.m");
    (void)input_format_from_string(task.input_format);
    (void)aug_position_from_string(task.aug_position);
    loss.validate();
    aug.validate();
    require_config(model.embed_dim >= 1, "config: model.embed_dim must be positive");
    for (float s : model.input_std)
        require_config(s > 0.0f, "config: model.input_std entries must be positive");
    require_config(optim.lr0 > 0 && optim.momentum >= 0 && optim.momentum < 1 &&
                       optim.weight_decay >= 0,
                   "config: bad optimizer settings");
    require_config(optim.epochs >= 0 && optim.batch_size >= 2,
                   "config: optim.epochs must be >= 0 and optim.batch_size >= 2");
    require_config(io.log_interval >= 1 && io.checkpoint_interval >= 1,
                   "config: io intervals must be >= 1");
    require_config(io.num_workers >= 1 && io.queue_capacity >= 1,
                   "config: io.num_workers and io.queue_capacity must be >= 1");
    require_config(eval.epochs >= 0 && eval.lr > 0 && eval.finetune_lr > 0,
                   "config: bad eval settings");
    require_config(eval.label_fraction > 0.0 && eval.label_fraction <= 1.0,
                   "config: eval.label_fraction must be in (0,1]");
}

json ExperimentConfig::to_json() const {
    json j;
    j["dataset"] = {{"name", dataset.name}, {"path", dataset.path}, {"format", dataset.format}};
    j["task"] = {{"m", task.m},
                 {"overlap_ratio", task.overlap_ratio},
                 {"side", task.side},
                 {"input_format", task.input_format},
                 {"aug_position", task.aug_position}};
    j["loss"] = {{"tau", loss.tau},
                 {"alpha", loss.alpha},
                 {"beta", loss.beta},
                 {"clustering_enabled", loss.clustering_enabled},
                 {"location_enabled", loss.location_enabled}};
    j["model"] = {{"backbone", model.backbone},
                  {"embed_dim", model.embed_dim},
                  {"input_mean", std::vector<float>(model.input_mean.begin(), model.input_mean.end())},
                  {"input_std", std::vector<float>(model.input_std.begin(), model.input_std.end())}};
    j["optim"] = {{"lr0", optim.lr0},
                  {"momentum", optim.momentum},
                  {"weight_decay", optim.weight_decay},
                  {"epochs", optim.epochs},
                  {"batch_size", optim.batch_size},
                  {"seed", optim.seed}};
    j["io"] = {{"out_dir", io.out_dir},
               {"log_interval", io.log_interval},
               {"checkpoint_interval", io.checkpoint_interval},
               {"num_workers", io.num_workers},
               {"queue_capacity", io.queue_capacity}};
    j["aug"] = {{"crop_enabled", aug.crop_enabled},
                {"crop_scale_lo", aug.crop_scale_lo},
                {"crop_scale_hi", aug.crop_scale_hi},
                {"crop_aspect_lo", aug.crop_aspect_lo},
                {"crop_aspect_hi", aug.crop_aspect_hi},
                {"flip_prob", aug.flip_prob},
                {"jitter_prob", aug.jitter_prob},
                {"jitter_brightness", aug.jitter_brightness},
                {"jitter_contrast", aug.jitter_contrast},
                {"jitter_saturation", aug.jitter_saturation},
                {"jitter_hue", aug.jitter_hue},
                {"grayscale_prob", aug.grayscale_prob},
                {"blur_prob", aug.blur_prob},
                {"blur_sigma_lo", aug.blur_sigma_lo},
                {"blur_sigma_hi", aug.blur_sigma_hi}};
    j["eval"] = {{"epochs", eval.epochs},
                 {"lr", eval.lr},
                 {"finetune_lr", eval.finetune_lr},
                 {"label_fraction", eval.label_fraction},
                 {"nested", eval.nested},
                 {"batch_size", eval.batch_size},
                 {"seed", eval.seed}};
    return j;
}

std::string ExperimentConfig::hash() const { return sha256_hex(to_json().dump()); }

GridSpec ExperimentConfig::grid() const {
    return compute_grid(task.side, task.m, task.overlap_ratio);
}

AugPolicy ExperimentConfig::aug_policy() const {
    AugPolicy p;
    p.position = aug_position_from_string(task.aug_position);
    p.ops = aug;
    p.output_side = grid().slot_side;
    return p;
}

void apply_override(json& j, const std::string& assignment) {
    auto eq = assignment.find('=');
    require_config(eq != std::string::npos && eq > 0,
                   "override must look like key.path=value: " + assignment);
    std::string path = assignment.substr(0, eq);
    std::string value = assignment.substr(eq + 1);

    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::exception&) {
        parsed = value; // plain string
    }

    try {
        json* node = &j;
        size_t start = 0;
        for (;;) {
            auto dot = path.find('.', start);
            std::string key =
                path.substr(start, dot == std::string::npos ? dot : dot - start);
            require_config(!key.empty(), "override has an empty path segment: " + assignment);
            if (dot == std::string::npos) {
                (*node)[key] = parsed;
                return;
            }
            node = &(*node)[key];
            start = dot + 1;
        }
    } catch (const json::exception& e) {
        throw ConfigError("override '" + assignment + "' does not fit the config tree: " +
                          e.what());
    }
}

} // namespace jigclu
