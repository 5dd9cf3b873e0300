#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nn/tensor.hpp"

namespace jigclu {

/// Portable training snapshot: a JSON manifest (format version, step, epoch,
/// config hash, RNG derivation inputs, tensor table) followed by one
/// contiguous little-endian float32 blob. The tensor table's offsets/sizes
/// exactly tile the blob, and save -> load -> save is byte-identical.
struct Checkpoint {
    static constexpr int kFormatVersion = 1;

    int64_t step = 0;
    int epoch = 0; // next epoch to run on resume
    std::string config_hash;
    uint64_t global_seed = 0;
    std::vector<std::pair<std::string, Tensor<float>>> tensors; // stored order

    void save(const std::string& path) const;
    static Checkpoint load(const std::string& path);

    const Tensor<float>* find(const std::string& name) const;

    /// SHA-256 over the full serialized file content.
    std::string content_hash() const;
};

} // namespace jigclu
