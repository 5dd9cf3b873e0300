#include "train/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "core/error.hpp"
#include "core/sha256.hpp"

namespace jigclu {

static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs are little-endian float32");

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'J', 'G', 'C', 'K', 'P', 'T', '0', '1'};

std::vector<uint8_t> serialize(const Checkpoint& c) {
    json manifest;
    manifest["format_version"] = Checkpoint::kFormatVersion;
    manifest["step"] = c.step;
    manifest["epoch"] = c.epoch;
    manifest["config_hash"] = c.config_hash;
    manifest["rng"] = {{"global_seed", c.global_seed}, {"next_epoch", c.epoch}};
    json table = json::array();
    uint64_t offset = 0;
    for (const auto& [name, tensor] : c.tensors) {
        const uint64_t nbytes = uint64_t(tensor.numel()) * sizeof(float);
        table.push_back({{"name", name},
                         {"shape", tensor.shape},
                         {"offset", offset},
                         {"nbytes", nbytes}});
        offset += nbytes;
    }
    manifest["tensors"] = table;

    const std::string text = manifest.dump();
    std::vector<uint8_t> out;
    out.reserve(16 + text.size() + offset);
    out.insert(out.end(), kMagic, kMagic + 8);
    uint64_t len = text.size();
    const uint8_t* lp = reinterpret_cast<const uint8_t*>(&len);
    out.insert(out.end(), lp, lp + 8);
    out.insert(out.end(), text.begin(), text.end());
    for (const auto& [name, tensor] : c.tensors) {
        const uint8_t* p = reinterpret_cast<const uint8_t*>(tensor.ptr());
        out.insert(out.end(), p, p + size_t(tensor.numel()) * sizeof(float));
    }
    return out;
}

} // namespace

void Checkpoint::save(const std::string& path) const {
    auto bytes = serialize(*this);
    // write to a temp name then rename, so readers never see a torn file
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        require_data(f.good(), "checkpoint: cannot open " + tmp);
        f.write(reinterpret_cast<const char*>(bytes.data()), long(bytes.size()));
        require_data(f.good(), "checkpoint: write failed: " + tmp);
    }
    require_data(std::rename(tmp.c_str(), path.c_str()) == 0,
                 "checkpoint: rename failed: " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    require_data(f.good(), "checkpoint: cannot open " + path);
    f.seekg(0, std::ios::end);
    const size_t total = size_t(f.tellg());
    f.seekg(0);
    std::vector<uint8_t> bytes(total);
    f.read(reinterpret_cast<char*>(bytes.data()), long(total));
    require_data(f.good(), "checkpoint: short read: " + path);

    require_data(total >= 16 && std::memcmp(bytes.data(), kMagic, 8) == 0,
                 "checkpoint: bad magic in " + path);
    uint64_t len = 0;
    std::memcpy(&len, &bytes[8], 8);
    require_data(16 + len <= total, "checkpoint: truncated manifest in " + path);

    json manifest;
    try {
        manifest = json::parse(bytes.begin() + 16, bytes.begin() + 16 + long(len));
    } catch (const json::exception& e) {
        throw DataError(std::string("checkpoint: manifest parse error: ") + e.what());
    }
    require_data(manifest.value("format_version", -1) == kFormatVersion,
                 "checkpoint: unsupported format version in " + path);

    Checkpoint c;
    c.step = manifest.at("step").get<int64_t>();
    c.epoch = manifest.at("epoch").get<int>();
    c.config_hash = manifest.at("config_hash").get<std::string>();
    c.global_seed = manifest.at("rng").at("global_seed").get<uint64_t>();

    const size_t blob_base = 16 + size_t(len);
    const size_t blob_size = total - blob_base;
    uint64_t expect_offset = 0;
    for (const auto& entry : manifest.at("tensors")) {
        const std::string name = entry.at("name").get<std::string>();
        const std::vector<int> shape = entry.at("shape").get<std::vector<int>>();
        const uint64_t offset = entry.at("offset").get<uint64_t>();
        const uint64_t nbytes = entry.at("nbytes").get<uint64_t>();
        // tiling invariant: contiguous, in order, no gaps
        require_data(offset == expect_offset,
                     "checkpoint: tensor table does not tile the blob (" + name + ")");
        expect_offset = offset + nbytes;
        require_data(expect_offset <= blob_size, "checkpoint: blob too small for " + name);
        Tensor<float> t(shape);
        require_data(uint64_t(t.numel()) * sizeof(float) == nbytes,
                     "checkpoint: shape/nbytes mismatch for " + name);
        std::memcpy(t.ptr(), &bytes[blob_base + offset], nbytes);
        c.tensors.emplace_back(name, std::move(t));
    }
    require_data(expect_offset == blob_size, "checkpoint: trailing bytes in blob");
    return c;
}

const Tensor<float>* Checkpoint::find(const std::string& name) const {
    for (const auto& [n, t] : tensors)
        if (n == name) return &t;
    return nullptr;
}

std::string Checkpoint::content_hash() const {
    auto bytes = serialize(*this);
    return sha256_hex(bytes.data(), bytes.size());
}

} // namespace jigclu
