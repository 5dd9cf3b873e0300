#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace jigclu {

/// Incremental SHA-256. Used for config hashes, batch determinism checks and
/// checkpoint integrity.
class Sha256 {
public:
    Sha256() { reset(); }

    void reset();
    void update(const void* data, size_t len);

    template <class T>
    void update_value(const T& v) {
        update(&v, sizeof(T));
    }

    std::array<uint8_t, 32> digest();
    std::string hex_digest();

private:
    void process_block(const uint8_t* block);

    uint32_t state_[8];
    uint64_t total_len_ = 0;
    uint8_t buffer_[64];
    size_t buffer_len_ = 0;
};

std::string sha256_hex(const void* data, size_t len);
std::string sha256_hex(const std::string& s);
std::string sha256_hex(const std::vector<uint8_t>& v);

} // namespace jigclu
