#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/image.hpp"

namespace jigclu {

/// Minimal lossless PNG support, enough for batch dumps and folder datasets:
/// writes 8-bit RGB (stored deflate blocks), reads 8-bit gray/RGB(A) with any
/// standard deflate stream. Interlaced and palette images are rejected.
void write_png(const std::string& path, const Image& img);
Image read_png(const std::string& path);

/// Binary PPM (P6), used by tests and accepted by the folder loader.
void write_ppm(const std::string& path, const Image& img);
Image read_ppm(const std::string& path);

/// Decode by file extension (.png, .ppm). Throws DataError on anything else.
Image read_image_file(const std::string& path);
bool is_supported_image(const std::string& path);

namespace zlib {

/// Raw zlib containers; encode emits stored blocks, decode handles stored,
/// fixed-Huffman and dynamic-Huffman deflate.
std::vector<uint8_t> compress_stored(const std::vector<uint8_t>& raw);
std::vector<uint8_t> decompress(const uint8_t* data, size_t len);

uint32_t crc32(const uint8_t* data, size_t len, uint32_t crc = 0);
uint32_t adler32(const uint8_t* data, size_t len);

} // namespace zlib

} // namespace jigclu
