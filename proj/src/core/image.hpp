#pragma once

#include <cstdint>
#include <vector>

namespace jigclu {

/// Decoded image: interleaved RGB floats in [0,1], row-major HWC.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<float> data; // height * width * 3

    Image() = default;
    Image(int h, int w) : width(w), height(h), data(size_t(h) * size_t(w) * 3, 0.0f) {}

    float& at(int y, int x, int c) {
        return data[(size_t(y) * size_t(width) + size_t(x)) * 3 + size_t(c)];
    }
    float at(int y, int x, int c) const {
        return data[(size_t(y) * size_t(width) + size_t(x)) * 3 + size_t(c)];
    }

    static Image constant(int h, int w, float r, float g, float b);

    bool same_pixels(const Image& other) const; // bit-exact comparison
};

/// Bilinear resize with half-pixel-center sampling
/// (src = (dst + 0.5) * in/out - 0.5, edges clamped).
Image bilinear_resize(const Image& src, int out_h, int out_w);

/// Copy the h x w window whose top-left corner is (y0, x0). Must be in bounds.
Image crop(const Image& src, int y0, int x0, int h, int w);

/// Paste src into dst with top-left corner at (y0, x0). Pure copy, so pasted
/// pixels are bit-identical to the source.
void paste(Image& dst, const Image& src, int y0, int x0);

Image hflip(const Image& src);

/// Quantize to 8-bit (round, clamp). Exact inverse of from_bytes for values
/// that originated as v/255.
std::vector<uint8_t> to_bytes(const Image& img);
Image from_bytes(const uint8_t* rgb, int h, int w);

} // namespace jigclu
