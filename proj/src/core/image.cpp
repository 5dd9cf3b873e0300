#include "core/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "core/error.hpp"

namespace jigclu {

Image Image::constant(int h, int w, float r, float g, float b) {
    Image img(h, w);
    for (int i = 0; i < h * w; ++i) {
        img.data[size_t(i) * 3 + 0] = r;
        img.data[size_t(i) * 3 + 1] = g;
        img.data[size_t(i) * 3 + 2] = b;
    }
    return img;
}

bool Image::same_pixels(const Image& other) const {
    return width == other.width && height == other.height &&
           std::memcmp(data.data(), other.data.data(), data.size() * sizeof(float)) == 0;
}

Image bilinear_resize(const Image& src, int out_h, int out_w) {
    require(out_h >= 1 && out_w >= 1, "bilinear_resize: non-positive output size");
    if (out_h == src.height && out_w == src.width) return src;

    Image dst(out_h, out_w);
    const double sy = double(src.height) / double(out_h);
    const double sx = double(src.width) / double(out_w);
    for (int oy = 0; oy < out_h; ++oy) {
        double fy = (oy + 0.5) * sy - 0.5;
        int y0 = int(std::floor(fy));
        double wy = fy - y0;
        int y1 = std::min(y0 + 1, src.height - 1);
        y0 = std::clamp(y0, 0, src.height - 1);
        for (int ox = 0; ox < out_w; ++ox) {
            double fx = (ox + 0.5) * sx - 0.5;
            int x0 = int(std::floor(fx));
            double wx = fx - x0;
            int x1 = std::min(x0 + 1, src.width - 1);
            x0 = std::clamp(x0, 0, src.width - 1);
            for (int c = 0; c < 3; ++c) {
                double top = (1.0 - wx) * src.at(y0, x0, c) + wx * src.at(y0, x1, c);
                double bot = (1.0 - wx) * src.at(y1, x0, c) + wx * src.at(y1, x1, c);
                dst.at(oy, ox, c) = float((1.0 - wy) * top + wy * bot);
            }
        }
    }
    return dst;
}

Image crop(const Image& src, int y0, int x0, int h, int w) {
    require(y0 >= 0 && x0 >= 0 && h >= 1 && w >= 1 && y0 + h <= src.height &&
                x0 + w <= src.width,
            "crop: window out of bounds");
    Image dst(h, w);
    for (int y = 0; y < h; ++y) {
        const float* s = &src.data[(size_t(y0 + y) * size_t(src.width) + size_t(x0)) * 3];
        float* d = &dst.data[size_t(y) * size_t(w) * 3];
        std::memcpy(d, s, size_t(w) * 3 * sizeof(float));
    }
    return dst;
}

void paste(Image& dst, const Image& src, int y0, int x0) {
    require(y0 >= 0 && x0 >= 0 && y0 + src.height <= dst.height &&
                x0 + src.width <= dst.width,
            "paste: window out of bounds");
    for (int y = 0; y < src.height; ++y) {
        float* d = &dst.data[(size_t(y0 + y) * size_t(dst.width) + size_t(x0)) * 3];
        const float* s = &src.data[size_t(y) * size_t(src.width) * 3];
        std::memcpy(d, s, size_t(src.width) * 3 * sizeof(float));
    }
}

Image hflip(const Image& src) {
    Image dst(src.height, src.width);
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x)
            for (int c = 0; c < 3; ++c)
                dst.at(y, x, c) = src.at(y, src.width - 1 - x, c);
    return dst;
}

std::vector<uint8_t> to_bytes(const Image& img) {
    std::vector<uint8_t> out(img.data.size());
    for (size_t i = 0; i < img.data.size(); ++i) {
        float v = std::clamp(img.data[i], 0.0f, 1.0f);
        out[i] = uint8_t(std::lround(v * 255.0f));
    }
    return out;
}

Image from_bytes(const uint8_t* rgb, int h, int w) {
    Image img(h, w);
    for (size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = float(rgb[i]) / 255.0f;
    return img;
}

} // namespace jigclu
