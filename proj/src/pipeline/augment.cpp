#include "pipeline/augment.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace jigclu {

AugPosition aug_position_from_string(const std::string& s) {
    if (s == "before_split") return AugPosition::before_split;
    if (s == "split_during_aug") return AugPosition::split_during_aug;
    if (s == "after_split") return AugPosition::after_split;
    throw ConfigError("unknown aug position: " + s);
}

std::string to_string(AugPosition p) {
    switch (p) {
        case AugPosition::before_split: return "before_split";
        case AugPosition::split_during_aug: return "split_during_aug";
        case AugPosition::after_split: return "after_split";
    }
    return "?";
}

AugOps AugOps::identity() {
    AugOps ops;
    ops.crop_enabled = false;
    ops.flip_prob = 0.0;
    ops.jitter_prob = 0.0;
    ops.grayscale_prob = 0.0;
    ops.blur_prob = 0.0;
    return ops;
}

void AugOps::validate() const {
    require_config(crop_scale_lo > 0.0 && crop_scale_lo <= crop_scale_hi &&
                       crop_scale_hi <= 1.0,
                   "aug: crop scale range invalid");
    require_config(crop_aspect_lo > 0.0 && crop_aspect_lo <= crop_aspect_hi,
                   "aug: crop aspect range invalid");
    for (double p : {flip_prob, jitter_prob, grayscale_prob, blur_prob})
        require_config(p >= 0.0 && p <= 1.0, "aug: probability outside [0,1]");
    require_config(jitter_brightness >= 0 && jitter_contrast >= 0 &&
                       jitter_saturation >= 0 && jitter_hue >= 0 && jitter_hue <= 0.5,
                   "aug: jitter strengths invalid");
    require_config(blur_sigma_lo > 0.0 && blur_sigma_lo <= blur_sigma_hi,
                   "aug: blur sigma range invalid");
}

AugPolicy AugPolicy::identity(int output_side) {
    AugPolicy p;
    p.position = AugPosition::after_split;
    p.ops = AugOps::identity();
    p.output_side = output_side;
    return p;
}

namespace {

float luma(float r, float g, float b) {
    return 0.299f * r + 0.587f * g + 0.114f * b;
}

void clamp01(Image& img) {
    for (auto& v : img.data) v = std::clamp(v, 0.0f, 1.0f);
}

void adjust_brightness(Image& img, float f) {
    for (auto& v : img.data) v *= f;
    clamp01(img);
}

void adjust_contrast(Image& img, float f) {
    double sum = 0.0;
    for (int i = 0; i < img.height * img.width; ++i)
        sum += luma(img.data[size_t(i) * 3], img.data[size_t(i) * 3 + 1],
                    img.data[size_t(i) * 3 + 2]);
    float mean = float(sum / double(img.height * img.width));
    for (auto& v : img.data) v = f * v + (1.0f - f) * mean;
    clamp01(img);
}

void adjust_saturation(Image& img, float f) {
    for (int i = 0; i < img.height * img.width; ++i) {
        float* p = &img.data[size_t(i) * 3];
        float gray = luma(p[0], p[1], p[2]);
        for (int c = 0; c < 3; ++c) p[c] = f * p[c] + (1.0f - f) * gray;
    }
    clamp01(img);
}

// hue shift expressed as a fraction of a full turn
void adjust_hue(Image& img, float shift) {
    for (int i = 0; i < img.height * img.width; ++i) {
        float* p = &img.data[size_t(i) * 3];
        float r = p[0], g = p[1], b = p[2];
        float mx = std::max({r, g, b}), mn = std::min({r, g, b});
        float d = mx - mn;
        float h = 0.0f;
        if (d > 0.0f) {
            if (mx == r)
                h = std::fmod((g - b) / d, 6.0f);
            else if (mx == g)
                h = (b - r) / d + 2.0f;
            else
                h = (r - g) / d + 4.0f;
            h /= 6.0f;
            if (h < 0.0f) h += 1.0f;
        }
        float s = mx > 0.0f ? d / mx : 0.0f;
        float v = mx;
        h = std::fmod(h + shift + 1.0f, 1.0f);
        float hh = h * 6.0f;
        int sector = int(hh) % 6;
        float frac = hh - float(int(hh));
        float pl = v * (1.0f - s);
        float q = v * (1.0f - s * frac);
        float t = v * (1.0f - s * (1.0f - frac));
        switch (sector) {
            case 0: r = v; g = t; b = pl; break;
            case 1: r = q; g = v; b = pl; break;
            case 2: r = pl; g = v; b = t; break;
            case 3: r = pl; g = q; b = v; break;
            case 4: r = t; g = pl; b = v; break;
            default: r = v; g = pl; b = q; break;
        }
        p[0] = r;
        p[1] = g;
        p[2] = b;
    }
}

void to_grayscale(Image& img) {
    for (int i = 0; i < img.height * img.width; ++i) {
        float* p = &img.data[size_t(i) * 3];
        float gray = luma(p[0], p[1], p[2]);
        p[0] = p[1] = p[2] = gray;
    }
}

void color_jitter(Image& img, const AugOps& ops, RngStream& rng) {
    // sub-ops in a random order, torchvision style
    int order[4] = {0, 1, 2, 3};
    for (int i = 3; i >= 1; --i)
        std::swap(order[i], order[rng.uniform_int(uint64_t(i) + 1)]);
    for (int k = 0; k < 4; ++k) {
        switch (order[k]) {
            case 0: {
                float f = float(rng.uniform(std::max(0.0, 1.0 - ops.jitter_brightness),
                                            1.0 + ops.jitter_brightness));
                adjust_brightness(img, f);
                break;
            }
            case 1: {
                float f = float(rng.uniform(std::max(0.0, 1.0 - ops.jitter_contrast),
                                            1.0 + ops.jitter_contrast));
                adjust_contrast(img, f);
                break;
            }
            case 2: {
                float f = float(rng.uniform(std::max(0.0, 1.0 - ops.jitter_saturation),
                                            1.0 + ops.jitter_saturation));
                adjust_saturation(img, f);
                break;
            }
            default: {
                float shift = float(rng.uniform(-ops.jitter_hue, ops.jitter_hue));
                adjust_hue(img, shift);
                break;
            }
        }
    }
}

} // namespace

Image gaussian_blur(const Image& src, double sigma) {
    int radius = std::max(1, int(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(static_cast<size_t>(2 * radius + 1), {});
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        double w = std::exp(-0.5 * (double(i) * double(i)) / (sigma * sigma));
        kernel[size_t(i + radius)] = w;
        sum += w;
    }
    for (auto& w : kernel) w /= sum;

    auto clampi = [](int v, int hi) { return std::clamp(v, 0, hi); };
    Image tmp(src.height, src.width);
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x)
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k)
                    acc += kernel[size_t(k + radius)] *
                           src.at(y, clampi(x + k, src.width - 1), c);
                tmp.at(y, x, c) = float(acc);
            }
    Image dst(src.height, src.width);
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x)
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k)
                    acc += kernel[size_t(k + radius)] *
                           tmp.at(clampi(y + k, src.height - 1), x, c);
                dst.at(y, x, c) = float(acc);
            }
    return dst;
}

Image random_resized_crop(const Image& src, const AugOps& ops, int out_side,
                          RngStream& rng) {
    if (!ops.crop_enabled) return bilinear_resize(src, out_side, out_side);

    const double area = double(src.height) * double(src.width);
    {
        // reject ranges that can produce sub-pixel windows (smallest dimension
        // over the scale x aspect range)
        double worst_aspect = std::min(ops.crop_aspect_lo, 1.0 / ops.crop_aspect_hi);
        double min_side = std::sqrt(ops.crop_scale_lo * area * worst_aspect);
        require_config(min_side >= 1.0, "aug: crop scale range produces < 1 px window");
    }
    int h = -1, w = -1;
    for (int attempt = 0; attempt < 10; ++attempt) {
        double target = rng.uniform(ops.crop_scale_lo, ops.crop_scale_hi) * area;
        double aspect = std::exp(
            rng.uniform(std::log(ops.crop_aspect_lo), std::log(ops.crop_aspect_hi)));
        int cw = int(std::lround(std::sqrt(target * aspect)));
        int ch = int(std::lround(std::sqrt(target / aspect)));
        if (cw >= 1 && ch >= 1 && cw <= src.width && ch <= src.height) {
            w = cw;
            h = ch;
            break;
        }
    }
    int y0, x0;
    if (w < 0) {
        // fallback: largest centered square
        w = h = std::min(src.width, src.height);
        y0 = (src.height - h) / 2;
        x0 = (src.width - w) / 2;
    } else {
        y0 = int(rng.uniform_int(uint64_t(src.height - h) + 1));
        x0 = int(rng.uniform_int(uint64_t(src.width - w) + 1));
    }
    return bilinear_resize(crop(src, y0, x0, h, w), out_side, out_side);
}

Image photometric_ops(const Image& src, const AugOps& ops, RngStream& rng) {
    Image img = src;
    if (ops.jitter_prob > 0.0 && rng.uniform() < ops.jitter_prob)
        color_jitter(img, ops, rng);
    if (ops.grayscale_prob > 0.0 && rng.uniform() < ops.grayscale_prob)
        to_grayscale(img);
    if (ops.blur_prob > 0.0 && rng.uniform() < ops.blur_prob) {
        double sigma = rng.uniform(ops.blur_sigma_lo, ops.blur_sigma_hi);
        img = gaussian_blur(img, sigma);
    }
    if (ops.flip_prob > 0.0 && rng.uniform() < ops.flip_prob) img = hflip(img);
    return img;
}

Image augment_image(const Image& src, const AugOps& ops, int out_side, RngStream& rng) {
    Image img = random_resized_crop(src, ops, out_side, rng);
    return photometric_ops(img, ops, rng);
}

} // namespace jigclu
