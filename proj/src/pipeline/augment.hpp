#pragma once

#include <string>

#include "core/image.hpp"
#include "core/rng.hpp"

namespace jigclu {

enum class AugPosition { before_split, split_during_aug, after_split };

AugPosition aug_position_from_string(const std::string& s);
std::string to_string(AugPosition p);

/// Baseline augmentation op list and parameters. Defaults follow the common
/// contrastive-pretraining recipe: random resized crop (scale 0.2-1.0, aspect
/// 3/4-4/3), color jitter 0.4/0.4/0.4/0.1 at p=0.8, grayscale p=0.2, gaussian
/// blur sigma 0.1-2.0 at p=0.5, horizontal flip p=0.5, applied in that order.
struct AugOps {
    bool crop_enabled = true;
    double crop_scale_lo = 0.2;
    double crop_scale_hi = 1.0;
    double crop_aspect_lo = 3.0 / 4.0;
    double crop_aspect_hi = 4.0 / 3.0;

    double flip_prob = 0.5;

    double jitter_prob = 0.8;
    double jitter_brightness = 0.4;
    double jitter_contrast = 0.4;
    double jitter_saturation = 0.4;
    double jitter_hue = 0.1;

    double grayscale_prob = 0.2;

    double blur_prob = 0.5;
    double blur_sigma_lo = 0.1;
    double blur_sigma_hi = 2.0;

    static AugOps identity(); // everything disabled, pure resize
    void validate() const;    // throws ConfigError on out-of-range parameters
};

struct AugPolicy {
    AugPosition position = AugPosition::after_split;
    AugOps ops;
    int output_side = 0;

    static AugPolicy identity(int output_side);
};

/// Applies the full op list to one image and resizes to out_side. All
/// randomness comes from `rng`, so identical (input, ops, rng state) give a
/// bit-identical result.
Image augment_image(const Image& src, const AugOps& ops, int out_side, RngStream& rng);

/// The crop stage alone (used by the split_during_aug position, where the
/// crop happens on the whole image before splitting).
Image random_resized_crop(const Image& src, const AugOps& ops, int out_side,
                          RngStream& rng);

/// The post-crop stages alone (jitter, grayscale, blur, flip).
Image photometric_ops(const Image& src, const AugOps& ops, RngStream& rng);

Image gaussian_blur(const Image& src, double sigma);

} // namespace jigclu
