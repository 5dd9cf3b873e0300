#include "pipeline/batch.hpp"

#include <algorithm>

#include "core/error.hpp"
#include "core/sha256.hpp"

namespace jigclu {

InputFormat input_format_from_string(const std::string& s) {
    if (s == "montage") return InputFormat::montage;
    if (s == "small_patch") return InputFormat::small_patch;
    if (s == "scaled_up") return InputFormat::scaled_up;
    throw ConfigError("unknown input format: " + s);
}

std::string to_string(InputFormat f) {
    switch (f) {
        case InputFormat::montage: return "montage";
        case InputFormat::small_patch: return "small_patch";
        case InputFormat::scaled_up: return "scaled_up";
    }
    return "?";
}

std::vector<PatchRecord> split_image(const Image& image, const GridSpec& grid,
                                     int src_image) {
    require(image.height == grid.image_side && image.width == grid.image_side,
            "split_image: image side does not match grid");
    std::vector<PatchRecord> patches;
    patches.reserve(size_t(grid.m) * size_t(grid.m));
    for (int r = 0; r < grid.m; ++r) {
        for (int c = 0; c < grid.m; ++c) {
            PatchRecord p;
            p.src_image = src_image;
            p.src_location = r * grid.m + c;
            p.pixels = crop(image, grid.starts[size_t(r)], grid.starts[size_t(c)],
                            grid.patch_side, grid.patch_side);
            patches.push_back(std::move(p));
        }
    }
    return patches;
}

PatchRecord augment_patch(const PatchRecord& patch, const AugPolicy& policy,
                          RngStream& rng) {
    PatchRecord out;
    out.src_image = patch.src_image;
    out.src_location = patch.src_location;
    out.pixels = augment_image(patch.pixels, policy.ops, policy.output_side, rng);
    return out;
}

std::vector<int> permute_patches(int count, RngStream& rng) {
    std::vector<int> perm(static_cast<size_t>(count), 0);
    for (int i = 0; i < count; ++i) perm[size_t(i)] = i;
    for (int i = count - 1; i >= 1; --i)
        std::swap(perm[size_t(i)], perm[rng.uniform_int(uint64_t(i) + 1)]);
    return perm;
}

BuiltBatch assemble_montage(const std::vector<PatchRecord>& patches,
                            const std::vector<int>& perm, int n, int m,
                            const GridSpec& grid) {
    const int total = n * m * m;
    require(int(patches.size()) == total, "assemble_montage: patch count mismatch");
    require(int(perm.size()) == total, "assemble_montage: permutation size mismatch");
    for (const auto& p : patches)
        require(p.pixels.height == grid.slot_side && p.pixels.width == grid.slot_side,
                "assemble_montage: patch pixels are not slot-sized");

    BuiltBatch batch;
    batch.format = InputFormat::montage;
    batch.n = n;
    batch.m = m;
    batch.grid = grid;
    batch.permutation = perm;
    batch.cluster_ids.resize(size_t(total));
    batch.location_ids.resize(size_t(total));
    batch.images.reserve(size_t(n));
    for (int j = 0; j < n; ++j) {
        Image montage(grid.image_side, grid.image_side);
        for (int p = 0; p < m * m; ++p) {
            const PatchRecord& patch = patches[size_t(perm[size_t(j * m * m + p)])];
            int r = p / m, c = p % m;
            paste(montage, patch.pixels, r * grid.slot_side, c * grid.slot_side);
            batch.cluster_ids[size_t(j * m * m + p)] = patch.src_image;
            batch.location_ids[size_t(j * m * m + p)] = patch.src_location;
        }
        batch.images.push_back(std::move(montage));
    }
    return batch;
}

BuiltBatch build_batch(const std::vector<Image>& images, const GridSpec& grid,
                       const AugPolicy& policy, InputFormat format, RngStream& rng) {
    const int n = int(images.size());
    require(n >= 2, "build_batch: need at least 2 images");
    for (const auto& img : images)
        require(img.height == grid.image_side && img.width == grid.image_side,
                "build_batch: image side mismatch");
    policy.ops.validate();

    const int m = grid.m;
    std::vector<PatchRecord> patches;
    patches.reserve(size_t(n) * size_t(m) * size_t(m));

    switch (policy.position) {
        case AugPosition::after_split: {
            AugPolicy per_patch = policy;
            per_patch.output_side = grid.slot_side;
            for (int i = 0; i < n; ++i) {
                auto raw = split_image(images[size_t(i)], grid, i);
                for (auto& p : raw) patches.push_back(augment_patch(p, per_patch, rng));
            }
            break;
        }
        case AugPosition::before_split: {
            // whole-image augmentation, then split and resize patches to slot
            for (int i = 0; i < n; ++i) {
                Image aug = augment_image(images[size_t(i)], policy.ops,
                                          grid.image_side, rng);
                auto raw = split_image(aug, grid, i);
                for (auto& p : raw) {
                    p.pixels = bilinear_resize(p.pixels, grid.slot_side, grid.slot_side);
                    patches.push_back(std::move(p));
                }
            }
            break;
        }
        case AugPosition::split_during_aug: {
            // crop first, split the cropped image, then photometric ops per patch
            for (int i = 0; i < n; ++i) {
                Image cropped =
                    random_resized_crop(images[size_t(i)], policy.ops, grid.image_side, rng);
                auto raw = split_image(cropped, grid, i);
                for (auto& p : raw) {
                    Image small =
                        bilinear_resize(p.pixels, grid.slot_side, grid.slot_side);
                    p.pixels = photometric_ops(small, policy.ops, rng);
                    patches.push_back(std::move(p));
                }
            }
            break;
        }
    }

    auto perm = permute_patches(n * m * m, rng);
    BuiltBatch batch = assemble_montage(patches, perm, n, m, grid);

    if (format == InputFormat::small_patch || format == InputFormat::scaled_up) {
        const int target =
            format == InputFormat::small_patch ? grid.slot_side : grid.image_side;
        std::vector<Image> separate;
        separate.reserve(size_t(n) * size_t(m) * size_t(m));
        for (int idx = 0; idx < n * m * m; ++idx) {
            const Image& px = patches[size_t(perm[size_t(idx)])].pixels;
            separate.push_back(px.height == target ? px
                                                   : bilinear_resize(px, target, target));
        }
        batch.images = std::move(separate);
        batch.format = format;
    }
    return batch;
}

std::string batch_sha256(const BuiltBatch& batch) {
    Sha256 h;
    h.update_value(int(batch.format));
    h.update_value(batch.n);
    h.update_value(batch.m);
    for (const auto& img : batch.images) {
        h.update_value(img.height);
        h.update_value(img.width);
        h.update(img.data.data(), img.data.size() * sizeof(float));
    }
    h.update(batch.cluster_ids.data(), batch.cluster_ids.size() * sizeof(int));
    h.update(batch.location_ids.data(), batch.location_ids.size() * sizeof(int));
    h.update(batch.permutation.data(), batch.permutation.size() * sizeof(int));
    return h.hex_digest();
}

} // namespace jigclu
