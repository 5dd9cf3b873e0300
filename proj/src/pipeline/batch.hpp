#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/image.hpp"
#include "core/rng.hpp"
#include "pipeline/augment.hpp"
#include "pipeline/grid.hpp"

namespace jigclu {

/// One patch cut from a source image. src_location is row-major over the
/// m x m grid, top-left = 0.
struct PatchRecord {
    int src_image = 0;
    int src_location = 0;
    Image pixels;
};

enum class InputFormat { montage, small_patch, scaled_up };

InputFormat input_format_from_string(const std::string& s);
std::string to_string(InputFormat f);

/// Output of batch construction. For montage format `images` holds n montages
/// of side L; for small_patch / scaled_up it holds n*m*m patch images (slot or
/// L sided). Labels are flattened row-major: entry j*m*m + p describes the
/// patch placed in montage j, slot p (or patch image j*m*m + p).
struct BuiltBatch {
    InputFormat format = InputFormat::montage;
    int n = 0;
    int m = 0;
    GridSpec grid;
    uint64_t batch_seed = 0;
    std::vector<Image> images;
    std::vector<int> cluster_ids;   // source image per slot, n*m*m
    std::vector<int> location_ids;  // source grid location per slot, n*m*m
    std::vector<int> permutation;   // bijection on [0, n*m*m)
    std::vector<int> source_indices; // dataset indices of the n originals (optional)

    int patch_count() const { return n * m * m; }
};

/// Cuts an image into m*m overlapping patches of side grid.patch_side;
/// patch (r,c) covers rows [starts[r], starts[r]+s) and the analogous columns.
std::vector<PatchRecord> split_image(const Image& image, const GridSpec& grid,
                                     int src_image);

/// Augments one patch down to slot size. Labels are untouched.
PatchRecord augment_patch(const PatchRecord& patch, const AugPolicy& policy,
                          RngStream& rng);

/// Uniform random bijection on [0, count) via Fisher-Yates.
std::vector<int> permute_patches(int count, RngStream& rng);

/// Stitches montages: montage j, slot p (row-major) receives
/// patches[perm[j*m*m + p]]; labels record that patch's source image and
/// location. Slot pixels are a pure copy of the patch pixels.
BuiltBatch assemble_montage(const std::vector<PatchRecord>& patches,
                            const std::vector<int>& perm, int n, int m,
                            const GridSpec& grid);

/// Full batch construction: split, per-patch augmentation (position per
/// policy), cross-image permutation, then assembly in the requested input
/// format. Pure given (images, grid, policy, rng state).
BuiltBatch build_batch(const std::vector<Image>& images, const GridSpec& grid,
                       const AugPolicy& policy, InputFormat format, RngStream& rng);

/// Canonical digest over pixels and labels; identical seeds must give
/// identical digests.
std::string batch_sha256(const BuiltBatch& batch);

} // namespace jigclu
