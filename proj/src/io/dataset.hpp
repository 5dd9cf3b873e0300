#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/image.hpp"

namespace jigclu {

struct DatasetManifest {
    std::string name;
    std::string source_format;
    int image_side = 0;
    std::vector<std::string> class_names;
    std::map<std::string, int> split_counts; // e.g. {"train": 50000, "test": 10000}
};

enum class CifarVariant { cifar10, cifar100 };
enum class Split { train, test };

/// In-memory labelled image set. Pixels stay as the decoded uint8 payload;
/// images are materialized as [0,1] floats on access, so concurrent readers
/// share nothing mutable.
class Dataset {
public:
    size_t size() const { return labels_.size(); }
    int side() const { return side_; }
    int num_classes() const { return int(manifest_.class_names.size()); }
    const DatasetManifest& manifest() const { return manifest_; }

    Image image(size_t index) const;
    int label(size_t index) const { return labels_[index]; }

    /// Images for a set of dataset indices (used by batch construction).
    std::vector<Image> images(const std::vector<size_t>& indices) const;

    /// Bit-exact decode of the canonical CIFAR binary layout. CIFAR-10
    /// records are 3073 bytes (label + 3072 channel-major pixels), CIFAR-100
    /// records are 3074 (coarse + fine labels). Any whole number of records
    /// is accepted; partial records raise DataError.
    static Dataset load_cifar_binary(const std::string& path, CifarVariant variant,
                                     Split split);

    /// ImageNet-style folder layout: one subdirectory per class, class index
    /// by sorted subdirectory name. Images are aspect-preserving resized and
    /// center-cropped to `side`. Non-image files are skipped with a warning.
    static Dataset load_image_folder(const std::string& path, int side);

    /// Procedural dataset with per-class structure (oriented sinusoids plus
    /// noise); enough signal for smoke training and probe tests.
    static Dataset synthetic(int count, int side, int classes, uint64_t seed);

    /// Copy with every image bilinearly resized to a new side (used when the
    /// task side differs from the stored side, e.g. m=3 ablations).
    Dataset resized(int new_side) const;

private:
    int side_ = 0;
    std::vector<uint8_t> pixels_; // size() * side * side * 3, HWC
    std::vector<int> labels_;
    DatasetManifest manifest_;
};

/// Loads the dataset described by a config section (format + path + side).
Dataset load_dataset(const std::string& format, const std::string& path, int side,
                     Split split);

} // namespace jigclu
