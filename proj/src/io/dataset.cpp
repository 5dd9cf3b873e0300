#include "io/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "core/error.hpp"
#include "core/png.hpp"
#include "core/rng.hpp"

namespace jigclu {

namespace fs = std::filesystem;

Image Dataset::image(size_t index) const {
    require_data(index < size(), "dataset: index out of range");
    const size_t stride = size_t(side_) * size_t(side_) * 3;
    return from_bytes(&pixels_[index * stride], side_, side_);
}

std::vector<Image> Dataset::images(const std::vector<size_t>& indices) const {
    std::vector<Image> out;
    out.reserve(indices.size());
    for (size_t i : indices) out.push_back(image(i));
    return out;
}

namespace {

std::vector<uint8_t> read_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    require_data(f.good(), "dataset: cannot open " + path);
    f.seekg(0, std::ios::end);
    const size_t len = size_t(f.tellg());
    f.seekg(0);
    std::vector<uint8_t> buf(len);
    f.read(reinterpret_cast<char*>(buf.data()), long(len));
    require_data(f.good(), "dataset: short read on " + path);
    return buf;
}

std::vector<std::string> read_meta_names(const std::string& path) {
    std::ifstream f(path);
    std::vector<std::string> names;
    std::string line;
    while (std::getline(f, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) names.push_back(line);
    }
    return names;
}

// channel-major CIFAR record body -> interleaved HWC
void decode_cifar_pixels(const uint8_t* body, uint8_t* out_hwc) {
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 1024; ++i)
            out_hwc[size_t(i) * 3 + size_t(c)] = body[size_t(c) * 1024 + size_t(i)];
}

} // namespace

Dataset Dataset::load_cifar_binary(const std::string& path, CifarVariant variant,
                                   Split split) {
    const bool c100 = variant == CifarVariant::cifar100;
    const size_t record = c100 ? 3074 : 3073;

    std::vector<std::string> files;
    if (c100) {
        files.push_back((fs::path(path) / (split == Split::train ? "train.bin" : "test.bin")).string());
    } else if (split == Split::train) {
        for (int i = 1; i <= 5; ++i)
            files.push_back((fs::path(path) / ("data_batch_" + std::to_string(i) + ".bin")).string());
    } else {
        files.push_back((fs::path(path) / "test_batch.bin").string());
    }

    Dataset d;
    d.side_ = 32;
    for (const auto& file : files) {
        auto buf = read_binary(file);
        require_data(!buf.empty(), "dataset: empty file " + file);
        require_data(buf.size() % record == 0,
                     "dataset: " + file + " is truncated (size " +
                         std::to_string(buf.size()) + " is not a multiple of " +
                         std::to_string(record) + ")");
        const size_t n = buf.size() / record;
        const size_t stride = 32 * 32 * 3;
        size_t base = d.pixels_.size();
        d.pixels_.resize(base + n * stride);
        for (size_t i = 0; i < n; ++i) {
            const uint8_t* rec = &buf[i * record];
            int label = c100 ? rec[1] : rec[0]; // cifar100: coarse then fine
            require_data(label < (c100 ? 100 : 10), "dataset: label out of range in " + file);
            d.labels_.push_back(label);
            decode_cifar_pixels(rec + (c100 ? 2 : 1), &d.pixels_[base + i * stride]);
        }
    }

    const int classes = c100 ? 100 : 10;
    auto meta = read_meta_names(
        (fs::path(path) / (c100 ? "fine_label_names.txt" : "batches.meta.txt")).string());
    d.manifest_.name = c100 ? "cifar100" : "cifar10";
    d.manifest_.source_format = d.manifest_.name;
    d.manifest_.image_side = 32;
    for (int i = 0; i < classes; ++i)
        d.manifest_.class_names.push_back(int(meta.size()) >= classes ? meta[size_t(i)]
                                                                      : "class_" + std::to_string(i));
    d.manifest_.split_counts[split == Split::train ? "train" : "test"] = int(d.size());
    return d;
}

Dataset Dataset::load_image_folder(const std::string& path, int side) {
    require_data(fs::is_directory(path), "dataset: not a directory: " + path);
    std::vector<std::string> class_dirs;
    for (const auto& entry : fs::directory_iterator(path))
        if (entry.is_directory()) class_dirs.push_back(entry.path().filename().string());
    std::sort(class_dirs.begin(), class_dirs.end()); // deterministic class indexing
    require_data(!class_dirs.empty(), "dataset: no class subdirectories in " + path);

    Dataset d;
    d.side_ = side;
    d.manifest_.name = fs::path(path).filename().string();
    d.manifest_.source_format = "image_folder";
    d.manifest_.image_side = side;
    d.manifest_.class_names = class_dirs;

    const size_t stride = size_t(side) * size_t(side) * 3;
    for (size_t cls = 0; cls < class_dirs.size(); ++cls) {
        std::vector<std::string> files;
        for (const auto& entry : fs::directory_iterator(fs::path(path) / class_dirs[cls]))
            if (entry.is_regular_file()) files.push_back(entry.path().string());
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            if (!is_supported_image(file)) {
                std::fprintf(stderr, "dataset: skipping non-image file %s\n", file.c_str());
                continue;
            }
            Image img = read_image_file(file);
            // resize the shorter edge to `side`, then center-crop
            int h = img.height, w = img.width;
            int rh, rw;
            if (h <= w) {
                rh = side;
                rw = std::max(side, int(std::lround(double(w) * side / h)));
            } else {
                rw = side;
                rh = std::max(side, int(std::lround(double(h) * side / w)));
            }
            img = bilinear_resize(img, rh, rw);
            img = crop(img, (rh - side) / 2, (rw - side) / 2, side, side);
            auto bytes = to_bytes(img);
            size_t base = d.pixels_.size();
            d.pixels_.resize(base + stride);
            std::copy(bytes.begin(), bytes.end(), d.pixels_.begin() + long(base));
            d.labels_.push_back(int(cls));
        }
    }
    require_data(!d.labels_.empty(), "dataset: no decodable images under " + path);
    d.manifest_.split_counts["train"] = int(d.size());
    return d;
}

Dataset Dataset::synthetic(int count, int side, int classes, uint64_t seed) {
    Dataset d;
    d.side_ = side;
    d.manifest_.name = "synthetic";
    d.manifest_.source_format = "synthetic";
    d.manifest_.image_side = side;
    for (int i = 0; i < classes; ++i)
        d.manifest_.class_names.push_back("class_" + std::to_string(i));
    d.manifest_.split_counts["train"] = count;

    const size_t stride = size_t(side) * size_t(side) * 3;
    d.pixels_.resize(size_t(count) * stride);
    auto rng = RngStream::derive(seed, {kTagSynth});
    for (int i = 0; i < count; ++i) {
        const int cls = i % classes;
        d.labels_.push_back(cls);
        const double theta = M_PI * double(cls) / double(classes);
        const double freq = 2.0 + 1.5 * (cls % 3);
        const double phase = rng.uniform(0, 2 * M_PI);
        const double cx = rng.uniform(0.3, 0.7) * side;
        const double cy = rng.uniform(0.3, 0.7) * side;
        double tint[3] = {0.6 + 0.4 * std::sin(cls * 1.7), 0.6 + 0.4 * std::sin(cls * 2.3 + 1),
                          0.6 + 0.4 * std::sin(cls * 3.1 + 2)};
        uint8_t* px = &d.pixels_[size_t(i) * stride];
        for (int y = 0; y < side; ++y)
            for (int x = 0; x < side; ++x) {
                const double u = (x - cx) / side, v = (y - cy) / side;
                const double t = u * std::cos(theta) + v * std::sin(theta);
                const double wave = 0.5 + 0.45 * std::sin(2 * M_PI * freq * t + phase);
                const double radial = std::exp(-4.0 * (u * u + v * v));
                for (int c = 0; c < 3; ++c) {
                    double val = wave * std::abs(tint[c]) * (0.4 + 0.6 * radial) +
                                 0.08 * rng.normal();
                    px[(size_t(y) * size_t(side) + size_t(x)) * 3 + size_t(c)] =
                        uint8_t(std::lround(std::clamp(val, 0.0, 1.0) * 255.0));
                }
            }
    }
    return d;
}

Dataset Dataset::resized(int new_side) const {
    if (new_side == side_) return *this;
    Dataset d;
    d.side_ = new_side;
    d.labels_ = labels_;
    d.manifest_ = manifest_;
    d.manifest_.image_side = new_side;
    const size_t stride = size_t(new_side) * size_t(new_side) * 3;
    d.pixels_.resize(size() * stride);
    for (size_t i = 0; i < size(); ++i) {
        auto img = bilinear_resize(image(i), new_side, new_side);
        auto bytes = to_bytes(img);
        std::copy(bytes.begin(), bytes.end(), d.pixels_.begin() + long(i * stride));
    }
    return d;
}

Dataset load_dataset(const std::string& format, const std::string& path, int side,
                     Split split) {
    if (format == "cifar10" || format == "cifar100") {
        auto d = Dataset::load_cifar_binary(
            path, format == "cifar10" ? CifarVariant::cifar10 : CifarVariant::cifar100,
            split);
        return side == 32 ? d : d.resized(side);
    }
    if (format == "image_folder") {
        auto base = fs::path(path);
        auto split_dir = base / (split == Split::train ? "train" : "test");
        return Dataset::load_image_folder(
            fs::is_directory(split_dir) ? split_dir.string() : path, side);
    }
    if (format == "synthetic") {
        // train and test draw from disjoint streams
        return Dataset::synthetic(split == Split::train ? 512 : 256, side, 8,
                                  split == Split::train ? 11 : 12);
    }
    throw ConfigError("dataset: unknown format " + format);
}

} // namespace jigclu
