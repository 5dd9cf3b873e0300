#pragma once

#include <array>
#include <memory>

#include "core/image.hpp"
#include "model/backbone.hpp"
#include "model/decouple.hpp"

namespace jigclu {

/// Layout change only: vector of HWC images -> NCHW tensor, values untouched.
template <class T>
Tensor<T> images_to_tensor(const std::vector<Image>& images) {
    require(!images.empty(), "images_to_tensor: empty batch");
    const int n = int(images.size());
    const int h = images[0].height, w = images[0].width;
    Tensor<T> out({n, 3, h, w});
    for (int i = 0; i < n; ++i) {
        require(images[size_t(i)].height == h && images[size_t(i)].width == w,
                "images_to_tensor: mixed sizes");
        const float* src = images[size_t(i)].data.data();
        T* dst = out.ptr() + size_t(i) * 3 * size_t(h) * size_t(w);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                for (int c = 0; c < 3; ++c)
                    dst[(size_t(c) * size_t(h) + size_t(y)) * size_t(w) + size_t(x)] =
                        T(src[(size_t(y) * size_t(w) + size_t(x)) * 3 + size_t(c)]);
    }
    return out;
}

/// Per-channel standardization: (x - mean_c) / std_c.
template <class T>
Tensor<T> standardize_images(const Tensor<T>& images, std::array<float, 3> mean,
                             std::array<float, 3> std) {
    const int n = images.dim(0), h = images.dim(2), w = images.dim(3);
    Tensor<T> out(images.shape);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c) {
            const T mu = T(mean[size_t(c)]);
            const T inv = T(1.0f / std[size_t(c)]);
            const T* src = images.ptr() + (size_t(i) * 3 + size_t(c)) * size_t(h) * size_t(w);
            T* dst = out.ptr() + (size_t(i) * 3 + size_t(c)) * size_t(h) * size_t(w);
            for (int64_t j = 0; j < int64_t(h) * w; ++j) dst[j] = (src[j] - mu) * inv;
        }
    return out;
}

constexpr std::array<float, 3> kDefaultInputMean = {0.5f, 0.5f, 0.5f};
constexpr std::array<float, 3> kDefaultInputStd = {0.25f, 0.25f, 0.25f};

template <class T>
struct NetOutputs {
    Tensor<T> embeddings; // [P, embed_dim]
    Tensor<T> loc_logits; // [P, m*m]
};

/// The two-branch network: backbone -> decouple -> {two-layer MLP, FC}.
/// Inputs are [0,1] pixel tensors; per-channel standardization happens here.
/// The location head sees the same decoupled vectors as the MLP (the heads
/// are parallel).
template <class T>
class JigsawNetwork {
public:
    JigsawNetwork(std::unique_ptr<Backbone<T>> backbone, int m, int embed_dim)
        : backbone_(std::move(backbone)), m_(m), embed_dim_(embed_dim) {
        const int ch = backbone_->spec().channels;
        mlp1_ = Linear<T>(ch, ch);
        mlp2_ = Linear<T>(ch, embed_dim);
        loc_ = Linear<T>(ch, m * m);
    }

    void init(RngStream& rng) {
        backbone_->init(rng);
        mlp1_.init(rng);
        mlp2_.init(rng);
        loc_.init(rng);
    }

    int m() const { return m_; }
    int embed_dim() const { return embed_dim_; }
    Backbone<T>& backbone() { return *backbone_; }

    void set_input_stats(std::array<float, 3> mean, std::array<float, 3> std) {
        mean_ = mean;
        std_ = std;
    }

    /// vectors_per_image = m*m for montage input, 1 for separate-patch input.
    NetOutputs<T> forward(const Tensor<T>& images, int vectors_per_image_side, bool train) {
        Tensor<T> x = standardize(images);
        Tensor<T> fm = backbone_->forward(x, train);
        Tensor<T> pv = decouple_.forward(fm, vectors_per_image_side);
        NetOutputs<T> out;
        Tensor<T> hidden = relu_.forward(mlp1_.forward(pv, train), train);
        out.embeddings = mlp2_.forward(hidden, train);
        out.loc_logits = loc_.forward(pv, train);
        return out;
    }

    void backward(const Tensor<T>& d_embeddings, const Tensor<T>& d_loc_logits) {
        Tensor<T> g_pv = mlp1_.backward(relu_.backward(mlp2_.backward(d_embeddings)));
        Tensor<T> g_loc = loc_.backward(d_loc_logits);
        for (size_t i = 0; i < g_pv.data.size(); ++i) g_pv.data[i] += g_loc.data[i];
        backbone_->backward(decouple_.backward(g_pv));
    }

    /// Frozen-backbone features for evaluation: eval-mode backbone + global
    /// average pooling. Deterministic given parameters.
    Tensor<T> features(const Tensor<T>& images) {
        Tensor<T> x = standardize(images);
        Tensor<T> fm = backbone_->forward(x, false);
        return gap_.forward(fm, false);
    }

    /// Pooled features with gradient support (fine-tuning path).
    Tensor<T> pooled_forward(const Tensor<T>& images, bool train) {
        Tensor<T> x = standardize(images);
        return gap_.forward(backbone_->forward(x, train), train);
    }

    void pooled_backward(const Tensor<T>& g_features) {
        backbone_->backward(gap_.backward(g_features));
    }

    std::vector<ParamRef<T>> params() {
        std::vector<ParamRef<T>> out;
        backbone_->collect_params("backbone", out);
        mlp1_.collect_params("mlp.0", out);
        mlp2_.collect_params("mlp.2", out);
        loc_.collect_params("loc", out);
        return out;
    }

    std::vector<BufferRef<T>> buffers() {
        std::vector<BufferRef<T>> out;
        backbone_->collect_buffers("backbone", out);
        return out;
    }

    void zero_grads() {
        for (auto& p : params()) p.grad->zero_();
    }

private:
    Tensor<T> standardize(const Tensor<T>& images) const {
        return standardize_images(images, mean_, std_);
    }

    std::unique_ptr<Backbone<T>> backbone_;
    int m_ = 2;
    int embed_dim_ = 128;
    std::array<float, 3> mean_ = kDefaultInputMean;
    std::array<float, 3> std_ = kDefaultInputStd;
    Decouple<T> decouple_;
    Linear<T> mlp1_, mlp2_, loc_;
    ReLU<T> relu_;
    GlobalAvgPool<T> gap_;
};

} // namespace jigclu
